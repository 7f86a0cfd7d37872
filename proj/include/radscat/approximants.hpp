#pragma once

#include <string>

#include "radscat/angular.hpp"
#include "radscat/radiation_field.hpp"

namespace radscat {

enum class Approximant { psi0, psi01, psi_e, dt_psi0, dt_psi1, dt_psi_e, dt_psi01 };

Approximant parse_approximant(const std::string& name);

// Cutoff chi(<t-r>/r) and the geometric factors shared by every mode at (t, r).
struct ConePoint {
  double t, r;
  double tau;   // t - r
  double p;     // <t - r>
  double s;     // p / r
  double chi, dchi, ddchi;
  ConePoint(double t, double r);
  // true when chi and its derivatives vanish
  bool outside() const { return chi == 0.0 && dchi == 0.0 && ddchi == 0.0; }
};

// Mode coefficients of the requested approximant at (t, r), r > 0.
ModeVector eval_approximant(const RadiationField& F0, const RadiationField& F1, double M, Approximant which,
                            double t, double r);

// Box psi01 per mode from the closed-form expression (cutoff derivative
// terms plus the -l(l+1) F1 chi / r^4 remainder).
ModeVector residual_box_psi01(const RadiationField& F0, const RadiationField& F1, double t, double r);

// Single-mode kernels; f0 or f1 may be null. j0, j1 are jets of order >= 1 in q = r - t.
double box_psi01_mode(int l, const ConePoint& cp, const Jet* j0, const Jet* j1);
double psi01_mode(const ConePoint& cp, const Jet* j0, const Jet* j1);
double dt_psi01_mode(const ConePoint& cp, const Jet* j0, const Jet* j1);

// l = 0 mode of psi_e and of its time derivative.
double psi_e_mode(double M, double t, double r);
double dt_psi_e_mode(double M, double t, double r);

}  // namespace radscat
