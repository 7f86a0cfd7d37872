#pragma once

#include <functional>

namespace radscat {

// Thread-count hint shared by all modules. 0 or 1 means sequential.
void set_thread_hint(int n);
int thread_hint();

// Calls fn(i) for i in [0, n) using a static block partition. Each index is
// handled by exactly one worker, so results never depend on the thread count
// as long as fn(i) writes only to slot i.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace radscat
