#pragma once

#include <mutex>

namespace kpzlab::detail {

// FFTW's planner keeps global state; every plan creation and destruction in
// the library goes through this one lock.
std::mutex& fftw_planner_mutex();

}  // namespace kpzlab::detail
