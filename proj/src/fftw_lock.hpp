#pragma once

#include <mutex>

namespace corrca::detail {

/// FFTW plan creation/destruction is not thread-safe; every planner call in
/// the library goes through this lock. Plan execution needs no lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace corrca::detail
