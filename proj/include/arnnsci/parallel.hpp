#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <string>

namespace arnnsci {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Caps the worker count from ARNNSCI_THREADS when set.
inline void apply_thread_env() {
  if (const char* env = std::getenv("ARNNSCI_THREADS")) {
    try {
      set_threads(std::stoi(env));
    } catch (...) {
    }
  }
}

}  // namespace arnnsci
