#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace satfed::par {

enum class Mode { Serial, OpenMP };

// Process-wide default execution mode. The CLI flips this to Serial with
// --serial; without OpenMP support the OpenMP mode degrades to the serial
// loop, so results never depend on how the project was built.
inline Mode& default_mode() {
  static Mode mode = Mode::OpenMP;
  return mode;
}

inline bool openmp_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Runs body(i) for i in [0, n). Every iteration must write only its own
// output slots; under that contract the serial and OpenMP paths produce
// bit-identical results, which the test suite checks.
template <typename F>
void for_index(std::size_t n, Mode mode, F&& body) {
#ifdef _OPENMP
  if (mode == Mode::OpenMP) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)mode;
#endif
  for (std::size_t i = 0; i < n; ++i) {
    body(i);
  }
}

}  // namespace satfed::par
