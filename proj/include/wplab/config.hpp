#pragma once

#include <cstddef>

namespace wplab {

// Global numeric knobs. Every degeneracy test in the library reads these,
// so one assignment retunes the whole stack.
struct Tolerances {
  double degeneracy = 1e-10;  // trace trichotomy, asymptotic-line detection
  double matrix_eq = 1e-8;    // entrywise PSL(2,R) equality for dedup
};

Tolerances& tolerances();

// Enumeration and series-truncation knobs shared by group-enum and pairings.
struct EnumConfig {
  int depth = 10;                   // word-length radius of the group ball
  int max_depth = 16;               // hard ceiling
  double u_cutoff = 1e6;            // omit cosets with u above this (tail ~ 2/(3u^2))
  double shell_tolerance = 1e-6;    // last-shell increment below this => stabilized
  std::size_t memory_budget_bytes = std::size_t(3) << 30;
  int threads = 0;                  // 0 = resolve from WPLAB_THREADS / hardware
};

// Finite-difference steps used by the tensor layer.
struct StepConfig {
  double first = 1e-4;   // first derivatives (length differentials)
  double second = 1e-2;  // second derivatives / metric grids
};

int resolve_threads(int requested);

}  // namespace wplab
