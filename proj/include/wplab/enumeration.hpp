#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "wplab/surface.hpp"

namespace wplab {

// Ball enumeration would exceed the configured memory budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A double-coset scan hit u = 1: a lift of beta shares an endpoint with the
// alpha axis, which signals a degenerate or non-discrete configuration.
struct AsymptoticCosetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BallElement {
  MoebiusMap m;
  std::int32_t parent = -1;  // index of the length-(d-1) prefix
  std::int8_t letter = 0;    // last letter (signed generator index)
  std::uint8_t depth = 0;
};

// All distinct group elements of word length <= depth, in BFS order.
// Free groups are exact by reduced words; relator groups are deduplicated by
// sign-canonical matrix proximity.
struct Ball {
  std::vector<BallElement> elems;
  std::vector<std::size_t> shell_begin;  // shell_begin[d] = first index of depth d
  int depth = 0;
  bool exact_free = true;

  std::size_t size_at_depth(int d) const {
    return shell_begin[static_cast<std::size_t>(d) + 1];
  }
  Letters word_of(std::size_t i) const;
};

struct BallCache {
  std::mutex mu;
  std::shared_ptr<const Ball> ball;
};

// Memoized on g.ball_cache: returns a ball of at least the requested depth.
std::shared_ptr<const Ball> enumerate_ball(const SurfaceGroup& g, int depth,
                                           const EnumConfig& cfg = {});

struct TruncationReport {
  int depth = 0;
  std::size_t coset_count = 0;
  double last_shell = 0;   // newest-shell contribution of the consumer's summand
  bool stabilized = false;
  bool determined = true;  // false when a single-depth series cannot decide
  std::size_t omitted_beyond_cutoff = 0;
  double tail_estimate = 0;
};

struct DoubleCosetRep {
  Letters word;          // power-stripped representative of minimal depth
  double u = 0;          // cos(theta) if crossing, cosh(distance) if disjoint
  LineKind kind = LineKind::Disjoint;
  double signed_cos = 0;  // oriented-crossing cosine; 0 for disjoint cosets
  int first_depth = 0;    // word length at which the coset first appears
};

struct DoubleCosets {
  std::vector<DoubleCosetRep> reps;  // canonical order: ascending u
  TruncationReport report;
};

// One representative per double coset <A>\G/<B> meeting the depth ball,
// deduplicated by the A-orbit of the line C(axis B). For alpha = beta the
// trivial coset <A> id <A> is excluded (the primed sum).
DoubleCosets double_cosets(const SurfaceGroup& g, const std::string& alpha,
                           const std::string& beta, const EnumConfig& cfg = {});

struct ShellPoint {
  int depth = 0;
  double partial = 0;
  double increment = 0;
  std::size_t cosets = 0;
};

struct ShellSeries {
  std::vector<ShellPoint> points;
  bool stabilized = false;
  bool determined = false;
};

// Partial sums of `summand` over representatives grouped by first-appearance
// depth; one scan at the deepest requested depth serves all of them.
ShellSeries shell_stabilization(const SurfaceGroup& g, const std::string& alpha,
                                const std::string& beta,
                                const std::function<double(const DoubleCosetRep&)>& summand,
                                const std::vector<int>& depths, const EnumConfig& cfg = {});

// Compensated (Neumaier) summation in the order given.
double compensated_sum(const std::vector<double>& terms);

}  // namespace wplab
