#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lyapdecomp/decomposer.hpp"

namespace lyapdecomp {

/// Step counts of one count-only run.
struct CountRun {
  std::size_t reductions = 0;
  std::size_t splittings = 0;
  double millis = 0.0;
  /// Non-empty when the run stopped early, e.g. on cycle overflow.
  std::string error;
};

struct BenchRow {
  std::string name;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  CountRun plain;
  /// Every mode relaxed.
  CountRun relaxed;
};

/// Count-only decomposition of `a` without relaxation.
CountRun count_plain(const HybridAutomaton& a, std::size_t cycle_limit = kDefaultCycleLimit);
/// Count-only integrated run with every mode in the dense set.
CountRun count_relaxed(const HybridAutomaton& a, std::size_t cycle_limit = kDefaultCycleLimit);

/// Rows K_1..K_max_n, spidercam, ACC skeleton.
std::vector<BenchRow> run_benchmark_table(std::size_t max_n = 5,
                                          std::size_t cycle_limit = kDefaultCycleLimit);

/// Whitespace-aligned table with a header line; times in seconds unless
/// `with_times` is false, in which case the time columns are omitted.
std::string format_benchmark_table(const std::vector<BenchRow>& rows, bool with_times = true);

}  // namespace lyapdecomp
