#include "lyapdecomp/bench.hpp"

#include <chrono>
#include <cstdio>
#include <exception>

#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/relaxer.hpp"

namespace lyapdecomp {

namespace {

template <typename Run>
CountRun timed(Run run) {
  CountRun out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const DecompositionResult r = run();
    out.reductions = r.trace.reductions;
    out.splittings = r.trace.splittings;
    if (r.failed_subgraph) out.error = r.diagnostic;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

DecomposeOptions counting(std::size_t cycle_limit) {
  DecomposeOptions o;
  o.mode = RunMode::kCountOnly;
  o.cycle_limit = cycle_limit;
  return o;
}

}  // namespace

CountRun count_plain(const HybridAutomaton& a, std::size_t cycle_limit) {
  return timed([&] { return apply_decomposition(a, nullptr, counting(cycle_limit)); });
}

CountRun count_relaxed(const HybridAutomaton& a, std::size_t cycle_limit) {
  return timed([&] {
    return integrated_prove(a, resolve_dense(a, "all"), nullptr, counting(cycle_limit));
  });
}

std::vector<BenchRow> run_benchmark_table(std::size_t max_n, std::size_t cycle_limit) {
  std::vector<std::pair<std::string, HybridAutomaton>> models;
  for (std::size_t n = 1; n <= max_n; ++n) {
    models.emplace_back("K" + std::to_string(n), generate_kn_fixture(n));
  }
  models.emplace_back("spidercam", generate_spidercam_fixture());
  models.emplace_back("acc", automaton_from_digraph(generate_acc_skeleton()));
  std::vector<BenchRow> rows;
  for (const auto& [name, a] : models) {
    BenchRow row;
    row.name = name;
    const Digraph g = underlying_digraph(a);
    row.nodes = g.vertex_count();
    row.edges = g.edge_count() - g.self_loop_count();
    row.plain = count_plain(a, cycle_limit);
    row.relaxed = count_relaxed(a, cycle_limit);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_benchmark_table(const std::vector<BenchRow>& rows, bool with_times) {
  std::string out;
  char line[256];
  if (with_times) {
    std::snprintf(line, sizeof(line), "%-10s %5s %5s %10s %10s %10s %10s %10s\n", "graph", "nodes",
                  "edges", "reductions", "splittings", "time[s]", "relaxed", "time[s]");
  } else {
    std::snprintf(line, sizeof(line), "%-10s %5s %5s %10s %10s %10s\n", "graph", "nodes", "edges",
                  "reductions", "splittings", "relaxed");
  }
  out += line;
  auto cell = [](const CountRun& r, std::size_t v) {
    return r.error.empty() ? std::to_string(v) : std::string("overflow");
  };
  for (const auto& r : rows) {
    if (with_times) {
      std::snprintf(line, sizeof(line), "%-10s %5zu %5zu %10s %10s %10.3f %10s %10.3f\n",
                    r.name.c_str(), r.nodes, r.edges, cell(r.plain, r.plain.reductions).c_str(),
                    cell(r.plain, r.plain.splittings).c_str(), r.plain.millis / 1000.0,
                    cell(r.relaxed, r.relaxed.reductions).c_str(), r.relaxed.millis / 1000.0);
    } else {
      std::snprintf(line, sizeof(line), "%-10s %5zu %5zu %10s %10s %10s\n", r.name.c_str(), r.nodes,
                    r.edges, cell(r.plain, r.plain.reductions).c_str(),
                    cell(r.plain, r.plain.splittings).c_str(),
                    cell(r.relaxed, r.relaxed.reductions).c_str());
    }
    out += line;
  }
  for (const auto& r : rows) {
    if (!r.plain.error.empty()) out += "# " + r.name + ": " + r.plain.error + "\n";
    if (!r.relaxed.error.empty()) out += "# " + r.name + " (relaxed): " + r.relaxed.error + "\n";
  }
  return out;
}

}  // namespace lyapdecomp
