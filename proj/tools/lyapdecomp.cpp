#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyapdecomp/bench.hpp"
#include "lyapdecomp/certifier.hpp"
#include "lyapdecomp/decomposer.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/model_io.hpp"
#include "lyapdecomp/relaxer.hpp"

namespace {

using namespace lyapdecomp;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitInconclusive = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model file, or a built-in fixture name when no such file exists.
HybridAutomaton load_input(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    try {
      return fixture_by_name(path);
    } catch (const std::invalid_argument&) {
      throw InputError("no model file or fixture named \"" + path + "\"");
    }
  }
  try {
    return load_model_file(path);
  } catch (const ModelError& e) {
    std::string msg = path;
    if (e.line() > 0) msg += ":" + std::to_string(e.line()) + ":" + std::to_string(e.column());
    msg += ": " + std::string(e.what());
    for (const auto& v : e.violations()) msg += "\n  " + v;
    throw InputError(msg);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write \"" + path + "\"");
  out << text;
}

nlohmann::json certificate_json(const AssembledCertificate& c) {
  nlohmann::json j;
  j["class_k"] = {{"eps_pos", c.certificate.class_k.eps_pos},
                  {"m_up", c.certificate.class_k.m_up},
                  {"eps_dec", c.certificate.class_k.eps_dec}};
  for (const auto& [id, P] : c.certificate.templates) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < P.cols(); ++k) row.push_back(P(i, k));
      rows.push_back(row);
    }
    j["templates"][id] = rows;
  }
  for (const auto& [region, cs] : c.certificate.conical) j["conical"][region] = cs;
  return j;
}

struct ProveArgs {
  std::string model;
  std::string dense = "auto";
  double threshold = kDefaultDensityThreshold;
  std::size_t candidates = 3;
  std::uint64_t seed = 1;
  bool count_only = false;
  bool tag = false;
  std::string export_dir;
  std::string trace_file;
  std::string certificate_file;
};

int prove(const ProveArgs& args) {
  const HybridAutomaton a = load_input(args.model);
  std::set<std::string> dense;
  try {
    dense = resolve_dense(a, args.dense, args.threshold);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  DecomposeOptions opts;
  opts.mode = args.count_only ? RunMode::kCountOnly : RunMode::kSolve;
  opts.candidates = args.candidates;
  opts.seed = args.seed;
  opts.export_dir = args.export_dir;
  if (!opts.export_dir.empty()) std::filesystem::create_directories(opts.export_dir);

  SdpBackend backend;
  const DecompositionResult r = dense.empty()
                                    ? apply_decomposition(a, &backend, opts)
                                    : integrated_prove(a, dense, &backend, opts);
  if (!args.trace_file.empty()) write_text(args.trace_file, r.trace.to_text());

  std::cout << "dense: ";
  if (dense.empty()) std::cout << "(none)";
  for (const auto& d : dense) std::cout << d << (d == *dense.rbegin() ? "" : ",");
  std::cout << "\nreductions: " << r.trace.reductions << "\nsplittings: " << r.trace.splittings
            << "\nreconstructions: " << r.reconstructions << "\n";
  if (args.count_only) {
    if (r.failed_subgraph) {
      std::cout << "error: " << r.diagnostic << "\n";
      return kExitFailed;
    }
    return kExitOk;
  }
  std::cout << "verdict: " << to_string(r.verdict) << "\n";
  if (r.verdict == Verdict::kStable) {
    const SamplingResult s = check_certificate_sampling(r.certificate->certified, r.certificate->certificate);
    std::cout << "sampling check: " << to_string(s.status) << " (" << s.points_checked << " points)\n";
    if (!args.certificate_file.empty()) {
      write_text(args.certificate_file, certificate_json(*r.certificate).dump(2) + "\n");
    }
    return s.status == SamplingStatus::kFail ? kExitInconclusive : kExitOk;
  }
  std::cout << "diagnostic: " << r.diagnostic << "\n";
  if (r.failed_subgraph) {
    std::cout << "failed modes:";
    for (const auto& m : r.failed_subgraph->modes) std::cout << " " << m;
    std::cout << "\nfailed transitions:";
    for (const auto& t : r.failed_subgraph->transitions) std::cout << " " << t;
    std::cout << "\n";
  }
  return r.verdict == Verdict::kFailed ? kExitFailed : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability proofs for hybrid automata by graph decomposition and relaxation"};
  app.require_subcommand(1);

  ProveArgs pa;
  auto* prove_cmd = app.add_subcommand("prove", "Decompose (and relax) a model and solve for a certificate");
  prove_cmd->add_option("model", pa.model, "Model file or fixture name")->required();
  prove_cmd->add_option("--dense", pa.dense, "auto | all | none | comma-separated mode ids");
  prove_cmd->add_option("--density-threshold", pa.threshold, "Density threshold for --dense auto")
      ->check(CLI::Range(0.0, 1.0));
  prove_cmd->add_option("--candidates", pa.candidates, "Candidates per reduction")
      ->check(CLI::PositiveNumber);
  prove_cmd->add_option("--seed", pa.seed, "Solver seed");
  prove_cmd->add_flag("--count-only", pa.count_only, "Count steps without solving");
  prove_cmd->add_option("--export-sdpa", pa.export_dir, "Directory for per-reduction SDPA files");
  prove_cmd->add_option("--trace", pa.trace_file, "Write the step trace here");
  prove_cmd->add_option("--certificate", pa.certificate_file, "Write the certificate as JSON here");

  auto* bench_cmd = app.add_subcommand("bench", "Benchmarks");
  bench_cmd->require_subcommand(1);
  auto* table_cmd = bench_cmd->add_subcommand("table", "Step counts with and without relaxation");
  std::string bench_out;
  std::size_t max_n = 5;
  table_cmd->add_option("--out", bench_out, "Write the table here as well");
  table_cmd->add_option("--max-n", max_n, "Largest K_n row")->check(CLI::Range(1, 8));

  auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
  std::string validate_path;
  validate_cmd->add_option("model", validate_path, "Model file")->required();

  auto* fixture_cmd = app.add_subcommand("fixture", "Print a built-in fixture as a model file");
  std::string fixture_name, fixture_out;
  fixture_cmd->add_option("name", fixture_name,
                          "k1..k8, spidercam, acc, overlap, unstable, stable1d, rotation")
      ->required();
  fixture_cmd->add_option("--out", fixture_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*prove_cmd) return prove(pa);
    if (*table_cmd) {
      const std::string text = format_benchmark_table(run_benchmark_table(max_n));
      std::cout << text;
      if (!bench_out.empty()) write_text(bench_out, text);
      return kExitOk;
    }
    if (*validate_cmd) {
      if (!std::filesystem::exists(validate_path)) throw InputError("no such file \"" + validate_path + "\"");
      const HybridAutomaton a = load_input(validate_path);
      std::cout << "ok: " << a.modes.size() << " modes, " << a.transitions.size()
                << " transitions, " << a.dimension() << " variables\n";
      return kExitOk;
    }
    if (*fixture_cmd) {
      HybridAutomaton a;
      try {
        a = fixture_by_name(fixture_name);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      const std::string text = serialize_model(a);
      if (fixture_out.empty()) {
        std::cout << text;
      } else {
        write_text(fixture_out, text);
      }
      return kExitOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
