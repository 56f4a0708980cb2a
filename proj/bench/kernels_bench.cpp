#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "lyapdecomp/certifier.hpp"
#include "lyapdecomp/decomposer.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/kernels.hpp"
#include "lyapdecomp/relaxer.hpp"

namespace {

using namespace lyapdecomp;

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) == 0 ? ExecPolicy::kSerial : ExecPolicy::kParallel;
}

// `blocks` random symmetric blocks of size 6.
std::pair<BlockLayout, Eigen::VectorXd> random_blocks(std::size_t blocks) {
  BlockLayout layout(std::vector<Eigen::Index>(blocks, 6));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd s(layout.total());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = normal(rng);
  return {layout, s};
}

void BM_ProjectPsd(benchmark::State& state) {
  const auto [layout, s0] = random_blocks(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Eigen::VectorXd s = s0;
    benchmark::DoNotOptimize(project_psd_blocks(layout, &s, policy_of(state)));
  }
}

void BM_BlockMinEig(benchmark::State& state) {
  const auto [layout, s] = random_blocks(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(block_min_eigenvalues(layout, s, policy_of(state)));
  }
}

// Certificate for the fully relaxed spidercam model, solved once.
const AssembledCertificate& spidercam_certificate() {
  static const AssembledCertificate cert = [] {
    const HybridAutomaton a = generate_spidercam_fixture();
    SdpBackend backend;
    DecomposeOptions opts;
    const DecompositionResult r = integrated_prove(a, resolve_dense(a, "all", kDefaultDensityThreshold),
                                                   &backend, opts);
    return *r.certificate;
  }();
  return cert;
}

void BM_SamplingCertifier(benchmark::State& state) {
  const AssembledCertificate& cert = spidercam_certificate();
  SamplingOptions opts;
  opts.samples = static_cast<std::size_t>(state.range(0));
  opts.policy = policy_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_certificate_sampling(cert.certified, cert.certificate, opts));
  }
}

}  // namespace

BENCHMARK(BM_ProjectPsd)->ArgsProduct({{64, 1024}, {0, 1}})->ArgNames({"blocks", "parallel"});
BENCHMARK(BM_BlockMinEig)->ArgsProduct({{64, 1024}, {0, 1}})->ArgNames({"blocks", "parallel"});
BENCHMARK(BM_SamplingCertifier)
    ->ArgsProduct({{200, 2000}, {0, 1}})
    ->ArgNames({"samples", "parallel"})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
