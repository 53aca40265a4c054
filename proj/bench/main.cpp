// Timings for the OpenMP kernels against their serial reference
// implementations, on one synthetic panel. Also cross-checks that both routes
// agree, so the benchmark doubles as a coarse consistency test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <omp.h>

#include <CLI11.hpp>

#include "mstboot/bootstrap.hpp"
#include "mstboot/correlation.hpp"
#include "mstboot/panel.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_ms(const std::function<void()>& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool same_tally(const mstboot::BootstrapTally& a, const mstboot::BootstrapTally& b) {
  return a.method == b.method && a.replicas == b.replicas &&
         a.n_nodes == b.n_nodes && a.counts == b.counts;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 100;
  std::size_t periods = 250;
  std::uint32_t replicas = 50;
  int workers = 0;
  std::uint64_t seed = 7;
  bool quick = false;

  CLI::App app{"Serial vs OpenMP kernel benchmark"};
  app.add_option("--n", n, "Elements");
  app.add_option("--T", periods, "Observations per element");
  app.add_option("--replicas", replicas, "Bootstrap replicas");
  app.add_option("--workers", workers, "Worker threads (0 = all)");
  app.add_option("--seed", seed, "Seed");
  app.add_flag("--quick", quick, "Tiny sizes for smoke runs");
  CLI11_PARSE(app, argc, argv);

  if (quick) {
    n = 30;
    periods = 100;
    replicas = 10;
  }
  const int threads = workers > 0 ? workers : omp_get_max_threads();

  mstboot::SynthSpec spec;
  spec.n_elements = n;
  spec.n_sectors = 5;
  spec.n_periods = periods;
  spec.market_loading = 0.3;
  spec.sector_loading = 0.5;
  spec.seed = seed;
  const auto [panel, sectors] = mstboot::synthesize_panel(spec);

  std::printf("panel: n=%zu T=%zu replicas=%u workers=%d\n", n, periods, replicas,
              threads);
  std::printf("%-18s %12s %12s %9s %s\n", "kernel", "serial ms", "parallel ms",
              "speedup", "agreement");

  {
    mstboot::CorrelationMatrix serial = mstboot::pearson_reference(panel);
    mstboot::CorrelationMatrix parallel = mstboot::pearson(panel, workers);
    const double t_serial = run_ms([&] { serial = mstboot::pearson_reference(panel); });
    const double t_parallel =
        run_ms([&] { parallel = mstboot::pearson(panel, workers); });
    const double diff =
        (serial.values() - parallel.values()).cwiseAbs().maxCoeff();
    std::printf("%-18s %12.2f %12.2f %8.2fx max|diff|=%.2e\n", "pearson", t_serial,
                t_parallel, t_serial / t_parallel, diff);
  }

  const mstboot::rng::ReplicaSeedPolicy policy{seed};
  for (const auto method :
       {mstboot::BootstrapMethod::Row, mstboot::BootstrapMethod::Pair}) {
    mstboot::BootstrapTally serial;
    mstboot::BootstrapTally parallel;
    const double t_serial = run_ms([&] {
      serial = mstboot::run_bootstrap_reference(panel, method, replicas, policy);
    });
    const double t_parallel = run_ms([&] {
      parallel = mstboot::run_bootstrap(panel, method, replicas, policy, workers);
    });
    const bool equal = same_tally(serial, parallel);
    std::printf("%-18s %12.2f %12.2f %8.2fx %s\n",
                ("bootstrap " + to_string(method)).c_str(), t_serial, t_parallel,
                t_serial / t_parallel, equal ? "tallies identical" : "MISMATCH");
    if (!equal) return 1;
  }
  return 0;
}
