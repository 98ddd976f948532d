// Benchmark: OpenMP job-parallel driver vs the serial reference driver on the
// same workload, with a bit-identity check between the two FIDs.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinecho/sequences.hpp"
#include "spinecho/spinsys.hpp"

namespace spinsys = spinecho::spinsys;
namespace sequences = spinecho::sequences;

namespace {

spinsys::SpinSystemSpec bench_system() {
  using namespace spinecho::spinsys;
  SpinSystemSpec spec;
  spec.protons = {{1, Channel::H1, 150.0, "Ha"}, {2, Channel::H1, -80.0, "Hb"}};
  spec.carbons = {{3, {1}, 160.0, 0.0, "Ca"}, {4, {2}, 160.0, 0.0, "Cb"}};
  spec.jhh = {{1, 2, 12.0, CouplingKind::Homonuclear}};
  spec.abundance = 0.011;
  return spec;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--full") full = true;
  }

  sequences::ExperimentPlan plan;
  plan.seq = sequences::build_diagonal_free_cosy();
  plan.sw1 = 700.0;
  plan.sw2 = 700.0;
  plan.n_t1 = full ? 64 : 24;
  plan.n_t2 = full ? 256 : 96;
  plan.scans = 2;

  sequences::EngineConfig cfg;
  cfg.gradient_mode = sequences::GradientMode::Slices;
  cfg.n_slices = full ? 64 : 32;

  const auto isotopomers = spinsys::enumerate_isotopomers(bench_system());

  std::printf("workload: diagonal-free sequence, 2 protons + 2 carbon sites, %zu isotopomers\n",
              isotopomers.size());
  std::printf("          n_t1=%d n_t2=%d scans=%d slices=%d (%s)\n", plan.n_t1, plan.n_t2,
              plan.scans, cfg.n_slices, full ? "--full" : "default; pass --full for more");

  auto t0 = std::chrono::steady_clock::now();
  cfg.exec = sequences::ExecMode::Serial;
  const auto serial = sequences::run_experiment_reference(plan, isotopomers, cfg);
  const double t_serial = seconds_since(t0);
  std::printf("serial reference : %8.3f s\n", t_serial);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  t0 = std::chrono::steady_clock::now();
  cfg.exec = sequences::ExecMode::Parallel;
  const auto parallel = sequences::run_experiment(plan, isotopomers, cfg);
  const double t_parallel = seconds_since(t0);
  std::printf("parallel (%d thr): %8.3f s\n", threads, t_parallel);
  std::printf("speedup          : %8.2fx\n", t_parallel > 0.0 ? t_serial / t_parallel : 0.0);

  const bool same_shape = serial.data.size() == parallel.data.size();
  const bool identical =
      same_shape && std::memcmp(serial.data.data(), parallel.data.data(),
                                serial.data.size() * sizeof(serial.data[0])) == 0;
  std::printf("bit-identical    : %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
