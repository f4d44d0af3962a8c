// Serial reference vs OpenMP grid kernels on simulated scores.
// Usage: bench_kernels [repeats=3] [n=600] [cells=60]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "smbp/fpca.hpp"
#include "smbp/modegrid.hpp"
#include "smbp/reference.hpp"
#include "smbp/simulate.hpp"

using namespace smbp;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  HorseshoeConfig cfg;
  if (argc > 2) cfg.n1 = cfg.n2 = static_cast<std::size_t>(std::atoi(argv[2])) / 2;
  const std::size_t cells = argc > 3 ? static_cast<std::size_t>(std::atoi(argv[3])) : 60;

  const auto sample = generate(cfg).sample;
  const auto model = fit_fpca(sample, 3);
  const RowMatrix scores = model.scores.leftCols(3);
  const auto bw = silverman_bandwidth(scores).scaled(1.4);
  const auto grid = build_grid(scores, cells, 3.0, bw);
  const KernelSpec kernel{KernelProfile::gaussian, 3};

  std::printf("n=%zu d=3 cells=%zu^3 threads=%d\n", sample.n(), cells, omp_get_max_threads());

  DensityEstimate fast, slow;
  const double t_kde_ref = best_of(repeats, [&] { slow = reference::kde_on_grid(scores, bw, kernel, grid); });
  const double t_kde_omp = best_of(repeats, [&] { fast = kde_on_grid(scores, bw, kernel, grid); });
  const bool kde_equal = fast.values == slow.values;

  ModeSet m_fast, m_slow;
  const double t_mode_ref = best_of(repeats, [&] { m_slow = reference::find_modes(fast, 10); });
  const double t_mode_omp = best_of(repeats, [&] { m_fast = find_modes(fast, 10); });
  bool modes_equal = m_fast.modes.size() == m_slow.modes.size();
  for (std::size_t g = 0; modes_equal && g < m_fast.modes.size(); ++g)
    modes_equal = m_fast.modes[g].cell == m_slow.modes[g].cell;

  std::printf("%-12s %12s %12s %9s %s\n", "kernel", "serial_s", "openmp_s", "speedup", "identical");
  std::printf("%-12s %12.4f %12.4f %9.2f %s\n", "kde_on_grid", t_kde_ref, t_kde_omp, t_kde_ref / t_kde_omp,
              kde_equal ? "yes" : "NO");
  std::printf("%-12s %12.4f %12.4f %9.2f %s\n", "find_modes", t_mode_ref, t_mode_omp, t_mode_ref / t_mode_omp,
              modes_equal ? "yes" : "NO");
  return kde_equal && modes_equal ? 0 : 1;
}
