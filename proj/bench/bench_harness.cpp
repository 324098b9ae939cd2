// Serial reference versus OpenMP execution of the experiment runners.

#include "mcps/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace mcps;

template <class F>
double time_it(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool same_rows(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.method != y.method || x.seed != y.seed || x.vsc != y.vsc || x.status != y.status) return false;
    if (!(x.l2 == y.l2 || (x.l2 != x.l2 && y.l2 != y.l2))) return false;
  }
  return true;
}

template <class Run>
void compare(const char* name, const ExperimentConfig& cfg, Run run) {
  ExperimentReport serial;
  ExperimentReport parallel;
  const double ts = time_it([&] { serial = run(cfg, Execution::serial); });
  const double tp = time_it([&] { parallel = run(cfg, Execution::parallel); });
  std::printf("%-10s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  rows identical: %s\n", name, ts,
              tp, ts / tp, same_rows(serial, parallel) ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int trials = argc > 1 ? std::atoi(argv[1]) : 50;
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled\n");
#endif

  auto cr = default_condition_rate_config();
  cr.trials_per_m = trials;
  compare("cond-rate", cr, [](const ExperimentConfig& c, Execution e) {
    return run_condition_rate_experiment(c, e);
  });

  auto rec = default_recovery_config();
  rec.m_grid = {30, 60};
  rec.trials_per_m = trials / 2 > 0 ? trials / 2 : 1;
  rec.lambda_override = {{"lasso_admm", 1e-2}, {"mcps2_admm", 1e-2}};
  compare("recovery", rec, [](const ExperimentConfig& c, Execution e) {
    return run_recovery_experiment(c, e);
  });
  return 0;
}
