// Times the serial and OpenMP bank kernels on the rotating-ellipsoid preset
// and checks that they produce identical results.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rcbf/bank.hpp"
#include "rcbf/scenario.hpp"

using namespace rcbf;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  const auto tic = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto toc = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(toc - tic).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  int count = 500;
  int repeats = 50;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--count") count = std::atoi(argv[i + 1]);
    else if (flag == "--repeats") repeats = std::atoi(argv[i + 1]);
    else {
      std::fprintf(stderr, "usage: bench_bank [--count N] [--repeats N]\n");
      return 1;
    }
  }

  ScenarioConfig cfg = eros_proxops_preset();
  cfg.mesh.count = count;
  const ResolvedScenario rs = resolve_scenario(cfg);

  // Hover just outside the envelope along +x, with some tangential motion.
  SimState x;
  x.r = Vec3(9.5e3, 1.0e3, 5.0e2);
  x.v = Vec3(-0.5, 1.0, 0.2);
  const double t = 120.0;

  const auto serial = evaluate_bank_serial(rs.bank, t, x, cfg.gravity, cfg.control,
                                           cfg.disturbance, cfg.alpha);
  const auto parallel = evaluate_bank_parallel(rs.bank, t, x, cfg.gravity, cfg.control,
                                               cfg.disturbance, cfg.alpha);
  double max_diff = 0.0;
  for (size_t i = 0; i < serial.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(serial[i].H - parallel[i].H));
    max_diff = std::max(max_diff, (serial[i].grad_H - parallel[i].grad_H).cwiseAbs().maxCoeff());
  }
  std::printf("bank size %d, max |serial - parallel| = %.3g\n", count, max_diff);
  if (max_diff != 0.0) {
    std::fprintf(stderr, "kernels disagree\n");
    return 1;
  }

  const double ms_serial = time_ms(
      [&] {
        evaluate_bank_serial(rs.bank, t, x, cfg.gravity, cfg.control, cfg.disturbance, cfg.alpha);
      },
      repeats);
  const double ms_parallel = time_ms(
      [&] {
        evaluate_bank_parallel(rs.bank, t, x, cfg.gravity, cfg.control, cfg.disturbance,
                               cfg.alpha);
      },
      repeats);
  std::printf("serial   %8.3f ms/eval\n", ms_serial);
  std::printf("parallel %8.3f ms/eval\n", ms_parallel);
  std::printf("speedup  %8.2fx\n", ms_serial / ms_parallel);
  return 0;
}
