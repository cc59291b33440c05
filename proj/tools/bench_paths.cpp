// Times the Monte Carlo path kernels with the serial reference
// implementation against the OpenMP build, and verifies both produce
// bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "sdesplit/analysis.hpp"
#include "sdesplit/models.hpp"

using namespace sdesplit;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t M = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200;

  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  const std::vector<double> h_list = {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0};
  const double h_fine = 1.0 / 4096.0;

  StrongErrorOptions serial_opt;
  serial_opt.serial = true;

  double t0 = now_ms();
  const ConvergenceReport serial =
      strong_error_curve(SchemeKind::Strang, cir, p, 1.0, 1.0, h_list, h_fine, M, 7, serial_opt);
  const double serial_ms = now_ms() - t0;

  t0 = now_ms();
  const ConvergenceReport parallel =
      strong_error_curve(SchemeKind::Strang, cir, p, 1.0, 1.0, h_list, h_fine, M, 7);
  const double parallel_ms = now_ms() - t0;

  bool identical = serial.grid_checksum == parallel.grid_checksum;
  for (std::size_t i = 0; i < h_list.size(); ++i)
    identical = identical && serial.rows[i].s_n == parallel.rows[i].s_n;

  std::printf("strong_error_curve, CIR Strang, M=%zu, %zu steps fine grid\n", M,
              static_cast<std::size_t>(4096));
  std::printf("  serial:   %10.1f ms\n", serial_ms);
  std::printf("  parallel: %10.1f ms  (speedup %.2fx)\n", parallel_ms, serial_ms / parallel_ms);
  std::printf("  results bit-identical: %s\n", identical ? "yes" : "NO");

  if (!identical) return 1;
  return 0;
}
