#include <cmath>

#include "doctest.h"
#include "sdesplit/models.hpp"
#include "sdesplit/schemes.hpp"

using namespace sdesplit;

namespace {
const ParamVector kCir{{2.0, 6.0, 0.2}};
}

TEST_CASE("lt_step equals the CIR closed form") {
  const ModelSpec& cir = get_model("cir");
  // v^{-1}(xi + v(phi1_h(x))) = (sqrt(phi1) + sqrt(2 theta b)/2 xi)^2
  const double phi1 = phi1_flow(cir, kCir, 0.1, 1.0);
  const double hand = std::pow(std::sqrt(phi1) + std::sqrt(0.8) / 2.0 * 0.2, 2);
  CHECK(lt_step(cir, kCir, 0.1, 1.0, 0.2) == doctest::Approx(hand).epsilon(1e-13));
  CHECK(lt_step(cir, kCir, 0.1, 1.0, 0.2) == doctest::Approx(2.1420302492948267).epsilon(1e-12));
  // xi = 0 reduces to the ODE flow; mu_t is a fixed point
  CHECK(lt_step(cir, kCir, 0.1, 1.0, 0.0) == doctest::Approx(phi1).epsilon(1e-13));
  CHECK(lt_step(cir, kCir, 0.3, 5.9, 0.0) == doctest::Approx(5.9).epsilon(1e-13));
}

TEST_CASE("strang_step composes half flows") {
  const ModelSpec& cir = get_model("cir");
  CHECK(strang_step(cir, kCir, 0.1, 1.0, 0.0) ==
        doctest::Approx(phi1_flow(cir, kCir, 0.1, 1.0)).epsilon(1e-13));
  // one increment per step: reproducible value
  const double manual = phi1_flow(
      cir, kCir, 0.05, phi2_flow(cir, kCir, 0.1, phi1_flow(cir, kCir, 0.05, 1.0), 0.2));
  CHECK(strang_step(cir, kCir, 0.1, 1.0, 0.2) == doctest::Approx(manual).epsilon(1e-13));
}

TEST_CASE("Euler-Maruyama and Milstein") {
  const ModelSpec& cir = get_model("cir");
  CHECK(em_step(cir, kCir, 0.1, 1.0, 0.1) == doctest::Approx(2.0894427190999916).epsilon(1e-13));
  // Milstein adds g g'/2 (xi^2 - h) = theta b / 2 (xi^2 - h)
  const double corr = 0.5 * 2.0 * 0.2 * (0.1 * 0.1 - 0.1);
  CHECK(corr == doctest::Approx(-0.018));
  CHECK(milstein_step(cir, kCir, 0.1, 1.0, 0.1) ==
        doctest::Approx(em_step(cir, kCir, 0.1, 1.0, 0.1) + corr).epsilon(1e-13));
  // constant g: Milstein collapses to EuM
  const ModelSpec& ou = get_model("ou");
  const ParamVector pou{{2.0, 1.0}};
  CHECK(milstein_step(ou, pou, 0.1, 0.3, 0.25) ==
        doctest::Approx(em_step(ou, pou, 0.1, 0.3, 0.25)).epsilon(1e-14));
  // xi^2 = h also kills the correction
  CHECK(milstein_step(cir, kCir, 0.09, 1.0, 0.3) ==
        doctest::Approx(em_step(cir, kCir, 0.09, 1.0, 0.3)).epsilon(1e-13));
}

TEST_CASE("semi-discrete and Lamperti-EuM steps") {
  const ModelSpec& cir = get_model("cir");
  // sd uses Euler on the ODE subequation: v-argument is x + f1(x) h
  const double x1 = 1.0 + cir.split_ode_drift(kCir, 1.0) * 0.1;
  CHECK(sd_step(cir, kCir, 0.1, 1.0, 0.2) ==
        doctest::Approx(phi2_flow(cir, kCir, 0.1, x1, 0.2)).epsilon(1e-13));
  // Richardson: sd and lt differ at O(h^2) at xi = 0
  const double d1 = std::abs(sd_step(cir, kCir, 0.1, 1.0, 0.0) - lt_step(cir, kCir, 0.1, 1.0, 0.0));
  const double d2 =
      std::abs(sd_step(cir, kCir, 0.05, 1.0, 0.0) - lt_step(cir, kCir, 0.05, 1.0, 0.0));
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.25));

  // OU at its mean has zero Lamperti drift: xi = 0 is a fixed point
  const ModelSpec& ou = get_model("ou");
  const ParamVector pou{{2.0, 1.0}};
  CHECK(lamperti_em_step(ou, pou, 0.1, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("simulate_path iterates the chosen scheme deterministically") {
  const ModelSpec& ou = get_model("ou");
  const ParamVector p{{2.0, 1.0}};
  NoiseGrid grid = make_noise_grid({3, 0, Purpose::path_noise}, 0.1, 10);
  // zero increments: LT is the exact ODE flow, endpoint analytic
  NoiseGrid zero = grid;
  for (auto& v : zero.increments) v = 0.0;
  const Trajectory t = simulate_path(SchemeKind::LT, ou, p, 3.0, zero);
  CHECK(t.values.size() == 11);
  CHECK(t.values.back() == doctest::Approx(1.0 + 2.0 * std::exp(-2.0)).epsilon(1e-12));

  const Trajectory a = simulate_path(SchemeKind::Strang, ou, p, 3.0, grid);
  const Trajectory b = simulate_path(SchemeKind::Strang, ou, p, 3.0, grid);
  CHECK(a.values == b.values);
  CHECK(a.uniform_grid());
}

TEST_CASE("LT and Strang preserve the state space in entrance regimes") {
  const ModelSpec& wf = get_model("wright_fisher");
  const ParamVector pwf{{1.0, 0.5, -0.3}};
  const ModelSpec& cir = get_model("cir");
  for (SchemeKind scheme : {SchemeKind::LT, SchemeKind::Strang}) {
    for (std::size_t path = 0; path < 100; ++path) {
      const NoiseGrid grid = make_noise_grid({91, path, Purpose::path_noise}, 0.01, 100);
      for (double v : simulate_path(scheme, wf, pwf, 0.5, grid).values) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
      for (double v : simulate_path(scheme, cir, kCir, 1.0, grid).values) CHECK(v > 0.0);
    }
  }
}

TEST_CASE("attainable regimes abort without adaptive stepping and survive with it") {
  const ModelSpec& cir = get_model("cir");
  const ParamVector attainable{{2.0, 0.1, 0.5}};  // mu_t < 0
  const NoiseGrid grid = make_noise_grid({17, 0, Purpose::path_noise}, 0.5, 40);
  CHECK_THROWS_AS(simulate_path(SchemeKind::LT, cir, attainable, 0.01, grid), PathAborted);

  SimulateOptions opt;
  opt.adaptive = true;
  const Trajectory t = simulate_path(SchemeKind::LT, cir, attainable, 0.01, grid, opt);
  CHECK(t.values.size() == grid.n_steps + 1);
  for (double v : t.values) CHECK(v >= 0.0);
  CHECK_FALSE(t.uniform_grid());
  bool any_adapted = false;
  for (std::size_t k = 0; k < t.adaptive_flags.size(); ++k) {
    if (t.adaptive_flags[k]) {
      any_adapted = true;
      CHECK(t.step_sizes[k] < 0.5);
    } else {
      CHECK(t.step_sizes[k] == doctest::Approx(0.5));
    }
  }
  CHECK(any_adapted);
}

TEST_CASE("harness truncation clamps EuM into the state space") {
  const ModelSpec& wf = get_model("wright_fisher");
  const ParamVector p{{1.0, 0.5, -0.3}};
  const NoiseGrid grid = make_noise_grid({23, 0, Purpose::path_noise}, 0.1, 200);
  SimulateOptions opt;
  opt.truncate_to_state_space = true;
  const Trajectory t = simulate_path(SchemeKind::EuM, wf, p, 0.5, grid, opt);
  for (double v : t.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("scheme names round-trip") {
  for (SchemeKind s : {SchemeKind::LT, SchemeKind::Strang, SchemeKind::EuM, SchemeKind::Milstein,
                       SchemeKind::SemiDiscrete, SchemeKind::LampertiEuM, SchemeKind::Exact}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("bogus"), std::invalid_argument);
}
