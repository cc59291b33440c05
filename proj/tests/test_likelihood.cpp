#include <cmath>
#include <vector>

#include "doctest.h"
#include "sdesplit/likelihood.hpp"
#include "sdesplit/models.hpp"
#include "sdesplit/quadrature.hpp"
#include "sdesplit/schemes.hpp"
#include "support.hpp"

using namespace sdesplit;

namespace {

ObservationSet make_obs(const std::string& model_id, double h, std::vector<double> values) {
  ObservationSet obs;
  obs.model_id = model_id;
  obs.h_obs = h;
  obs.values = std::move(values);
  return obs;
}

}  // namespace

TEST_CASE("zero-residual transition reduces the pseudo-NLL to log g") {
  const ModelSpec& student = get_model("student");
  const ParamVector p{{2.0, 10.0, 5.0}};
  const double h = 0.1;
  const double x1 = phi1_flow(student, p, h, 0.5);
  const NllValue nll = lt_nll(student, p, make_obs("student", h, {0.5, x1}));
  REQUIRE(nll.finite());
  CHECK(nll.n_terms == 1);
  CHECK(nll.value == doctest::Approx(std::log(student.diffusion(p, x1))).epsilon(1e-10));
}

TEST_CASE("invalid parameters yield +inf with a reason, never a throw") {
  const ModelSpec& cir = get_model("cir");
  const ObservationSet obs = make_obs("cir", 0.1, {1.0, 1.2, 1.1});
  for (EstimatorKind est : {EstimatorKind::LT, EstimatorKind::Strang, EstimatorKind::Kessler,
                            EstimatorKind::EuM, EstimatorKind::LampertiEuM,
                            EstimatorKind::TrueMLE}) {
    const NllValue nll = pseudo_nll(est, cir, {{-1.0, 6.0, 0.2}}, obs);
    CHECK(std::isinf(nll.value));
    REQUIRE(nll.reason.has_value());
    CHECK(*nll.reason == NllInvalidReason::params_invalid);
  }
  // data outside the state space
  const NllValue neg = lt_nll(cir, {{2.0, 6.0, 0.2}}, make_obs("cir", 0.1, {1.0, -0.5}));
  REQUIRE(neg.reason.has_value());
  CHECK(*neg.reason == NllInvalidReason::domain_violation);
}

TEST_CASE("branch-sum transition densities integrate to one") {
  struct Case {
    const char* id;
    ParamVector p;
    double x0;
  };
  const Case cases[] = {
      {"cir", {{2.0, 6.0, 0.2}}, 1.0},
      {"f", {{2.0, 3.0, 0.5}}, 1.0},
      {"wright_fisher", {{1.0, 0.5, -0.3}}, 0.3},
      {"student", {{2.0, 10.0, 5.0}}, 0.5},
      {"igbm", {{2.0, 1.0, 0.5}}, 1.0},
  };
  for (const auto& c : cases) {
    CAPTURE(c.id);
    const ModelSpec& m = get_model(c.id);
    for (EstimatorKind est : {EstimatorKind::LT, EstimatorKind::Strang}) {
      CAPTURE(est == EstimatorKind::LT ? "lt" : "strang");
      for (double h : {0.01, 0.1}) {
        CAPTURE(h);
        const double mass = testing::transition_density_mass(m, c.p, est, h, c.x0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("Wright-Fisher Strang density matches the sampled step law") {
  const ModelSpec& wf = get_model("wright_fisher");
  const ParamVector p{{1.0, 0.5, -0.3}};
  const double h = 0.1, x0 = 0.3;
  const int n = 100000, bins = 50;
  RandomStream rng({31, 0, Purpose::path_noise});
  std::vector<double> counts(bins, 0.0);
  const double s = std::sqrt(h);
  for (int i = 0; i < n; ++i) {
    const double y = strang_step(wf, p, h, x0, s * rng.normal());
    const int b = std::min(bins - 1, static_cast<int>(y * bins));
    counts[b] += 1.0;
  }
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / bins;
    const double hi = static_cast<double>(b + 1) / bins;
    const double model_mass = integrate_adaptive(
        [&](double y) { return transition_density(wf, p, EstimatorKind::Strang, h, x0, y); },
        std::max(lo, 1e-10), std::min(hi, 1.0 - 1e-10), 1e-9, 8);
    tv += 0.5 * std::abs(counts[b] / n - model_mass);
  }
  CHECK(tv < 0.02);
}

TEST_CASE("Kessler is the Gaussian likelihood with expansion moments") {
  const ModelSpec& ou = get_model("ou");
  const ParamVector p{{2.0, 1.0}};
  const double h = 0.1;
  const ObservationSet obs = make_obs("ou", h, {3.0, 2.4, 2.1, 1.6, 1.5});
  const NllValue kes = kessler_nll(ou, p, obs);
  REQUIRE(kes.finite());

  // by hand for OU (f = -theta (x - mu), g^2 = 2 theta): the second-order
  // expansion gives mean = x + f h (1 - theta h / 2) and
  // E[X^2] = x^2 + h (2 x f + 2 theta) + h^2 / 2 L(2 x f + 2 theta)
  const double th = p[0], mu = p[1];
  double manual = 0.0;
  for (std::size_t k = 0; k + 1 < obs.values.size(); ++k) {
    const double x = obs.values[k];
    const double f = -th * (x - mu);
    const double mean = x + f * h * (1.0 - th * h / 2.0);
    const double Lw = 2.0 * th * th * (x - mu) * (2.0 * x - mu) - 4.0 * th * th;
    const double second = x * x + h * (2.0 * x * f + 2.0 * th) + 0.5 * h * h * Lw;
    const double var = second - mean * mean;
    const double r = obs.values[k + 1] - mean;
    manual += 0.5 * std::log(2.0 * M_PI * var) + r * r / (2.0 * var);
  }
  manual += static_cast<double>(obs.n_transitions()) * nll_constant(h);
  CHECK(kes.value == doctest::Approx(manual).epsilon(1e-7));
  // the expansion moments are close to but distinct from the exact ones
  CHECK(kes.value != doctest::Approx(true_mle_nll(ou, p, obs).value).epsilon(1e-8));
}

TEST_CASE("generator-expansion moments agree with the exact law to third order") {
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  const double h = 0.01, x = 1.0;
  double mean = 0.0, var = 0.0;
  kessler_moments(cir, p, h, x, mean, var);
  CHECK(std::abs(mean - cir.exact_mean(p, h, x)) < 1e-4);
  CHECK(std::abs(var - cir.exact_variance(p, h, x)) < 5e-4);
  // halving h shrinks the variance error ~8x, i.e. it is third order
  double mean2 = 0.0, var2 = 0.0;
  kessler_moments(cir, p, h / 2.0, x, mean2, var2);
  const double ratio = std::abs(var - cir.exact_variance(p, h, x)) /
                       std::abs(var2 - cir.exact_variance(p, h / 2.0, x));
  CHECK(ratio > 5.0);
  CHECK(ratio < 12.0);
  // a first-order expansion would miss the mean by ~ theta^2 (mu - x) h^2 / 2
  CHECK(std::abs(x + cir.drift(p, x) * h - cir.exact_mean(p, h, x)) >
        5.0 * std::abs(mean - cir.exact_mean(p, h, x)));
}

TEST_CASE("unit diffusion makes the Lamperti-EuM and EuM likelihoods coincide") {
  const ModelSpec& ou = get_model("ou");
  const ObservationSet obs = make_obs("ou", 0.05, {0.0, 0.3, 0.1, 0.6, 0.4, 0.7});
  for (const ParamVector& p : {ParamVector{{2.0, 1.0}}, ParamVector{{0.5, -0.2}}}) {
    const NllValue a = em_nll(ou, p, obs);
    const NllValue b = lamperti_em_nll(ou, p, obs);
    REQUIRE(a.finite());
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }
}

TEST_CASE("fixed-parameter bookkeeping never changes the NLL value") {
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  ObservationSet obs = make_obs("cir", 0.1, {1.0, 1.4, 2.0, 2.3});
  const double base = lt_nll(cir, p, obs).value;
  obs.fixed_mask = {true, false, false};
  obs.fixed_values = {2.0, 0.0, 0.0};
  CHECK(lt_nll(cir, p, obs).value == base);
}

TEST_CASE("Strang reports inverse-undefined observations") {
  const ModelSpec& ag = get_model("ahn_gao");
  const ParamVector p{{2.0, 2.0, 0.5}};
  // half-step logistic pullback blows up past y* = A e^{A h/2} / (B (e^{A h/2} - 1))
  // = 10.09 for these parameters; y = 12 has no preimage
  const ObservationSet obs = make_obs("ahn_gao", 0.1, {1.0, 12.0});
  const NllValue s = strang_nll(ag, p, obs);
  CHECK(std::isinf(s.value));
  REQUIRE(s.reason.has_value());
  CHECK(*s.reason == NllInvalidReason::inverse_undefined);
  // the one-sided scheme has no pullback and stays finite
  CHECK(lt_nll(ag, p, obs).finite());
}

TEST_CASE("Euler-Maruyama likelihood is the discretized Gaussian") {
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  const double h = 0.1;
  const ObservationSet obs = make_obs("cir", h, {1.0, 1.5});
  const double mean = 1.0 + cir.drift(p, 1.0) * h;
  const double var = cir.diffusion(p, 1.0) * cir.diffusion(p, 1.0) * h;
  const double r = 1.5 - mean;
  const double manual =
      0.5 * std::log(2.0 * M_PI * var) + r * r / (2.0 * var) + nll_constant(h);
  CHECK(em_nll(cir, p, obs).value == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("estimator names round-trip and Hermite is rejected") {
  for (EstimatorKind e : {EstimatorKind::LT, EstimatorKind::Strang, EstimatorKind::Kessler,
                          EstimatorKind::EuM, EstimatorKind::LampertiEuM, EstimatorKind::TrueMLE}) {
    CHECK(parse_estimator(estimator_name(e)) == e);
  }
  CHECK_THROWS_AS(pseudo_nll(EstimatorKind::Hermite, get_model("ou"), {{2.0, 1.0}},
                             make_obs("ou", 0.1, {0.0, 0.1})),
                  UnsupportedError);
}
