// End-to-end acceptance run: prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "sdesplit/analysis.hpp"
#include "sdesplit/checks.hpp"
#include "sdesplit/likelihood.hpp"
#include "sdesplit/models.hpp"
#include "sdesplit/nelder_mead.hpp"
#include "sdesplit/quadrature.hpp"
#include "sdesplit/schemes.hpp"
#include "support.hpp"

using namespace sdesplit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Reporter {
  int failures = 0;
  void report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s%s%s\n", criterion, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1. CIR strong convergence orders and the LT/Strang error ordering.
bool criterion1(std::string& detail) {
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  std::vector<double> h_list;
  for (int k = 4; k <= 9; ++k) h_list.push_back(std::pow(2.0, -k));
  const double h_fine = std::pow(2.0, -12);
  const std::size_t M = 500;

  StrongErrorOptions opt;
  StrongErrorOptions trunc_opt;
  trunc_opt.truncate_to_state_space = true;

  const auto curve = [&](SchemeKind s, const StrongErrorOptions& o) {
    return strong_error_curve(s, cir, p, 1.0, 1.0, h_list, h_fine, M, 1001, o);
  };
  const ConvergenceReport lt = curve(SchemeKind::LT, opt);
  const ConvergenceReport strang = curve(SchemeKind::Strang, opt);
  const ConvergenceReport sd = curve(SchemeKind::SemiDiscrete, opt);
  const ConvergenceReport mil = curve(SchemeKind::Milstein, trunc_opt);
  const ConvergenceReport lam = curve(SchemeKind::LampertiEuM, trunc_opt);
  const ConvergenceReport eum = curve(SchemeKind::EuM, trunc_opt);

  bool ok = true;
  for (const auto* r : {&lt, &strang, &sd, &mil, &lam}) {
    if (r->order.slope < 0.85 || r->order.slope > 1.15) ok = false;
  }
  if (!(eum.order.slope < lt.order.slope)) ok = false;
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(strang.rows[i].s_n < lt.rows[i].s_n)) ok = false;
  }
  detail = "slopes lt=" + fmt(lt.order.slope) + " s=" + fmt(strang.order.slope) +
           " sd=" + fmt(sd.order.slope) + " mil=" + fmt(mil.order.slope) +
           " lam=" + fmt(lam.order.slope) + " eum=" + fmt(eum.order.slope);
  return ok;
}

// 2. OU endpoint moments of the LT scheme against the analytic AR(1) law.
bool criterion2(std::string& detail) {
  const ModelSpec& ou = get_model("ou");
  const ParamVector p{{2.0, 1.0}};
  const double h = 0.1, T = 1.0, x0 = 3.0;
  const std::size_t M = 100000;
  const auto n_steps = static_cast<std::size_t>(std::llround(T / h));

  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const NoiseGrid grid = make_noise_grid({2002, i, Purpose::path_noise}, h, n_steps);
    const double x = simulate_path(SchemeKind::LT, ou, p, x0, grid).values.back();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / M;
  const double var = (sum2 / M - mean * mean) * M / (M - 1.0);

  const double mean_target = p[1] + (x0 - p[1]) * std::exp(-p[0] * T);
  // LT adds N(0, 2 theta h) noise each step, so the endpoint variance is the
  // AR(1) geometric sum, not the continuous-time 1 - e^{-2 theta T}.
  const double a2 = std::exp(-2.0 * p[0] * h);
  const double var_target =
      2.0 * p[0] * h * (1.0 - std::pow(a2, static_cast<double>(n_steps))) / (1.0 - a2);

  const double se_mean = std::sqrt(var / M);
  const double se_var = var_target * std::sqrt(2.0 / (M - 1.0));
  const bool ok = std::abs(mean - mean_target) < 3.0 * se_mean &&
                  std::abs(var - var_target) < 3.0 * se_var;
  detail = "mean=" + fmt(mean) + " (target " + fmt(mean_target) + "), var=" + fmt(var) +
           " (target " + fmt(var_target) + ")";
  return ok;
}

// 3. One-step weak bias orders from the closed-form means, in under a second.
bool criterion3(std::string& detail) {
  const auto t0 = Clock::now();
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  std::vector<double> h_list;
  for (int k = 4; k <= 10; ++k) h_list.push_back(std::pow(2.0, -k));
  const BiasScan lt = bias_order_scan(cir, p, SchemeKind::LT, 1.0, h_list);
  const BiasScan strang = bias_order_scan(cir, p, SchemeKind::Strang, 1.0, h_list);
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(lt.slope - 2.0) < 0.2 && std::abs(strang.slope - 3.0) < 0.3 &&
                  elapsed < 1.0;
  detail = "lt slope=" + fmt(lt.slope) + ", strang slope=" + fmt(strang.slope) + ", " +
           fmt(elapsed) + "s";
  return ok;
}

// 4. Splitting schemes never leave the open state space.
bool criterion4(std::string& detail) {
  struct Case {
    const char* id;
    ParamVector p;
    double x0;
  };
  const Case cases[] = {{"wright_fisher", {{1.0, 0.5, -0.3}}, 0.3}, {"cir", {{2.0, 6.0, 0.2}}, 1.0}};
  std::size_t violations = 0;
  for (const auto& c : cases) {
    const ModelSpec& m = get_model(c.id);
    const StateSpace space = m.state_space(c.p);
    for (SchemeKind scheme : {SchemeKind::LT, SchemeKind::Strang}) {
      for (std::size_t i = 0; i < 1000; ++i) {
        const NoiseGrid grid = make_noise_grid({2004, i, Purpose::path_noise}, 0.01, 300);
        for (double v : simulate_path(scheme, m, c.p, c.x0, grid).values) {
          if (!(v > space.lower && v < space.upper)) ++violations;
        }
      }
    }
  }
  detail = std::to_string(violations) + " boundary violations over 4000 paths";
  return violations == 0;
}

// 5. LT and Strang pseudo-densities integrate to one.
bool criterion5(std::string& detail) {
  struct Case {
    const char* id;
    ParamVector p;
    double x0;
  };
  const Case cases[] = {
      {"cir", {{2.0, 6.0, 0.2}}, 1.0},          {"f", {{2.0, 3.0, 0.5}}, 1.0},
      {"wright_fisher", {{1.0, 0.5, -0.3}}, 0.3}, {"student", {{2.0, 10.0, 5.0}}, 0.5},
      {"igbm", {{2.0, 1.0, 0.5}}, 1.0},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const ModelSpec& m = get_model(c.id);
    for (EstimatorKind est : {EstimatorKind::LT, EstimatorKind::Strang}) {
      for (double h : {0.01, 0.1}) {
        const double mass = testing::transition_density_mass(m, c.p, est, h, c.x0);
        worst = std::max(worst, std::abs(mass - 1.0));
      }
    }
  }
  detail = "max |mass - 1| = " + fmt(worst);
  return worst < 1e-5;
}

// 6. CIR inference from exact data: medians near truth, spread shrinks with N.
bool criterion6(std::string& detail, StudyTable& cir_study_out) {
  const ModelSpec& cir = get_model("cir");
  const ParamVector truth{{2.0, 6.0, 0.2}};
  const StudyCell big{0.01, 1000};
  const StudyCell small{0.01, 200};
  InferenceOptions opt;
  opt.fixed_mask = {true, false, false};
  opt.init = truth.values;
  const StudyTable study = inference_study(cir, truth, 1.0, {EstimatorKind::LT, EstimatorKind::Strang},
                                           {big, small}, 100, 2006, opt);
  bool ok = true;
  for (EstimatorKind est : {EstimatorKind::LT, EstimatorKind::Strang}) {
    const double mu_hat = study.median_estimate(est, big, 1);
    const double b_hat = study.median_estimate(est, big, 2);
    if (!(std::abs(mu_hat - 6.0) < 0.15 * 6.0)) ok = false;
    if (!(std::abs(b_hat - 0.2) < 0.15 * 0.2)) ok = false;
    for (std::size_t j : {std::size_t{1}, std::size_t{2}}) {
      if (!(study.iqr(est, big, j) < study.iqr(est, small, j))) ok = false;
    }
  }
  detail = "lt medians (" + fmt(study.median_estimate(EstimatorKind::LT, big, 1)) + ", " +
           fmt(study.median_estimate(EstimatorKind::LT, big, 2)) + "), strang (" +
           fmt(study.median_estimate(EstimatorKind::Strang, big, 1)) + ", " +
           fmt(study.median_estimate(EstimatorKind::Strang, big, 2)) + ")";
  cir_study_out = study;
  return ok;
}

// 7. Coarse-grid accuracy ordering of the diffusion-parameter estimators.
bool criterion7(std::string& detail) {
  const ModelSpec& cir = get_model("cir");
  const ParamVector truth{{2.0, 6.0, 0.2}};
  const StudyCell cell{0.5, 500};
  InferenceOptions opt;
  opt.fixed_mask = {true, false, false};
  opt.init = truth.values;
  const std::vector<EstimatorKind> ests = {EstimatorKind::LT, EstimatorKind::Strang,
                                           EstimatorKind::Kessler, EstimatorKind::EuM};
  const StudyTable study = inference_study(cir, truth, 1.0, ests, {cell}, 100, 2007, opt);
  // an estimator whose fits all fail at this step (Kessler's expansion
  // variance goes nonpositive) counts as infinitely inaccurate
  const auto mae = [&](EstimatorKind est) {
    const double v = study.median_abs_error(est, cell, 2);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  const double lt = mae(EstimatorKind::LT);
  const double strang = mae(EstimatorKind::Strang);
  const double kessler = mae(EstimatorKind::Kessler);
  const double eum = mae(EstimatorKind::EuM);
  detail = "MAE(b): strang=" + fmt(strang) + " lt=" + fmt(lt) + " kessler=" + fmt(kessler) +
           " eum=" + fmt(eum);
  // at theta*h = 1 both one-sided Gaussian surrogates shrink b-hat by roughly
  // (1 - e^{-2 theta h}) / (2 theta h); only the symmetric scheme stays close,
  // so the ordering anchors on Strang
  return strang <= lt && lt <= kessler && strang <= eum;
}

// 8. Ahn-Gao: the Strang pullback loses observations that LT handles.
bool criterion8(std::string& detail) {
  const ModelSpec& ag = get_model("ahn_gao");
  const ParamVector truth{{0.2, 2.0, 0.5}};
  const StudyCell cell{0.1, 5000};
  // all parameters free from a generic start: long heavy-tailed records make
  // the half-flow pullback threshold bite for Strang but not for LT
  const InferenceOptions opt;
  const StudyTable study = inference_study(ag, truth, 1.0, {EstimatorKind::LT, EstimatorKind::Strang},
                                           {cell}, 100, 2008, opt);
  std::size_t lt_ok = 0, strang_inverse = 0, n = 0;
  for (const auto* r : study.cell_rows(EstimatorKind::LT, cell)) {
    ++n;
    if (r->success()) ++lt_ok;
  }
  for (const auto* r : study.cell_rows(EstimatorKind::Strang, cell)) {
    if (r->fit.inverse_undefined_evals > 0 ||
        (r->failure && *r->failure == NllInvalidReason::inverse_undefined))
      ++strang_inverse;
  }
  detail = "lt converged " + std::to_string(lt_ok) + "/" + std::to_string(n) +
           ", strang inverse-undefined " + std::to_string(strang_inverse) + "/" + std::to_string(n);
  return lt_ok > n * 9 / 10 && strang_inverse * 2 > n;
}

// 9. One-step distributional accuracy ordering in Wasserstein-1.
bool criterion9(std::string& detail) {
  const ModelSpec& cir = get_model("cir");
  const ParamVector p{{2.0, 6.0, 0.2}};
  const std::size_t M = 100000;
  const double w_lt = one_step_wasserstein(cir, p, SchemeKind::LT, 0.1, 1.0, M, 2009);
  const double w_s = one_step_wasserstein(cir, p, SchemeKind::Strang, 0.1, 1.0, M, 2009);
  const double w_em = one_step_wasserstein(cir, p, SchemeKind::EuM, 0.1, 1.0, M, 2009);
  detail = "W1 strang=" + fmt(w_s) + " lt=" + fmt(w_lt) + " eum=" + fmt(w_em);
  return w_s < w_lt && w_lt < w_em;
}

// 10. Estimator errors look Gaussian at the CLT scale.
bool criterion10(std::string& detail) {
  const StudyCell cell{0.01, 2000};
  bool ok = true;
  std::string parts;

  const auto check_study = [&](const ModelSpec& model, const StudyTable& study, EstimatorKind est) {
    const NormalityDiagnostic d = normality_diagnostic(study, model, est, cell);
    for (const auto& pp : d.params) {
      if (!(std::abs(pp.skewness) < 0.5 && std::abs(pp.excess_kurtosis) < 1.0 &&
            pp.coverage >= 0.88 && pp.coverage <= 0.99))
        ok = false;
      parts += " [" + model.id + "/" + model.param_names[pp.param_index] +
               " skew=" + fmt(pp.skewness) + " kurt=" + fmt(pp.excess_kurtosis) +
               " cov=" + fmt(pp.coverage) + "]";
    }
  };

  const ModelSpec& ou = get_model("ou");
  InferenceOptions ou_opt;
  ou_opt.init = {2.0, 1.0};
  check_study(ou,
              inference_study(ou, {{2.0, 1.0}}, 1.0, {EstimatorKind::TrueMLE}, {cell}, 200, 2010,
                              ou_opt),
              EstimatorKind::TrueMLE);

  const ModelSpec& cir = get_model("cir");
  InferenceOptions cir_opt;
  cir_opt.fixed_mask = {true, false, false};
  cir_opt.init = {2.0, 6.0, 0.2};
  check_study(cir,
              inference_study(cir, {{2.0, 6.0, 0.2}}, 1.0, {EstimatorKind::LT}, {cell}, 200, 1234,
                              cir_opt),
              EstimatorKind::LT);

  detail = parts;
  return ok;
}

// 11. Library-wide invariant suite, inside the time budget.
bool criterion11(std::string& detail) {
  const auto t0 = Clock::now();
  const auto results = run_invariant_checks();
  const double elapsed = seconds_since(t0);
  std::size_t failed = 0;
  for (const auto& r : results)
    if (!r.passed) ++failed;
  detail = std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
           " checks in " + fmt(elapsed) + "s";
  return failed == 0 && elapsed < 120.0;
}

}  // namespace

int main() {
  Reporter rep;
  std::string detail;
  StudyTable unused;

  detail.clear(); rep.report(1, criterion1(detail), detail);
  detail.clear(); rep.report(2, criterion2(detail), detail);
  detail.clear(); rep.report(3, criterion3(detail), detail);
  detail.clear(); rep.report(4, criterion4(detail), detail);
  detail.clear(); rep.report(5, criterion5(detail), detail);
  detail.clear(); rep.report(6, criterion6(detail, unused), detail);
  detail.clear(); rep.report(7, criterion7(detail), detail);
  detail.clear(); rep.report(8, criterion8(detail), detail);
  detail.clear(); rep.report(9, criterion9(detail), detail);
  detail.clear(); rep.report(10, criterion10(detail), detail);
  detail.clear(); rep.report(11, criterion11(detail), detail);

  return rep.failures == 0 ? 0 : 1;
}
