#include "sdesplit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdesplit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace

OrderFit fit_order(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.s_n > 0.0 && std::isfinite(r.s_n)) {
      xs.push_back(std::log2(r.h));
      ys.push_back(std::log2(r.s_n));
    }
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_order: need >= 3 nonzero rows");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ConvergenceReport strong_error_curve(SchemeKind scheme, const ModelSpec& model,
                                     const ParamVector& p, double x0, double T,
                                     const std::vector<double>& h_list, double h_fine,
                                     std::size_t M, std::uint64_t seed,
                                     const StrongErrorOptions& opt) {
  model.check_valid(p);
  const auto n_fine_d = T / h_fine;
  const std::size_t n_fine = static_cast<std::size_t>(std::llround(n_fine_d));
  if (std::abs(n_fine_d - static_cast<double>(n_fine)) > 1e-9)
    throw std::invalid_argument("strong_error_curve: h_fine must divide T");

  std::vector<std::size_t> factors;
  for (double h : h_list) {
    const double f = h / h_fine;
    const auto fi = static_cast<std::size_t>(std::llround(f));
    if (fi == 0 || std::abs(f - static_cast<double>(fi)) > 1e-9 || n_fine % fi != 0)
      throw std::invalid_argument("strong_error_curve: h_list must nest over h_fine");
    factors.push_back(fi);
  }

  // Per-path squared endpoint errors, filled independently per index so the
  // result does not depend on thread scheduling.
  std::vector<std::vector<double>> sq_err(h_list.size(), std::vector<double>(M, kNaN));
  std::vector<double> checksums(M, 0.0);

  const SimulateOptions sim_opt{false, opt.truncate_to_state_space};
  const auto run_path = [&](std::size_t i) {
    const NoiseGrid grid = make_noise_grid({seed, i, Purpose::path_noise}, h_fine, n_fine);
    double cs = 0.0;
    for (double inc : grid.increments) cs += inc;
    checksums[i] = cs;
    double ref_end;
    try {
      ref_end = simulate_path(opt.reference_scheme, model, p, x0, grid, sim_opt).values.back();
    } catch (const PathAborted&) {
      return;  // leave NaN; excluded below
    }
    for (std::size_t j = 0; j < h_list.size(); ++j) {
      try {
        const NoiseGrid coarse = factors[j] == 1 ? grid : coarsen(grid, factors[j]);
        const double end = simulate_path(scheme, model, p, x0, coarse, sim_opt).values.back();
        const double d = end - ref_end;
        sq_err[j][i] = d * d;
      } catch (const PathAborted&) {
      }
    }
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!opt.serial)
#endif
  for (long long i = 0; i < static_cast<long long>(M); ++i)
    run_path(static_cast<std::size_t>(i));

  ConvergenceReport report;
  report.model_id = model.id;
  report.params = p;
  report.scheme = scheme;
  report.T = T;
  report.M = M;
  report.h_fine = h_fine;
  report.reference_scheme = opt.reference_scheme;
  for (std::size_t j = 0; j < h_list.size(); ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < M; ++i) {
      if (std::isfinite(sq_err[j][i])) {
        sum += sq_err[j][i];
        ++count;
      }
    }
    report.rows.push_back({h_list[j], count ? std::sqrt(sum / count) : kNaN});
  }
  for (double cs : checksums) report.grid_checksum += cs;
  bool all_zero = true;
  for (const auto& r : report.rows) all_zero = all_zero && r.s_n == 0.0;
  if (!all_zero) report.order = fit_order(report.rows);
  return report;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
  }
  const auto quantile = [](const std::vector<double>& xs, double q) {
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
  };
  const int grid = 10000;
  double sum = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double q = (i + 0.5) / grid;
    sum += std::abs(quantile(a, q) - quantile(b, q));
  }
  return sum / grid;
}

double one_step_wasserstein(const ModelSpec& model, const ParamVector& p, SchemeKind scheme,
                            double h, double x0, std::size_t M, std::uint64_t seed, bool serial) {
  model.check_valid(p);
  if (!model.has_exact_sampler())
    throw UnsupportedError(model.id + ": one_step_wasserstein needs an exact sampler");
  std::vector<double> approx(M), exact(M);
  const double root_h = std::sqrt(h);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (!serial)
#endif
  for (long long ll = 0; ll < static_cast<long long>(M); ++ll) {
    const auto i = static_cast<std::size_t>(ll);
    RandomStream noise({seed, i, Purpose::path_noise});
    if (scheme == SchemeKind::Exact) {
      approx[i] = model.exact_sample(p, h, x0, noise);
    } else {
      approx[i] = scheme_step(scheme, model, p, h, x0, root_h * noise.normal());
    }
    RandomStream exact_stream({seed, i, Purpose::bootstrap});
    exact[i] = model.exact_sample(p, h, x0, exact_stream);
  }
  return wasserstein1(std::move(approx), std::move(exact));
}

BiasScan bias_order_scan(const ModelSpec& model, const ParamVector& p, SchemeKind scheme, double x,
                         const std::vector<double>& h_list) {
  model.check_valid(p);
  if (!model.has_step_means() || !model.exact_mean)
    throw UnsupportedError(model.id + ": bias_order_scan needs closed-form and exact means");
  BiasScan scan;
  double max_bias = 0.0;
  for (double h : h_list) {
    const double bias =
        std::abs(closed_form_step_mean(model, p, scheme, h, x) - model.exact_mean(p, h, x));
    scan.rows.push_back({h, bias});
    max_bias = std::max(max_bias, bias);
  }
  if (max_bias < 1e-12 * (1.0 + std::abs(x))) {
    scan.degenerate_zero = true;
    return scan;
  }
  scan.slope = fit_order(scan.rows).slope;
  return scan;
}

std::vector<const FitRecord*> StudyTable::cell_rows(EstimatorKind estimator,
                                                    const StudyCell& cell) const {
  std::vector<const FitRecord*> out;
  for (const auto& r : rows) {
    if (r.estimator == estimator && r.cell.h_obs == cell.h_obs && r.cell.n_obs == cell.n_obs)
      out.push_back(&r);
  }
  return out;
}

double StudyTable::median_abs_error(EstimatorKind estimator, const StudyCell& cell,
                                    std::size_t param_index) const {
  std::vector<double> errs;
  for (const auto* r : cell_rows(estimator, cell))
    if (r->success())
      errs.push_back(std::abs(r->fit.params[param_index] - true_params[param_index]));
  return percentile(std::move(errs), 0.5);
}

double StudyTable::median_estimate(EstimatorKind estimator, const StudyCell& cell,
                                   std::size_t param_index) const {
  std::vector<double> vals;
  for (const auto* r : cell_rows(estimator, cell))
    if (r->success()) vals.push_back(r->fit.params[param_index]);
  return percentile(std::move(vals), 0.5);
}

double StudyTable::iqr(EstimatorKind estimator, const StudyCell& cell,
                       std::size_t param_index) const {
  std::vector<double> vals;
  for (const auto* r : cell_rows(estimator, cell))
    if (r->success()) vals.push_back(r->fit.params[param_index]);
  if (vals.empty()) return kNaN;
  return percentile(vals, 0.75) - percentile(vals, 0.25);
}

StudyTable inference_study(const ModelSpec& model, const ParamVector& p0, double x0,
                           const std::vector<EstimatorKind>& estimators,
                           const std::vector<StudyCell>& cells, std::size_t replicates,
                           std::uint64_t seed, const InferenceOptions& opt) {
  model.check_valid(p0);
  const std::size_t dim = model.param_names.size();
  std::vector<double> init = opt.init.empty() ? std::vector<double>(dim, 1.0) : opt.init;
  if (init.size() != dim) throw std::invalid_argument("inference_study: init size mismatch");
  if (!opt.fixed_mask.empty() && opt.fixed_mask.size() != dim)
    throw std::invalid_argument("inference_study: fixed_mask size mismatch");

  StudyTable table;
  table.model_id = model.id;
  table.true_params = p0;
  table.rows.resize(replicates * cells.size() * estimators.size());

  const auto run_replicate = [&](std::size_t r) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const StudyCell& cell = cells[c];
      ObservationSet obs;
      obs.model_id = model.id;
      obs.h_obs = cell.h_obs;
      if (!opt.fixed_mask.empty()) {
        obs.fixed_mask = opt.fixed_mask;
        obs.fixed_values = p0.values;
      }
      bool data_ok = true;
      try {
        // Data come from the exact transition law when the model has one,
        // otherwise from a fine LT path that is then subsampled.
        if (model.has_exact_sampler()) {
          RandomStream rng({seed, r * cells.size() + c, Purpose::path_noise});
          obs.values.push_back(x0);
          double x = x0;
          for (std::size_t k = 0; k < cell.n_obs; ++k) {
            x = model.exact_sample(p0, cell.h_obs, x, rng);
            obs.values.push_back(x);
          }
        } else {
          const double sub_d = cell.h_obs / opt.h_fine;
          const auto sub = static_cast<std::size_t>(std::llround(sub_d));
          if (sub == 0 || std::abs(sub_d - static_cast<double>(sub)) > 1e-9)
            throw std::invalid_argument("inference_study: h_fine must divide h_obs");
          const NoiseGrid grid = make_noise_grid({seed, r * cells.size() + c, Purpose::path_noise},
                                                 opt.h_fine, cell.n_obs * sub);
          const Trajectory traj = simulate_path(SchemeKind::LT, model, p0, x0, grid);
          for (std::size_t k = 0; k <= cell.n_obs; ++k) obs.values.push_back(traj.values[k * sub]);
        }
      } catch (const std::exception&) {
        data_ok = false;
      }
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        FitRecord rec;
        rec.replicate = r;
        rec.estimator = estimators[e];
        rec.cell = cell;
        if (!data_ok) {
          rec.fit.estimator = estimators[e];
          rec.fit.nll = std::numeric_limits<double>::infinity();
          rec.failure = NllInvalidReason::domain_violation;
        } else {
          try {
            rec.fit = fit(estimators[e], model, obs, init);
            const NllValue at_opt =
                pseudo_nll(estimators[e], model, ParamVector{rec.fit.params}, obs);
            rec.failure = at_opt.reason;
          } catch (const std::exception&) {
            rec.fit.estimator = estimators[e];
            rec.fit.nll = std::numeric_limits<double>::infinity();
            // classify by the pseudo-NLL reason at the starting point (e.g.
            // Strang data with no half-flow preimage gives inverse_undefined)
            ParamVector start{init};
            if (!opt.fixed_mask.empty())
              for (std::size_t j = 0; j < dim; ++j)
                if (opt.fixed_mask[j]) start.values[j] = p0[j];
            const NllValue at_init = pseudo_nll(estimators[e], model, start, obs);
            rec.failure = at_init.reason ? at_init.reason : NllInvalidReason::domain_violation;
          }
        }
        table.rows[(r * cells.size() + c) * estimators.size() + e] = std::move(rec);
      }
    }
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!opt.serial)
#endif
  for (long long r = 0; r < static_cast<long long>(replicates); ++r)
    run_replicate(static_cast<std::size_t>(r));

  return table;
}

double sample_skewness(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

double sample_excess_kurtosis(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

NormalityDiagnostic normality_diagnostic(const StudyTable& study, const ModelSpec& model,
                                         EstimatorKind estimator, const StudyCell& cell) {
  const auto records = study.cell_rows(estimator, cell);
  NormalityDiagnostic diag;
  diag.n_total = records.size();
  std::vector<const FitRecord*> ok;
  for (const auto* r : records)
    if (r->success()) ok.push_back(r);
  diag.n_converged = ok.size();
  if (ok.size() < 50)
    throw std::invalid_argument("normality_diagnostic: need >= 50 converged replicates");

  const double N = static_cast<double>(cell.n_obs);
  for (std::size_t j = 0; j < model.param_names.size(); ++j) {
    const double scale = model.diffusion_block[j] ? std::sqrt(N) : std::sqrt(N * cell.h_obs);
    std::vector<double> errs;
    for (const auto* r : ok)
      errs.push_back(scale * (r->fit.params[j] - study.true_params[j]));
    const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    var /= errs.size();
    if (!(var > 0.0)) continue;  // fixed parameter: no distribution to test
    NormalityDiagnostic::PerParam pp;
    pp.param_index = j;
    pp.skewness = sample_skewness(errs);
    pp.excess_kurtosis = sample_excess_kurtosis(errs);
    const double sd = std::sqrt(var);
    std::size_t inside = 0;
    for (double e : errs)
      if (std::abs(e - mean) <= 1.96 * sd) ++inside;
    pp.coverage = static_cast<double>(inside) / errs.size();
    diag.params.push_back(pp);
  }
  return diag;
}

}  // namespace sdesplit
