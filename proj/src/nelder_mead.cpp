#include "sdesplit/nelder_mead.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace sdesplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simplex_diameter(const std::vector<std::vector<double>>& verts) {
  double d = 0.0;
  for (std::size_t i = 1; i < verts.size(); ++i)
    for (std::size_t j = 0; j < verts[0].size(); ++j)
      d = std::max(d, std::abs(verts[i][j] - verts[0][j]));
  return d;
}

}  // namespace

FitResult nelder_mead(const Objective& objective, const std::vector<double>& x0,
                      const NmConfig& cfg) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: dimension must be >= 1");
  const std::size_t max_iter = cfg.max_iterations ? cfg.max_iterations : 500 * n;

  const auto t_start = std::chrono::steady_clock::now();

  // Axis-aligned initial simplex; if every vertex is +inf, halve the
  // perturbations up to 10 times before giving up.
  std::vector<std::vector<double>> verts;
  std::vector<double> vals;
  double scale = cfg.initial_simplex_scale;
  for (int attempt = 0;; ++attempt) {
    verts.assign(1, x0);
    vals.assign(1, objective(x0));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v = x0;
      v[i] += std::max(scale * std::abs(x0[i]), scale);
      verts.push_back(v);
      vals.push_back(objective(v));
    }
    const bool any_finite =
        std::any_of(vals.begin(), vals.end(), [](double f) { return std::isfinite(f); });
    if (any_finite) break;
    if (attempt >= 10)
      throw NonFiniteObjective("nelder_mead: initial simplex entirely non-finite");
    scale /= 2.0;
  }

  // Keep vertices sorted by value, lowest index winning ties (stable).
  std::vector<std::size_t> order(n + 1);
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> v2;
    std::vector<double> f2;
    for (std::size_t idx : order) {
      v2.push_back(std::move(verts[idx]));
      f2.push_back(vals[idx]);
    }
    verts = std::move(v2);
    vals = std::move(f2);
  };
  sort_simplex();

  FitResult res;
  res.termination = NmTermination::max_iterations;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    if (simplex_diameter(verts) <= cfg.x_tolerance) {
      res.termination = NmTermination::x_tolerance;
      break;
    }
    if (std::isfinite(vals[n]) && vals[n] - vals[0] <= cfg.f_tolerance) {
      res.termination = NmTermination::f_tolerance;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j];
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto blend = [&](double t) {
      std::vector<double> v(n);
      for (std::size_t j = 0; j < n; ++j) v[j] = centroid[j] + t * (verts[n][j] - centroid[j]);
      return v;
    };

    const std::vector<double> xr = blend(-cfg.reflection);
    const double fr = objective(xr);
    if (fr < vals[0]) {
      // Only expand toward a finite improvement.
      const std::vector<double> xe = blend(-cfg.reflection * cfg.expansion);
      const double fe = objective(xe);
      if (fe < fr) {
        verts[n] = xe;
        vals[n] = fe;
      } else {
        verts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      verts[n] = xr;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const std::vector<double> xc =
          blend(outside ? -cfg.reflection * cfg.contraction : cfg.contraction);
      const double fc = objective(xc);
      if (fc < std::min(fr, vals[n])) {
        verts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            verts[i][j] = verts[0][j] + cfg.shrink * (verts[i][j] - verts[0][j]);
          vals[i] = objective(verts[i]);
        }
      }
    }
    sort_simplex();
  }

  res.params = verts[0];
  res.nll = vals[0];
  res.iterations = iter;
  res.converged = res.termination == NmTermination::x_tolerance ||
                  res.termination == NmTermination::f_tolerance;
  res.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  return res;
}

FitResult fit(EstimatorKind estimator, const ModelSpec& model, const ObservationSet& obs,
              const std::vector<double>& init, const NmConfig& cfg) {
  const std::size_t dim = model.param_names.size();
  if (init.size() != dim) throw std::invalid_argument("fit: init size != parameter count");
  std::vector<bool> fixed(dim, false);
  if (!obs.fixed_mask.empty()) {
    if (obs.fixed_mask.size() != dim || obs.fixed_values.size() != dim)
      throw std::invalid_argument("fit: fixed_mask/fixed_values size mismatch");
    fixed = obs.fixed_mask;
  }

  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < dim; ++i)
    if (!fixed[i]) free_idx.push_back(i);
  if (free_idx.empty()) throw std::invalid_argument("fit: all parameters fixed");

  std::vector<double> full(dim);
  for (std::size_t i = 0; i < dim; ++i) full[i] = fixed[i] ? obs.fixed_values[i] : init[i];

  std::size_t inverse_undefined = 0;
  const Objective objective = [&](const std::vector<double>& x) {
    std::vector<double> candidate = full;
    for (std::size_t i = 0; i < free_idx.size(); ++i) candidate[free_idx[i]] = x[i];
    const NllValue nll = pseudo_nll(estimator, model, ParamVector{candidate}, obs);
    if (nll.reason == NllInvalidReason::inverse_undefined) ++inverse_undefined;
    return nll.value;
  };

  std::vector<double> x0;
  for (std::size_t i : free_idx) x0.push_back(full[i]);

  FitResult res = nelder_mead(objective, x0, cfg);
  res.estimator = estimator;
  res.inverse_undefined_evals = inverse_undefined;
  std::vector<double> best = full;
  for (std::size_t i = 0; i < free_idx.size(); ++i) best[free_idx[i]] = res.params[i];
  res.params = std::move(best);
  return res;
}

}  // namespace sdesplit
