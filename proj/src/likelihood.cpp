#include "sdesplit/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdesplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// One-pair log transition density with a failure reason. value == -inf
// means zero density; reason distinguishes why when it matters (Strang
// inverse flow leaving the state space vs. a plain out-of-support point).
struct LogDensity {
  double value = -kInf;
  std::optional<NllInvalidReason> reason;
};

double log_sum_exp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// Density of v^{-1}(G) at y, G ~ Normal(m, h): the branch sum
// sum_j f_N(y_j; m, h) / g(y) over preimages v^{-1}(y_j) = y. Each
// branch Jacobian |d v^{-1}/dy| equals g at the branch image, which is
// what collapses the sum to a single 1/g(y) factor.
LogDensity pushforward_log_density(const ModelSpec& model, const ParamVector& p,
                                   const StateSpace& space, double h, double m, double y) {
  LogDensity out;
  if (!std::isfinite(y) || !space.contains(y)) return out;
  const double gy = model.diffusion(p, y);
  if (!(gy > 0.0) || !std::isfinite(gy)) return out;

  std::vector<double> preimages;
  try {
    if (model.lamperti_inv_monotone) {
      preimages.push_back(model.lamperti(p, y));
    } else {
      const double half_window = 6.0 * std::sqrt(h);
      preimages = model.lamperti_preimages(p, y, m - half_window, m + half_window);
    }
  } catch (const DomainError&) {
    out.reason = NllInvalidReason::domain_violation;
    return out;
  }
  if (preimages.empty()) return out;

  std::vector<double> exponents;
  exponents.reserve(preimages.size());
  for (double yj : preimages) exponents.push_back(-(yj - m) * (yj - m) / (2.0 * h));
  const double lse = log_sum_exp(exponents);
  if (lse == -kInf) return out;
  out.value = lse - 0.5 * (kLog2Pi + std::log(h)) - std::log(gy);
  return out;
}

LogDensity lt_log_density(const ModelSpec& model, const ParamVector& p, double h, double x0,
                          double y) {
  LogDensity out;
  const StateSpace space = model.state_space(p);
  double m;
  try {
    m = model.lamperti(p, phi1_flow(model, p, h, x0)) + model.lamperti_mean_shift(p, h);
  } catch (const DomainError&) {
    out.reason = NllInvalidReason::domain_violation;
    return out;
  }
  return pushforward_log_density(model, p, space, h, m, y);
}

LogDensity strang_log_density(const ModelSpec& model, const ParamVector& p, double h, double x0,
                              double y) {
  LogDensity out;
  const StateSpace space = model.state_space(p);
  double m;
  try {
    m = model.lamperti(p, phi1_flow(model, p, h / 2.0, x0)) + model.lamperti_mean_shift(p, h);
  } catch (const DomainError&) {
    out.reason = NllInvalidReason::domain_violation;
    return out;
  }
  // Pull y back through the second half-flow; points outside its image
  // carry zero density (the Ahn-Gao "inverse not well defined" failure).
  double w;
  double jac;
  try {
    w = model.ode_flow_inverse(p, h / 2.0, y);
    jac = model.ode_flow_inverse_dy(p, h / 2.0, y);
  } catch (const DomainError&) {
    out.reason = NllInvalidReason::inverse_undefined;
    return out;
  }
  if (!std::isfinite(w) || !space.contains(w) || !std::isfinite(jac)) {
    out.reason = NllInvalidReason::inverse_undefined;
    return out;
  }
  LogDensity core = pushforward_log_density(model, p, space, h, m, w);
  if (core.value == -kInf) return core;
  core.value += std::log(std::abs(jac));
  return core;
}

double gaussian_log_density(double y, double mean, double variance) {
  return -(y - mean) * (y - mean) / (2.0 * variance) - 0.5 * (kLog2Pi + std::log(variance));
}

LogDensity em_log_density(const ModelSpec& model, const ParamVector& p, double h, double x0,
                          double y) {
  LogDensity out;
  const double g = model.diffusion(p, x0);
  const double var = g * g * h;
  if (!(var > 0.0) || !std::isfinite(var)) {
    out.reason = NllInvalidReason::domain_violation;
    return out;
  }
  const double mean = x0 + model.drift(p, x0) * h;
  out.value = gaussian_log_density(y, mean, var);
  if (!std::isfinite(out.value)) out.reason = NllInvalidReason::domain_violation;
  return out;
}

LogDensity kessler_log_density(const ModelSpec& model, const ParamVector& p, double h, double x0,
                               double y) {
  LogDensity out;
  double mean, var;
  kessler_moments(model, p, h, x0, mean, var);
  if (!(var > 0.0) || !std::isfinite(var) || !std::isfinite(mean)) {
    out.reason = NllInvalidReason::params_invalid;
    return out;
  }
  out.value = gaussian_log_density(y, mean, var);
  return out;
}

LogDensity lamperti_em_log_density(const ModelSpec& model, const ParamVector& p, double h,
                                   double x0, double y) {
  LogDensity out;
  const StateSpace space = model.state_space(p);
  if (!space.contains(y)) return out;
  try {
    const double v0 = model.lamperti(p, x0);
    const double mean = v0 + lamperti_drift(model, p, v0) * h;
    const double gy = model.diffusion(p, y);
    if (!(gy > 0.0)) return out;
    out.value = gaussian_log_density(model.lamperti(p, y), mean, h) - std::log(gy);
  } catch (const DomainError&) {
    out.reason = NllInvalidReason::domain_violation;
  }
  return out;
}

LogDensity exact_log_density(const ModelSpec& model, const ParamVector& p, double h, double x0,
                             double y) {
  if (!model.exact_density)
    throw UnsupportedError(model.id + ": no exact transition density");
  LogDensity out;
  const double f = model.exact_density(p, h, x0, y);
  if (f > 0.0 && std::isfinite(f)) out.value = std::log(f);
  return out;
}

LogDensity estimator_log_density(EstimatorKind estimator, const ModelSpec& model,
                                 const ParamVector& p, double h, double x0, double y) {
  switch (estimator) {
    case EstimatorKind::LT:
      return lt_log_density(model, p, h, x0, y);
    case EstimatorKind::Strang:
      return strang_log_density(model, p, h, x0, y);
    case EstimatorKind::Kessler:
      return kessler_log_density(model, p, h, x0, y);
    case EstimatorKind::EuM:
      return em_log_density(model, p, h, x0, y);
    case EstimatorKind::LampertiEuM:
      return lamperti_em_log_density(model, p, h, x0, y);
    case EstimatorKind::TrueMLE:
      return exact_log_density(model, p, h, x0, y);
    case EstimatorKind::Hermite:
      throw UnsupportedError("Hermite estimator is not implemented");
  }
  throw std::invalid_argument("unknown estimator");
}

NllValue accumulate_nll(EstimatorKind estimator, const ModelSpec& model, const ParamVector& p,
                        const ObservationSet& obs) {
  NllValue out;
  out.n_terms = obs.n_transitions();
  if (obs.values.size() < 2 || !(obs.h_obs > 0.0))
    throw std::invalid_argument("pseudo_nll: need h_obs > 0 and at least one transition");
  if (p.size() != model.param_names.size() || !model.valid(p)) {
    out.value = kInf;
    out.reason = NllInvalidReason::params_invalid;
    return out;
  }
  const double h = obs.h_obs;
  double sum = 0.0;
  for (std::size_t k = 1; k < obs.values.size(); ++k) {
    const LogDensity d = estimator_log_density(estimator, model, p, h, obs.values[k - 1],
                                               obs.values[k]);
    if (d.value == -kInf || !std::isfinite(d.value)) {
      out.value = kInf;
      out.reason = d.reason ? d.reason : std::optional(NllInvalidReason::domain_violation);
      return out;
    }
    sum -= d.value;
  }
  out.value = sum + static_cast<double>(out.n_terms) * nll_constant(h);
  return out;
}

}  // namespace

double nll_constant(double h) { return -0.5 * (kLog2Pi + std::log(h)); }

NllValue lt_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  return accumulate_nll(EstimatorKind::LT, m, p, o);
}
NllValue strang_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  return accumulate_nll(EstimatorKind::Strang, m, p, o);
}
NllValue kessler_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  return accumulate_nll(EstimatorKind::Kessler, m, p, o);
}
NllValue em_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  return accumulate_nll(EstimatorKind::EuM, m, p, o);
}
NllValue lamperti_em_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  return accumulate_nll(EstimatorKind::LampertiEuM, m, p, o);
}
NllValue true_mle_nll(const ModelSpec& m, const ParamVector& p, const ObservationSet& o) {
  if (!m.exact_density) throw UnsupportedError(m.id + ": no exact transition density");
  return accumulate_nll(EstimatorKind::TrueMLE, m, p, o);
}

NllValue pseudo_nll(EstimatorKind estimator, const ModelSpec& model, const ParamVector& p,
                    const ObservationSet& obs) {
  return accumulate_nll(estimator, model, p, obs);
}

void kessler_moments(const ModelSpec& model, const ParamVector& p, double h, double x,
                     double& mean, double& variance) {
  const double f = model.drift(p, x);
  const double g = model.diffusion(p, x);
  const double g2 = g * g;

  const StateSpace space = model.state_space(p);
  double eps = 1e-5 * (1.0 + std::abs(x));
  if (std::isfinite(space.lower) && x - eps <= space.lower) eps = (x - space.lower) / 2.0;
  if (std::isfinite(space.upper) && x + eps >= space.upper)
    eps = std::min(eps, (space.upper - x) / 2.0);
  if (!(eps > 0.0)) {  // hugging a boundary; fall back to first order
    mean = x + f * h;
    variance = g2 * h;
    return;
  }
  // Second-order expansion E[u(X_h)|x] ~ u + h Lu + h^2/2 L^2 u for
  // u(x) = x and u(x) = x^2, with L w = f w' + g^2 w''/2 and the outer
  // derivatives taken by central differences.
  const auto generator = [&](const auto& w) {
    const double wp = (w(x + eps) - w(x - eps)) / (2.0 * eps);
    const double wpp = (w(x + eps) - 2.0 * w(x) + w(x - eps)) / (eps * eps);
    return f * wp + 0.5 * g2 * wpp;
  };
  const auto Lx = [&](double z) { return model.drift(p, z); };
  const auto Lx2 = [&](double z) {
    const double gz = model.diffusion(p, z);
    return 2.0 * z * model.drift(p, z) + gz * gz;
  };
  mean = x + h * f + 0.5 * h * h * generator(Lx);
  const double second = x * x + h * Lx2(x) + 0.5 * h * h * generator(Lx2);
  variance = second - mean * mean;
}

double transition_density(const ModelSpec& model, const ParamVector& p, EstimatorKind estimator,
                          double h, double x0, double y) {
  model.check_valid(p);
  if (!(h > 0.0)) throw std::invalid_argument("transition_density: h must be positive");
  const LogDensity d = estimator_log_density(estimator, model, p, h, x0, y);
  return d.value == -kInf ? 0.0 : std::exp(d.value);
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "lt") return EstimatorKind::LT;
  if (name == "strang" || name == "s") return EstimatorKind::Strang;
  if (name == "kessler") return EstimatorKind::Kessler;
  if (name == "eum" || name == "em") return EstimatorKind::EuM;
  if (name == "lamperti_eum") return EstimatorKind::LampertiEuM;
  if (name == "true_mle" || name == "exact") return EstimatorKind::TrueMLE;
  if (name == "hermite") return EstimatorKind::Hermite;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::LT: return "lt";
    case EstimatorKind::Strang: return "strang";
    case EstimatorKind::Kessler: return "kessler";
    case EstimatorKind::EuM: return "eum";
    case EstimatorKind::LampertiEuM: return "lamperti_eum";
    case EstimatorKind::TrueMLE: return "true_mle";
    case EstimatorKind::Hermite: return "hermite";
  }
  return "?";
}

}  // namespace sdesplit
