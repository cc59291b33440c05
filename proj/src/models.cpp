#include "sdesplit/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace sdesplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// ---------------------------------------------------------------------------
// Pearson family plumbing.
//
// dX = -theta (X - mu) dt + sqrt(2 theta (ap x^2 + bp x + cp)) dW.
// The ODE subequation is linear with
//   theta_t = theta (1 + ap),   mu_t = (mu - bp/2) / (1 + ap),
// and flow phi1_h(x) = mu_t + exp(-theta_t h) (x - mu_t).

struct PearsonShape {
  double ap, bp;  // cp does not enter the linear ODE
};

struct PearsonParams {
  double theta, mu, mu_t, theta_t;
};

PearsonParams pearson_params(const PearsonShape& s, double theta, double mu) {
  PearsonParams q;
  q.theta = theta;
  q.mu = mu;
  q.theta_t = theta * (1.0 + s.ap);
  q.mu_t = (mu - s.bp / 2.0) / (1.0 + s.ap);
  return q;
}

double pearson_flow(const PearsonParams& q, double h, double x) {
  return q.mu_t + std::exp(-q.theta_t * h) * (x - q.mu_t);
}

double pearson_flow_inverse(const PearsonParams& q, double h, double y) {
  return q.mu_t + std::exp(q.theta_t * h) * (y - q.mu_t);
}

// Adaptive step bound for attainable lower boundary 0 (CIR, F): the largest
// h* with phi1_{h*}(x) >= 0. Strang applies the same bound per half-flow,
// doubling it.
double pearson_adaptive(const PearsonParams& q, bool strang, double h, double x) {
  if (x <= 0.0) throw DomainError("adaptive_step: x must be positive");
  if (q.mu_t >= 0.0) return h;
  const double bound = -std::log(-q.mu_t / (x - q.mu_t)) / q.theta_t;
  return std::min(h, strang ? 2.0 * bound : bound);
}

// Builds ode_flow / inverse / step means shared by all Pearson models.
// `sde_mean(p, h, z)` is E[phi2_h(z)], the one-step mean of the SDE flow.
template <typename Shape, typename SdeMean>
void install_pearson(ModelSpec& m, Shape shape, SdeMean sde_mean) {
  m.ode_flow = [shape](const ParamVector& p, double h, double x) {
    return pearson_flow(pearson_params(shape(p), p[0], p[1]), h, x);
  };
  m.ode_flow_inverse = [shape](const ParamVector& p, double h, double y) {
    return pearson_flow_inverse(pearson_params(shape(p), p[0], p[1]), h, y);
  };
  m.ode_flow_inverse_dy = [shape](const ParamVector& p, double h, double) {
    return std::exp(pearson_params(shape(p), p[0], p[1]).theta_t * h);
  };
  m.step_mean_lt = [shape, sde_mean](const ParamVector& p, double h, double x) {
    const auto q = pearson_params(shape(p), p[0], p[1]);
    return sde_mean(p, h, pearson_flow(q, h, x));
  };
  m.step_mean_strang = [shape, sde_mean](const ParamVector& p, double h, double x) {
    const auto q = pearson_params(shape(p), p[0], p[1]);
    const double z = pearson_flow(q, h / 2.0, x);
    return pearson_flow(q, h / 2.0, sde_mean(p, h, z));
  };
}

void install_default_sde_flow(ModelSpec& m) {
  m.sde_flow = [v = m.lamperti, vinv = m.lamperti_inv](const ParamVector& p, double, double x,
                                                       double xi) {
    return vinv(p, xi + v(p, x));
  };
  m.lamperti_mean_shift = [](const ParamVector&, double) { return 0.0; };
}

void install_canonical_split(ModelSpec& m) {
  m.split_ode_drift = [f = m.drift, g = m.diffusion, gx = m.diffusion_dx](const ParamVector& p,
                                                                          double x) {
    return f(p, x) - 0.5 * g(p, x) * gx(p, x);
  };
  m.split_sde_drift = [g = m.diffusion, gx = m.diffusion_dx](const ParamVector& p, double x) {
    return 0.5 * g(p, x) * gx(p, x);
  };
}

// ---------------------------------------------------------------------------
// CIR exact transition law (noncentral chi-square, Ahn-Gao reuses it).

struct CirLaw {
  double theta, mu, b;
};

double cir_exact_sample(const CirLaw& c, double t, double x0, RandomStream& rng) {
  const double e = std::exp(-c.theta * t);
  const double scale = (1.0 - e) * c.b / 2.0;
  const double dof = 2.0 * c.mu / c.b;
  const double lambda = x0 * e / scale;
  return scale * rng.noncentral_chi_square(dof, lambda);
}

double cir_exact_log_density(const CirLaw& c, double t, double x0, double y) {
  if (y <= 0.0) return -kInf;
  const double e = std::exp(-c.theta * t);
  const double scale = (1.0 - e) * c.b / 2.0;
  const double dof = 2.0 * c.mu / c.b;
  const double lambda = x0 * e / scale;
  const double w = y / scale;
  const double nu = dof / 2.0 - 1.0;
  double logf;
  if (lambda < 1e-300) {
    logf = -w / 2.0 + nu * std::log(w / 2.0) - std::lgamma(dof / 2.0) - std::log(2.0);
  } else {
    logf = -(w + lambda) / 2.0 + (nu / 2.0) * std::log(w / lambda) +
           log_bessel_i(nu, std::sqrt(lambda * w)) - std::log(2.0);
  }
  return logf - std::log(scale);
}

}  // namespace

double log_bessel_i(double nu, double z) {
  if (z < 0.0 || nu < -1.0) throw std::invalid_argument("log_bessel_i: bad arguments");
  if (z == 0.0) return nu == 0.0 ? 0.0 : -kInf;
  // Series sum_m (z/2)^{2m+nu} / (m! Gamma(m+nu+1)), accumulated in log
  // space around the largest term; the dominant index is near z/2.
  const double lz = std::log(z / 2.0);
  const int m_max = static_cast<int>(z + 40.0 + 10.0 * std::sqrt(z)) + 20;
  double max_term = -kInf;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    const double t =
        (2.0 * m + nu) * lz - std::lgamma(m + 1.0) - std::lgamma(m + nu + 1.0);
    terms.push_back(t);
    max_term = std::max(max_term, t);
    if (m > z / 2.0 + 5.0 && t < max_term - 745.0) break;
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

namespace {

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck: g(x) = sqrt(2 theta).

ModelSpec make_ou() {
  ModelSpec m;
  m.id = "ou";
  m.param_names = {"theta", "mu"};
  m.diffusion_block = {true, false};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0; };
  m.state_space = [](const ParamVector&) { return StateSpace{}; };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double) { return std::sqrt(2.0 * p[0]); };
  m.diffusion_dx = [](const ParamVector&, double) { return 0.0; };
  install_canonical_split(m);
  m.lamperti = [](const ParamVector& p, double x) { return x / std::sqrt(2.0 * p[0]); };
  m.lamperti_inv = [](const ParamVector& p, double y) { return std::sqrt(2.0 * p[0]) * y; };
  m.lamperti_inv_monotone = true;
  install_default_sde_flow(m);
  auto shape = [](const ParamVector&) { return PearsonShape{0.0, 0.0}; };
  install_pearson(m, shape, [](const ParamVector&, double, double z) { return z; });
  m.exact_mean = [](const ParamVector& p, double t, double x) {
    return p[1] + (x - p[1]) * std::exp(-p[0] * t);
  };
  m.exact_variance = [](const ParamVector& p, double t, double) {
    return 1.0 - std::exp(-2.0 * p[0] * t);
  };
  m.exact_sample = [](const ParamVector& p, double t, double x0, RandomStream& rng) {
    const double mean = p[1] + (x0 - p[1]) * std::exp(-p[0] * t);
    return mean + std::sqrt(1.0 - std::exp(-2.0 * p[0] * t)) * rng.normal();
  };
  m.exact_density = [](const ParamVector& p, double t, double x0, double y) {
    const double mean = p[1] + (x0 - p[1]) * std::exp(-p[0] * t);
    const double var = 1.0 - std::exp(-2.0 * p[0] * t);
    return std::exp(-0.5 * sq(y - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
  };
  return m;
}

// ---------------------------------------------------------------------------
// Cox-Ingersoll-Ross: g(x) = sqrt(2 theta b x).

ModelSpec make_cir() {
  ModelSpec m;
  m.id = "cir";
  m.param_names = {"theta", "mu", "b"};
  m.diffusion_block = {true, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector& p) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    s.lower_kind = p[1] >= p[2] ? BoundaryKind::entrance : BoundaryKind::attainable;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double x) { return std::sqrt(2.0 * p[0] * p[2] * x); };
  m.diffusion_dx = [](const ParamVector& p, double x) {
    return std::sqrt(2.0 * p[0] * p[2]) / (2.0 * std::sqrt(x));
  };
  install_canonical_split(m);
  m.lamperti = [](const ParamVector& p, double x) {
    if (x < 0.0) throw DomainError("cir: v(x) undefined for x < 0");
    return std::sqrt(2.0 * x / (p[0] * p[2]));
  };
  m.lamperti_inv = [](const ParamVector& p, double y) { return p[0] * p[2] * y * y / 2.0; };
  m.lamperti_inv_monotone = false;
  m.lamperti_preimages = [v = m.lamperti](const ParamVector& p, double x, double, double) {
    const double y = v(p, x);
    return std::vector<double>{-y, y};
  };
  install_default_sde_flow(m);
  auto shape = [](const ParamVector& p) { return PearsonShape{0.0, p[2]}; };
  install_pearson(m, shape, [](const ParamVector& p, double h, double z) {
    return z + p[0] * p[2] * h / 2.0;
  });
  m.adaptive_step_fn = [shape](const ParamVector& p, bool strang, double h, double x) {
    return pearson_adaptive(pearson_params(shape(p), p[0], p[1]), strang, h, x);
  };
  m.exact_mean = [](const ParamVector& p, double t, double x) {
    return p[1] + (x - p[1]) * std::exp(-p[0] * t);
  };
  m.exact_variance = [](const ParamVector& p, double t, double x) {
    const double e = std::exp(-p[0] * t);
    return 2.0 * p[2] * x * (e - e * e) + p[1] * p[2] * sq(1.0 - e);
  };
  m.exact_sample = [](const ParamVector& p, double t, double x0, RandomStream& rng) {
    return cir_exact_sample(CirLaw{p[0], p[1], p[2]}, t, x0, rng);
  };
  m.exact_density = [](const ParamVector& p, double t, double x0, double y) {
    return std::exp(cir_exact_log_density(CirLaw{p[0], p[1], p[2]}, t, x0, y));
  };
  return m;
}

// ---------------------------------------------------------------------------
// Student diffusion: g(x) = sqrt(2 a theta (x^2 + 1)), a > 0.

ModelSpec make_student() {
  ModelSpec m;
  m.id = "student";
  m.param_names = {"theta", "mu", "a"};
  m.diffusion_block = {true, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector&) { return StateSpace{}; };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double x) {
    return std::sqrt(2.0 * p[2] * p[0] * (x * x + 1.0));
  };
  m.diffusion_dx = [g = m.diffusion](const ParamVector& p, double x) {
    return 2.0 * p[2] * p[0] * x / g(p, x);
  };
  install_canonical_split(m);
  m.lamperti = [](const ParamVector& p, double x) {
    return std::asinh(x) / std::sqrt(2.0 * p[0] * p[2]);
  };
  m.lamperti_inv = [](const ParamVector& p, double y) {
    return std::sinh(std::sqrt(2.0 * p[0] * p[2]) * y);
  };
  m.lamperti_inv_monotone = true;
  install_default_sde_flow(m);
  auto shape = [](const ParamVector& p) { return PearsonShape{p[2], 0.0}; };
  // E[sinh(c xi + asinh z)] = z exp(c^2 h / 2) with c = sqrt(2 theta a).
  install_pearson(m, shape, [](const ParamVector& p, double h, double z) {
    return z * std::exp(p[0] * p[2] * h);
  });
  return m;
}

// ---------------------------------------------------------------------------
// Inhomogeneous geometric Brownian motion: g(x) = sqrt(2 theta a) x.

ModelSpec make_igbm() {
  ModelSpec m;
  m.id = "igbm";
  m.param_names = {"theta", "mu", "a"};
  m.diffusion_block = {true, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector&) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    s.lower_kind = BoundaryKind::entrance;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double x) { return std::sqrt(2.0 * p[0] * p[2]) * x; };
  m.diffusion_dx = [](const ParamVector& p, double) { return std::sqrt(2.0 * p[0] * p[2]); };
  install_canonical_split(m);
  m.lamperti = [](const ParamVector& p, double x) {
    if (x <= 0.0) throw DomainError("igbm: v(x) undefined for x <= 0");
    return std::log(x) / std::sqrt(2.0 * p[0] * p[2]);
  };
  m.lamperti_inv = [](const ParamVector& p, double y) {
    return std::exp(std::sqrt(2.0 * p[0] * p[2]) * y);
  };
  m.lamperti_inv_monotone = true;
  install_default_sde_flow(m);
  auto shape = [](const ParamVector& p) { return PearsonShape{p[2], 0.0}; };
  install_pearson(m, shape, [](const ParamVector& p, double h, double z) {
    return z * std::exp(p[0] * p[2] * h);
  });
  return m;
}

// ---------------------------------------------------------------------------
// F diffusion: g(x) = sqrt(2 a theta x (x + 1)), a > 0.

ModelSpec make_f_diffusion() {
  ModelSpec m;
  m.id = "f";
  m.param_names = {"theta", "mu", "a"};
  m.diffusion_block = {true, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector& p) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    // mu >= 1 gives an entrance boundary at 0; ergodicity only needs
    // mu >= a. Both regimes exist; we key the enum on the entrance bound.
    s.lower_kind = p[1] >= 1.0 ? BoundaryKind::entrance : BoundaryKind::attainable;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double x) {
    return std::sqrt(2.0 * p[2] * p[0] * x * (x + 1.0));
  };
  m.diffusion_dx = [g = m.diffusion](const ParamVector& p, double x) {
    return p[2] * p[0] * (2.0 * x + 1.0) / g(p, x);
  };
  install_canonical_split(m);
  // v(x) = (2/c) asinh(sqrt(x)); the paper's -ln(sqrt(1+x)-sqrt(x)) form
  // cancels catastrophically for large x.
  m.lamperti = [](const ParamVector& p, double x) {
    if (x < 0.0) throw DomainError("f: v(x) undefined for x < 0");
    return 2.0 * std::asinh(std::sqrt(x)) / std::sqrt(2.0 * p[0] * p[2]);
  };
  m.lamperti_inv = [](const ParamVector& p, double y) {
    return sq(std::sinh(std::sqrt(2.0 * p[0] * p[2]) * y / 2.0));
  };
  m.lamperti_inv_monotone = false;
  m.lamperti_preimages = [v = m.lamperti](const ParamVector& p, double x, double, double) {
    const double y = v(p, x);
    return std::vector<double>{-y, y};
  };
  install_default_sde_flow(m);
  auto shape = [](const ParamVector& p) { return PearsonShape{p[2], p[2]}; };
  // E[sinh^2(c xi / 2 + u)] with u = asinh(sqrt(z)) = -ln l:
  // exp(a theta h) (l^2 + l^-2) / 4 - 1/2.
  install_pearson(m, shape, [](const ParamVector& p, double h, double z) {
    const double u = std::asinh(std::sqrt(z));
    return std::exp(p[0] * p[2] * h) * std::cosh(2.0 * u) / 2.0 - 0.5;
  });
  m.adaptive_step_fn = [shape](const ParamVector& p, bool strang, double h, double x) {
    return pearson_adaptive(pearson_params(shape(p), p[0], p[1]), strang, h, x);
  };
  return m;
}

// ---------------------------------------------------------------------------
// Wright-Fisher (Jacobi): g(x) = sqrt(2 a theta x (x - 1)), a < 0.

ModelSpec make_wright_fisher() {
  ModelSpec m;
  m.id = "wright_fisher";
  m.param_names = {"theta", "mu", "a"};
  m.diffusion_block = {true, false, true};
  m.valid = [](const ParamVector& p) {
    return p[0] > 0.0 && p[1] > 0.0 && p[1] < 1.0 && p[2] < 0.0;
  };
  m.state_space = [](const ParamVector& p) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = 1.0;
    const bool entrance =
        p[2] > -0.5 && std::min(p[1], 1.0 - p[1]) >= -p[2];
    s.lower_kind = entrance ? BoundaryKind::entrance : BoundaryKind::attainable;
    s.upper_kind = s.lower_kind;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) { return -p[0] * (x - p[1]); };
  m.diffusion = [](const ParamVector& p, double x) {
    return std::sqrt(std::max(0.0, 2.0 * p[2] * p[0] * x * (x - 1.0)));
  };
  m.diffusion_dx = [](const ParamVector& p, double x) {
    const double g = std::sqrt(std::max(1e-300, 2.0 * p[2] * p[0] * x * (x - 1.0)));
    return p[2] * p[0] * (2.0 * x - 1.0) / g;
  };
  install_canonical_split(m);
  m.lamperti = [](const ParamVector& p, double x) {
    // Floating-point residue at an exactly preserved boundary is clipped;
    // anything further out is a genuine domain violation.
    if (x < -1e-12 || x > 1.0 + 1e-12)
      throw DomainError("wright_fisher: v(x) undefined outside [0,1]");
    const double s = std::sqrt(std::clamp(x, 0.0, 1.0));
    return 2.0 * std::asin(s) / std::sqrt(-2.0 * p[2] * p[0]);
  };
  m.lamperti_inv = [](const ParamVector& p, double y) {
    return sq(std::sin(std::sqrt(-2.0 * p[2] * p[0]) * y / 2.0));
  };
  m.lamperti_inv_monotone = false;
  // sin^2 is even and 2 pi / c periodic: preimages are +-y0 + k * period.
  m.lamperti_preimages = [v = m.lamperti](const ParamVector& p, double x, double lo, double hi) {
    const double c = std::sqrt(-2.0 * p[2] * p[0]);
    const double period = 2.0 * std::numbers::pi / c;
    const double y0 = v(p, x);
    std::vector<double> out;
    for (double base : {y0, -y0}) {
      const double k_lo = std::ceil((lo - base) / period);
      const double k_hi = std::floor((hi - base) / period);
      for (double k = k_lo; k <= k_hi; k += 1.0) out.push_back(base + k * period);
    }
    return out;
  };
  install_default_sde_flow(m);
  auto shape = [](const ParamVector& p) { return PearsonShape{p[2], -p[2]}; };
  // E[sin^2(c xi / 2 + asin sqrt(z))] = z e^{a theta h} + (1 - e^{a theta h}) / 2.
  install_pearson(m, shape, [](const ParamVector& p, double h, double z) {
    const double e = std::exp(p[2] * p[0] * h);
    return z * e + (1.0 - e) / 2.0;
  });
  return m;
}

// ---------------------------------------------------------------------------
// Ahn-Gao: dX = kappa (theta - X) X dt + sigma X^{3/2} dW.

ModelSpec make_ahn_gao() {
  ModelSpec m;
  m.id = "ahn_gao";
  m.param_names = {"kappa", "theta", "sigma"};
  m.diffusion_block = {false, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector&) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    s.lower_kind = BoundaryKind::entrance;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) { return p[0] * (p[1] - x) * x; };
  m.diffusion = [](const ParamVector& p, double x) { return p[2] * std::pow(x, 1.5); };
  m.diffusion_dx = [](const ParamVector& p, double x) { return 1.5 * p[2] * std::sqrt(x); };
  install_canonical_split(m);
  // f1(x) = A x - B x^2 with A = kappa theta, B = kappa + 3 sigma^2 / 4:
  // a logistic ODE with explicit flow.
  auto ab = [](const ParamVector& p) {
    return std::pair<double, double>{p[0] * p[1], p[0] + 0.75 * p[2] * p[2]};
  };
  m.ode_flow = [ab](const ParamVector& p, double h, double x) {
    const auto [A, B] = ab(p);
    const double e = std::exp(A * h);
    return A * e * x / (A + B * x * (e - 1.0));
  };
  m.ode_flow_inverse = [ab](const ParamVector& p, double h, double y) {
    const auto [A, B] = ab(p);
    const double e = std::exp(A * h);
    return A * y / (A * e + y * B * (1.0 - e));
  };
  m.ode_flow_inverse_dy = [ab](const ParamVector& p, double h, double y) {
    const auto [A, B] = ab(p);
    const double e = std::exp(A * h);
    return A * A * e / sq(A * e + y * B * (1.0 - e));
  };
  m.lamperti = [](const ParamVector& p, double x) {
    if (x <= 0.0) throw DomainError("ahn_gao: v(x) undefined for x <= 0");
    return -2.0 / (p[2] * std::sqrt(x));
  };
  m.lamperti_inv = [](const ParamVector& p, double y) {
    if (y == 0.0) throw DomainError("ahn_gao: v^{-1}(0) undefined");
    return 4.0 / (p[2] * p[2] * y * y);
  };
  m.lamperti_inv_monotone = false;
  m.lamperti_preimages = [](const ParamVector& p, double x, double, double) {
    if (x <= 0.0) throw DomainError("ahn_gao: preimages need x > 0");
    const double y = 2.0 / (p[2] * std::sqrt(x));
    return std::vector<double>{-y, y};
  };
  install_default_sde_flow(m);
  // X = 1/Z with Z CIR: dZ = kappa theta (z_mu - Z) dt with
  // z_mu = (kappa + sigma^2) / (kappa theta) and squared diffusion
  // sigma^2 Z, i.e. b = sigma^2 / (2 kappa theta) in our parametrisation.
  auto inv_cir = [](const ParamVector& p) {
    const double theta_c = p[0] * p[1];
    return CirLaw{theta_c, (p[0] + p[2] * p[2]) / theta_c,
                  p[2] * p[2] / (2.0 * theta_c)};
  };
  m.exact_sample = [inv_cir](const ParamVector& p, double t, double x0, RandomStream& rng) {
    return 1.0 / cir_exact_sample(inv_cir(p), t, 1.0 / x0, rng);
  };
  m.exact_density = [inv_cir](const ParamVector& p, double t, double x0, double y) {
    if (y <= 0.0) return 0.0;
    return std::exp(cir_exact_log_density(inv_cir(p), t, 1.0 / x0, 1.0 / y)) / (y * y);
  };
  return m;
}

// ---------------------------------------------------------------------------
// Ginzburg-Landau: dX = ((eta + sigma^2/2) X - lambda X^3) dt + sigma X dW.
// Decomposed as f1 = -lambda x^3, f2 = (eta + sigma^2/2) x, both flows
// positive on (0, inf). (The canonical split has an ODE flow that can leave
// the state space, so it is not used.)

ModelSpec make_ginzburg_landau() {
  ModelSpec m;
  m.id = "ginzburg_landau";
  m.param_names = {"eta", "lambda", "sigma"};
  m.diffusion_block = {false, false, true};
  m.valid = [](const ParamVector& p) { return p[0] >= 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector&) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    s.lower_kind = BoundaryKind::entrance;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) {
    return (p[0] + 0.5 * p[2] * p[2]) * x - p[1] * x * x * x;
  };
  m.diffusion = [](const ParamVector& p, double x) { return p[2] * x; };
  m.diffusion_dx = [](const ParamVector& p, double) { return p[2]; };
  m.split_ode_drift = [](const ParamVector& p, double x) { return -p[1] * x * x * x; };
  m.split_sde_drift = [](const ParamVector& p, double x) {
    return (p[0] + 0.5 * p[2] * p[2]) * x;
  };
  m.ode_flow = [](const ParamVector& p, double h, double x) {
    return x / std::sqrt(2.0 * x * x * p[1] * h + 1.0);
  };
  m.ode_flow_inverse = [](const ParamVector& p, double h, double y) {
    const double d = 1.0 - 2.0 * p[1] * h * y * y;
    if (d <= 0.0) throw DomainError("ginzburg_landau: ODE flow inverse undefined");
    return y / std::sqrt(d);
  };
  m.ode_flow_inverse_dy = [](const ParamVector& p, double h, double y) {
    const double d = 1.0 - 2.0 * p[1] * h * y * y;
    if (d <= 0.0) throw DomainError("ginzburg_landau: ODE flow inverse undefined");
    return 1.0 / (d * std::sqrt(d));
  };
  m.lamperti = [](const ParamVector& p, double x) {
    if (x <= 0.0) throw DomainError("ginzburg_landau: v(x) undefined for x <= 0");
    return std::log(x) / p[2];
  };
  m.lamperti_inv = [](const ParamVector& p, double y) { return std::exp(p[2] * y); };
  m.lamperti_inv_monotone = true;
  m.sde_flow = [](const ParamVector& p, double h, double x, double xi) {
    return x * std::exp(p[0] * h + p[2] * xi);
  };
  // v(X) drifts at eta/sigma under the SDE subequation.
  m.lamperti_mean_shift = [](const ParamVector& p, double h) { return p[0] * h / p[2]; };
  return m;
}

// ---------------------------------------------------------------------------
// Verhulst: dX = ((eta + sigma^2/2) X - lambda X^2) dt + sigma X dW.

ModelSpec make_verhulst() {
  ModelSpec m;
  m.id = "verhulst";
  m.param_names = {"eta", "lambda", "sigma"};
  m.diffusion_block = {false, false, true};
  m.valid = [](const ParamVector& p) { return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0; };
  m.state_space = [](const ParamVector&) {
    StateSpace s;
    s.lower = 0.0;
    s.upper = kInf;
    s.lower_kind = BoundaryKind::entrance;
    s.upper_kind = BoundaryKind::natural;
    return s;
  };
  m.drift = [](const ParamVector& p, double x) {
    return (p[0] + 0.5 * p[2] * p[2]) * x - p[1] * x * x;
  };
  m.diffusion = [](const ParamVector& p, double x) { return p[2] * x; };
  m.diffusion_dx = [](const ParamVector& p, double) { return p[2]; };
  install_canonical_split(m);
  m.ode_flow = [](const ParamVector& p, double h, double x) {
    const double e = std::exp(p[0] * h);
    return p[0] * e * x / (p[0] - p[1] * x + p[1] * e * x);
  };
  m.ode_flow_inverse = [](const ParamVector& p, double h, double y) {
    const double e = std::exp(p[0] * h);
    const double d = p[0] * e - p[1] * y * (e - 1.0);
    if (d <= 0.0) throw DomainError("verhulst: ODE flow inverse undefined");
    return p[0] * y / d;
  };
  m.ode_flow_inverse_dy = [](const ParamVector& p, double h, double y) {
    const double e = std::exp(p[0] * h);
    const double d = p[0] * e - p[1] * y * (e - 1.0);
    if (d <= 0.0) throw DomainError("verhulst: ODE flow inverse undefined");
    return p[0] * p[0] * e / (d * d);
  };
  m.lamperti = [](const ParamVector& p, double x) {
    if (x <= 0.0) throw DomainError("verhulst: v(x) undefined for x <= 0");
    return std::log(x) / p[2];
  };
  m.lamperti_inv = [](const ParamVector& p, double y) { return std::exp(p[2] * y); };
  m.lamperti_inv_monotone = true;
  install_default_sde_flow(m);
  return m;
}

const std::map<std::string, ModelSpec>& registry() {
  static const std::map<std::string, ModelSpec>* reg = [] {
    auto* r = new std::map<std::string, ModelSpec>;
    for (auto&& make : {make_ou, make_cir, make_student, make_igbm, make_f_diffusion,
                        make_wright_fisher, make_ahn_gao, make_ginzburg_landau,
                        make_verhulst}) {
      ModelSpec m = make();
      (*r)[m.id] = std::move(m);
    }
    return r;
  }();
  return *reg;
}

}  // namespace

const ModelSpec& get_model(const std::string& id) {
  const auto& reg = registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw std::invalid_argument("unknown model '" + id + "'");
  return it->second;
}

std::vector<std::string> list_models() {
  std::vector<std::string> out;
  for (const auto& [id, _] : registry()) out.push_back(id);
  return out;
}

}  // namespace sdesplit
