#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdesplit/rng.hpp"

namespace sdesplit {

// Joint parameter vector alpha. Flat storage; the owning ModelSpec declares
// names and which entries belong to the diffusion block.
struct ParamVector {
  std::vector<double> values;

  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

enum class BoundaryKind { entrance, attainable, natural };

struct StateSpace {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  BoundaryKind lower_kind = BoundaryKind::natural;
  BoundaryKind upper_kind = BoundaryKind::natural;

  bool contains(double x) const { return x >= lower && x <= upper; }
  bool interior(double x) const { return x > lower && x < upper; }
};

// Raised when a flow or transform is evaluated outside its domain.
// Callers decide policy; nothing here clamps silently.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

enum class SchemeKind { LT, Strang, EuM, Milstein, SemiDiscrete, LampertiEuM, Exact };

// Full formula sheet for one SDE model: drift/diffusion, the splitting
// pieces, Lamperti maps, ODE flow and (where available) its inverse,
// closed-form one-step scheme means and exact transition laws.
//
// Conventions:
//   p      resolved parameter values, in the order of param_names
//   h      time step; x a state; y a Lamperti-space value; xi ~ N(0,h)
struct ModelSpec {
  std::string id;
  std::vector<std::string> param_names;
  std::vector<bool> diffusion_block;  // true if the parameter enters g

  std::function<bool(const ParamVector&)> valid;
  std::function<StateSpace(const ParamVector&)> state_space;

  std::function<double(const ParamVector&, double)> drift;         // f
  std::function<double(const ParamVector&, double)> diffusion;     // g
  std::function<double(const ParamVector&, double)> diffusion_dx;  // g'
  std::function<double(const ParamVector&, double)> split_ode_drift;  // f1
  std::function<double(const ParamVector&, double)> split_sde_drift;  // f2 = f - f1

  // Exact flow of dx = f1 dt over time h.
  std::function<double(const ParamVector&, double, double)> ode_flow;  // (h, x)
  // Exact flow of the SDE subequation given one increment xi ~ N(0,h).
  // Defaults to v^{-1}(xi + v(x)); overridden when the SDE subequation
  // carries its own drift (Ginzburg-Landau second decomposition).
  std::function<double(const ParamVector&, double, double, double)> sde_flow;  // (h, x, xi)

  std::function<double(const ParamVector&, double)> lamperti;      // v
  std::function<double(const ParamVector&, double)> lamperti_inv;  // v^{-1}
  bool lamperti_inv_monotone = true;
  // Drift of v(X) under the SDE subequation, times h/step: the mean of
  // xi + v(x) picks up this shift when f2 != g g'/2. Zero for the
  // canonical decomposition.
  std::function<double(const ParamVector&, double)> lamperti_mean_shift;  // (h)

  // All y with v^{-1}(y) == x, restricted to [window_lo, window_hi] for
  // models with countably many preimages (Wright-Fisher).
  std::function<std::vector<double>(const ParamVector&, double, double, double)> lamperti_preimages;

  // Inverse ODE flow and its derivative in y (optional; Strang likelihoods).
  std::function<double(const ParamVector&, double, double)> ode_flow_inverse;     // (h, y)
  std::function<double(const ParamVector&, double, double)> ode_flow_inverse_dy;  // (h, y)

  // Closed-form one-step conditional mean of the LT / Strang scheme (optional).
  std::function<double(const ParamVector&, double, double)> step_mean_lt;      // (h, x)
  std::function<double(const ParamVector&, double, double)> step_mean_strang;  // (h, x)

  // Exact transition law (optional: OU, CIR, Ahn-Gao).
  std::function<double(const ParamVector&, double, double, RandomStream&)> exact_sample;  // (t, x0)
  std::function<double(const ParamVector&, double, double, double)> exact_density;  // (t, x0, y)

  // Exact conditional mean E[X_t | X_0 = x] (optional; bias scans, Kessler).
  std::function<double(const ParamVector&, double, double)> exact_mean;      // (t, x)
  std::function<double(const ParamVector&, double, double)> exact_variance;  // (t, x)

  // Largest admissible step from x in the attainable-boundary regime
  // (optional: CIR, F diffusion). Strang uses the doubled bound.
  std::function<double(const ParamVector&, bool, double, double)> adaptive_step_fn;  // (strang, h, x)

  bool has_ode_flow_inverse() const { return static_cast<bool>(ode_flow_inverse); }
  bool has_step_means() const { return static_cast<bool>(step_mean_lt); }
  bool has_exact_sampler() const { return static_cast<bool>(exact_sample); }

  void check_valid(const ParamVector& p) const;
  std::size_t param_index(const std::string& name) const;
};

// Operations with domain guards (they raise DomainError, never clamp).

double phi1_flow(const ModelSpec& model, const ParamVector& p, double h, double x);
double phi2_flow(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double lamperti_drift(const ModelSpec& model, const ParamVector& p, double y);
double closed_form_step_mean(const ModelSpec& model, const ParamVector& p, SchemeKind scheme,
                             double h, double x);
double exact_transition_sample(const ModelSpec& model, const ParamVector& p, double t, double x0,
                               RandomStream& rng);
double adaptive_step(const ModelSpec& model, const ParamVector& p, SchemeKind scheme, double h,
                     double x);

}  // namespace sdesplit
