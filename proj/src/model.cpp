#include "sdesplit/model.hpp"

#include <algorithm>
#include <cmath>

namespace sdesplit {

void ModelSpec::check_valid(const ParamVector& p) const {
  if (p.size() != param_names.size())
    throw std::invalid_argument(id + ": expected " + std::to_string(param_names.size()) +
                                " parameters, got " + std::to_string(p.size()));
  if (!valid(p)) throw DomainError(id + ": invalid parameter vector");
}

std::size_t ModelSpec::param_index(const std::string& name) const {
  auto it = std::find(param_names.begin(), param_names.end(), name);
  if (it == param_names.end())
    throw std::invalid_argument(id + ": no parameter named '" + name + "'");
  return static_cast<std::size_t>(it - param_names.begin());
}

double phi1_flow(const ModelSpec& model, const ParamVector& p, double h, double x) {
  model.check_valid(p);
  if (h < 0.0) throw std::invalid_argument("phi1_flow: negative step");
  const double out = model.ode_flow(p, h, x);
  if (!std::isfinite(out) || !model.state_space(p).contains(out))
    throw DomainError(model.id + ": ODE flow left the state space");
  return out;
}

double phi2_flow(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  model.check_valid(p);
  if (!(h > 0.0)) throw std::invalid_argument("phi2_flow: step must be positive");
  if (!model.state_space(p).contains(x))
    throw DomainError(model.id + ": phi2_flow input outside state space");
  const double out = model.sde_flow(p, h, x, xi);
  if (!std::isfinite(out)) throw DomainError(model.id + ": SDE flow undefined");
  return out;
}

double lamperti_drift(const ModelSpec& model, const ParamVector& p, double y) {
  model.check_valid(p);
  const double x = model.lamperti_inv(p, y);
  if (!std::isfinite(x) || !model.state_space(p).interior(x))
    throw DomainError(model.id + ": y outside the v-image of the state space");
  return model.drift(p, x) / model.diffusion(p, x) - 0.5 * model.diffusion_dx(p, x);
}

double closed_form_step_mean(const ModelSpec& model, const ParamVector& p, SchemeKind scheme,
                             double h, double x) {
  model.check_valid(p);
  if (!model.has_step_means())
    throw UnsupportedError(model.id + ": no closed-form one-step scheme mean");
  switch (scheme) {
    case SchemeKind::LT:
      return model.step_mean_lt(p, h, x);
    case SchemeKind::Strang:
      return model.step_mean_strang(p, h, x);
    default:
      throw UnsupportedError("closed_form_step_mean: only LT and Strang");
  }
}

double exact_transition_sample(const ModelSpec& model, const ParamVector& p, double t, double x0,
                               RandomStream& rng) {
  model.check_valid(p);
  if (!model.has_exact_sampler())
    throw UnsupportedError(model.id + ": no exact transition sampler");
  return model.exact_sample(p, t, x0, rng);
}

double adaptive_step(const ModelSpec& model, const ParamVector& p, SchemeKind scheme, double h,
                     double x) {
  model.check_valid(p);
  if (!model.adaptive_step_fn)
    throw UnsupportedError(model.id + ": no adaptive step rule");
  if (scheme != SchemeKind::LT && scheme != SchemeKind::Strang)
    throw UnsupportedError("adaptive_step: only LT and Strang");
  return model.adaptive_step_fn(p, scheme == SchemeKind::Strang, h, x);
}

}  // namespace sdesplit
