#include "sdesplit/schemes.hpp"

#include <cmath>

namespace sdesplit {

double lt_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  return phi2_flow(model, p, h, phi1_flow(model, p, h, x), xi);
}

double strang_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  const double mid = phi2_flow(model, p, h, phi1_flow(model, p, h / 2.0, x), xi);
  return phi1_flow(model, p, h / 2.0, mid);
}

double em_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  model.check_valid(p);
  return x + model.drift(p, x) * h + model.diffusion(p, x) * xi;
}

double milstein_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  return em_step(model, p, h, x, xi) +
         0.5 * model.diffusion(p, x) * model.diffusion_dx(p, x) * (xi * xi - h);
}

double sd_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi) {
  model.check_valid(p);
  const double x1 = x + model.split_ode_drift(p, x) * h;
  if (!std::isfinite(x1) || !model.state_space(p).contains(x1))
    throw DomainError(model.id + ": Euler ODE half-step left the state space");
  return phi2_flow(model, p, h, x1, xi);
}

double lamperti_em_step(const ModelSpec& model, const ParamVector& p, double h, double x,
                        double xi) {
  model.check_valid(p);
  const double y = model.lamperti(p, x);
  const double out = model.lamperti_inv(p, y + lamperti_drift(model, p, y) * h + xi);
  if (!std::isfinite(out)) throw DomainError(model.id + ": v^{-1} undefined after EuM update");
  return out;
}

double scheme_step(SchemeKind scheme, const ModelSpec& model, const ParamVector& p, double h,
                   double x, double xi) {
  switch (scheme) {
    case SchemeKind::LT:
      return lt_step(model, p, h, x, xi);
    case SchemeKind::Strang:
      return strang_step(model, p, h, x, xi);
    case SchemeKind::EuM:
      return em_step(model, p, h, x, xi);
    case SchemeKind::Milstein:
      return milstein_step(model, p, h, x, xi);
    case SchemeKind::SemiDiscrete:
      return sd_step(model, p, h, x, xi);
    case SchemeKind::LampertiEuM:
      return lamperti_em_step(model, p, h, x, xi);
    case SchemeKind::Exact:
      throw UnsupportedError("scheme_step: Exact has no increment-driven step");
  }
  throw std::invalid_argument("scheme_step: unknown scheme");
}

Trajectory simulate_path(SchemeKind scheme, const ModelSpec& model, const ParamVector& p, double x0,
                         const NoiseGrid& grid, const SimulateOptions& opt) {
  model.check_valid(p);
  const StateSpace space = model.state_space(p);
  if (!space.contains(x0)) throw DomainError(model.id + ": x0 outside state space");

  const bool can_adapt = opt.adaptive && model.adaptive_step_fn &&
                         (scheme == SchemeKind::LT || scheme == SchemeKind::Strang);
  Trajectory traj;
  traj.model_id = model.id;
  traj.params = p;
  traj.h = grid.h_fine;
  traj.values.reserve(grid.n_steps + 1);
  traj.values.push_back(x0);
  if (can_adapt) {
    traj.adaptive_flags.reserve(grid.n_steps);
    traj.step_sizes.reserve(grid.n_steps);
  }

  double x = x0;
  const double h = grid.h_fine;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    double xi = grid.increments[k];
    double hk = h;
    bool adapted = false;
    if (can_adapt) {
      hk = model.adaptive_step_fn(p, scheme == SchemeKind::Strang, h, x);
      adapted = hk < h;
      // The stored increment is N(0,h); rescale so it is N(0,hk) while
      // staying a deterministic function of the shared grid.
      if (adapted) xi *= std::sqrt(hk / h);
    }
    try {
      x = scheme_step(scheme, model, p, hk, x, xi);
    } catch (const DomainError& e) {
      throw PathAborted(k, e.what());
    }
    if (opt.truncate_to_state_space) {
      if (x < space.lower) x = space.lower;
      if (x > space.upper) x = space.upper;
    }
    traj.values.push_back(x);
    if (can_adapt) {
      traj.adaptive_flags.push_back(adapted);
      traj.step_sizes.push_back(hk);
    }
  }
  // A uniform run keeps step_sizes empty so downstream grid checks are cheap.
  if (can_adapt) {
    bool any = false;
    for (bool f : traj.adaptive_flags) any = any || f;
    if (!any) {
      traj.adaptive_flags.clear();
      traj.step_sizes.clear();
    }
  }
  return traj;
}

SchemeKind parse_scheme(const std::string& name) {
  if (name == "lt") return SchemeKind::LT;
  if (name == "strang" || name == "s") return SchemeKind::Strang;
  if (name == "eum" || name == "em") return SchemeKind::EuM;
  if (name == "milstein") return SchemeKind::Milstein;
  if (name == "sd" || name == "semi_discrete") return SchemeKind::SemiDiscrete;
  if (name == "lamperti_eum") return SchemeKind::LampertiEuM;
  if (name == "exact") return SchemeKind::Exact;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string scheme_name(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::LT: return "lt";
    case SchemeKind::Strang: return "strang";
    case SchemeKind::EuM: return "eum";
    case SchemeKind::Milstein: return "milstein";
    case SchemeKind::SemiDiscrete: return "sd";
    case SchemeKind::LampertiEuM: return "lamperti_eum";
    case SchemeKind::Exact: return "exact";
  }
  return "?";
}

}  // namespace sdesplit
