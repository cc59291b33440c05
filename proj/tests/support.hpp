#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdesplit/likelihood.hpp"
#include "sdesplit/model.hpp"
#include "sdesplit/quadrature.hpp"
#include "sdesplit/schemes.hpp"

namespace sdesplit::testing {

// Integrates the one-step transition density over the state space. The
// integration window is the numerical image of x0 under +-9 sd of noise,
// which carries all but ~1e-18 of the mass.
inline double transition_density_mass(const ModelSpec& model, const ParamVector& p,
                                      EstimatorKind estimator, double h, double x0) {
  const SchemeKind scheme =
      estimator == EstimatorKind::Strang ? SchemeKind::Strang : SchemeKind::LT;
  const double s = std::sqrt(h);
  std::vector<double> image;
  for (int i = 0; i <= 600; ++i) {
    const double xi = -9.0 * s + i * (18.0 * s / 600.0);
    try {
      image.push_back(scheme_step(scheme, model, p, h, x0, xi));
    } catch (const DomainError&) {
    }
  }
  double lo = *std::min_element(image.begin(), image.end());
  double hi = *std::max_element(image.begin(), image.end());
  const double pad = 0.05 * (hi - lo) + 1e-12;
  const StateSpace space = model.state_space(p);
  lo = std::max(space.lower, lo - pad);
  hi = std::min(space.upper, hi + pad);
  return integrate_adaptive(
      [&](double y) { return transition_density(model, p, estimator, h, x0, y); }, lo, hi, 1e-10,
      128);
}

}  // namespace sdesplit::testing
