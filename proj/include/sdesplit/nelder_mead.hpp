#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdesplit/likelihood.hpp"
#include "sdesplit/model.hpp"

namespace sdesplit {

struct NmConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  std::size_t max_iterations = 0;  // 0 -> 500 * dimension
  double x_tolerance = 1e-8;       // simplex diameter
  double f_tolerance = 1e-10;      // spread of vertex values
  double initial_simplex_scale = 0.05;  // relative, with the same absolute floor
};

enum class NmTermination { x_tolerance, f_tolerance, max_iterations, non_finite };

struct FitResult {
  EstimatorKind estimator = EstimatorKind::LT;
  std::vector<double> params;  // full vector, fixed entries reinserted
  double nll = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  NmTermination termination = NmTermination::max_iterations;
  double runtime_ms = 0.0;
  std::size_t inverse_undefined_evals = 0;  // objective calls that hit the reason
};

// Raised when no finite starting simplex can be found.
class NonFiniteObjective : public std::runtime_error {
 public:
  explicit NonFiniteObjective(const std::string& what) : std::runtime_error(what) {}
};

using Objective = std::function<double(const std::vector<double>&)>;

FitResult nelder_mead(const Objective& objective, const std::vector<double>& x0,
                      const NmConfig& cfg = {});

// Minimizes the estimator's pseudo-NLL over the free parameters (those not
// pinned by obs.fixed_mask), starting from init.
FitResult fit(EstimatorKind estimator, const ModelSpec& model, const ObservationSet& obs,
              const std::vector<double>& init, const NmConfig& cfg = {});

}  // namespace sdesplit
