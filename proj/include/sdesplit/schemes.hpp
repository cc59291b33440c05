#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdesplit/model.hpp"

namespace sdesplit {

// Simulated path on a uniform grid starting at t0 (step h), or a
// nonuniform one when adaptive stepping kicked in (step_sizes set).
struct Trajectory {
  std::string model_id;
  ParamVector params;
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> values;  // length n_steps + 1, values[0] = x0
  std::vector<bool> adaptive_flags;        // per step, only when adaptive run
  std::vector<double> step_sizes;          // per step, only when adaptive run
  bool uniform_grid() const { return step_sizes.empty(); }
  std::size_t n_steps() const { return values.empty() ? 0 : values.size() - 1; }
};

// Raised by simulate_path when a step fails irrecoverably.
class PathAborted : public std::runtime_error {
 public:
  PathAborted(std::size_t step, const std::string& reason)
      : std::runtime_error("path aborted at step " + std::to_string(step) + ": " + reason),
        step_index(step) {}
  std::size_t step_index;
};

// One-step integrators. All consume an increment xi ~ N(0, h) directly
// (not a standardized draw), so coarsening a noise grid is exact.
double lt_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double strang_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double em_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double milstein_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double sd_step(const ModelSpec& model, const ParamVector& p, double h, double x, double xi);
double lamperti_em_step(const ModelSpec& model, const ParamVector& p, double h, double x,
                        double xi);

double scheme_step(SchemeKind scheme, const ModelSpec& model, const ParamVector& p, double h,
                   double x, double xi);

struct SimulateOptions {
  bool adaptive = false;
  // Clamp EuM/Milstein output into the closed state space (Wright-Fisher
  // comparisons only); off by default.
  bool truncate_to_state_space = false;
};

Trajectory simulate_path(SchemeKind scheme, const ModelSpec& model, const ParamVector& p, double x0,
                         const NoiseGrid& grid, const SimulateOptions& opt = {});

SchemeKind parse_scheme(const std::string& name);
std::string scheme_name(SchemeKind scheme);

}  // namespace sdesplit
