#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdesplit/model.hpp"

namespace sdesplit {

// Discretely observed path on a uniform grid with step h_obs. fixed_mask
// pins parameters during fitting (values taken from fixed_values).
struct ObservationSet {
  std::string model_id;
  double t0 = 0.0;
  double h_obs = 0.0;
  std::vector<double> values;          // x_0 ... x_N
  std::vector<bool> fixed_mask;        // optional, per parameter
  std::vector<double> fixed_values;    // aligned with fixed_mask

  std::size_t n_transitions() const { return values.empty() ? 0 : values.size() - 1; }
};

enum class EstimatorKind { LT, Strang, Kessler, EuM, LampertiEuM, TrueMLE, Hermite };

enum class NllInvalidReason { params_invalid, domain_violation, inverse_undefined };

struct NllValue {
  double value = 0.0;  // +inf iff reason is set
  std::size_t n_terms = 0;
  std::optional<NllInvalidReason> reason;

  bool finite() const { return !reason.has_value(); }
};

// Pseudo-NLLs. All return +inf (with a reason) instead of throwing on bad
// parameters or domain violations. Per-term additive constants that do not
// move the argmin are dropped; the exact relation to densities is
//   nll == sum_k -log density(x_k | x_{k-1}) + n * nll_constant(h)
// with nll_constant(h) = -log(2 pi h) / 2.
double nll_constant(double h);

NllValue lt_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);
NllValue strang_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);
NllValue kessler_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);
NllValue em_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);
NllValue lamperti_em_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);
NllValue true_mle_nll(const ModelSpec& model, const ParamVector& p, const ObservationSet& obs);

NllValue pseudo_nll(EstimatorKind estimator, const ModelSpec& model, const ParamVector& p,
                    const ObservationSet& obs);

// Kessler one-step conditional moments via the second-order generator
// expansion (applied uniformly, so the estimator's finite-h bias is the same
// for every model).
void kessler_moments(const ModelSpec& model, const ParamVector& p, double h, double x,
                     double& mean, double& variance);

// Pointwise one-step transition density under the given estimator's
// approximating law (LT/Strang branch sums, EuM/Kessler Gaussians, exact).
double transition_density(const ModelSpec& model, const ParamVector& p, EstimatorKind estimator,
                          double h, double x0, double y);

EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);

}  // namespace sdesplit
