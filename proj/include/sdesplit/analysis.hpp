#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdesplit/likelihood.hpp"
#include "sdesplit/model.hpp"
#include "sdesplit/nelder_mead.hpp"
#include "sdesplit/schemes.hpp"

namespace sdesplit {

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct ConvergenceRow {
  double h = 0.0;
  double s_n = 0.0;  // root mean squared endpoint error
};

struct ConvergenceReport {
  std::string model_id;
  ParamVector params;
  SchemeKind scheme = SchemeKind::LT;
  double T = 0.0;
  std::size_t M = 0;
  double h_fine = 0.0;
  SchemeKind reference_scheme = SchemeKind::LT;
  std::vector<ConvergenceRow> rows;
  OrderFit order;
  // Checksum of summed fine increments per path, folded across paths;
  // equal checksums certify two studies shared their Brownian grids.
  double grid_checksum = 0.0;
};

// OLS of log2 s_n on log2 h; rows with s_n == 0 are dropped first.
OrderFit fit_order(const std::vector<ConvergenceRow>& rows);

struct StrongErrorOptions {
  SchemeKind reference_scheme = SchemeKind::LT;
  bool serial = false;  // force the serial reference kernel
  bool truncate_to_state_space = false;
};

ConvergenceReport strong_error_curve(SchemeKind scheme, const ModelSpec& model,
                                     const ParamVector& p, double x0, double T,
                                     const std::vector<double>& h_list, double h_fine,
                                     std::size_t M, std::uint64_t seed,
                                     const StrongErrorOptions& opt = {});

// Empirical 1-D Wasserstein distance. Equal sizes: mean sorted-sample gap;
// unequal: |quantile difference| integrated on a 10^4-point grid.
double wasserstein1(std::vector<double> a, std::vector<double> b);

double one_step_wasserstein(const ModelSpec& model, const ParamVector& p, SchemeKind scheme,
                            double h, double x0, std::size_t M, std::uint64_t seed,
                            bool serial = false);

struct BiasScan {
  std::vector<ConvergenceRow> rows;  // (h, |scheme mean - exact mean|)
  double slope = 0.0;
  bool degenerate_zero = false;  // bias identically ~0 (OU)
};

BiasScan bias_order_scan(const ModelSpec& model, const ParamVector& p, SchemeKind scheme, double x,
                         const std::vector<double>& h_list);

struct StudyCell {
  double h_obs = 0.0;
  std::size_t n_obs = 0;  // transitions per replicate
};

struct FitRecord {
  std::size_t replicate = 0;
  EstimatorKind estimator = EstimatorKind::LT;
  StudyCell cell;
  FitResult fit;
  std::optional<NllInvalidReason> failure;  // reason at the returned optimum, if any
  bool success() const { return fit.converged && !failure.has_value(); }
};

struct StudyTable {
  std::string model_id;
  ParamVector true_params;
  std::vector<FitRecord> rows;

  std::vector<const FitRecord*> cell_rows(EstimatorKind estimator, const StudyCell& cell) const;
  // Median of |param estimate - truth| over successful fits in the cell.
  double median_abs_error(EstimatorKind estimator, const StudyCell& cell,
                          std::size_t param_index) const;
  double iqr(EstimatorKind estimator, const StudyCell& cell, std::size_t param_index) const;
  double median_estimate(EstimatorKind estimator, const StudyCell& cell,
                         std::size_t param_index) const;
};

struct InferenceOptions {
  std::vector<bool> fixed_mask;      // empty -> all free
  std::vector<double> init;          // empty -> all ones
  double h_fine = 1e-3;              // fallback data grid when no exact sampler
  bool serial = false;
};

StudyTable inference_study(const ModelSpec& model, const ParamVector& p0, double x0,
                           const std::vector<EstimatorKind>& estimators,
                           const std::vector<StudyCell>& cells, std::size_t replicates,
                           std::uint64_t seed, const InferenceOptions& opt = {});

struct NormalityDiagnostic {
  struct PerParam {
    std::size_t param_index = 0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double coverage = 0.0;  // nominal-95% normal interval
  };
  std::vector<PerParam> params;
  std::size_t n_converged = 0;
  std::size_t n_total = 0;
};

// Standardized errors sqrt(N h)(drift params) / sqrt(N)(diffusion params)
// over the converged fits of one (estimator, cell) study slice.
NormalityDiagnostic normality_diagnostic(const StudyTable& study, const ModelSpec& model,
                                         EstimatorKind estimator, const StudyCell& cell);

double sample_skewness(const std::vector<double>& xs);
double sample_excess_kurtosis(const std::vector<double>& xs);

}  // namespace sdesplit
