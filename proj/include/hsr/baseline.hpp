#pragma once

#include <hsr/hierfit.hpp>

#include <optional>
#include <vector>

namespace hsr {

/// Residual-cascade multiscale extension: every scale is fitted to the
/// residual left by the previous ones, and prediction sums all scales.
struct CascadeStage {
	int scale = 0;
	double epsilon = 1.0;
	std::vector<Index> indices;
	Matrix sites;  // normalized
	Vector coeffs;
};

struct CascadeModel {
	Index dim = 0;
	std::vector<CascadeStage> stages;
	int terminal_scale = 0;
	NormalizationInfo normalization;

	Index total_sites() const;
};

struct CascadeRecord {
	int scale = 0;
	Index rank = 0;
	double residual_2norm = 0.0; // cumulative residual after this scale
	double residual_inf_norm = 0.0;
	Index cumulative_sites = 0;
};

struct CascadeTrace {
	std::vector<CascadeRecord> records;
	FitStatus status = FitStatus::MaxScaleCap;
	Vector cumulative_fit; // sum of all stages at the training sites
};

struct CascadeResult {
	CascadeModel model;
	CascadeTrace trace;
};

/// Same basis selection and stopping caps as `fit`, with settings.tol as the
/// cumulative-residual tolerance.
CascadeResult fit_cascade(const Dataset& ds, const FitSettings& settings);

/// Normalized units at normalized sites.
Vector evaluate(const CascadeModel& model, const Matrix& at_normalized,
                EvalCounter* counter = nullptr);

/// Raw units at raw sites.
Vector predict_cascade(const CascadeModel& model, const Matrix& at, EvalCounter* counter = nullptr);

struct ComparisonRow {
	int scale = 0;
	std::optional<double> err_hier;
	std::optional<double> err_cascade;
	std::optional<Index> sites_hier;
	std::optional<Index> sites_cascade_cumulative;
	std::optional<std::uint64_t> kevals_hier;    // cost of predicting with this scale's model
	std::optional<std::uint64_t> kevals_cascade; // cost of predicting with stages 0..scale
};

struct ComparisonReport {
	std::vector<ComparisonRow> rows;
	Index queries = 0;
	FitStatus hier_status = FitStatus::MaxScaleCap;
	FitStatus cascade_status = FitStatus::MaxScaleCap;
	int hier_terminal_scale = 0;
	int cascade_terminal_scale = 0;
	double hier_residual = 0.0;
	double cascade_residual = 0.0;
	// measured on the query batch with the terminal models
	std::uint64_t kevals_hier = 0;
	std::uint64_t kevals_cascade = 0;
	double seconds_hier = 0.0;
	double seconds_cascade = 0.0;
};

ComparisonReport compare(const Dataset& ds, const FitSettings& settings,
                         const Matrix& queries_normalized);

} // namespace hsr
