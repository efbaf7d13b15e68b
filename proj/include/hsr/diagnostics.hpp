#pragma once

#include <hsr/hierfit.hpp>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace hsr {

// ---------------------------------------------------------------------------
// Per-scale convergence quantities
// ---------------------------------------------------------------------------

struct RkhsBound {
	int scale = 0;
	double inner_abs = 0.0;   // |sum_j c_j E(x_j)| over the selected sites
	double bound = 0.0;       // |C|_inf * |E|_1
	double limit_bound = 0.0; // |C|_inf * sqrt(n) * |E|_2
};

/// `selected[j]` is the row of the residual paired with coeffs[j].
RkhsBound rkhs_bound(const Vector& coeffs, const Vector& residual,
                     std::span<const Index> selected);

std::vector<RkhsBound> rkhs_bound_check(const FitTrace& trace, const Vector& f);

struct AlphaRho {
	int scale = 0;                // s; the pair is (s, s+1)
	std::optional<double> alpha;  // empty when E^s vanishes (already converged)
	std::optional<double> rho;
	double alpha_upper = 0.0;     // 1 + |E^{s+1}| / |E^s|
};

/// alpha = <F_{s+1} - F_s, E^s> / |E^s|^2, rho = |E^{s+1}| / |E^s|.
AlphaRho alpha_rho(const Vector& f, const Vector& fitted_s, const Vector& fitted_next);
std::vector<AlphaRho> alpha_rho(const FitTrace& trace, const Vector& f);

/// Product over axes of (2 |I_i| / pi * sqrt(ln(1/delta) / epsilon) + 1).
double rank_upper_bound(std::span<const double> box_lengths, double epsilon, double delta);

/// One row per scale of the trace, everything above in one table.
struct BoundReportRow {
	int scale = 0;
	Index rank = 0;
	double rank_upper_bound = 0.0;
	RkhsBound rkhs;
	std::optional<double> alpha;
	std::optional<double> rho;
	std::optional<double> alpha_upper;
};

std::vector<BoundReportRow> bound_report(const Dataset& ds, const FitTrace& trace, double delta);

// ---------------------------------------------------------------------------
// Pointwise error functional and stability at one scale
// ---------------------------------------------------------------------------

struct ErrorFunctional {
	Vector weights;           // optimal M(x), length n
	double psi = 0.0;         // <f|_X, M(x)>
	double model_value = 0.0; // sum_j c_j K(x, x_j)
};

struct PowerDiag {
	Vector m_dot_r;  // M(x)^T R(x) per query point
	Vector power_sq; // 1 - m_dot_r
	Vector psi;
};

struct StabilityDiag {
	Vector diag;          // D(j, j), j = 1..n
	double lower = 0.0;   // 1 / sigma_max(B^T)
	double upper = 0.0;   // sum_j sqrt(D(j, j))
	bool at_critical = false;
	std::optional<double> critical_bound; // n * sigma_max(G^{-1}) when rank == n

	bool holds() const { return lower <= upper; }
};

/// D = (B^+)^T G_sel B^+ for a basis B and the Gram matrix of the selected sites.
StabilityDiag stability_diag(const Matrix& basis, const Matrix& selected_gram);

/// Diagnostics bound to one single-scale fit and its training data.
class ScaleAnalysis {
public:
	ScaleAnalysis(Matrix sites, Vector values, ScaleFit fit);

	const ScaleFit& fit() const { return fit_; }

	ErrorFunctional error_functional(const Vector& x) const;
	PowerDiag power(const Matrix& xs) const;
	StabilityDiag stability() const;

private:
	Matrix sites_;
	Vector values_;
	ScaleFit fit_;
	LeastSquaresFactor factor_;
};

// ---------------------------------------------------------------------------
// Importance ranking
// ---------------------------------------------------------------------------

struct ImportanceReport {
	int scale = 0;
	Index runs = 0;
	Index rank = 0;                             // l_s at this scale
	std::vector<Index> ranking;                 // first run's selection order
	std::array<std::vector<Index>, 3> histogram; // [r][site]: runs with site at rank r + 1
};

/// Run r uses seed + r. The Gram matrix and its rank are shared by all runs;
/// only the sketch differs.
ImportanceReport importance(const Dataset& ds, int scale, Index n_runs, std::uint64_t seed,
                            const FitSettings& settings);

} // namespace hsr
