#pragma once

#include <hsr/basis.hpp>
#include <hsr/data.hpp>
#include <hsr/kernel.hpp>

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace hsr {

struct FitSettings {
	double tol = 1e-2;             // 2-norm tolerance on normalized values
	double P = 2.0;
	std::optional<double> T;       // defaults to default_T of the sites
	double delta = 1e-10;          // relative singular-value threshold for the rank
	Index k_oversample = 8;
	std::uint64_t seed = 7;
	int max_scale = 25;
	int stop_patience = 2;         // full-rank scales tolerated above tol

	void validate() const;
};

/// Householder QR with column pivoting of a tall basis B (n x l), B P = Q R.
/// Every product with (B^T B)^{-1} goes through the triangular factor.
class LeastSquaresFactor {
public:
	/// Throws if B has fewer rows than columns or is numerically rank deficient.
	explicit LeastSquaresFactor(const Matrix& basis);

	Index rows() const { return qr_.rows(); }
	Index cols() const { return qr_.cols(); }

	/// argmin_c |f - B c|_2.
	Vector solve(const Vector& f) const;

	/// Orthogonal projection of f onto range(B), as Q Q^T f.
	Vector project(const Vector& f) const;

	/// b^T (B^T B)^{-1} b for a length-l vector b.
	double quadratic_form(const Vector& b) const;

	/// B (B^T B)^{-1} r for a length-l vector r.
	Vector extend(const Vector& r) const;

	/// (B^T B)^{-1} B^T, l x n.
	Matrix pseudo_inverse() const;

private:
	// z = R^{-T} P^T b
	Vector whiten(const Vector& b) const;

	Eigen::ColPivHouseholderQR<Matrix> qr_;
};

struct Projection {
	Vector coeffs;
	Vector fitted;
};

/// Least-squares coordinates of f on the columns of B and the orthogonal
/// projection of f. `fitted` is formed through Q rather than as B * coeffs,
/// which loses accuracy to cancellation when the coordinates are large.
Projection project(const Matrix& basis, const Vector& f);

/// Everything computed at one scale: kernel, selected basis and projection.
struct ScaleFit {
	KernelParams kernel;
	BasisSelection basis;
	Matrix selected_sites; // rank x d, normalized coordinates
	Vector coeffs;
	Vector fitted;
	Vector residual;       // f - fitted

	Index n() const { return residual.size(); }
	double residual_2norm() const { return residual.norm(); }
	double residual_inf_norm() const { return residual.lpNorm<Eigen::Infinity>(); }
	double sampled_fraction() const
	{
		return static_cast<double>(basis.rank) / static_cast<double>(n());
	}
};

/// One pass of basis selection plus projection at `kernel.scale`.
/// `target` defaults to the dataset values.
ScaleFit fit_scale(const Matrix& sites, const Vector& target, const KernelParams& kernel,
                   const FitSettings& settings);

struct ScaleRecord {
	int scale = 0;
	double epsilon = 0.0;
	Index rank = 0;
	std::vector<Index> pivot_order;
	double residual_2norm = 0.0;
	double residual_inf_norm = 0.0;
	double sampled_fraction = 0.0;
	Vector coeffs; // length rank, aligned with the first `rank` pivots
	Vector fitted; // length n

	std::vector<Index> selected() const
	{
		return {pivot_order.begin(), pivot_order.begin() + rank};
	}
};

enum class FitStatus { Converged, CriticalScaleExhausted, MaxScaleCap };

std::string_view to_string(FitStatus status);
FitStatus parse_fit_status(std::string_view text);

struct FitTrace {
	std::vector<ScaleRecord> records;
	bool critical_scale_reached = false;
	std::optional<int> critical_scale; // first scale with rank == n
	FitStatus status = FitStatus::MaxScaleCap;
};

/// The sparse representation: selected sites and coordinates at one scale.
/// Sites and coefficients live in normalized space.
struct HierModel {
	Index dim = 0;
	double T = 1.0;
	double P = 2.0;
	int scale = 0;                  // S_a
	double epsilon = 1.0;
	double delta = 1e-10;
	Index k_oversample = 8;
	std::uint64_t seed = 7;
	double tol = 0.0;
	FitStatus status = FitStatus::Converged;

	Matrix sites;                   // l x d, normalized
	Vector coeffs;                  // l
	std::vector<Index> indices;     // row of each site in the training data
	NormalizationInfo normalization;
	std::vector<std::pair<double, double>> domain; // raw-unit bounding box of the training sites

	Index n_train = 0;
	double residual_2norm = 0.0;    // normalized units
	double residual_inf_norm = 0.0; // normalized units
	double sampled_fraction = 0.0;

	Index size() const { return coeffs.size(); }
	KernelParams kernel() const { return {T, P, scale}; }
};

struct FitResult {
	HierModel model;
	FitTrace trace;
};

/// Runs scales 0, 1, 2, ... until the training residual meets the tolerance,
/// the Gram matrix has been full rank for `stop_patience` scales without
/// meeting it, or `max_scale` is reached. `ds` should already be normalized.
FitResult fit(const Dataset& ds, const FitSettings& settings);

HierModel make_model(const Dataset& ds, const ScaleFit& sf, const FitSettings& settings,
                     FitStatus status);

/// Model prediction in normalized units at normalized sites.
Vector evaluate(const HierModel& model, const Matrix& at_normalized, EvalCounter* counter = nullptr);

/// Model prediction in raw units at raw sites.
Vector reconstruct(const HierModel& model, const Matrix& at, EvalCounter* counter = nullptr);

/// First scale at which gram(sites, sites) has numerical rank n, scanning
/// scales 0..max_scale. Empty if never reached.
std::optional<int> critical_scale(const Matrix& sites, const KernelParams& base, double delta,
                                  int max_scale);

} // namespace hsr
