#pragma once

#include <hsr/hierfit.hpp>

namespace hsr {

/// sqrt(|residual|^2 / (n - rank)). Throws DegenerateDof when n <= rank.
double sigma_hat(double residual_2norm, Index n, Index rank);

/// Inverse CDF of Student's t with `dof` degrees of freedom.
double t_quantile(double p, double dof);

struct IntervalBand {
	Vector mean;
	Vector conf_half_width;
	Vector pred_half_width;
	Index dof = 0;
	double sigma_hat = 0.0;
	double alpha = 0.05;

	/// Same band under a linear change of response units.
	IntervalBand scaled(double factor) const;
};

/// t-based confidence and prediction bands at rows `basis_at` (m x l, each
/// row the kernel values between a query point and the selected sites).
IntervalBand intervals(const LeastSquaresFactor& factor, const Vector& coeffs,
                       const Matrix& basis_at, double sigma, Index n, double alpha);

/// Bands at normalized sites from a single-scale fit; sigma is re-estimated
/// from that scale's residual.
IntervalBand intervals(const ScaleFit& sf, const Matrix& at_normalized, double alpha);

} // namespace hsr
