#include <hsr/predict.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace hsr {

double sigma_hat(double residual_2norm, Index n, Index rank)
{
	if (n <= rank)
		throw DegenerateDof("degenerate degrees of freedom: n = " + std::to_string(n) +
		                    ", rank = " + std::to_string(rank));
	return std::sqrt(residual_2norm * residual_2norm / static_cast<double>(n - rank));
}

double t_quantile(double p, double dof)
{
	if (!(dof >= 1.0))
		throw Error("t quantile: degrees of freedom must be at least 1");
	if (!(p > 0.0 && p < 1.0))
		throw Error("t quantile: probability must lie in (0, 1)");
	if (p == 0.5)
		return 0.0;
	const boost::math::students_t_distribution<double> dist(dof);
	// symmetric by construction: evaluate the upper tail and mirror
	if (p < 0.5)
		return -boost::math::quantile(dist, 1.0 - p);
	return boost::math::quantile(dist, p);
}

IntervalBand IntervalBand::scaled(double factor) const
{
	IntervalBand out = *this;
	const double a = std::abs(factor);
	out.mean *= factor;
	out.conf_half_width *= a;
	out.pred_half_width *= a;
	out.sigma_hat *= a;
	return out;
}

IntervalBand intervals(const LeastSquaresFactor& factor, const Vector& coeffs,
                       const Matrix& basis_at, double sigma, Index n, double alpha)
{
	if (!(alpha > 0.0 && alpha < 1.0))
		throw Error("intervals: alpha must lie in (0, 1)");
	if (basis_at.cols() != factor.cols() || coeffs.size() != factor.cols())
		throw Error("intervals: basis width mismatch");
	if (n <= factor.cols())
		throw DegenerateDof("degenerate degrees of freedom: n = " + std::to_string(n) +
		                    ", rank = " + std::to_string(factor.cols()));

	IntervalBand band;
	band.alpha = alpha;
	band.dof = n - factor.cols();
	band.sigma_hat = sigma;
	band.mean = basis_at * coeffs;
	band.conf_half_width.resize(basis_at.rows());
	band.pred_half_width.resize(basis_at.rows());

	const double t = t_quantile(1.0 - alpha / 2.0, static_cast<double>(band.dof));
	for (Index i = 0; i < basis_at.rows(); ++i) {
		const double q = factor.quadratic_form(basis_at.row(i).transpose());
		band.conf_half_width(i) = sigma * std::sqrt(q) * t;
		band.pred_half_width(i) = sigma * std::sqrt(1.0 + q) * t;
	}
	return band;
}

IntervalBand intervals(const ScaleFit& sf, const Matrix& at_normalized, double alpha)
{
	const double sigma = sigma_hat(sf.residual_2norm(), sf.n(), sf.basis.rank);
	const LeastSquaresFactor factor(sf.basis.basis);
	return intervals(factor, sf.coeffs, gram(at_normalized, sf.selected_sites, sf.kernel), sigma,
	                 sf.n(), alpha);
}

} // namespace hsr
