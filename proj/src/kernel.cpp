#include <hsr/kernel.hpp>

#include <cmath>

namespace hsr {

double KernelParams::epsilon() const
{
	if (!(T > 0.0) || !(P > 1.0) || scale < 0)
		throw Error("kernel parameters need T > 0, P > 1 and scale >= 0");
	return T / std::pow(P, scale);
}

double default_T(const Matrix& sites)
{
	const double half = diameter(sites) / 2.0;
	return 2.0 * half * half;
}

double kernel_value(const double* x, const double* y, Index dim, double epsilon)
{
	double d2 = 0.0;
	for (Index k = 0; k < dim; ++k) {
		const double diff = x[k] - y[k];
		d2 += diff * diff;
	}
	return std::exp(-d2 / epsilon);
}

Matrix gram(const Matrix& xa, const Matrix& xb, double epsilon, EvalCounter* counter)
{
	if (xa.cols() != xb.cols())
		throw Error("gram: site dimensions disagree");
	if (!std::isfinite(epsilon) || !(epsilon > 0.0))
		throw Error("gram: length scale must be finite and positive");

	const Index d = xa.cols();
	// row-major copies keep each site contiguous
	const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a = xa, b = xb;
	Matrix out(xa.rows(), xb.rows());
	for (Index j = 0; j < b.rows(); ++j)
		for (Index i = 0; i < a.rows(); ++i)
			out(i, j) = kernel_value(a.row(i).data(), b.row(j).data(), d, epsilon);
	if (counter)
		counter->evaluations += static_cast<std::uint64_t>(xa.rows() * xb.rows());
	return out;
}

} // namespace hsr
