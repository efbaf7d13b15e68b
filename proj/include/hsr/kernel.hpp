#pragma once

#include <hsr/data.hpp>

#include <cstdint>

namespace hsr {

/// Squared-exponential kernel at one scale of the hierarchy.
/// The length-scale parameter is epsilon = T / P^scale.
struct KernelParams {
	double T = 1.0;
	double P = 2.0;
	int scale = 0;

	double epsilon() const;
	KernelParams at_scale(int s) const { return {T, P, s}; }
};

/// Counts scalar kernel evaluations. Not thread-safe; give each caller its own.
struct EvalCounter {
	std::uint64_t evaluations = 0;
};

/// 2 (diameter / 2)^2 of the sites.
double default_T(const Matrix& sites);
inline double default_T(const Dataset& ds) { return default_T(ds.sites); }

double kernel_value(const double* x, const double* y, Index dim, double epsilon);

/// Entry (i, j) = exp(-|xa_i - xb_j|^2 / epsilon). Every entry is computed by
/// the same scalar routine, so any sub-block of gram(X, X) is reproduced
/// exactly by gram on the corresponding rows.
Matrix gram(const Matrix& xa, const Matrix& xb, double epsilon, EvalCounter* counter = nullptr);
inline Matrix gram(const Matrix& xa, const Matrix& xb, const KernelParams& params,
                   EvalCounter* counter = nullptr)
{
	return gram(xa, xb, params.epsilon(), counter);
}

} // namespace hsr
