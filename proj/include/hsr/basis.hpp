#pragma once

#include <hsr/types.hpp>

#include <cstdint>
#include <vector>

namespace hsr {

/// Columns of a Gram matrix chosen by column-pivoted QR of a Gaussian sketch.
struct BasisSelection {
	int scale = 0;
	Index rank = 0;                 // l_s
	std::vector<Index> pivot_order; // permutation of 0..n-1, most informative first
	Matrix basis;                   // n x rank, columns of G in pivot order

	/// The first `rank` pivots; column j of G corresponds to site j.
	std::vector<Index> selected() const
	{
		return {pivot_order.begin(), pivot_order.begin() + rank};
	}
};

/// Singular values of G in decreasing order. Symmetric input goes through a
/// self-adjoint eigensolve (singular values are the absolute eigenvalues);
/// anything else through a divide-and-conquer SVD.
Vector singular_values(const Matrix& G);

/// Number of singular values with sigma_j / sigma_max >= delta.
Index numerical_rank(const Matrix& G, double delta);

/// k x n standard-normal matrix drawn from a generator seeded with `seed`.
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// A G with A from gaussian_matrix(k, G.rows(), seed).
Matrix sketch(const Matrix& G, Index k, std::uint64_t seed);

/// Independent stream for a (seed, stream) pair, e.g. one per scale.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Sketches G with k = min(n, rank + k_oversample) rows, runs column-pivoted
/// QR on the sketch and keeps the first `rank` pivoted columns of G.
BasisSelection select_basis(const Matrix& G, Index rank, Index k_oversample, std::uint64_t seed);

} // namespace hsr
