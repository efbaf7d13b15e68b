#include <hsr/basis.hpp>

#include <algorithm>
#include <random>

namespace hsr {

Vector singular_values(const Matrix& G)
{
	if (!G.allFinite())
		throw Error("singular values: matrix has non-finite entries");
	if (G.size() == 0)
		return Vector();
	Vector sv;
	if (G.rows() == G.cols() && G == G.transpose()) {
		Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
		if (es.info() != Eigen::Success)
			throw Error("singular values: eigensolver failed");
		sv = es.eigenvalues().cwiseAbs();
	} else {
		Eigen::BDCSVD<Matrix> svd(G);
		sv = svd.singularValues();
	}
	std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
	return sv;
}

Index numerical_rank(const Matrix& G, double delta)
{
	if (!(delta > 0.0 && delta < 1.0))
		throw Error("numerical rank: delta must lie in (0, 1)");
	const Vector sv = singular_values(G);
	if (sv.size() == 0 || sv(0) == 0.0)
		return 0;
	Index r = 0;
	while (r < sv.size() && sv(r) / sv(0) >= delta)
		++r;
	return r;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	Matrix A(rows, cols);
	// fill row by row so a prefix of rows is independent of `rows`
	for (Index i = 0; i < rows; ++i)
		for (Index j = 0; j < cols; ++j)
			A(i, j) = normal(rng);
	return A;
}

Matrix sketch(const Matrix& G, Index k, std::uint64_t seed)
{
	if (k < 1 || k > G.rows())
		throw Error("sketch: need 1 <= k <= n");
	return gaussian_matrix(k, G.rows(), seed) * G;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
	                  static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
	std::uint32_t words[2];
	seq.generate(words, words + 2);
	return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

BasisSelection select_basis(const Matrix& G, Index rank, Index k_oversample, std::uint64_t seed)
{
	const Index n = G.cols();
	if (G.rows() != n)
		throw Error("select_basis: Gram matrix must be square");
	if (rank < 1 || rank > n)
		throw Error("select_basis: need 1 <= rank <= n");
	if (k_oversample < 0)
		throw Error("select_basis: oversampling must be nonnegative");
	if (!G.allFinite())
		throw Error("select_basis: Gram matrix has non-finite entries");

	const Index k = std::min(n, rank + k_oversample);
	const Matrix W = sketch(G, k, seed);
	Eigen::ColPivHouseholderQR<Matrix> qr(W);

	BasisSelection sel;
	sel.rank = rank;
	const auto& perm = qr.colsPermutation().indices();
	sel.pivot_order.assign(perm.data(), perm.data() + perm.size());
	sel.basis.resize(n, rank);
	for (Index j = 0; j < rank; ++j)
		sel.basis.col(j) = G.col(sel.pivot_order[static_cast<std::size_t>(j)]);
	return sel;
}

} // namespace hsr
