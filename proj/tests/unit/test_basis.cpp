#include <doctest.h>

#include <hsr/basis.hpp>
#include <hsr/kernel.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <random>
#include <set>

using namespace hsr;

namespace {

Vector reference_singular_values(const Matrix& m)
{
	return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

Matrix equidistant(Index n)
{
	Matrix x(n, 1);
	for (Index i = 0; i < n; ++i)
		x(i, 0) = static_cast<double>(i) / static_cast<double>(n - 1);
	return x;
}

bool is_permutation(const std::vector<Index>& p, Index n)
{
	std::vector<Index> sorted = p;
	std::sort(sorted.begin(), sorted.end());
	for (Index i = 0; i < n; ++i)
		if (sorted[static_cast<std::size_t>(i)] != i)
			return false;
	return static_cast<Index>(p.size()) == n;
}

} // namespace

TEST_CASE("singular values agree with a one-sided Jacobi SVD")
{
	std::mt19937_64 rng(4);
	std::normal_distribution<double> g;
	Matrix a(8, 8);
	for (Index i = 0; i < a.size(); ++i)
		a.data()[i] = g(rng);
	const Matrix sym = a * a.transpose();
	CHECK((singular_values(sym) - reference_singular_values(sym)).cwiseAbs().maxCoeff() <= 1e-12 * 50);
	CHECK((singular_values(a) - reference_singular_values(a)).cwiseAbs().maxCoeff() <= 1e-12);
	Matrix bad = sym;
	bad(0, 0) = std::nan("");
	CHECK_THROWS_AS(singular_values(bad), Error);
}

TEST_CASE("numerical_rank")
{
	CHECK(numerical_rank(Matrix::Identity(5, 5), 1e-10) == 5);

	std::mt19937_64 rng(1);
	std::normal_distribution<double> g;
	Vector v(6);
	for (Index i = 0; i < 6; ++i)
		v(i) = g(rng);
	CHECK(numerical_rank(v * v.transpose(), 1e-10) == 1);

	const Matrix same = Matrix::Constant(3, 1, 0.4);
	CHECK(numerical_rank(gram(same, same, 1.0), 1e-10) == 1);

	CHECK(numerical_rank(Matrix::Zero(3, 3), 1e-10) == 0);
	CHECK_THROWS_AS(numerical_rank(Matrix::Identity(2, 2), 0.0), Error);
	CHECK_THROWS_AS(numerical_rank(Matrix::Identity(2, 2), 1.0), Error);

	const Matrix x = equidistant(50);
	const KernelParams base{0.5, 2.0, 0};
	const Index r0 = numerical_rank(gram(x, x, base), 1e-10);
	const Index r4 = numerical_rank(gram(x, x, base.at_scale(4)), 1e-10);
	CHECK(r4 >= r0);
	// same counts from an independent SVD
	auto count = [](const Vector& sv) {
		return static_cast<Index>((sv.array() >= 1e-10 * sv(0)).count());
	};
	CHECK(r0 == count(reference_singular_values(gram(x, x, base))));
	CHECK(r4 == count(reference_singular_values(gram(x, x, base.at_scale(4)))));
}

TEST_CASE("property: rank non-decreasing in scale on equidistant data")
{
	const Matrix x = equidistant(80);
	const KernelParams base{default_T(x), 2.0, 0};
	Index prev = 0;
	for (int s = 0; s <= 14; ++s) {
		const Index r = numerical_rank(gram(x, x, base.at_scale(s)), 1e-10);
		CHECK(r >= prev);
		CHECK(r <= 80);
		prev = r;
	}
	CHECK(prev == 80);
}

TEST_CASE("sketch")
{
	const Matrix id = Matrix::Identity(6, 6);
	CHECK(sketch(id, 4, 11) == gaussian_matrix(4, 6, 11));
	CHECK(sketch(id, 4, 11) == sketch(id, 4, 11));
	CHECK(sketch(id, 4, 11) != sketch(id, 4, 12));
	CHECK_THROWS_AS(sketch(id, 0, 1), Error);
	CHECK_THROWS_AS(sketch(id, 7, 1), Error);
}

TEST_CASE("sketch preserves rank of a well-separated PSD matrix")
{
	std::mt19937_64 rng(8);
	std::normal_distribution<double> g;
	Matrix q(30, 30);
	for (Index i = 0; i < q.size(); ++i)
		q.data()[i] = g(rng);
	const Matrix u = Eigen::HouseholderQR<Matrix>(q).householderQ();
	Vector spectrum = Vector::Zero(30);
	for (Index i = 0; i < 6; ++i)
		spectrum(i) = std::pow(10.0, -static_cast<double>(i));
	const Matrix G = u * spectrum.asDiagonal() * u.transpose();
	const Index rank = numerical_rank(G, 1e-10);
	CHECK(rank == 6);
	for (std::uint64_t seed = 0; seed < 20; ++seed) {
		const Matrix w = sketch(G, rank + 8, seed);
		const Vector sv = reference_singular_values(w);
		CHECK(static_cast<Index>((sv.array() >= 1e-10 * sv(0)).count()) == rank);
	}
}

TEST_CASE("derive_seed separates streams")
{
	CHECK(derive_seed(7, 0) == derive_seed(7, 0));
	CHECK(derive_seed(7, 0) != derive_seed(7, 1));
	CHECK(derive_seed(7, 1) != derive_seed(8, 1));
}

TEST_CASE("select_basis on a duplicated column")
{
	const Matrix sites = (Matrix(4, 1) << 0.0, 0.3, 0.3, 0.9).finished();
	const Matrix G = gram(sites, sites, 0.05);
	CHECK(numerical_rank(G, 1e-10) == 3);
	for (std::uint64_t seed = 0; seed < 10; ++seed) {
		const auto sel = select_basis(G, 3, 8, seed).selected();
		const int dup = static_cast<int>(std::count(sel.begin(), sel.end(), 1) +
		                                 std::count(sel.begin(), sel.end(), 2));
		CHECK(dup == 1);
		CHECK(std::set<Index>(sel.begin(), sel.end()).size() == 3);
	}
}

TEST_CASE("select_basis on the identity")
{
	const auto sel = select_basis(Matrix::Identity(5, 5), 5, 8, 3);
	CHECK(is_permutation(sel.pivot_order, 5));
	CHECK(sel.basis.rows() == 5);
	CHECK(sel.basis.cols() == 5);
	CHECK(std::abs(sel.basis.determinant()) == doctest::Approx(1.0));
	CHECK_THROWS_AS(select_basis(Matrix::Identity(5, 5), 6, 8, 3), Error);
	CHECK_THROWS_AS(select_basis(Matrix::Identity(5, 5), 0, 8, 3), Error);
}

TEST_CASE("property: selected basis is a column subset with full column rank")
{
	std::mt19937_64 rng(20);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	for (int trial = 0; trial < 10; ++trial) {
		Matrix x(20, 1);
		for (Index i = 0; i < 20; ++i)
			x(i, 0) = u(rng);
		const Matrix G = gram(x, x, 0.02);
		const Index rank = numerical_rank(G, 1e-10);
		const auto sel = select_basis(G, rank, 8, static_cast<std::uint64_t>(trial));
		CHECK(sel.rank == rank);
		CHECK(is_permutation(sel.pivot_order, 20));
		const auto chosen = sel.selected();
		CHECK(std::set<Index>(chosen.begin(), chosen.end()).size() == static_cast<std::size_t>(rank));
		for (Index j = 0; j < rank; ++j)
			CHECK(sel.basis.col(j) == G.col(chosen[static_cast<std::size_t>(j)]));
		const Vector sv = reference_singular_values(sel.basis);
		CHECK(sv(sv.size() - 1) > 1e-12 * sv(0));
	}
}

TEST_CASE("property: selection is deterministic in the seed")
{
	const Matrix x = equidistant(60);
	const Matrix G = gram(x, x, 0.01);
	const Index rank = numerical_rank(G, 1e-10);
	const auto a = select_basis(G, rank, 8, 99);
	const auto b = select_basis(G, rank, 8, 99);
	CHECK(a.pivot_order == b.pivot_order);
	CHECK(a.basis == b.basis);
}
