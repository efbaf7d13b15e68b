#include <doctest.h>

#include "oracles.hpp"

#include <hsr/predict.hpp>

#include <random>

using namespace hsr;

namespace {

Matrix random_matrix(Index r, Index c, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> g;
	Matrix m(r, c);
	for (Index i = 0; i < m.size(); ++i)
		m.data()[i] = g(rng);
	return m;
}

} // namespace

TEST_CASE("sigma_hat")
{
	CHECK(sigma_hat(0.0, 10, 3) == 0.0);
	CHECK(sigma_hat(2.0, 8, 4) == 1.0);
	CHECK_THROWS_AS(sigma_hat(1.0, 4, 4), DegenerateDof);
	CHECK_THROWS_WITH(sigma_hat(1.0, 3, 4), doctest::Contains("degenerate degrees of freedom"));
}

TEST_CASE("t_quantile against the integrated density")
{
	// frozen from oracle::t_quantile (Simpson integration plus bisection)
	CHECK(t_quantile(0.975, 10) == doctest::Approx(2.2281388519863).epsilon(1e-11));
	CHECK(t_quantile(0.975, 3) == doctest::Approx(3.18244630528372).epsilon(1e-11));
	CHECK(t_quantile(0.95, 1) == doctest::Approx(6.31375151467509).epsilon(1e-11));
	CHECK(t_quantile(0.975, 10000) == doctest::Approx(1.96020123987373).epsilon(1e-10));

	CHECK(std::abs(t_quantile(0.975, 10) - 2.2281) < 1e-3);
	CHECK(std::abs(t_quantile(0.975, 10000) - oracle::normal_quantile(0.975)) < 1e-3);
	CHECK(oracle::normal_quantile(0.975) == doctest::Approx(1.95996398454005).epsilon(1e-12));
	CHECK(t_quantile(0.9, 7) == doctest::Approx(oracle::t_quantile(0.9, 7)).epsilon(1e-9));
}

TEST_CASE("t_quantile symmetry and errors")
{
	for (double dof : {1.0, 2.0, 5.0, 30.0}) {
		CHECK(t_quantile(0.5, dof) == 0.0);
		for (double p : {0.6, 0.8, 0.99})
			CHECK(t_quantile(1.0 - p, dof) == -t_quantile(p, dof));
	}
	CHECK_THROWS_AS(t_quantile(0.9, 0.5), Error);
	CHECK_THROWS_AS(t_quantile(0.0, 3), Error);
	CHECK_THROWS_AS(t_quantile(1.0, 3), Error);
}

TEST_CASE("property: t_quantile strictly increasing on a 1e-3 grid")
{
	for (double dof : {1.0, 3.0, 10.0, 200.0}) {
		double prev = -std::numeric_limits<double>::infinity();
		for (int k = 1; k < 1000; ++k) {
			const double q = t_quantile(k * 1e-3, dof);
			CHECK(q > prev);
			prev = q;
		}
	}
}

TEST_CASE("intervals on an orthonormal basis")
{
	const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(10, 3, 1)).householderQ() *
	                 Matrix::Identity(10, 3);
	const LeastSquaresFactor factor(q);
	const Vector c = random_matrix(3, 1, 2);
	const Matrix at = random_matrix(4, 3, 3);
	const auto band = intervals(factor, c, at, 0.5, 10, 0.05);
	const double t = t_quantile(0.975, 7);
	CHECK(band.dof == 7);
	for (Index i = 0; i < 4; ++i) {
		const double quad = at.row(i).squaredNorm();
		CHECK(band.mean(i) == doctest::Approx(at.row(i).dot(c)).epsilon(1e-14));
		CHECK(band.conf_half_width(i) == doctest::Approx(0.5 * std::sqrt(quad) * t).epsilon(1e-12));
		CHECK(band.pred_half_width(i) == doctest::Approx(0.5 * std::sqrt(1.0 + quad) * t).epsilon(1e-12));
		CHECK(band.pred_half_width(i) >= band.conf_half_width(i));
	}

	const auto collapsed = intervals(factor, c, at, 0.0, 10, 0.05);
	CHECK(collapsed.conf_half_width.isZero(0));
	CHECK(collapsed.pred_half_width.isZero(0));

	CHECK_THROWS_AS(intervals(factor, c, at, 0.5, 3, 0.05), DegenerateDof);
	CHECK_THROWS_AS(intervals(factor, c, random_matrix(4, 2, 3), 0.5, 10, 0.05), Error);
	CHECK_THROWS_AS(intervals(factor, c, at, 0.5, 10, 1.5), Error);
}

TEST_CASE("band scaling")
{
	IntervalBand b;
	b.mean = Vector::Constant(2, 1.0);
	b.conf_half_width = Vector::Constant(2, 0.1);
	b.pred_half_width = Vector::Constant(2, 0.2);
	b.sigma_hat = 0.05;
	const auto s = b.scaled(-10.0);
	CHECK(s.mean(0) == -10.0);
	CHECK(s.conf_half_width(1) == 1.0);
	CHECK(s.pred_half_width(1) == 2.0);
	CHECK(s.sigma_hat == 0.5);
}

TEST_CASE("bands on TF2")
{
	const auto ds = normalize(gen_test_function(TestFunction::TF2, Sampling::equidistant(200)));
	FitSettings settings;
	const auto r = fit(ds, settings);
	const KernelParams base{default_T(ds), settings.P, 0};

	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> u(ds.sites.minCoeff(), ds.sites.maxCoeff());
	Matrix held(50, 1);
	for (Index i = 0; i < 50; ++i)
		held(i, 0) = u(rng);

	const auto coarse = fit_scale(ds.sites, ds.values, base, settings);
	const auto fine = fit_scale(ds.sites, ds.values, base.at_scale(r.model.scale), settings);
	const auto b0 = intervals(coarse, held, 0.05);
	const auto ba = intervals(fine, held, 0.05);
	CHECK(ba.pred_half_width.mean() < b0.pred_half_width.mean());

	const LeastSquaresFactor factor(fine.basis.basis);
	const Matrix at = gram(held, fine.selected_sites, fine.kernel);
	for (Index i = 0; i < at.rows(); ++i)
		CHECK(factor.quadratic_form(at.row(i).transpose()) >= -1e-12);

	// the mean matches model evaluation at the terminal scale
	CHECK((ba.mean - evaluate(r.model, held)).cwiseAbs().maxCoeff() <= 1e-9);
}
