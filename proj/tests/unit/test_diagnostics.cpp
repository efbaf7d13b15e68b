#include <doctest.h>

#include <hsr/diagnostics.hpp>

#include <numeric>
#include <random>

using namespace hsr;

namespace {

Dataset tf(TestFunction id, Index n)
{
	return normalize(gen_test_function(id, Sampling::equidistant(n)));
}

FitTrace full_trace(const Dataset& ds, int max_scale)
{
	FitSettings s;
	s.tol = 0.0;
	s.max_scale = max_scale;
	return fit(ds, s).trace;
}

} // namespace

TEST_CASE("rkhs bound with zero residual")
{
	const Vector c = (Vector(2) << 3.0, -1.0).finished();
	const std::vector<Index> sel{0, 2};
	const auto b = rkhs_bound(c, Vector::Zero(4), sel);
	CHECK(b.inner_abs == 0.0);
	CHECK(b.bound == 0.0);
	CHECK_THROWS_AS(rkhs_bound(c, Vector::Zero(4), std::vector<Index>{0}), Error);
}

TEST_CASE("rkhs inner product matches the Gram form for f in the kernel span")
{
	std::mt19937_64 rng(15);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	std::normal_distribution<double> g;
	Matrix x(15, 1);
	Vector a(15);
	for (Index i = 0; i < 15; ++i) {
		x(i, 0) = u(rng);
		a(i) = g(rng);
	}
	const KernelParams kernel{0.05, 2.0, 0};
	const Matrix G = gram(x, x, kernel);
	const Vector f = G * a; // f = sum_i a_i K(., x_i)
	FitSettings s;
	const auto sf = fit_scale(x, f, kernel, s);
	const auto sel = sf.basis.selected();
	const auto b = rkhs_bound(sf.coeffs, sf.residual, sel);

	// <A f, f - A f>_H = c^T G_sel,all a - c^T G_sel,sel c by the reproducing property
	Matrix g_sel_all(sf.basis.rank, 15), g_sel_sel(sf.basis.rank, sf.basis.rank);
	for (Index j = 0; j < sf.basis.rank; ++j) {
		g_sel_all.row(j) = G.row(sel[static_cast<std::size_t>(j)]);
		for (Index k = 0; k < sf.basis.rank; ++k)
			g_sel_sel(j, k) = G(sel[static_cast<std::size_t>(j)], sel[static_cast<std::size_t>(k)]);
	}
	const double direct = sf.coeffs.dot(g_sel_all * a) - sf.coeffs.dot(g_sel_sel * sf.coeffs);
	CHECK(std::abs(b.inner_abs - std::abs(direct)) <= 1e-9);
	CHECK(b.inner_abs <= b.bound + 1e-12);
}

TEST_CASE("property: rkhs bound holds at every scale")
{
	for (auto id : {TestFunction::TF1, TestFunction::TF2}) {
		const auto ds = tf(id, 120);
		const auto trace = full_trace(ds, 14);
		for (const auto& row : rkhs_bound_check(trace, ds.values)) {
			CHECK(row.inner_abs <= row.bound + 1e-12);
			CHECK(row.bound <= row.limit_bound + 1e-12);
		}
		const auto conv = fit(ds, FitSettings{});
		const auto last = rkhs_bound_check(conv.trace, ds.values).back();
		const double cmax = conv.trace.records.back().coeffs.lpNorm<Eigen::Infinity>();
		CHECK(last.inner_abs <= cmax * std::sqrt(120.0) * 1e-2 + 1e-12);
	}
}

TEST_CASE("alpha and rho at the extremes")
{
	const Vector f = (Vector(3) << 1.0, 2.0, 3.0).finished();
	const Vector fs = (Vector(3) << 0.5, 2.0, 2.0).finished();
	const auto full = alpha_rho(f, fs, f);
	CHECK(*full.alpha == doctest::Approx(1.0).epsilon(1e-15));
	CHECK(*full.rho == 0.0);
	const auto none = alpha_rho(f, fs, fs);
	CHECK(*none.alpha == 0.0);
	CHECK(*none.rho == 1.0);
	const auto converged = alpha_rho(f, f, fs);
	CHECK_FALSE(converged.alpha);
	CHECK_THROWS_AS(alpha_rho(f, Vector::Zero(2), f), Error);
}

TEST_CASE("alpha stays in range on converging traces")
{
	for (auto id : {TestFunction::TF1, TestFunction::TF2}) {
		const auto ds = tf(id, 200);
		const auto trace = fit(ds, FitSettings{}).trace;
		for (const auto& ar : alpha_rho(trace, ds.values)) {
			REQUIRE(ar.alpha);
			CHECK(*ar.alpha >= -1e-10);
			CHECK(*ar.alpha <= ar.alpha_upper + 1e-10);
			CHECK(*ar.rho <= 1.0 + 1e-12);
		}
	}
}

TEST_CASE("rank upper bound")
{
	const std::vector<double> zero{0.0, 0.0};
	CHECK(rank_upper_bound(zero, 0.3, 1e-10) == 1.0);
	const std::vector<double> two{2.0};
	// (4 / pi) sqrt(0.5 ln 1e10) + 1, evaluated directly
	CHECK(rank_upper_bound(two, 2.0, 1e-10) == doctest::Approx(5.3201911722455906).epsilon(1e-14));
	CHECK_THROWS_AS(rank_upper_bound(two, 0.0, 1e-10), Error);
	CHECK_THROWS_AS(rank_upper_bound(two, 1.0, 1.0), Error);

	const auto ds = tf(TestFunction::TF1, 200);
	const auto lengths = bounding_box_lengths(ds.sites);
	const KernelParams base{default_T(ds), 2.0, 0};
	// both grow with scale; the bound-versus-rank comparison is an acceptance criterion
	double prev_bound = 0.0;
	Index prev_rank = 0;
	for (int s = 0; s <= 6; ++s) {
		const auto k = base.at_scale(s);
		const double bound = rank_upper_bound(lengths, k.epsilon(), 1e-10);
		const Index rank = numerical_rank(gram(ds.sites, ds.sites, k), 1e-10);
		CHECK(bound > prev_bound);
		CHECK(rank > prev_rank);
		prev_bound = bound;
		prev_rank = rank;
	}
}

TEST_CASE("bound report rows line up with the trace")
{
	const auto ds = tf(TestFunction::TF2, 100);
	const auto trace = fit(ds, FitSettings{}).trace;
	const auto rows = bound_report(ds, trace, 1e-10);
	REQUIRE(rows.size() == trace.records.size());
	for (std::size_t i = 0; i < rows.size(); ++i) {
		CHECK(rows[i].scale == trace.records[i].scale);
		CHECK(rows[i].rank == trace.records[i].rank);
		CHECK(rows[i].rank_upper_bound == rank_upper_bound(bounding_box_lengths(ds.sites),
		                                                   trace.records[i].epsilon, 1e-10));
	}
	CHECK_FALSE(rows.back().alpha);
}

TEST_CASE("error functional reproduces model evaluation")
{
	const auto ds = tf(TestFunction::TF1, 40);
	FitSettings s;
	const auto r = fit(ds, s);
	const KernelParams k = r.model.kernel();
	const ScaleAnalysis an(ds.sites, ds.values, fit_scale(ds.sites, ds.values, k, s));
	std::mt19937_64 rng(2);
	std::uniform_real_distribution<double> u(0.2, 1.0);
	for (int i = 0; i < 20; ++i) {
		const Vector x = Vector::Constant(1, u(rng));
		const auto ef = an.error_functional(x);
		const double model = evaluate(r.model, x.transpose())(0);
		CHECK(std::abs(ef.psi - model) <= 1e-9);
		CHECK(std::abs(ef.model_value - model) <= 1e-9);
	}
	CHECK_THROWS_AS(an.error_functional(Vector::Zero(2)), Error);

	const ScaleAnalysis zero(ds.sites, Vector::Zero(40), fit_scale(ds.sites, Vector::Zero(40), k, s));
	CHECK(zero.error_functional(Vector::Constant(1, 0.5)).psi == 0.0);
}

TEST_CASE("interpolation at the critical scale")
{
	const auto ds = tf(TestFunction::TF1, 30);
	const KernelParams base{default_T(ds), 2.0, 0};
	const auto sc = critical_scale(ds.sites, base, 1e-10, 25);
	REQUIRE(sc);
	FitSettings s;
	const ScaleAnalysis an(ds.sites, ds.values, fit_scale(ds.sites, ds.values, base.at_scale(*sc), s));
	CHECK(an.fit().basis.rank == 30);
	for (Index i = 0; i < 30; i += 3) {
		const Vector x = ds.sites.row(i).transpose();
		CHECK(an.error_functional(x).psi == doctest::Approx(ds.values(i)).epsilon(1e-8));
	}
	const auto p = an.power(ds.sites);
	CHECK(p.power_sq.maxCoeff() <= 1e-8);

	const auto st = an.stability();
	CHECK(st.at_critical);
	CHECK(st.critical_bound);
	CHECK(st.holds());
}

TEST_CASE("property: power function range")
{
	const auto ds = tf(TestFunction::TF1, 200);
	FitSettings s;
	const KernelParams base{default_T(ds), 2.0, 0};
	for (int scale : {0, 3, 6}) {
		const ScaleAnalysis an(ds.sites, ds.values, fit_scale(ds.sites, ds.values, base.at_scale(scale), s));
		Matrix sweep(200, 1);
		for (Index i = 0; i < 200; ++i)
			sweep(i, 0) = 0.2 + 0.8 * static_cast<double>(i) / 199.0;
		const auto p = an.power(sweep);
		CHECK(p.power_sq.minCoeff() >= -1e-8);
		CHECK(p.power_sq.maxCoeff() <= 1.0 + 1e-8);

		const auto far = an.power(Matrix::Constant(1, 1, 50.0));
		CHECK(std::abs(far.power_sq(0) - 1.0) <= 1e-6);
		CHECK(an.stability().holds());
	}
}

TEST_CASE("stability on synthetic inputs")
{
	std::mt19937_64 rng(6);
	std::normal_distribution<double> g;
	Matrix a(8, 3);
	for (Index i = 0; i < a.size(); ++i)
		a.data()[i] = g(rng);
	const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(8, 3);
	const auto st = stability_diag(q, Matrix::Identity(3, 3));
	const Vector expected = (q * q.transpose()).diagonal();
	CHECK((st.diag - expected).cwiseAbs().maxCoeff() <= 1e-12);
	CHECK(st.diag.minCoeff() >= -1e-12);
	CHECK(st.diag.maxCoeff() <= 1.0 + 1e-12);
	CHECK(st.holds());
	CHECK_FALSE(st.at_critical);

	const auto one = stability_diag(Matrix::Ones(1, 1), Matrix::Ones(1, 1));
	CHECK(one.diag(0) == 1.0);
	CHECK(one.lower == 1.0);
	CHECK(one.upper == 1.0);
	CHECK_THROWS_AS(stability_diag(q, Matrix::Identity(2, 2)), Error);
}

TEST_CASE("importance")
{
	const auto ds = tf(TestFunction::TF2, 60);
	FitSettings s;
	const auto single = importance(ds, 0, 1, 7, s);
	REQUIRE(single.ranking.size() >= 3);
	for (std::size_t r = 0; r < 3; ++r) {
		const auto& h = single.histogram[r];
		CHECK(std::accumulate(h.begin(), h.end(), Index{0}) == 1);
		CHECK(h[static_cast<std::size_t>(single.ranking[r])] == 1);
	}

	const auto many = importance(ds, 2, 40, 7, s);
	CHECK(static_cast<Index>(many.ranking.size()) == many.rank);
	for (const auto& h : many.histogram)
		CHECK(std::accumulate(h.begin(), h.end(), Index{0}) == 40);

	const auto again = importance(ds, 2, 40, 7, s);
	CHECK(again.histogram == many.histogram);
	CHECK(again.ranking == many.ranking);

	// run 0 of a multi-run report is the single run with the same seed
	CHECK(importance(ds, 2, 1, 7, s).ranking == many.ranking);

	CHECK_THROWS_AS(importance(ds, 0, 0, 7, s), Error);
}
