#include <hsr/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace hsr {

RkhsBound rkhs_bound(const Vector& coeffs, const Vector& residual, std::span<const Index> selected)
{
	if (static_cast<Index>(selected.size()) != coeffs.size())
		throw Error("rkhs bound: selection and coefficient counts disagree");
	RkhsBound b;
	double inner = 0.0;
	for (Index j = 0; j < coeffs.size(); ++j)
		inner += coeffs(j) * residual(selected[static_cast<std::size_t>(j)]);
	const double cmax = coeffs.size() ? coeffs.lpNorm<Eigen::Infinity>() : 0.0;
	b.inner_abs = std::abs(inner);
	b.bound = cmax * residual.lpNorm<1>();
	b.limit_bound = cmax * std::sqrt(static_cast<double>(residual.size())) * residual.norm();
	return b;
}

std::vector<RkhsBound> rkhs_bound_check(const FitTrace& trace, const Vector& f)
{
	std::vector<RkhsBound> rows;
	for (const auto& rec : trace.records) {
		const auto sel = rec.selected();
		auto b = rkhs_bound(rec.coeffs, f - rec.fitted, sel);
		b.scale = rec.scale;
		rows.push_back(b);
	}
	return rows;
}

AlphaRho alpha_rho(const Vector& f, const Vector& fitted_s, const Vector& fitted_next)
{
	if (f.size() != fitted_s.size() || f.size() != fitted_next.size())
		throw Error("alpha/rho: vector lengths disagree");
	AlphaRho out;
	const Vector e = f - fitted_s;
	const double e2 = e.squaredNorm();
	if (e2 == 0.0)
		return out;
	const Vector step = fitted_next - fitted_s;
	const double ratio = (f - fitted_next).norm() / std::sqrt(e2);
	out.alpha = step.dot(e) / e2;
	out.rho = ratio;
	out.alpha_upper = 1.0 + ratio;
	return out;
}

std::vector<AlphaRho> alpha_rho(const FitTrace& trace, const Vector& f)
{
	std::vector<AlphaRho> rows;
	for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
		auto r = alpha_rho(f, trace.records[i].fitted, trace.records[i + 1].fitted);
		r.scale = trace.records[i].scale;
		rows.push_back(r);
	}
	return rows;
}

double rank_upper_bound(std::span<const double> box_lengths, double epsilon, double delta)
{
	if (!(epsilon > 0.0))
		throw Error("rank bound: epsilon must be positive");
	if (!(delta > 0.0 && delta < 1.0))
		throw Error("rank bound: delta must lie in (0, 1)");
	const double root = std::sqrt(std::log(1.0 / delta) / epsilon);
	double product = 1.0;
	for (double len : box_lengths)
		product *= 2.0 * len / std::numbers::pi * root + 1.0;
	return product;
}

std::vector<BoundReportRow> bound_report(const Dataset& ds, const FitTrace& trace, double delta)
{
	const auto lengths = bounding_box_lengths(ds.sites);
	const auto rkhs = rkhs_bound_check(trace, ds.values);
	const auto ar = alpha_rho(trace, ds.values);

	std::vector<BoundReportRow> rows;
	for (std::size_t i = 0; i < trace.records.size(); ++i) {
		const auto& rec = trace.records[i];
		BoundReportRow row;
		row.scale = rec.scale;
		row.rank = rec.rank;
		row.rank_upper_bound = rank_upper_bound(lengths, rec.epsilon, delta);
		row.rkhs = rkhs[i];
		if (i < ar.size()) {
			row.alpha = ar[i].alpha;
			row.rho = ar[i].rho;
			if (ar[i].alpha)
				row.alpha_upper = ar[i].alpha_upper;
		}
		rows.push_back(row);
	}
	return rows;
}

// ---------------------------------------------------------------------------

StabilityDiag stability_diag(const Matrix& basis, const Matrix& selected_gram)
{
	if (selected_gram.rows() != basis.cols() || selected_gram.cols() != basis.cols())
		throw Error("stability: selected Gram matrix must be l x l");
	const LeastSquaresFactor factor(basis);
	const Matrix pinv = factor.pseudo_inverse(); // l x n
	const Matrix kp = selected_gram * pinv;

	StabilityDiag out;
	out.diag = pinv.cwiseProduct(kp).colwise().sum().transpose();
	out.upper = 0.0;
	for (Index j = 0; j < out.diag.size(); ++j)
		out.upper += std::sqrt(std::max(0.0, out.diag(j)));

	const Vector sv = singular_values(basis);
	out.lower = 1.0 / sv(0);
	out.at_critical = basis.rows() == basis.cols();
	if (out.at_critical)
		out.critical_bound = static_cast<double>(basis.rows()) / sv(sv.size() - 1);
	return out;
}

ScaleAnalysis::ScaleAnalysis(Matrix sites, Vector values, ScaleFit fit)
    : sites_(std::move(sites)), values_(std::move(values)), fit_(std::move(fit)),
      factor_(fit_.basis.basis)
{
	if (sites_.rows() != values_.size() || sites_.rows() != fit_.basis.basis.rows())
		throw Error("scale analysis: data does not match the fit");
}

ErrorFunctional ScaleAnalysis::error_functional(const Vector& x) const
{
	if (x.size() != sites_.cols())
		throw Error("error functional: query point has the wrong dimension");
	const Matrix xr = x.transpose();
	const Vector r_sel = gram(fit_.selected_sites, xr, fit_.kernel);
	ErrorFunctional ef;
	ef.weights = factor_.extend(r_sel);
	ef.psi = values_.dot(ef.weights);
	ef.model_value = r_sel.dot(fit_.coeffs);
	return ef;
}

PowerDiag ScaleAnalysis::power(const Matrix& xs) const
{
	if (xs.cols() != sites_.cols())
		throw Error("power function: query points have the wrong dimension");
	const Matrix r_sel = gram(fit_.selected_sites, xs, fit_.kernel); // l x m
	const Matrix r_all = gram(sites_, xs, fit_.kernel);              // n x m
	PowerDiag out;
	out.m_dot_r.resize(xs.rows());
	out.psi.resize(xs.rows());
	for (Index i = 0; i < xs.rows(); ++i) {
		const Vector m = factor_.extend(r_sel.col(i));
		out.m_dot_r(i) = m.dot(r_all.col(i));
		out.psi(i) = values_.dot(m);
	}
	out.power_sq = Vector::Ones(xs.rows()) - out.m_dot_r;
	return out;
}

StabilityDiag ScaleAnalysis::stability() const
{
	return stability_diag(fit_.basis.basis,
	                      gram(fit_.selected_sites, fit_.selected_sites, fit_.kernel));
}

// ---------------------------------------------------------------------------

ImportanceReport importance(const Dataset& ds, int scale, Index n_runs, std::uint64_t seed,
                            const FitSettings& settings)
{
	ds.validate();
	settings.validate();
	if (n_runs < 1)
		throw Error("importance: need at least one run");
	const Index n = ds.size();
	if (n < 3)
		throw Error("importance: need at least three sites");

	const KernelParams kernel{settings.T ? *settings.T : default_T(ds), settings.P, scale};
	const Matrix G = gram(ds.sites, ds.sites, kernel);
	const Index rank = std::max<Index>(1, numerical_rank(G, settings.delta));

	auto run_pivots = [&](Index run) {
		const auto run_seed = seed + static_cast<std::uint64_t>(run);
		return select_basis(G, rank, settings.k_oversample,
		                    derive_seed(run_seed, static_cast<std::uint64_t>(scale)))
		    .pivot_order;
	};

	using Histogram = std::array<std::vector<Index>, 3>;
	auto empty = [n] {
		Histogram h;
		for (auto& v : h)
			v.assign(static_cast<std::size_t>(n), 0);
		return h;
	};

	const auto workers = static_cast<Index>(
	    std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, 16u));
	const Index nthreads = std::min(workers, n_runs);
	std::vector<Histogram> partial(static_cast<std::size_t>(nthreads), empty());
	{
		std::vector<std::jthread> pool;
		for (Index t = 0; t < nthreads; ++t)
			pool.emplace_back([&, t] {
				auto& h = partial[static_cast<std::size_t>(t)];
				for (Index run = t; run < n_runs; run += nthreads) {
					const auto piv = run_pivots(run);
					for (std::size_t r = 0; r < 3; ++r)
						++h[r][static_cast<std::size_t>(piv[r])];
				}
			});
	}

	ImportanceReport report;
	report.scale = scale;
	report.runs = n_runs;
	report.rank = rank;
	report.histogram = empty();
	for (const auto& h : partial)
		for (std::size_t r = 0; r < 3; ++r)
			for (std::size_t i = 0; i < h[r].size(); ++i)
				report.histogram[r][i] += h[r][i];
	const auto first = run_pivots(0);
	report.ranking.assign(first.begin(), first.begin() + rank);
	return report;
}

} // namespace hsr
