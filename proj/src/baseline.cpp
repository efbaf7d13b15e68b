#include <hsr/baseline.hpp>

#include <algorithm>
#include <chrono>

namespace hsr {

Index CascadeModel::total_sites() const
{
	Index total = 0;
	for (const auto& st : stages)
		total += st.coeffs.size();
	return total;
}

CascadeResult fit_cascade(const Dataset& ds, const FitSettings& settings)
{
	ds.validate();
	settings.validate();

	const Index n = ds.size();
	const KernelParams base{settings.T ? *settings.T : default_T(ds), settings.P, 0};

	CascadeResult result;
	auto& model = result.model;
	auto& trace = result.trace;
	model.dim = ds.dim();
	model.normalization = ds.normalization;
	trace.cumulative_fit = Vector::Zero(n);

	Vector residual = ds.values;
	Index cumulative = 0;
	int full_rank_misses = 0;
	for (int s = 0; s <= settings.max_scale; ++s) {
		const ScaleFit sf = fit_scale(ds.sites, residual, base.at_scale(s), settings);
		trace.cumulative_fit += sf.fitted;
		residual = sf.residual;
		cumulative += sf.basis.rank;

		CascadeStage stage;
		stage.scale = s;
		stage.epsilon = sf.kernel.epsilon();
		stage.indices = sf.basis.selected();
		stage.sites = sf.selected_sites;
		stage.coeffs = sf.coeffs;
		model.stages.push_back(std::move(stage));

		trace.records.push_back({s, sf.basis.rank, residual.norm(),
		                         residual.lpNorm<Eigen::Infinity>(), cumulative});

		std::optional<FitStatus> stop;
		if (residual.norm() <= settings.tol) {
			stop = FitStatus::Converged;
		} else if (sf.basis.rank == n) {
			if (++full_rank_misses >= settings.stop_patience)
				stop = FitStatus::CriticalScaleExhausted;
		} else {
			full_rank_misses = 0;
		}
		if (!stop && s == settings.max_scale)
			stop = FitStatus::MaxScaleCap;
		if (stop) {
			trace.status = *stop;
			model.terminal_scale = s;
			break;
		}
	}
	return result;
}

Vector evaluate(const CascadeModel& model, const Matrix& at_normalized, EvalCounter* counter)
{
	if (at_normalized.cols() != model.dim)
		throw Error("prediction sites have the wrong dimension");
	Vector out = Vector::Zero(at_normalized.rows());
	for (const auto& st : model.stages)
		out += gram(at_normalized, st.sites, st.epsilon, counter) * st.coeffs;
	return out;
}

Vector predict_cascade(const CascadeModel& model, const Matrix& at, EvalCounter* counter)
{
	if (at.cols() != model.dim)
		throw Error("prediction sites have the wrong dimension");
	return evaluate(model, model.normalization.normalize_sites(at), counter) *
	       model.normalization.value_scale;
}

ComparisonReport compare(const Dataset& ds, const FitSettings& settings,
                         const Matrix& queries_normalized)
{
	const auto hier = fit(ds, settings);
	const auto cascade = fit_cascade(ds, settings);
	const auto m = static_cast<std::uint64_t>(queries_normalized.rows());

	ComparisonReport report;
	report.queries = queries_normalized.rows();
	report.hier_status = hier.trace.status;
	report.cascade_status = cascade.trace.status;
	report.hier_terminal_scale = hier.model.scale;
	report.cascade_terminal_scale = cascade.model.terminal_scale;
	report.hier_residual = hier.model.residual_2norm;
	report.cascade_residual = cascade.trace.records.back().residual_2norm;

	const auto scales = std::max(hier.trace.records.size(), cascade.trace.records.size());
	for (std::size_t i = 0; i < scales; ++i) {
		ComparisonRow row;
		row.scale = static_cast<int>(i);
		if (i < hier.trace.records.size()) {
			const auto& r = hier.trace.records[i];
			row.err_hier = r.residual_2norm;
			row.sites_hier = r.rank;
			row.kevals_hier = m * static_cast<std::uint64_t>(r.rank);
		}
		if (i < cascade.trace.records.size()) {
			const auto& r = cascade.trace.records[i];
			row.err_cascade = r.residual_2norm;
			row.sites_cascade_cumulative = r.cumulative_sites;
			row.kevals_cascade = m * static_cast<std::uint64_t>(r.cumulative_sites);
		}
		report.rows.push_back(row);
	}

	using clock = std::chrono::steady_clock;
	EvalCounter hier_counter, cascade_counter;
	auto t0 = clock::now();
	(void)evaluate(hier.model, queries_normalized, &hier_counter);
	auto t1 = clock::now();
	(void)evaluate(cascade.model, queries_normalized, &cascade_counter);
	auto t2 = clock::now();
	report.kevals_hier = hier_counter.evaluations;
	report.kevals_cascade = cascade_counter.evaluations;
	report.seconds_hier = std::chrono::duration<double>(t1 - t0).count();
	report.seconds_cascade = std::chrono::duration<double>(t2 - t1).count();
	return report;
}

} // namespace hsr
