#include <hsr/hierfit.hpp>

#include <cmath>

namespace hsr {

void FitSettings::validate() const
{
	if (!(tol >= 0.0))
		throw Error("tolerance must be nonnegative");
	if (!(P > 1.0))
		throw Error("scale factor P must exceed 1");
	if (T && !(*T > 0.0))
		throw Error("T must be positive");
	if (!(delta > 0.0 && delta < 1.0))
		throw Error("delta must lie in (0, 1)");
	if (k_oversample < 0)
		throw Error("oversampling must be nonnegative");
	if (max_scale < 0)
		throw Error("max scale must be nonnegative");
	if (stop_patience < 1)
		throw Error("stop patience must be at least 1");
}

// ---------------------------------------------------------------------------

LeastSquaresFactor::LeastSquaresFactor(const Matrix& basis)
{
	if (basis.rows() < basis.cols() || basis.cols() == 0)
		throw Error("least squares: basis must be tall with at least one column");
	if (!basis.allFinite())
		throw Error("least squares: basis has non-finite entries");
	qr_.compute(basis);
	if (qr_.rank() < basis.cols())
		throw Error("least squares: basis is numerically rank deficient");
}

Vector LeastSquaresFactor::solve(const Vector& f) const
{
	if (f.size() != rows())
		throw Error("least squares: right-hand side length mismatch");
	return qr_.solve(f);
}

Vector LeastSquaresFactor::project(const Vector& f) const
{
	if (f.size() != rows())
		throw Error("least squares: right-hand side length mismatch");
	Vector z = qr_.householderQ().transpose() * f;
	z.tail(rows() - cols()).setZero();
	return qr_.householderQ() * z;
}

Vector LeastSquaresFactor::whiten(const Vector& b) const
{
	if (b.size() != cols())
		throw Error("least squares: vector length does not match basis width");
	const Vector pb = qr_.colsPermutation().transpose() * b;
	const auto R = qr_.matrixR().topLeftCorner(cols(), cols()).template triangularView<Eigen::Upper>();
	return R.transpose().solve(pb);
}

double LeastSquaresFactor::quadratic_form(const Vector& b) const
{
	return whiten(b).squaredNorm();
}

Vector LeastSquaresFactor::extend(const Vector& r) const
{
	Vector padded = Vector::Zero(rows());
	padded.head(cols()) = whiten(r);
	return qr_.householderQ() * padded;
}

Matrix LeastSquaresFactor::pseudo_inverse() const
{
	// P R^{-1} Q_thin^T
	Matrix qt = Matrix::Identity(rows(), rows());
	qt.applyOnTheLeft(qr_.householderQ().transpose());
	const auto R = qr_.matrixR().topLeftCorner(cols(), cols()).template triangularView<Eigen::Upper>();
	const Matrix rinv_qt = R.solve(qt.topRows(cols()));
	return qr_.colsPermutation() * rinv_qt;
}

Projection project(const Matrix& basis, const Vector& f)
{
	const LeastSquaresFactor factor(basis);
	Projection p;
	p.coeffs = factor.solve(f);
	p.fitted = factor.project(f);
	return p;
}

// ---------------------------------------------------------------------------

ScaleFit fit_scale(const Matrix& sites, const Vector& target, const KernelParams& kernel,
                   const FitSettings& settings)
{
	if (sites.rows() != target.size())
		throw Error("fit: site and value counts disagree");

	ScaleFit sf;
	sf.kernel = kernel;
	const Matrix G = gram(sites, sites, kernel);
	const Index rank = std::max<Index>(1, numerical_rank(G, settings.delta));
	sf.basis = select_basis(G, rank, settings.k_oversample,
	                        derive_seed(settings.seed, static_cast<std::uint64_t>(kernel.scale)));
	sf.basis.scale = kernel.scale;

	const auto selected = sf.basis.selected();
	sf.selected_sites.resize(rank, sites.cols());
	for (Index j = 0; j < rank; ++j)
		sf.selected_sites.row(j) = sites.row(selected[static_cast<std::size_t>(j)]);

	auto proj = project(sf.basis.basis, target);
	sf.coeffs = std::move(proj.coeffs);
	sf.fitted = std::move(proj.fitted);
	sf.residual = target - sf.fitted;
	return sf;
}

namespace {

ScaleRecord make_record(const ScaleFit& sf)
{
	ScaleRecord rec;
	rec.scale = sf.kernel.scale;
	rec.epsilon = sf.kernel.epsilon();
	rec.rank = sf.basis.rank;
	rec.pivot_order = sf.basis.pivot_order;
	rec.residual_2norm = sf.residual_2norm();
	rec.residual_inf_norm = sf.residual_inf_norm();
	rec.sampled_fraction = sf.sampled_fraction();
	rec.coeffs = sf.coeffs;
	rec.fitted = sf.fitted;
	return rec;
}

} // namespace

std::string_view to_string(FitStatus status)
{
	switch (status) {
	case FitStatus::Converged: return "Converged";
	case FitStatus::CriticalScaleExhausted: return "CriticalScaleExhausted";
	case FitStatus::MaxScaleCap: return "MaxScaleCap";
	}
	return "?";
}

FitStatus parse_fit_status(std::string_view text)
{
	if (text == "Converged")
		return FitStatus::Converged;
	if (text == "CriticalScaleExhausted")
		return FitStatus::CriticalScaleExhausted;
	if (text == "MaxScaleCap")
		return FitStatus::MaxScaleCap;
	throw Error("unknown fit status '" + std::string(text) + "'");
}

HierModel make_model(const Dataset& ds, const ScaleFit& sf, const FitSettings& settings,
                     FitStatus status)
{
	HierModel m;
	m.dim = ds.dim();
	m.T = sf.kernel.T;
	m.P = sf.kernel.P;
	m.scale = sf.kernel.scale;
	m.epsilon = sf.kernel.epsilon();
	m.delta = settings.delta;
	m.k_oversample = settings.k_oversample;
	m.seed = settings.seed;
	m.tol = settings.tol;
	m.status = status;
	m.sites = sf.selected_sites;
	m.coeffs = sf.coeffs;
	m.indices = sf.basis.selected();
	m.normalization = ds.normalization;
	m.domain = bounding_box(ds.normalization.denormalize_sites(ds.sites));
	m.n_train = ds.size();
	// what the stored coefficients deliver, not the exact projection
	const Vector model_residual = ds.values - sf.basis.basis * sf.coeffs;
	m.residual_2norm = model_residual.norm();
	m.residual_inf_norm = model_residual.lpNorm<Eigen::Infinity>();
	m.sampled_fraction = sf.sampled_fraction();
	return m;
}

FitResult fit(const Dataset& ds, const FitSettings& settings)
{
	ds.validate();
	settings.validate();

	const Index n = ds.size();
	const KernelParams base{settings.T ? *settings.T : default_T(ds), settings.P, 0};

	FitResult result;
	auto& trace = result.trace;
	int full_rank_misses = 0;
	for (int s = 0; s <= settings.max_scale; ++s) {
		ScaleFit sf = fit_scale(ds.sites, ds.values, base.at_scale(s), settings);
		trace.records.push_back(make_record(sf));

		const bool full_rank = sf.basis.rank == n;
		if (full_rank && !trace.critical_scale) {
			trace.critical_scale = s;
			trace.critical_scale_reached = true;
		}

		std::optional<FitStatus> stop;
		if (sf.residual_2norm() <= settings.tol) {
			stop = FitStatus::Converged;
		} else if (full_rank) {
			if (++full_rank_misses >= settings.stop_patience)
				stop = FitStatus::CriticalScaleExhausted;
		} else {
			full_rank_misses = 0;
		}
		if (!stop && s == settings.max_scale)
			stop = FitStatus::MaxScaleCap;

		if (stop) {
			trace.status = *stop;
			result.model = make_model(ds, sf, settings, *stop);
			break;
		}
	}
	return result;
}

Vector evaluate(const HierModel& model, const Matrix& at_normalized, EvalCounter* counter)
{
	if (at_normalized.cols() != model.dim)
		throw Error("prediction sites have the wrong dimension");
	return gram(at_normalized, model.sites, model.epsilon, counter) * model.coeffs;
}

Vector reconstruct(const HierModel& model, const Matrix& at, EvalCounter* counter)
{
	if (at.cols() != model.dim)
		throw Error("prediction sites have the wrong dimension");
	return evaluate(model, model.normalization.normalize_sites(at), counter) *
	       model.normalization.value_scale;
}

std::optional<int> critical_scale(const Matrix& sites, const KernelParams& base, double delta,
                                  int max_scale)
{
	for (int s = 0; s <= max_scale; ++s)
		if (numerical_rank(gram(sites, sites, base.at_scale(s)), delta) == sites.rows())
			return s;
	return std::nullopt;
}

} // namespace hsr
