// hsr: command-line front end for fitting, predicting with and diagnosing
// hierarchical sparse kernel representations.

#include <hsr/baseline.hpp>
#include <hsr/diagnostics.hpp>
#include <hsr/model_io.hpp>
#include <hsr/predict.hpp>
#include <hsr/table.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace hsr;
using nlohmann::json;

namespace {

struct GlobalOptions {
	std::uint64_t seed = 7;
	double tol = 1e-2;
	double p_factor = 2.0;
	std::optional<double> T;
	double delta = 1e-10;
	Index oversample = 8;
	int max_scale = 25;
	int stop_patience = 2;
	double alpha = 0.05;
	std::string out;
	bool header = false;
};

FitSettings settings_from(const GlobalOptions& g)
{
	FitSettings s;
	s.tol = g.tol;
	s.P = g.p_factor;
	s.T = g.T;
	s.delta = g.delta;
	s.k_oversample = g.oversample;
	s.seed = g.seed;
	s.max_scale = g.max_scale;
	s.stop_patience = g.stop_patience;
	s.validate();
	return s;
}

json settings_json(const FitSettings& s)
{
	json j;
	j["tol"] = s.tol;
	j["p_factor"] = s.P;
	j["T"] = s.T ? json(*s.T) : json(nullptr);
	j["delta"] = s.delta;
	j["oversample"] = s.k_oversample;
	j["seed"] = s.seed;
	j["max_scale"] = s.max_scale;
	j["stop_patience"] = s.stop_patience;
	return j;
}

fs::path require_out(const GlobalOptions& g)
{
	if (g.out.empty())
		throw CLI::RequiredError("--out");
	return g.out;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix)
{
	return fs::path(base.string() + suffix);
}

void write_json(const fs::path& path, const json& j)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error("cannot write '" + path.string() + "'");
	out << j.dump(1, '\t') << '\n';
	if (!out)
		throw Error("write failed for '" + path.string() + "'");
}

/// Loads raw data and returns it normalized, with T resolved into `settings`.
Dataset load_normalized(const std::string& path, bool header, FitSettings& settings)
{
	Dataset ds = normalize(load_csv(path, header));
	if (!settings.T)
		settings.T = default_T(ds);
	return ds;
}

/// `per_axis` evenly spaced nodes per axis over the box, as one square-cell grid.
Matrix box_grid(const std::vector<std::pair<double, double>>& box, Index per_axis)
{
	std::vector<double> lo, hi;
	double longest = 0.0;
	for (const auto& [a, b] : box) {
		lo.push_back(a);
		hi.push_back(b);
		longest = std::max(longest, b - a);
	}
	if (longest == 0.0)
		return Eigen::Map<const Eigen::RowVectorXd>(lo.data(), static_cast<Index>(lo.size()));
	return GridSpec::covering(lo, hi, longest / static_cast<double>(per_axis - 1)).nodes();
}

// ---------------------------------------------------------------------------

struct GenArgs {
	std::string id;
	std::optional<Index> equidistant, grid, uniform;
};

int cmd_gen(const GlobalOptions& g, const GenArgs& a)
{
	const auto id = parse_test_function(a.id);
	Sampling sampling;
	const int chosen = !!a.equidistant + !!a.grid + !!a.uniform;
	if (chosen > 1)
		throw CLI::ValidationError("choose one of --equidistant, --grid, --uniform");
	if (a.equidistant)
		sampling = Sampling::equidistant(*a.equidistant);
	else if (a.grid)
		sampling = Sampling::grid(*a.grid);
	else if (a.uniform)
		sampling = Sampling::uniform(*a.uniform, g.seed);
	else
		sampling = dim(id) == 1 ? Sampling::equidistant(200) : Sampling::grid(50);

	const auto out = require_out(g);
	const auto ds = gen_test_function(id, sampling);
	write_csv(out, ds);

	static constexpr const char* kinds[] = {"equidistant", "grid", "uniform"};
	json cfg{{"command", "gen"},
	         {"function", std::string(name(id))},
	         {"sampling", kinds[static_cast<int>(sampling.kind)]},
	         {"count", sampling.count},
	         {"seed", g.seed},
	         {"out", out.string()}};
	write_json(with_suffix(out, ".config.json"), cfg);
	std::cout << name(id) << ": " << ds.size() << " sites -> " << out.string() << '\n';
	return 0;
}

struct FitArgs {
	std::string data;
	std::string trace;
};

int cmd_fit(const GlobalOptions& g, const FitArgs& a)
{
	auto settings = settings_from(g);
	const auto out = require_out(g);
	const auto ds = load_normalized(a.data, g.header, settings);
	const auto result = fit(ds, settings);
	const fs::path trace_path = a.trace.empty() ? fs::path(out).replace_extension(".trace.csv")
	                                            : fs::path(a.trace);

	json cfg{{"command", "fit"}, {"data", a.data}, {"header", g.header},
	         {"out", out.string()}, {"trace", trace_path.string()}, {"settings", settings_json(settings)}};
	save_model(out, result.model, cfg);
	trace_table(result.trace).save(trace_path);

	const auto& m = result.model;
	std::cout << to_string(m.status) << " at scale " << m.scale << ": " << m.size() << " of "
	          << m.n_train << " sites, residual " << m.residual_2norm << '\n';
	if (result.trace.critical_scale)
		std::cout << "critical scale " << *result.trace.critical_scale << '\n';
	return 0;
}

struct PredictArgs {
	std::string model;
	std::string sites;
	std::optional<double> grid;
	bool intervals = false;
	std::string data;
};

int cmd_predict(const GlobalOptions& g, const PredictArgs& a, const char* command)
{
	const auto out = require_out(g);
	const auto model = load_model(a.model);
	if (a.sites.empty() == !a.grid)
		throw CLI::ValidationError("give exactly one of --sites or --grid");

	Matrix sites;
	Vector observed;
	if (a.grid) {
		std::vector<double> lo, hi;
		for (const auto& [l, h] : model.domain) {
			lo.push_back(l);
			hi.push_back(h);
		}
		sites = GridSpec::covering(lo, hi, *a.grid).nodes();
	} else {
		auto table = load_sites_csv(a.sites, g.header, model.dim);
		sites = std::move(table.sites);
		observed = std::move(table.observed);
	}
	const Vector mean = reconstruct(model, sites);

	std::optional<IntervalBand> band;
	if (a.intervals) {
		if (a.data.empty())
			throw CLI::ValidationError("--intervals needs the training data (--data)");
		const auto train = load_csv(a.data, g.header);
		if (train.size() != model.n_train || train.dim() != model.dim)
			throw Error("training data does not match the model");
		const Matrix x = model.normalization.normalize_sites(train.sites);
		for (Index j = 0; j < model.size(); ++j)
			if ((x.row(model.indices[static_cast<std::size_t>(j)]) - model.sites.row(j))
			        .cwiseAbs()
			        .maxCoeff() > 1e-12)
				throw Error("training data does not match the model");
		try {
			const double sigma = sigma_hat(model.residual_2norm, model.n_train, model.size());
			const LeastSquaresFactor factor(gram(x, model.sites, model.epsilon));
			const Matrix at = gram(model.normalization.normalize_sites(sites), model.sites, model.epsilon);
			band = intervals(factor, model.coeffs, at, sigma, model.n_train, g.alpha)
			           .scaled(model.normalization.value_scale);
		} catch (const DegenerateDof& e) {
			std::cerr << "warning: " << e.what() << "; interval bands omitted\n";
		}
	}

	prediction_table(sites, mean, band ? &*band : nullptr, observed.size() ? &observed : nullptr)
	    .save(out);

	json cfg{{"command", command},
	         {"model", a.model},
	         {"sites", a.sites.empty() ? json(nullptr) : json(a.sites)},
	         {"grid", a.grid ? json(*a.grid) : json(nullptr)},
	         {"header", g.header},
	         {"intervals", a.intervals},
	         {"bands_written", band.has_value()},
	         {"alpha", g.alpha},
	         {"data", a.data.empty() ? json(nullptr) : json(a.data)},
	         {"out", out.string()}};
	write_json(with_suffix(out, ".config.json"), cfg);
	std::cout << sites.rows() << " predictions -> " << out.string() << '\n';
	return 0;
}

struct DiagnoseArgs {
	std::string data;
	std::optional<int> scale;
	Index power_grid = 0;
};

int cmd_diagnose(const GlobalOptions& g, const DiagnoseArgs& a)
{
	auto settings = settings_from(g);
	const auto out = require_out(g);
	const auto ds = load_normalized(a.data, g.header, settings);
	const auto result = fit(ds, settings);
	const auto& trace = result.trace;

	bound_table(bound_report(ds, trace, settings.delta)).save(with_suffix(out, ".bounds.csv"));
	trace_table(trace).save(with_suffix(out, ".trace.csv"));

	const KernelParams base{*settings.T, settings.P, 0};
	std::vector<std::pair<int, StabilityDiag>> stability;
	for (const auto& rec : trace.records) {
		const ScaleAnalysis an(ds.sites, ds.values,
		                       fit_scale(ds.sites, ds.values, base.at_scale(rec.scale), settings));
		stability.emplace_back(rec.scale, an.stability());
	}
	stability_table(stability).save(with_suffix(out, ".stability.csv"));

	const int scale = a.scale.value_or(result.model.scale);
	const Index per_axis = a.power_grid ? a.power_grid : (ds.dim() == 1 ? 200 : 40);
	const ScaleAnalysis an(ds.sites, ds.values,
	                       fit_scale(ds.sites, ds.values, base.at_scale(scale), settings));
	const Matrix xs = box_grid(bounding_box(ds.sites), per_axis);
	power_table(ds.normalization.denormalize_sites(xs), an.power(xs))
	    .save(with_suffix(out, ".power.csv"));

	json cfg{{"command", "diagnose"}, {"data", a.data},   {"header", g.header},
	         {"out", out.string()},   {"power_scale", scale}, {"power_grid", per_axis},
	         {"settings", settings_json(settings)}};
	write_json(with_suffix(out, ".config.json"), cfg);

	std::size_t failures = 0;
	for (const auto& [s, d] : stability)
		failures += !d.holds();
	std::cout << trace.records.size() << " scales diagnosed; stability bound "
	          << (failures ? "violated" : "holds") << " at every scale\n";
	return 0;
}

struct ImportanceArgs {
	std::string data;
	int scale = 0;
	Index runs = 200;
};

int cmd_importance(const GlobalOptions& g, const ImportanceArgs& a)
{
	auto settings = settings_from(g);
	const auto out = require_out(g);
	const auto ds = load_normalized(a.data, g.header, settings);
	const auto report = importance(ds, a.scale, a.runs, g.seed, settings);
	const Matrix raw = ds.normalization.denormalize_sites(ds.sites);
	importance_ranking_table(report, raw).save(with_suffix(out, ".ranking.csv"));
	importance_histogram_table(report, raw).save(with_suffix(out, ".histogram.csv"));

	json cfg{{"command", "importance"}, {"data", a.data}, {"header", g.header},
	         {"out", out.string()},     {"scale", a.scale}, {"runs", a.runs},
	         {"settings", settings_json(settings)}};
	write_json(with_suffix(out, ".config.json"), cfg);
	std::cout << "rank " << report.rank << " at scale " << a.scale << ", " << a.runs << " runs\n";
	return 0;
}

struct CompareArgs {
	std::string data;
	Index queries = 1000;
};

int cmd_compare(const GlobalOptions& g, const CompareArgs& a)
{
	auto settings = settings_from(g);
	const auto out = require_out(g);
	const auto ds = load_normalized(a.data, g.header, settings);

	// queries uniform over the normalized bounding box
	const auto box = bounding_box(ds.sites);
	std::mt19937_64 rng(derive_seed(g.seed, 0xC0FFEE));
	Matrix q(a.queries, ds.dim());
	for (Index i = 0; i < q.rows(); ++i)
		for (Index j = 0; j < q.cols(); ++j) {
			const auto [lo, hi] = box[static_cast<std::size_t>(j)];
			q(i, j) = std::uniform_real_distribution<double>(lo, hi)(rng);
		}

	const auto report = compare(ds, settings, q);
	comparison_table(report).save(out);
	json cfg{{"command", "compare"},
	         {"data", a.data},
	         {"header", g.header},
	         {"out", out.string()},
	         {"queries", a.queries},
	         {"kevals_hier", report.kevals_hier},
	         {"kevals_cascade", report.kevals_cascade},
	         {"hier_status", std::string(to_string(report.hier_status))},
	         {"cascade_status", std::string(to_string(report.cascade_status))},
	         {"settings", settings_json(settings)}};
	write_json(with_suffix(out, ".config.json"), cfg);

	std::cout << "hierarchical: " << to_string(report.hier_status) << " at scale "
	          << report.hier_terminal_scale << ", " << report.kevals_hier << " kernel evaluations, "
	          << report.seconds_hier << " s\n"
	          << "cascade:      " << to_string(report.cascade_status) << " at scale "
	          << report.cascade_terminal_scale << ", " << report.kevals_cascade
	          << " kernel evaluations, " << report.seconds_cascade << " s\n";
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Hierarchical sparse representation of scattered data with Gaussian kernels"};
	app.require_subcommand(1);
	app.fallthrough();

	GlobalOptions g;
	app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
	app.add_option("--tol", g.tol, "2-norm tolerance on normalized values")
	    ->check(CLI::NonNegativeNumber)
	    ->capture_default_str();
	app.add_option("--p-factor", g.p_factor, "Scale factor P, epsilon_s = T / P^s")->capture_default_str();
	app.add_option("--T", g.T, "Base length scale (default 2 (diameter/2)^2)");
	app.add_option("--delta", g.delta, "Relative singular-value threshold for the rank")->capture_default_str();
	app.add_option("--oversample", g.oversample, "Extra sketch rows")->capture_default_str();
	app.add_option("--max-scale", g.max_scale, "Last scale tried")->capture_default_str();
	app.add_option("--stop-patience", g.stop_patience, "Full-rank scales tolerated above tol")
	    ->capture_default_str();
	app.add_option("--alpha", g.alpha, "Interval level 1 - alpha")->capture_default_str();
	app.add_option("--out", g.out, "Output path or prefix");
	app.add_flag("--header", g.header, "Input CSV files have a header line");

	GenArgs gen;
	auto* gen_cmd = app.add_subcommand("gen", "Sample a test function to CSV");
	gen_cmd->add_option("id", gen.id, "TF1, TF2, TF3 or TF4")->required();
	gen_cmd->add_option("--equidistant", gen.equidistant, "n equidistant points (1-D)");
	gen_cmd->add_option("--grid", gen.grid, "g points per axis");
	gen_cmd->add_option("--uniform", gen.uniform, "n uniform random points (uses --seed)");

	FitArgs fa;
	auto* fit_cmd = app.add_subcommand("fit", "Fit a model; writes model JSON and a trace CSV");
	fit_cmd->add_option("data", fa.data, "Training CSV")->required()->check(CLI::ExistingFile);
	fit_cmd->add_option("--trace", fa.trace, "Trace CSV (default <out>.trace.csv)");

	PredictArgs pa;
	auto* predict_cmd = app.add_subcommand("predict", "Predict at sites, optionally with interval bands");
	predict_cmd->add_option("model", pa.model, "Model JSON")->required()->check(CLI::ExistingFile);
	predict_cmd->add_option("--sites", pa.sites, "CSV of sites (an extra column is read as observed)");
	predict_cmd->add_option("--grid", pa.grid, "Cell size of a grid over the training domain");
	predict_cmd->add_flag("--intervals", pa.intervals, "Add confidence and prediction bands");
	predict_cmd->add_option("--data", pa.data, "Training CSV, required by --intervals");

	PredictArgs ra;
	auto* recon_cmd = app.add_subcommand("reconstruct", "Evaluate the model at sites or on a grid");
	recon_cmd->add_option("model", ra.model, "Model JSON")->required()->check(CLI::ExistingFile);
	recon_cmd->add_option("--sites", ra.sites, "CSV of sites");
	recon_cmd->add_option("--grid", ra.grid, "Cell size of a grid over the training domain");

	DiagnoseArgs da;
	auto* diag_cmd = app.add_subcommand("diagnose", "Refit and write bound, power and stability tables");
	diag_cmd->add_option("data", da.data, "Training CSV")->required()->check(CLI::ExistingFile);
	diag_cmd->add_option("--scale", da.scale, "Scale for the power function (default S_a)");
	diag_cmd->add_option("--power-grid", da.power_grid, "Power-function points per axis");

	ImportanceArgs ia;
	auto* imp_cmd = app.add_subcommand("importance", "Pivot-order ranking and top-3 histograms");
	imp_cmd->add_option("data", ia.data, "Training CSV")->required()->check(CLI::ExistingFile);
	imp_cmd->add_option("--scale", ia.scale, "Scale")->capture_default_str();
	imp_cmd->add_option("--runs", ia.runs, "Seeded runs")->capture_default_str()->check(CLI::PositiveNumber);

	CompareArgs ca;
	auto* cmp_cmd = app.add_subcommand("compare", "Hierarchical model against the residual cascade");
	cmp_cmd->add_option("data", ca.data, "Training CSV")->required()->check(CLI::ExistingFile);
	cmp_cmd->add_option("--queries", ca.queries, "Query batch size")->capture_default_str();

	try {
		app.parse(argc, argv);
		if (*gen_cmd)
			return cmd_gen(g, gen);
		if (*fit_cmd)
			return cmd_fit(g, fa);
		if (*predict_cmd)
			return cmd_predict(g, pa, "predict");
		if (*recon_cmd)
			return cmd_predict(g, ra, "reconstruct");
		if (*diag_cmd)
			return cmd_diagnose(g, da);
		if (*imp_cmd)
			return cmd_importance(g, ia);
		if (*cmp_cmd)
			return cmd_compare(g, ca);
	} catch (const CLI::ParseError& e) {
		return app.exit(e);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 1;
}
