#include <hsr/table.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>

namespace hsr {

namespace {

CsvTable::Cell opt(const std::optional<double>& v)
{
	return v ? CsvTable::Cell{*v} : CsvTable::Cell{};
}

template <typename Int>
CsvTable::Cell opt_int(const std::optional<Int>& v)
{
	return v ? CsvTable::Cell{static_cast<std::int64_t>(*v)} : CsvTable::Cell{};
}

CsvTable::Cell integer(auto v) { return static_cast<std::int64_t>(v); }

std::vector<std::string> coord_columns(Index d)
{
	std::vector<std::string> cols;
	for (Index j = 0; j < d; ++j)
		cols.push_back("x" + std::to_string(j));
	return cols;
}

void push_coords(std::vector<CsvTable::Cell>& row, const Matrix& sites, Index i)
{
	for (Index j = 0; j < sites.cols(); ++j)
		row.emplace_back(sites(i, j));
}

} // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<Cell> row)
{
	if (row.size() != columns_.size())
		throw Error("table row has " + std::to_string(row.size()) + " cells, expected " +
		            std::to_string(columns_.size()));
	rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const
{
	const auto old_precision = out.precision(17);
	for (std::size_t c = 0; c < columns_.size(); ++c)
		out << (c ? "," : "") << columns_[c];
	out << '\n';
	for (const auto& row : rows_) {
		for (std::size_t c = 0; c < row.size(); ++c) {
			if (c)
				out << ',';
			std::visit(
			    [&out](const auto& v) {
				    if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, std::monostate>)
					    out << v;
			    },
			    row[c]);
		}
		out << '\n';
	}
	out.precision(old_precision);
}

void CsvTable::save(const std::filesystem::path& path) const
{
	std::ofstream out(path);
	if (!out)
		throw Error("cannot write " + path.string());
	write(out);
	if (!out)
		throw Error("write failed for " + path.string());
}

CsvTable trace_table(const FitTrace& trace)
{
	CsvTable t({"scale", "epsilon", "rank", "sampled_fraction", "residual_2norm",
	            "residual_inf_norm", "critical"});
	for (const auto& r : trace.records)
		t.add_row({integer(r.scale), r.epsilon, integer(r.rank), r.sampled_fraction,
		           r.residual_2norm, r.residual_inf_norm,
		           integer(trace.critical_scale && *trace.critical_scale == r.scale)});
	return t;
}

CsvTable bound_table(const std::vector<BoundReportRow>& rows)
{
	CsvTable t({"scale", "rank", "rank_upper_bound", "rkhs_inner_abs", "rkhs_bound",
	            "rkhs_limit_bound", "alpha", "alpha_upper", "rho"});
	for (const auto& r : rows)
		t.add_row({integer(r.scale), integer(r.rank), r.rank_upper_bound, r.rkhs.inner_abs,
		           r.rkhs.bound, r.rkhs.limit_bound, opt(r.alpha), opt(r.alpha_upper),
		           opt(r.rho)});
	return t;
}

CsvTable power_table(const Matrix& sites, const PowerDiag& diag)
{
	auto cols = coord_columns(sites.cols());
	cols.insert(cols.end(), {"m_dot_r", "power_sq", "psi"});
	CsvTable t(std::move(cols));
	for (Index i = 0; i < sites.rows(); ++i) {
		std::vector<CsvTable::Cell> row;
		push_coords(row, sites, i);
		row.insert(row.end(), {diag.m_dot_r(i), diag.power_sq(i), diag.psi(i)});
		t.add_row(std::move(row));
	}
	return t;
}

CsvTable stability_table(const std::vector<std::pair<int, StabilityDiag>>& per_scale)
{
	CsvTable t({"scale", "lower", "upper", "holds", "at_critical", "critical_bound"});
	for (const auto& [s, d] : per_scale)
		t.add_row({integer(s), d.lower, d.upper, integer(d.holds()), integer(d.at_critical),
		           opt(d.critical_bound)});
	return t;
}

CsvTable importance_ranking_table(const ImportanceReport& report, const Matrix& sites)
{
	auto cols = std::vector<std::string>{"rank", "site"};
	const auto coords = coord_columns(sites.cols());
	cols.insert(cols.end(), coords.begin(), coords.end());
	CsvTable t(std::move(cols));
	for (std::size_t r = 0; r < report.ranking.size(); ++r) {
		const Index site = report.ranking[r];
		std::vector<CsvTable::Cell> row{integer(r + 1), integer(site)};
		push_coords(row, sites, site);
		t.add_row(std::move(row));
	}
	return t;
}

CsvTable importance_histogram_table(const ImportanceReport& report, const Matrix& sites)
{
	auto cols = std::vector<std::string>{"site"};
	const auto coords = coord_columns(sites.cols());
	cols.insert(cols.end(), coords.begin(), coords.end());
	cols.insert(cols.end(), {"rank1", "rank2", "rank3"});
	CsvTable t(std::move(cols));
	for (Index i = 0; i < sites.rows(); ++i) {
		std::vector<CsvTable::Cell> row{integer(i)};
		push_coords(row, sites, i);
		for (const auto& h : report.histogram)
			row.emplace_back(integer(h[static_cast<std::size_t>(i)]));
		t.add_row(std::move(row));
	}
	return t;
}

CsvTable comparison_table(const ComparisonReport& report)
{
	CsvTable t({"scale", "err_hier", "err_cascade", "sites_hier", "sites_cascade_cumulative",
	            "kevals_hier", "kevals_cascade"});
	for (const auto& r : report.rows)
		t.add_row({integer(r.scale), opt(r.err_hier), opt(r.err_cascade), opt_int(r.sites_hier),
		           opt_int(r.sites_cascade_cumulative), opt_int(r.kevals_hier),
		           opt_int(r.kevals_cascade)});
	return t;
}

CsvTable prediction_table(const Matrix& sites, const Vector& mean, const IntervalBand* band,
                          const Vector* observed)
{
	auto cols = coord_columns(sites.cols());
	cols.emplace_back("mean");
	if (band)
		cols.insert(cols.end(), {"conf_lo", "conf_hi", "pred_lo", "pred_hi"});
	if (observed)
		cols.insert(cols.end(), {"observed", "residual"});
	CsvTable t(std::move(cols));
	for (Index i = 0; i < sites.rows(); ++i) {
		std::vector<CsvTable::Cell> row;
		push_coords(row, sites, i);
		row.emplace_back(mean(i));
		if (band) {
			const double c = band->conf_half_width(i);
			const double p = band->pred_half_width(i);
			row.insert(row.end(), {mean(i) - c, mean(i) + c, mean(i) - p, mean(i) + p});
		}
		if (observed)
			row.insert(row.end(), {(*observed)(i), (*observed)(i) - mean(i)});
		t.add_row(std::move(row));
	}
	return t;
}

} // namespace hsr
