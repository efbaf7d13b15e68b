#include <hsr/data.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace hsr {

namespace {

std::string_view trim(std::string_view s)
{
	const auto first = s.find_first_not_of(" \t\r");
	if (first == std::string_view::npos)
		return {};
	const auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
	std::vector<std::string_view> fields;
	std::size_t start = 0;
	while (true) {
		const auto comma = line.find(',', start);
		fields.push_back(trim(line.substr(start, comma - start)));
		if (comma == std::string_view::npos)
			break;
		start = comma + 1;
	}
	return fields;
}

double parse_real(std::string_view field, std::size_t line_no, std::size_t column)
{
	double value = 0.0;
	if (!field.empty() && field.front() == '+')
		field.remove_prefix(1);
	const auto* end = field.data() + field.size();
	auto [ptr, ec] = std::from_chars(field.data(), end, value);
	if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
		std::ostringstream msg;
		msg << "row " << line_no << ", column " << column + 1 << ": non-numeric field '"
		    << field << "'";
		throw Error(msg.str());
	}
	return value;
}

// Rows of numeric fields, all of the same width.
std::vector<std::vector<double>> read_rows(std::istream& in, bool has_header)
{
	std::vector<std::vector<double>> rows;
	std::string line;
	std::size_t line_no = 0;
	std::size_t width = 0;
	bool header_pending = has_header;
	while (std::getline(in, line)) {
		++line_no;
		const auto content = trim(line);
		if (content.empty())
			continue;
		if (header_pending) {
			header_pending = false;
			continue;
		}
		const auto fields = split_fields(content);
		if (width == 0) {
			width = fields.size();
		} else if (fields.size() != width) {
			std::ostringstream msg;
			msg << "row " << line_no << ": inconsistent column count (expected " << width
			    << ", found " << fields.size() << ")";
			throw Error(msg.str());
		}
		std::vector<double> row(fields.size());
		for (std::size_t c = 0; c < fields.size(); ++c)
			row[c] = parse_real(fields[c], line_no, c);
		rows.push_back(std::move(row));
	}
	if (rows.empty())
		throw Error("no data rows");
	return rows;
}

double abs_max(const auto& values)
{
	double m = 0.0;
	for (Index i = 0; i < values.size(); ++i)
		m = std::max(m, std::abs(values(i)));
	return m;
}

} // namespace

// ---------------------------------------------------------------------------

NormalizationInfo NormalizationInfo::identity(Index dim)
{
	return {std::vector<double>(static_cast<std::size_t>(dim), 1.0), 1.0};
}

bool NormalizationInfo::is_identity() const
{
	return value_scale == 1.0 &&
	       std::all_of(axis_scales.begin(), axis_scales.end(), [](double s) { return s == 1.0; });
}

Matrix NormalizationInfo::normalize_sites(const Matrix& raw) const
{
	if (raw.cols() != static_cast<Index>(axis_scales.size()))
		throw Error("site dimension does not match normalization");
	Matrix out = raw;
	for (Index j = 0; j < out.cols(); ++j)
		out.col(j) /= axis_scales[static_cast<std::size_t>(j)];
	return out;
}

Matrix NormalizationInfo::denormalize_sites(const Matrix& normalized) const
{
	if (normalized.cols() != static_cast<Index>(axis_scales.size()))
		throw Error("site dimension does not match normalization");
	Matrix out = normalized;
	for (Index j = 0; j < out.cols(); ++j)
		out.col(j) *= axis_scales[static_cast<std::size_t>(j)];
	return out;
}

void Dataset::validate() const
{
	if (sites.rows() < 1 || sites.cols() < 1)
		throw Error("dataset needs at least one site and one dimension");
	if (values.size() != sites.rows())
		throw Error("dataset value count does not match site count");
	if (!sites.allFinite() || !values.allFinite())
		throw Error("dataset contains non-finite entries");
	if (static_cast<Index>(normalization.axis_scales.size()) != sites.cols())
		throw Error("normalization axis count does not match dataset dimension");
}

Index GridSpec::size() const
{
	Index total = 1;
	for (auto c : counts)
		total *= c;
	return total;
}

Matrix GridSpec::nodes() const
{
	const Index d = dim();
	if (static_cast<Index>(counts.size()) != d || d == 0)
		throw Error("grid origin and counts disagree in dimension");
	if (!(cell > 0.0))
		throw Error("grid cell size must be positive");
	for (auto c : counts)
		if (c < 1)
			throw Error("grid counts must be positive");

	Matrix out(size(), d);
	std::vector<Index> idx(static_cast<std::size_t>(d), 0);
	for (Index row = 0; row < out.rows(); ++row) {
		for (Index j = 0; j < d; ++j)
			out(row, j) = origin[static_cast<std::size_t>(j)] +
			              cell * static_cast<double>(idx[static_cast<std::size_t>(j)]);
		for (Index j = d - 1; j >= 0; --j) {
			auto& k = idx[static_cast<std::size_t>(j)];
			if (++k < counts[static_cast<std::size_t>(j)])
				break;
			k = 0;
		}
	}
	return out;
}

GridSpec GridSpec::covering(const std::vector<double>& lo, const std::vector<double>& hi,
                            double cell)
{
	if (lo.size() != hi.size() || lo.empty())
		throw Error("grid bounds disagree in dimension");
	if (!(cell > 0.0))
		throw Error("grid cell size must be positive");
	GridSpec g;
	g.origin = lo;
	g.cell = cell;
	for (std::size_t j = 0; j < lo.size(); ++j) {
		const double extent = hi[j] - lo[j];
		// tolerate round-off so that an exact multiple includes the far edge
		g.counts.push_back(static_cast<Index>(std::floor(extent / cell + 1e-9)) + 1);
	}
	return g;
}

// ---------------------------------------------------------------------------

Dataset parse_csv(std::istream& in, bool has_header)
{
	const auto rows = read_rows(in, has_header);
	const auto width = rows.front().size();
	if (width < 2)
		throw Error("each row needs at least one site coordinate and one response");
	const auto n = static_cast<Index>(rows.size());
	const auto d = static_cast<Index>(width - 1);

	Dataset ds;
	ds.sites.resize(n, d);
	ds.values.resize(n);
	for (Index i = 0; i < n; ++i) {
		const auto& r = rows[static_cast<std::size_t>(i)];
		for (Index j = 0; j < d; ++j)
			ds.sites(i, j) = r[static_cast<std::size_t>(j)];
		ds.values(i) = r.back();
	}
	ds.normalization = NormalizationInfo::identity(d);
	return ds;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path.string());
	return parse_csv(in, has_header);
}

SiteTable load_sites_csv(const std::filesystem::path& path, bool has_header, Index dim)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path.string());
	const auto rows = read_rows(in, has_header);
	const auto width = static_cast<Index>(rows.front().size());
	if (width != dim && width != dim + 1) {
		std::ostringstream msg;
		msg << "site file has " << width << " columns, expected " << dim << " or " << dim + 1;
		throw Error(msg.str());
	}
	SiteTable t;
	const auto n = static_cast<Index>(rows.size());
	t.sites.resize(n, dim);
	if (width == dim + 1)
		t.observed.resize(n);
	for (Index i = 0; i < n; ++i) {
		const auto& r = rows[static_cast<std::size_t>(i)];
		for (Index j = 0; j < dim; ++j)
			t.sites(i, j) = r[static_cast<std::size_t>(j)];
		if (width == dim + 1)
			t.observed(i) = r.back();
	}
	return t;
}

void write_csv(const std::filesystem::path& path, const Dataset& ds)
{
	std::ofstream out(path);
	if (!out)
		throw Error("cannot write " + path.string());
	out << std::setprecision(17);
	for (Index j = 0; j < ds.dim(); ++j)
		out << 'x' << j << ',';
	out << "value\n";
	for (Index i = 0; i < ds.size(); ++i) {
		for (Index j = 0; j < ds.dim(); ++j)
			out << ds.sites(i, j) << ',';
		out << ds.values(i) << '\n';
	}
	if (!out)
		throw Error("write failed for " + path.string());
}

Dataset normalize(const Dataset& ds)
{
	ds.validate();
	Dataset out = ds;
	for (Index j = 0; j < ds.dim(); ++j) {
		double m = abs_max(ds.sites.col(j));
		if (m == 0.0)
			m = 1.0;
		out.sites.col(j) /= m;
		out.normalization.axis_scales[static_cast<std::size_t>(j)] *= m;
	}
	double m = abs_max(ds.values);
	if (m == 0.0)
		m = 1.0;
	out.values /= m;
	out.normalization.value_scale *= m;
	return out;
}

Dataset denormalize(const Dataset& ds)
{
	ds.validate();
	Dataset out;
	out.sites = ds.normalization.denormalize_sites(ds.sites);
	out.values = ds.values * ds.normalization.value_scale;
	out.normalization = NormalizationInfo::identity(ds.dim());
	return out;
}

double diameter(const Matrix& sites)
{
	const Index n = sites.rows();
	if (n < 2)
		throw Error("diameter undefined for fewer than two sites");
	double best = 0.0;
	for (Index i = 0; i < n; ++i)
		for (Index j = i + 1; j < n; ++j)
			best = std::max(best, (sites.row(i) - sites.row(j)).squaredNorm());
	return std::sqrt(best);
}

std::vector<std::pair<double, double>> bounding_box(const Matrix& sites)
{
	if (sites.rows() < 1)
		throw Error("bounding box of an empty site set");
	std::vector<std::pair<double, double>> box;
	for (Index j = 0; j < sites.cols(); ++j)
		box.emplace_back(sites.col(j).minCoeff(), sites.col(j).maxCoeff());
	return box;
}

std::vector<double> bounding_box_lengths(const Matrix& sites)
{
	std::vector<double> lengths;
	for (const auto& [lo, hi] : bounding_box(sites))
		lengths.push_back(hi - lo);
	return lengths;
}

// ---------------------------------------------------------------------------

TestFunction parse_test_function(std::string_view id)
{
	if (id == "TF1" || id == "tf1")
		return TestFunction::TF1;
	if (id == "TF2" || id == "tf2")
		return TestFunction::TF2;
	if (id == "TF3" || id == "tf3")
		return TestFunction::TF3;
	if (id == "TF4" || id == "tf4")
		return TestFunction::TF4;
	throw Error("unknown test function '" + std::string(id) + "' (expected TF1..TF4)");
}

std::string_view name(TestFunction id)
{
	switch (id) {
	case TestFunction::TF1: return "TF1";
	case TestFunction::TF2: return "TF2";
	case TestFunction::TF3: return "TF3";
	case TestFunction::TF4: return "TF4";
	}
	return "?";
}

Index dim(TestFunction id)
{
	return (id == TestFunction::TF1 || id == TestFunction::TF2) ? 1 : 2;
}

std::pair<double, double> domain(TestFunction id)
{
	switch (id) {
	case TestFunction::TF1: return {0.5, 2.5};
	case TestFunction::TF2: return {-500.0, 500.0};
	case TestFunction::TF3: return {-2.0, 2.0};
	case TestFunction::TF4: return {-500.0, 500.0};
	}
	return {0.0, 0.0};
}

double evaluate(TestFunction id, const double* x)
{
	using std::numbers::pi;
	auto schwefel_term = [](double t) { return t * std::sin(std::sqrt(std::abs(t))); };
	switch (id) {
	case TestFunction::TF1: // Gramacy & Lee
		return std::sin(10.0 * pi * x[0]) / (2.0 * x[0]) + std::pow(x[0] - 1.0, 4);
	case TestFunction::TF2:
		return 418.9829 - schwefel_term(x[0]);
	case TestFunction::TF3: { // drop-wave
		const double r2 = x[0] * x[0] + x[1] * x[1];
		return -(1.0 + std::cos(12.0 * std::sqrt(r2))) / (0.5 * r2 + 2.0);
	}
	case TestFunction::TF4:
		return 837.9658 - schwefel_term(x[0]) - schwefel_term(x[1]);
	}
	return 0.0;
}

Vector evaluate(TestFunction id, const Matrix& sites)
{
	if (sites.cols() != dim(id))
		throw Error("site dimension does not match test function");
	Vector out(sites.rows());
	double x[2] = {0.0, 0.0};
	for (Index i = 0; i < sites.rows(); ++i) {
		for (Index j = 0; j < sites.cols(); ++j)
			x[j] = sites(i, j);
		out(i) = evaluate(id, x);
	}
	return out;
}

Dataset gen_test_function(TestFunction id, const Sampling& sampling)
{
	if (sampling.count < 2)
		throw Error("sampling count must be at least 2");
	const Index d = dim(id);
	const auto [lo, hi] = domain(id);

	Dataset ds;
	switch (sampling.kind) {
	case Sampling::Kind::Equidistant:
		if (d != 1)
			throw Error("equidistant sampling applies to 1-D functions; use a grid");
		[[fallthrough]];
	case Sampling::Kind::Grid: {
		// same row-major order as GridSpec::nodes, with both edges hit exactly
		const Index g = sampling.count;
		Index total = 1;
		for (Index j = 0; j < d; ++j)
			total *= g;
		ds.sites.resize(total, d);
		for (Index i = 0; i < total; ++i) {
			Index rem = i;
			for (Index j = d - 1; j >= 0; --j) {
				const auto k = static_cast<double>(rem % g);
				rem /= g;
				ds.sites(i, j) = lo + (hi - lo) * k / static_cast<double>(g - 1);
			}
		}
		break;
	}
	case Sampling::Kind::UniformRandom: {
		std::mt19937_64 rng(sampling.seed);
		std::uniform_real_distribution<double> u(lo, hi);
		ds.sites.resize(sampling.count, d);
		for (Index i = 0; i < sampling.count; ++i)
			for (Index j = 0; j < d; ++j)
				ds.sites(i, j) = u(rng);
		break;
	}
	}
	ds.values = evaluate(id, ds.sites);
	ds.normalization = NormalizationInfo::identity(d);
	return ds;
}

} // namespace hsr
