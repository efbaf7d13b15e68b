#pragma once

#include <hsr/types.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsr {

/// Per-axis absolute-max scale factors. A raw coordinate equals the
/// normalized coordinate multiplied by its factor.
struct NormalizationInfo {
	std::vector<double> axis_scales; // one per input axis
	double value_scale = 1.0;

	static NormalizationInfo identity(Index dim);

	bool is_identity() const;

	/// Maps raw sites into normalized coordinates.
	Matrix normalize_sites(const Matrix& raw) const;
	Matrix denormalize_sites(const Matrix& normalized) const;
};

struct Dataset {
	Matrix sites;  // n x d
	Vector values; // n
	NormalizationInfo normalization;

	Index size() const { return sites.rows(); }
	Index dim() const { return sites.cols(); }

	/// Throws if shapes disagree, n or d is zero, or any entry is non-finite.
	void validate() const;
};

/// Regular grid. Nodes are enumerated row-major over the index tuple
/// (i_0, ..., i_{d-1}): the last axis varies fastest.
struct GridSpec {
	std::vector<double> origin;
	double cell = 1.0;
	std::vector<Index> counts;

	Index dim() const { return static_cast<Index>(origin.size()); }
	Index size() const;
	Matrix nodes() const;

	/// Smallest grid with the given cell size covering [lo, hi] on every axis.
	static GridSpec covering(const std::vector<double>& lo, const std::vector<double>& hi,
	                         double cell);
};

Dataset load_csv(const std::filesystem::path& path, bool has_header);
Dataset parse_csv(std::istream& in, bool has_header);

/// Writes d site columns then the response column, 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& ds);

/// Reads a headerless-or-headed CSV of bare site coordinates (d columns).
/// Extra trailing columns are returned separately when present.
struct SiteTable {
	Matrix sites;
	Vector observed; // empty unless the file had d+1 columns
};
SiteTable load_sites_csv(const std::filesystem::path& path, bool has_header, Index dim);

/// Divides every axis, including the response, by its absolute maximum.
/// All-zero axes keep factor 1. Factors compose with any existing ones.
Dataset normalize(const Dataset& ds);
Dataset denormalize(const Dataset& ds);

double diameter(const Matrix& sites);
inline double diameter(const Dataset& ds) { return diameter(ds.sites); }

/// Per-axis (min, max) of the sites.
std::vector<std::pair<double, double>> bounding_box(const Matrix& sites);
std::vector<double> bounding_box_lengths(const Matrix& sites);

// ---------------------------------------------------------------------------
// Synthetic test functions
// ---------------------------------------------------------------------------

enum class TestFunction { TF1, TF2, TF3, TF4 };

TestFunction parse_test_function(std::string_view id);
std::string_view name(TestFunction id);
Index dim(TestFunction id);
std::pair<double, double> domain(TestFunction id);

/// Closed form. `x` has dim(id) entries.
double evaluate(TestFunction id, const double* x);
Vector evaluate(TestFunction id, const Matrix& sites);

struct Sampling {
	enum class Kind { Equidistant, Grid, UniformRandom };
	Kind kind = Kind::Equidistant;
	Index count = 200;        // points, or points per axis for Grid
	std::uint64_t seed = 7;   // UniformRandom only

	static Sampling equidistant(Index n) { return {Kind::Equidistant, n, 0}; }
	static Sampling grid(Index g) { return {Kind::Grid, g, 0}; }
	static Sampling uniform(Index n, std::uint64_t seed) { return {Kind::UniformRandom, n, seed}; }
};

/// Unnormalized samples of the closed-form function over its domain.
Dataset gen_test_function(TestFunction id, const Sampling& sampling);

} // namespace hsr
