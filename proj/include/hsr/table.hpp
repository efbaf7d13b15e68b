#pragma once

#include <hsr/baseline.hpp>
#include <hsr/diagnostics.hpp>
#include <hsr/predict.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hsr {

/// Plot-ready CSV. Reals are written with 17 significant digits; empty cells
/// stand for "not applicable".
class CsvTable {
public:
	using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

	explicit CsvTable(std::vector<std::string> columns);

	void add_row(std::vector<Cell> row);
	std::size_t rows() const { return rows_.size(); }

	void write(std::ostream& out) const;
	void save(const std::filesystem::path& path) const;

private:
	std::vector<std::string> columns_;
	std::vector<std::vector<Cell>> rows_;
};

CsvTable trace_table(const FitTrace& trace);
CsvTable bound_table(const std::vector<BoundReportRow>& rows);
CsvTable power_table(const Matrix& sites, const PowerDiag& diag);
CsvTable stability_table(const std::vector<std::pair<int, StabilityDiag>>& per_scale);
CsvTable importance_ranking_table(const ImportanceReport& report, const Matrix& sites);
CsvTable importance_histogram_table(const ImportanceReport& report, const Matrix& sites);
CsvTable comparison_table(const ComparisonReport& report);

/// Site coordinates, mean and (when present) the band limits. With
/// `observed`, also the observed value and residual.
CsvTable prediction_table(const Matrix& sites, const Vector& mean, const IntervalBand* band,
                          const Vector* observed);

} // namespace hsr
