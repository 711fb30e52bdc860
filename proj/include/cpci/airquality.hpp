#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpci/data.hpp"

namespace cpci {

// UCI Air Quality distribution format: semicolon-delimited, decimal comma,
// trailing empty columns, -200 as the missing-value sentinel.
struct AirQualityRow {
    std::string date;
    std::string time;
    int hour = -1;  // parsed from the HH.MM.SS time field, -1 when absent
    std::vector<std::optional<double>> values;  // aligned with table columns
};

struct AirQualityTable {
    std::vector<std::string> columns;  // numeric columns only (Date/Time held per row)
    std::vector<AirQualityRow> rows;

    std::optional<std::size_t> column_index(const std::string& name) const;
};

struct AirQualityConfig {
    std::string input_path;
    double tolerance_quantile = 0.7;  // free value in (0,1); paper uses 0.4..0.8
    bool hour_features = true;        // append (sin, cos) of hour-of-day
};

AirQualityTable parse_airquality(const std::string& path);

// Drops rows with missing CO(GT) or any missing selected feature
// (NMHC(GT) and the other ground-truth gas columns are excluded from the
// feature set entirely), thresholds CO at the tolerance quantile, and
// emits the zero-inflated exceedance outcome.  Ties at the threshold
// map to exact 0.
Dataset build_outcome(const AirQualityTable& table, const AirQualityConfig& config);

// Cleaned-dataset export: comma delimiter, period decimals, header row.
std::string cleaned_csv(const Dataset& data);

}  // namespace cpci
