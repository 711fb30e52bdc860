#include "cpci/airquality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cpci/quantile.hpp"
#include "cpci/report.hpp"

namespace cpci {

std::optional<std::size_t> AirQualityTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_semicolons(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ';')) fields.push_back(field);
    while (!fields.empty() && fields.back().empty()) fields.pop_back();
    return fields;
}

std::optional<double> parse_cell(std::string cell, const std::string& path, std::size_t line_no) {
    if (cell.empty()) return std::nullopt;
    std::replace(cell.begin(), cell.end(), ',', '.');  // decimal-comma convention
    std::size_t consumed = 0;
    double v;
    try {
        v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed numeric field '" + cell + "'");
    }
    if (consumed != cell.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed numeric field '" + cell + "'");
    if (v == -200.0) return std::nullopt;  // dataset missing-value sentinel
    return v;
}

int parse_hour(const std::string& time) {
    if (time.size() < 2) return -1;
    const std::size_t dot = time.find('.');
    const std::string h = time.substr(0, dot == std::string::npos ? time.size() : dot);
    try {
        const int hour = std::stoi(h);
        return (hour >= 0 && hour < 24) ? hour : -1;
    } catch (const std::exception&) {
        return -1;
    }
}

}  // namespace

AirQualityTable parse_airquality(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find(';') == std::string::npos)
        throw std::runtime_error(path + ": expected semicolon-delimited header");
    const std::vector<std::string> header = split_semicolons(line);
    if (header.size() < 3 || header[0] != "Date" || header[1] != "Time")
        throw std::runtime_error(path + ": header must start with Date;Time");

    AirQualityTable table;
    table.columns.assign(header.begin() + 2, header.end());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // the distribution file ends with rows of bare semicolons
        if (line.find_first_not_of("; \t") == std::string::npos) continue;
        const std::vector<std::string> fields = split_semicolons(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        AirQualityRow row;
        row.date = fields[0];
        row.time = fields[1];
        row.hour = parse_hour(fields[1]);
        for (std::size_t j = 2; j < fields.size(); ++j)
            row.values.push_back(parse_cell(fields[j], path, line_no));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Dataset build_outcome(const AirQualityTable& table, const AirQualityConfig& config) {
    if (config.tolerance_quantile <= 0.0 || config.tolerance_quantile >= 1.0)
        throw std::invalid_argument("tolerance_quantile must lie in (0,1)");

    const auto co_idx = table.column_index("CO(GT)");
    if (!co_idx) throw std::runtime_error("build_outcome: CO(GT) column not found");

    // Sensor channels and meteorology only; the ground-truth gas columns
    // (NMHC, NOx, NO2 and benzene references) stay out of the feature set.
    static const char* kFeatureColumns[] = {"PT08.S1(CO)", "PT08.S2(NMHC)", "PT08.S3(NOx)",
                                            "PT08.S4(NO2)", "PT08.S5(O3)", "T", "RH", "AH"};
    std::vector<std::size_t> feature_idx;
    for (const char* name : kFeatureColumns) {
        const auto idx = table.column_index(name);
        if (!idx) throw std::runtime_error(std::string("build_outcome: column not found: ") + name);
        feature_idx.push_back(*idx);
    }

    struct Kept {
        std::vector<double> features;
        double co;
    };
    std::vector<Kept> kept;
    for (const auto& row : table.rows) {
        if (!row.values[*co_idx]) continue;
        Kept k;
        k.co = *row.values[*co_idx];
        bool complete = true;
        for (std::size_t idx : feature_idx) {
            if (!row.values[idx]) {
                complete = false;
                break;
            }
            k.features.push_back(*row.values[idx]);
        }
        if (!complete) continue;
        if (config.hour_features) {
            if (row.hour < 0) continue;
            const double two_pi = 6.283185307179586476925286766559;
            const double phase = two_pi * static_cast<double>(row.hour) / 24.0;
            k.features.push_back(std::sin(phase));
            k.features.push_back(std::cos(phase));
        }
        kept.push_back(std::move(k));
    }
    if (kept.empty()) throw std::runtime_error("build_outcome: every row was dropped");

    std::vector<double> co_values;
    co_values.reserve(kept.size());
    for (const auto& k : kept) co_values.push_back(k.co);
    const double tolerance = empirical_quantile(std::move(co_values), config.tolerance_quantile);

    const std::size_t dim = kept.front().features.size();
    Dataset out(dim);
    for (auto& k : kept) {
        const double y = k.co > tolerance ? k.co - tolerance : 0.0;  // ties go to zero
        out.add({std::move(k.features), y});
    }
    return out;
}

std::string cleaned_csv(const Dataset& data) {
    std::ostringstream out;
    for (std::size_t j = 0; j < data.feature_dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    for (const auto& s : data) {
        for (double v : s.features) out << format_number(v) << ',';
        out << format_number(s.outcome) << "\n";
    }
    return out.str();
}

}  // namespace cpci
