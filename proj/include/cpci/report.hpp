#pragma once

#include <string>
#include <vector>

#include "cpci/experiments.hpp"

namespace cpci {

// Per-(method, scenario, n) summary over replications.
struct AggregateRow {
    std::string method;
    std::string scenario;
    std::size_t n_total = 0;
    double alpha = 0.0;
    std::size_t replications = 0;
    double coverage_mean = 0.0, coverage_sd = 0.0;
    double avg_length_mean = 0.0, avg_length_sd = 0.0;
    double prop_zero_mean = 0.0, prop_zero_sd = 0.0;
    double nonzero_length_mean = 0.0, nonzero_length_sd = 0.0;
    std::size_t nonzero_length_count = 0;  // records where the field was present
    double disconnected_mean = 0.0;
    double r_hat_mean = 0.0;
    std::size_t r_hat_count = 0;
};

// Compact numeric formatting shared by every CSV writer so reruns are
// byte-identical.  Missing -> empty field, +inf -> "inf".
std::string format_number(double v);

std::string records_csv_header();
// include_runtime defaults to off so reruns with the same seed are
// byte-identical; the column is left empty in that case.
std::string records_csv(const std::vector<ExperimentRecord>& records,
                        const std::vector<std::string>& provenance,
                        bool include_runtime = false);

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);
std::string aggregate_csv(const std::vector<AggregateRow>& rows,
                          const std::vector<std::string>& provenance);
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

}  // namespace cpci
