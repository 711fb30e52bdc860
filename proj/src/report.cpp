#include "cpci/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cpci {

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string records_csv_header() {
    return "method,scenario,n,rep,alpha,r_hat,coverage,avg_len,prop_zero_in_set,"
           "avg_nonzero_len,disconnected,runtime_ms";
}

std::string records_csv(const std::vector<ExperimentRecord>& records,
                        const std::vector<std::string>& provenance, bool include_runtime) {
    std::ostringstream out;
    for (const auto& line : provenance) out << "# " << line << "\n";
    out << records_csv_header() << "\n";
    for (const auto& r : records) {
        out << r.method << ',' << r.scenario << ',' << r.n_total << ',' << r.replication << ','
            << format_number(r.alpha) << ','
            << (r.r_hat ? format_number(*r.r_hat) : std::string()) << ','
            << format_number(r.coverage) << ',' << format_number(r.avg_length) << ','
            << format_number(r.prop_zero_in_set) << ','
            << (r.avg_nonzero_length ? format_number(*r.avg_nonzero_length) : std::string()) << ','
            << r.disconnected_count << ','
            << (include_runtime ? format_number(r.runtime_ms) : std::string()) << "\n";
    }
    return out.str();
}

namespace {

struct Accum {
    std::size_t n = 0;
    double sum = 0.0, sum_sq = 0.0;
    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double sd() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }
};

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
    // keyed by (method, scenario, n); insertion order follows first appearance
    std::vector<AggregateRow> rows;
    std::map<std::string, std::size_t> index;
    struct Work {
        Accum coverage, avg_len, prop_zero, nonzero_len, disconnected, r_hat;
    };
    std::vector<Work> work;
    for (const auto& r : records) {
        const std::string key =
            r.method + "|" + r.scenario + "|" + std::to_string(r.n_total);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, rows.size());
            AggregateRow row;
            row.method = r.method;
            row.scenario = r.scenario;
            row.n_total = r.n_total;
            row.alpha = r.alpha;
            rows.push_back(row);
            work.emplace_back();
            it = index.find(key);
        }
        Work& w = work[it->second];
        AggregateRow& row = rows[it->second];
        ++row.replications;
        w.coverage.add(r.coverage);
        w.avg_len.add(r.avg_length);
        w.prop_zero.add(r.prop_zero_in_set);
        w.disconnected.add(static_cast<double>(r.disconnected_count));
        if (r.avg_nonzero_length) w.nonzero_len.add(*r.avg_nonzero_length);
        if (r.r_hat) w.r_hat.add(*r.r_hat);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        AggregateRow& row = rows[i];
        const Work& w = work[i];
        row.coverage_mean = w.coverage.mean();
        row.coverage_sd = w.coverage.sd();
        row.avg_length_mean = w.avg_len.mean();
        row.avg_length_sd = w.avg_len.sd();
        row.prop_zero_mean = w.prop_zero.mean();
        row.prop_zero_sd = w.prop_zero.sd();
        row.nonzero_length_mean = w.nonzero_len.mean();
        row.nonzero_length_sd = w.nonzero_len.sd();
        row.nonzero_length_count = w.nonzero_len.n;
        row.disconnected_mean = w.disconnected.mean();
        row.r_hat_mean = w.r_hat.mean();
        row.r_hat_count = w.r_hat.n;
    }
    return rows;
}

static const char* kAggregateHeader =
    "method,scenario,n,alpha,reps,coverage_mean,coverage_sd,avg_len_mean,avg_len_sd,"
    "prop_zero_mean,prop_zero_sd,nonzero_len_mean,nonzero_len_sd,disconnected_mean,r_hat_mean";

std::string aggregate_csv(const std::vector<AggregateRow>& rows,
                          const std::vector<std::string>& provenance) {
    std::ostringstream out;
    for (const auto& line : provenance) out << "# " << line << "\n";
    out << kAggregateHeader << "\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.scenario << ',' << r.n_total << ','
            << format_number(r.alpha) << ',' << r.replications << ','
            << format_number(r.coverage_mean) << ',' << format_number(r.coverage_sd) << ','
            << format_number(r.avg_length_mean) << ',' << format_number(r.avg_length_sd) << ','
            << format_number(r.prop_zero_mean) << ',' << format_number(r.prop_zero_sd) << ','
            << (r.nonzero_length_count ? format_number(r.nonzero_length_mean) : std::string())
            << ','
            << (r.nonzero_length_count ? format_number(r.nonzero_length_sd) : std::string())
            << ',' << format_number(r.disconnected_mean) << ','
            << (r.r_hat_count ? format_number(r.r_hat_mean) : std::string()) << "\n";
    }
    return out.str();
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kAggregateHeader)
                throw std::runtime_error("aggregate CSV: unexpected header: " + line);
            saw_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        while (fields.size() < 15) fields.emplace_back();
        auto num = [](const std::string& s) -> double {
            if (s.empty()) return std::nan("");
            if (s == "inf") return kInf;
            if (s == "-inf") return -kInf;
            return std::stod(s);
        };
        AggregateRow r;
        r.method = fields[0];
        r.scenario = fields[1];
        r.n_total = static_cast<std::size_t>(std::stoull(fields[2]));
        r.alpha = num(fields[3]);
        r.replications = static_cast<std::size_t>(std::stoull(fields[4]));
        r.coverage_mean = num(fields[5]);
        r.coverage_sd = num(fields[6]);
        r.avg_length_mean = num(fields[7]);
        r.avg_length_sd = num(fields[8]);
        r.prop_zero_mean = num(fields[9]);
        r.prop_zero_sd = num(fields[10]);
        r.nonzero_length_mean = num(fields[11]);
        r.nonzero_length_sd = num(fields[12]);
        r.nonzero_length_count = fields[11].empty() ? 0 : r.replications;
        r.disconnected_mean = num(fields[13]);
        r.r_hat_mean = num(fields[14]);
        r.r_hat_count = fields[14].empty() ? 0 : r.replications;
        rows.push_back(std::move(r));
    }
    if (!saw_header) throw std::runtime_error("aggregate CSV: missing header");
    return rows;
}

}  // namespace cpci
