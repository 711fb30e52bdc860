#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cpci/airquality.hpp"
#include "cpci/cpci.hpp"
#include "cpci/experiments.hpp"
#include "cpci/report.hpp"
#include "cpci/svg.hpp"

namespace {

using nlohmann::json;

constexpr int kCalibrationFileVersion = 1;

// ---------------------------------------------------------------------------
// flat key=value config file; unknown keys rejected, CLI flags override

const std::set<std::string> kKnownKeys = {
    "scenario", "n", "n_test", "reps", "alpha", "zero_frac", "noise_sd", "methods",
    "objective", "c_const", "grid_step", "clip_at_zero", "adjusted_level",
    "tolerance_quantiles", "splits",
    "seed", "out", "aggregate_out", "svg_out", "threads", "input", "classifier", "regressor"};

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) +
                                                       ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (!kKnownKeys.count(key))
            throw CLI::ValidationError("--config", "unknown config key: " + key);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

// ---------------------------------------------------------------------------
// plain comma CSVs for the fit/predict round trip

struct TrainCsv {
    cpci::Dataset data;
};

cpci::Dataset read_train_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open training file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_list(line);
    if (header.size() < 2 || header.back() != "y")
        throw std::runtime_error(path + ": expected header x1,...,xd,y");
    const std::size_t d = header.size() - 1;
    cpci::Dataset data(d);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_list(line);
        if (fields.size() != d + 1)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(d + 1) + " fields");
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = std::stod(fields[j]);
        data.add({std::move(x), std::stod(fields[d])});
    }
    if (data.empty()) throw std::runtime_error(path + ": no data rows");
    return data;
}

struct FeatureRows {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> features;
};

FeatureRows read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open features file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_list(line);
    const bool has_id = !header.empty() && header[0] == "id";
    const std::size_t d = header.size() - (has_id ? 1 : 0);
    if (d == 0) throw std::runtime_error(path + ": no feature columns");
    FeatureRows out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_list(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": field count mismatch");
        out.ids.push_back(has_id ? fields[0] : std::to_string(out.ids.size()));
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = std::stod(fields[j + (has_id ? 1 : 0)]);
        out.features.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> grid_from_step(double step) {
    if (step <= 0.0 || step >= 1.0) throw std::runtime_error("grid step must lie in (0,1)");
    std::vector<double> g;
    for (double r = 0.0; r < 1.0 - 1e-12; r += step) g.push_back(r);
    return g;
}

cpci::Objective objective_from_name(const std::string& name) {
    if (name == "overall") return cpci::Objective::OverallLength;
    if (name == "nonzero") return cpci::Objective::NonzeroLength;
    throw std::runtime_error("objective must be 'overall' or 'nonzero'");
}

std::string provenance_line(const std::map<std::string, std::string>& effective) {
    std::ostringstream out;
    out << "config:";
    for (const auto& [k, v] : effective) out << ' ' << k << '=' << v;
    return out.str();
}

int cmd_simulate(const std::map<std::string, std::string>& cfg) {
    cpci::ScenarioSpec scenario;
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : it->second;
    };
    const std::string kind = get("scenario", "linear");
    if (kind == "linear")
        scenario.kind = cpci::ScenarioSpec::Kind::Linear;
    else if (kind == "nonlinear")
        scenario.kind = cpci::ScenarioSpec::Kind::Nonlinear;
    else
        throw std::runtime_error("scenario must be 'linear' or 'nonlinear'");
    scenario.n_total = std::stoul(get("n", "2000"));
    scenario.n_test = std::stoul(get("n_test", "1000"));
    scenario.zero_fraction = std::stod(get("zero_frac", "0.75"));
    scenario.noise_sd = std::stod(get("noise_sd", "1"));

    const std::size_t reps = std::stoul(get("reps", "1000"));
    if (reps == 0) throw std::runtime_error("reps must be positive");

    cpci::CpciConfig config;
    config.alpha = std::stod(get("alpha", "0.9"));
    config.grid = grid_from_step(std::stod(get("grid_step", "0.05")));
    config.adjustment_c = std::stod(get("c_const", "2.5"));
    config.objective = objective_from_name(get("objective", "overall"));
    config.clip_at_zero = get("clip_at_zero", "false") == "true";
    config.adjusted_level = get("adjusted_level", "false") == "true";

    std::vector<std::string> methods = split_list(
        get("methods", "VCI,VCI-KNN,CPCI,CPCI-KNN,CLASS-COND,WEIGHTED-VCI"));
    cpci::SeedSpec seeds{std::stoull(get("seed", "1"))};
    const std::size_t threads = std::stoul(get("threads", "0"));

    const auto records = cpci::run_sweep(scenario, methods, config, seeds, reps, threads);

    std::map<std::string, std::string> effective(cfg);
    effective.emplace("scenario", kind);
    effective.emplace("n", std::to_string(scenario.n_total));
    effective.emplace("reps", std::to_string(reps));
    effective.emplace("seed", std::to_string(seeds.master_seed));
    const std::vector<std::string> prov = {provenance_line(effective),
                                           "master_seed: " + std::to_string(seeds.master_seed)};

    const std::string out_path = get("out", "simulate_results.csv");
    write_file(out_path, cpci::records_csv(records, prov));
    const auto agg = cpci::aggregate(records);
    const std::string agg_path = get("aggregate_out", "simulate_aggregate.csv");
    write_file(agg_path, cpci::aggregate_csv(agg, prov));
    const std::string svg_path = get("svg_out", "");
    if (!svg_path.empty()) write_file(svg_path, cpci::plot_panels_svg(agg));
    std::cout << "wrote " << records.size() << " records to " << out_path << " and aggregates to "
              << agg_path << "\n";
    return 0;
}

int cmd_airquality(const std::map<std::string, std::string>& cfg) {
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : it->second;
    };
    const std::string input = get("input", "");
    if (input.empty()) throw std::runtime_error("airquality: --input is required");

    cpci::CpciConfig config;
    config.alpha = std::stod(get("alpha", "0.9"));
    config.grid = grid_from_step(std::stod(get("grid_step", "0.05")));
    config.adjustment_c = std::stod(get("c_const", "2.5"));
    config.objective = objective_from_name(get("objective", "overall"));
    config.adjusted_level = get("adjusted_level", "false") == "true";

    std::vector<std::string> methods = split_list(
        get("methods", "VCI,VCI-KNN,CPCI,CPCI-KNN,CLASS-COND,WEIGHTED-VCI"));
    const std::size_t n_splits = std::stoul(get("splits", "100"));
    cpci::SeedSpec seeds{std::stoull(get("seed", "1"))};
    const std::size_t threads = std::stoul(get("threads", "0"));

    std::vector<double> quantiles;
    for (const auto& q : split_list(get("tolerance_quantiles", "0.4,0.5,0.6,0.7,0.8")))
        quantiles.push_back(std::stod(q));

    const cpci::AirQualityTable table = cpci::parse_airquality(input);
    std::vector<cpci::ExperimentRecord> all_records;
    for (double q : quantiles) {
        cpci::AirQualityConfig aq;
        aq.input_path = input;
        aq.tolerance_quantile = q;
        const cpci::Dataset data = cpci::build_outcome(table, aq);
        std::ostringstream label;
        label << "airq-q" << static_cast<int>(std::lround(q * 100));
        auto records = cpci::run_dataset_sweep(data, label.str(), methods, config, seeds,
                                               n_splits, threads);
        all_records.insert(all_records.end(), records.begin(), records.end());
    }

    std::map<std::string, std::string> effective(cfg);
    effective.emplace("splits", std::to_string(n_splits));
    effective.emplace("seed", std::to_string(seeds.master_seed));
    const std::vector<std::string> prov = {provenance_line(effective),
                                           "master_seed: " + std::to_string(seeds.master_seed)};
    const std::string out_path = get("out", "airquality_results.csv");
    write_file(out_path, cpci::records_csv(all_records, prov));
    const std::string agg_path = get("aggregate_out", "airquality_aggregate.csv");
    write_file(agg_path, cpci::aggregate_csv(cpci::aggregate(all_records), prov));
    std::cout << "wrote " << all_records.size() << " records to " << out_path << "\n";
    return 0;
}

int cmd_fit(const std::map<std::string, std::string>& cfg, const std::string& train_path,
            const std::string& out_path) {
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : it->second;
    };
    const cpci::Dataset data = read_train_csv(train_path);

    cpci::CpciConfig config;
    config.alpha = std::stod(get("alpha", "0.9"));
    config.grid = grid_from_step(std::stod(get("grid_step", "0.05")));
    config.adjustment_c = std::stod(get("c_const", "2.5"));
    config.objective = objective_from_name(get("objective", "overall"));
    config.clip_at_zero = get("clip_at_zero", "false") == "true";
    config.adjusted_level = get("adjusted_level", "false") == "true";

    cpci::SeedSpec seeds{std::stoull(get("seed", "1"))};
    cpci::RngStream rng = seeds.stream(0, "fit-partition");
    const cpci::DataSplits splits = cpci::partition(data, {0.25, 0.25, 0.25, 0.25, 0.0}, rng);

    const cpci::Standardizer standardizer = cpci::Standardizer::fit(splits.train);
    cpci::DataSplits z{standardizer.transform(splits.train), standardizer.transform(splits.val),
                       standardizer.transform(splits.cal1), standardizer.transform(splits.cal2),
                       cpci::Dataset(standardizer.output_dim())};

    std::unique_ptr<cpci::Classifier> classifier;
    std::unique_ptr<cpci::Regressor> regressor;
    const std::string cls_name = get("classifier", "logistic");
    const std::string reg_name = get("regressor", "ols");
    if (cls_name == "logistic")
        classifier = cpci::fit_logistic(z.train);
    else if (cls_name == "knn")
        classifier = cpci::fit_knn_classifier(z.train, cpci::default_knn_k(z.train.size()));
    else
        throw std::runtime_error("classifier must be 'logistic' or 'knn'");
    if (reg_name == "ols")
        regressor = cpci::fit_ols(z.train, /*nonzero_only=*/true);
    else if (reg_name == "knn")
        regressor = cpci::fit_knn_regressor(
            z.train,
            std::min(cpci::default_knn_k(z.train.size()), cpci::nonzero_subset(z.train).size()),
            /*nonzero_only=*/true);
    else
        throw std::runtime_error("regressor must be 'ols' or 'knn'");

    const cpci::CpciCalibration cal = cpci::select_r(z, *classifier, *regressor, config);
    if (cal.fallback_warning)
        std::cerr << "warning: every grid objective was infinite; fell back to r=0\n";

    json doc = {{"version", kCalibrationFileVersion},
                {"kind", "cpci-calibration"},
                {"seed", seeds.master_seed},
                {"standardizer", standardizer.to_json()},
                {"classifier", classifier->to_json()},
                {"regressor", regressor->to_json()},
                {"calibration", cal.numbers_to_json()}};
    write_file(out_path, doc.dump(2) + "\n");
    std::cout << "calibration written to " << out_path << " (r_hat="
              << cpci::format_number(cal.r_hat) << ")\n";
    return 0;
}

int cmd_predict(const std::string& calibration_path, const std::string& features_path,
                const std::string& out_path) {
    std::ifstream in(calibration_path);
    if (!in) throw std::runtime_error("cannot open calibration file: " + calibration_path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("corrupted calibration file: " + std::string(e.what()));
    }
    if (!doc.contains("version") || doc.at("version").get<int>() != kCalibrationFileVersion ||
        doc.value("kind", "") != "cpci-calibration")
        throw std::runtime_error("calibration file version/kind mismatch");

    const cpci::Standardizer standardizer = cpci::Standardizer::from_json(doc.at("standardizer"));
    const auto classifier = cpci::classifier_from_json(doc.at("classifier"));
    const auto regressor = cpci::regressor_from_json(doc.at("regressor"));
    cpci::CpciCalibration cal = cpci::CpciCalibration::numbers_from_json(doc.at("calibration"));
    cal.classifier = classifier.get();
    cal.regressor = regressor.get();

    const FeatureRows rows = read_features_csv(features_path);
    std::ostringstream out;
    out << "id,set_kind,lo,hi\n";
    for (std::size_t i = 0; i < rows.ids.size(); ++i) {
        const cpci::PredictionSet set =
            cpci::cpci_predict(standardizer.transform(rows.features[i]), cal);
        out << rows.ids[i] << ',';
        switch (set.kind) {
            case cpci::PredictionSet::Kind::ZeroSingleton: out << "zero,,"; break;
            case cpci::PredictionSet::Kind::Unbounded: out << "unbounded,,"; break;
            default:
                out << "interval," << cpci::format_number(set.lo) << ','
                    << cpci::format_number(set.hi);
        }
        out << "\n";
    }
    write_file(out_path, out.str());
    std::cout << "wrote " << rows.ids.size() << " prediction sets to " << out_path << "\n";
    return 0;
}

int cmd_plot(const std::string& input_path, const std::string& out_path) {
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open results file: " + input_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rows = cpci::parse_aggregate_csv(buf.str());
    write_file(out_path, cpci::plot_panels_svg(rows));
    std::cout << "wrote plot to " << out_path << "\n";
    return 0;
}

// merge config file values with command-line overrides
std::map<std::string, std::string> merge_config(const std::string& config_path,
                                                const std::map<std::string, std::string>& flags) {
    std::map<std::string, std::string> cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& [k, v] : flags) cfg[k] = v;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classification-powered conformal inference for zero-inflated outcomes"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value config file");
        auto opt = [&, sub](const std::string& flag, const std::string& key,
                            const std::string& help) {
            sub->add_option_function<std::string>(
                flag, [&flags, key](const std::string& v) { flags[key] = v; }, help);
        };
        opt("--alpha", "alpha", "nominal coverage level");
        opt("--method", "methods", "comma-separated method ids");
        opt("--objective", "objective", "r-selection objective: overall|nonzero");
        opt("--c-const", "c_const", "finite-sample adjustment constant (> 2)");
        opt("--adjusted-level", "adjusted_level",
            "use the finite-sample-adjusted NPV in the effective level (true|false)");
        opt("--grid-step", "grid_step", "r grid step over [0,1)");
        opt("--seed", "seed", "master seed");
        opt("--threads", "threads", "worker threads (0 = hardware)");
        opt("--out", "out", "output CSV path");
        opt("--aggregate-out", "aggregate_out", "aggregate CSV path");
        return opt;
    };

    auto* simulate = app.add_subcommand("simulate", "synthetic replication sweep");
    {
        auto opt = add_common(simulate);
        opt("--scenario", "scenario", "linear|nonlinear");
        opt("--n", "n", "total working sample size");
        opt("--n-test", "n_test", "test-set size");
        opt("--reps", "reps", "replication count");
        opt("--zero-frac", "zero_frac", "zero fraction p");
        opt("--noise-sd", "noise_sd", "latent noise standard deviation");
        opt("--svg", "svg_out", "optional SVG plot path");
        opt("--clip-at-zero", "clip_at_zero", "clip intervals below at 0 (true|false)");
    }

    auto* airquality = app.add_subcommand("airquality", "UCI Air Quality reproduction");
    {
        auto opt = add_common(airquality);
        opt("--input", "input", "path to AirQualityUCI.csv");
        opt("--tolerance-quantile", "tolerance_quantiles",
            "comma-separated tolerance quantiles in (0,1)");
        opt("--splits", "splits", "number of repeated random splits");
    }

    std::string fit_train, fit_out = "calibration.json";
    auto* fit = app.add_subcommand("fit", "fit and calibrate from a training CSV");
    {
        auto opt = add_common(fit);
        opt("--classifier", "classifier", "logistic|knn");
        opt("--regressor", "regressor", "ols|knn");
        opt("--clip-at-zero", "clip_at_zero", "clip intervals below at 0 (true|false)");
        fit->add_option("--train", fit_train, "training CSV (x1..xd,y)")->required();
        fit->add_option("--calibration-out", fit_out, "calibration JSON path");
    }

    std::string pred_cal, pred_features, pred_out = "predictions.csv";
    auto* predict = app.add_subcommand("predict", "prediction sets from a calibration file");
    predict->add_option("--calibration", pred_cal, "calibration JSON")->required();
    predict->add_option("--features", pred_features, "features CSV")->required();
    predict->add_option("--out", pred_out, "output CSV path");

    std::string plot_in, plot_out = "results.svg";
    auto* plot = app.add_subcommand("plot", "four-panel SVG from an aggregate CSV");
    plot->add_option("--input", plot_in, "aggregate CSV")->required();
    plot->add_option("--out", plot_out, "SVG output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(merge_config(config_path, flags));
        if (airquality->parsed()) return cmd_airquality(merge_config(config_path, flags));
        if (fit->parsed()) return cmd_fit(merge_config(config_path, flags), fit_train, fit_out);
        if (predict->parsed()) return cmd_predict(pred_cal, pred_features, pred_out);
        if (plot->parsed()) return cmd_plot(plot_in, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
