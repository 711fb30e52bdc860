#include "cpci/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cpci/baselines.hpp"
#include "cpci/quantile.hpp"
#include "cpci/vci.hpp"

namespace cpci {

void ScenarioSpec::validate() const {
    if (d == 0) throw std::invalid_argument("scenario: need at least one feature");
    if (zero_fraction <= 0.0 || zero_fraction >= 1.0)
        throw std::invalid_argument("scenario: zero_fraction must be strictly interior");
    if (noise_sd < 0.0) throw std::invalid_argument("scenario: negative noise_sd");
    if (n_total < 40 * d) throw std::invalid_argument("scenario: n_total must be >= 40*d");
    if (n_test == 0) throw std::invalid_argument("scenario: empty test set");
}

bool is_cpci_method(const std::string& method) {
    return method == "CPCI" || method == "CPCI-KNN" || method == "CPCI-adversarial";
}

bool is_known_method(const std::string& method) {
    const auto& ids = all_method_ids();
    return std::find(ids.begin(), ids.end(), method) != ids.end();
}

namespace {

// Latent-model coefficients.  These pin the generator; the thresholding
// step below is what produces the zero inflation.
double latent_outcome(const ScenarioSpec& sc, const std::vector<double>& x, double noise) {
    auto at = [&](std::size_t j) { return j < x.size() ? x[j] : 0.0; };
    if (sc.kind == ScenarioSpec::Kind::Linear)
        return 1.0 + 2.0 * at(0) - at(1) + 1.5 * at(2) + 0.5 * at(3) + noise;
    const double pi = 3.14159265358979323846;
    return 2.0 * std::sin(pi * at(0)) + at(1) * at(1) - at(2) + 0.5 * at(3) + noise;
}

}  // namespace

Dataset generate(const ScenarioSpec& scenario, RngStream& rng) {
    scenario.validate();
    const std::size_t n = scenario.n_total + scenario.n_test;
    std::vector<std::vector<double>> features(n);
    std::vector<double> latent(n);
    for (std::size_t i = 0; i < n; ++i) {
        features[i].resize(scenario.d);
        for (std::size_t j = 0; j < scenario.d; ++j) features[i][j] = rng.normal();
        latent[i] = latent_outcome(scenario, features[i], scenario.noise_sd * rng.normal());
    }
    const double t = empirical_quantile(latent, scenario.zero_fraction);
    Dataset out(scenario.d);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = latent[i] > t ? latent[i] - t : 0.0;  // zeros assigned exactly
        out.add({std::move(features[i]), y});
    }
    return out;
}

Metrics compute_metrics(const std::vector<PredictionSet>& predictions,
                        const std::vector<double>& truths) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("compute_metrics: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("compute_metrics: empty input");
    Metrics m;
    double nonzero_len_sum = 0.0;
    std::size_t nonzero_sets = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& set = predictions[i];
        m.coverage += set.contains(truths[i]) ? 1.0 : 0.0;
        m.avg_length += set.length();
        m.prop_zero_in_set += set.contains(0.0) ? 1.0 : 0.0;
        if (set.kind != PredictionSet::Kind::ZeroSingleton) {
            nonzero_len_sum += set.length();
            ++nonzero_sets;
        }
        if (set.is_disconnected()) ++m.disconnected_count;
    }
    const double n = static_cast<double>(predictions.size());
    m.coverage /= n;
    m.avg_length /= n;
    m.prop_zero_in_set /= n;
    if (nonzero_sets > 0)
        m.avg_nonzero_length = nonzero_len_sum / static_cast<double>(nonzero_sets);
    return m;
}

namespace {

struct FittedWorld {
    Standardizer standardizer;
    DataSplits z;  // standardized splits
};

FittedWorld standardize_splits(const DataSplits& splits) {
    FittedWorld w;
    w.standardizer = Standardizer::fit(splits.train);
    w.z.train = w.standardizer.transform(splits.train);
    w.z.val = w.standardizer.transform(splits.val);
    w.z.cal1 = w.standardizer.transform(splits.cal1);
    w.z.cal2 = w.standardizer.transform(splits.cal2);
    w.z.test = w.standardizer.transform(splits.test);
    return w;
}

}  // namespace

ExperimentRecord evaluate_method(const DataSplits& splits, const std::string& method,
                                 const CpciConfig& config, std::uint64_t adversarial_salt) {
    if (!is_known_method(method)) throw std::invalid_argument("unknown method id: " + method);
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const FittedWorld w = standardize_splits(splits);

    std::vector<PredictionSet> predictions;
    predictions.reserve(w.z.test.size());
    std::vector<double> truths;
    for (const auto& s : w.z.test) truths.push_back(s.outcome);

    ExperimentRecord rec;
    rec.method = method;
    rec.alpha = config.alpha;

    const std::uint64_t adv_salt = adversarial_salt;

    if (is_cpci_method(method)) {
        std::unique_ptr<Classifier> classifier;
        std::unique_ptr<Regressor> regressor;
        if (method == "CPCI") {
            classifier = fit_logistic(w.z.train);
            regressor = fit_ols(w.z.train, /*nonzero_only=*/true);
        } else if (method == "CPCI-KNN") {
            const std::size_t k = default_knn_k(w.z.train.size());
            classifier = fit_knn_classifier(w.z.train, k);
            regressor = fit_knn_regressor(w.z.train, std::min(k, nonzero_subset(w.z.train).size()),
                                          /*nonzero_only=*/true);
        } else {  // CPCI-adversarial
            auto rc = std::make_unique<RandomOutputClassifier>();
            rc->salt = adv_salt;
            classifier = std::move(rc);
            regressor = std::make_unique<ConstantRegressor>();
        }
        const CpciCalibration cal = select_r(w.z, *classifier, *regressor, config);
        rec.r_hat = cal.r_hat;
        for (const auto& s : w.z.test) predictions.push_back(cpci_predict(s.features, cal));
    } else {
        auto [train, cal_set] = merge_for_two_way(w.z);
        std::unique_ptr<Regressor> regressor;
        std::unique_ptr<Classifier> classifier;
        const bool needs_classifier = method == "CLASS-COND" || method == "WEIGHTED-VCI";
        if (method == "VCI") {
            regressor = fit_ols(train);
        } else if (method == "VCI-KNN") {
            regressor = fit_knn_regressor(train, default_knn_k(train.size()));
        } else if (method == "VCI-adversarial") {
            regressor = std::make_unique<ConstantRegressor>();
        } else {
            classifier = fit_logistic(train);
            regressor = fit_ols(train, /*nonzero_only=*/true);
        }
        if (needs_classifier) {
            if (method == "CLASS-COND") {
                const ClassCondCalibration cal =
                    classcond_calibrate(cal_set, *classifier, *regressor, config.alpha);
                for (const auto& s : w.z.test)
                    predictions.push_back(classcond_predict(s.features, cal));
            } else {
                const WeightedVciCalibration cal =
                    weighted_calibrate(cal_set, *classifier, *regressor, config.alpha);
                for (const auto& s : w.z.test)
                    predictions.push_back(weighted_predict(s.features, cal));
            }
        } else {
            const VciCalibration cal =
                vci_calibrate(cal_set, *regressor, config.alpha, config.clip_at_zero);
            for (const auto& s : w.z.test) predictions.push_back(vci_predict(s.features, cal));
        }
    }

    const Metrics m = compute_metrics(predictions, truths);
    rec.coverage = m.coverage;
    rec.avg_length = m.avg_length;
    rec.prop_zero_in_set = m.prop_zero_in_set;
    rec.avg_nonzero_length = m.avg_nonzero_length;
    rec.disconnected_count = m.disconnected_count;
    rec.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0).count();
    return rec;
}

ExperimentRecord run_replication(const ScenarioSpec& scenario, const std::string& method,
                                 const CpciConfig& config, const SeedSpec& seeds,
                                 std::size_t replication) {
    RngStream gen_rng = seeds.stream(replication, "generate");
    const Dataset pooled = generate(scenario, gen_rng);
    const double f_test =
        static_cast<double>(scenario.n_test) / static_cast<double>(pooled.size());
    const double f_part = (1.0 - f_test) / 4.0;
    RngStream part_rng = seeds.stream(replication, "partition");
    const DataSplits splits =
        partition(pooled, {f_part, f_part, f_part, f_part, f_test}, part_rng);

    ExperimentRecord rec =
        evaluate_method(splits, method, config, SeedSpec::mix(seeds.master_seed, replication));
    rec.scenario = scenario.kind_name();
    rec.n_total = scenario.n_total;
    rec.replication = replication;
    return rec;
}

namespace {

template <typename RunOne>
std::vector<ExperimentRecord> parallel_sweep(std::size_t methods, std::size_t replications,
                                             std::size_t threads, RunOne run_one) {
    const std::size_t total = methods * replications;
    std::vector<ExperimentRecord> records(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || failed.load()) break;
            const std::size_t mi = i / replications, rep = i % replications;
            try {
                records[i] = run_one(mi, rep);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(error_mutex);
                error_message = "replication " + std::to_string(rep) + ": " + e.what();
                failed.store(true);
            }
        }
    };

    std::size_t n_threads = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min(n_threads, total);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error(error_message);
    return records;
}

}  // namespace

std::vector<ExperimentRecord> run_sweep(const ScenarioSpec& scenario,
                                        const std::vector<std::string>& methods,
                                        const CpciConfig& config, const SeedSpec& seeds,
                                        std::size_t replications, std::size_t threads) {
    if (replications == 0) throw std::invalid_argument("run_sweep: replications must be positive");
    for (const auto& m : methods)
        if (!is_known_method(m)) throw std::invalid_argument("unknown method id: " + m);
    return parallel_sweep(methods.size(), replications, threads,
                          [&](std::size_t mi, std::size_t rep) {
                              return run_replication(scenario, methods[mi], config, seeds, rep);
                          });
}

std::vector<ExperimentRecord> run_dataset_sweep(const Dataset& data,
                                                const std::string& scenario_label,
                                                const std::vector<std::string>& methods,
                                                const CpciConfig& config, const SeedSpec& seeds,
                                                std::size_t n_splits, std::size_t threads) {
    if (n_splits == 0) throw std::invalid_argument("run_dataset_sweep: need at least one split");
    for (const auto& m : methods)
        if (!is_known_method(m)) throw std::invalid_argument("unknown method id: " + m);
    return parallel_sweep(
        methods.size(), n_splits, threads, [&](std::size_t mi, std::size_t rep) {
            RngStream part_rng = seeds.stream(rep, "dataset-partition");
            const DataSplits splits = partition(data, {0.2, 0.2, 0.2, 0.2, 0.2}, part_rng);
            ExperimentRecord rec = evaluate_method(
                splits, methods[mi], config, SeedSpec::mix(seeds.master_seed, rep));
            rec.scenario = scenario_label;
            rec.n_total = data.size();
            rec.replication = rep;
            return rec;
        });
}

}  // namespace cpci
