#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpci/cpci.hpp"
#include "cpci/data.hpp"
#include "cpci/random.hpp"

namespace cpci {

// Synthetic zero-inflated generator: latent Gaussian-noise model thresholded
// at the pooled empirical quantile so the zero fraction is exact by
// construction.  Coefficients live in scenario_coefficients() below.
struct ScenarioSpec {
    enum class Kind { Linear, Nonlinear };

    Kind kind = Kind::Linear;
    std::size_t d = 4;
    double zero_fraction = 0.75;
    double noise_sd = 1.0;
    std::size_t n_total = 2000;   // pooled working-data size (pre-test)
    std::size_t n_test = 1000;

    void validate() const;
    std::string kind_name() const { return kind == Kind::Linear ? "linear" : "nonlinear"; }
};

// One replication's metrics row.
struct ExperimentRecord {
    std::string method;
    std::string scenario;
    std::size_t n_total = 0;
    std::size_t replication = 0;
    double alpha = 0.0;
    std::optional<double> r_hat;  // CPCI methods only
    double coverage = 0.0;
    double avg_length = 0.0;
    double prop_zero_in_set = 0.0;
    std::optional<double> avg_nonzero_length;  // missing when every set is {0}
    std::size_t disconnected_count = 0;
    double runtime_ms = 0.0;
};

struct Metrics {
    double coverage = 0.0;
    double avg_length = 0.0;
    double prop_zero_in_set = 0.0;
    std::optional<double> avg_nonzero_length;
    std::size_t disconnected_count = 0;
};

// The eight method configurations compared in the experiment harness.
inline const std::vector<std::string>& all_method_ids() {
    static const std::vector<std::string> ids = {
        "VCI", "VCI-KNN", "CPCI", "CPCI-KNN",
        "CLASS-COND", "WEIGHTED-VCI", "CPCI-adversarial", "VCI-adversarial"};
    return ids;
}
bool is_cpci_method(const std::string& method);
bool is_known_method(const std::string& method);

// train+test pooled draw; the threshold is the empirical quantile of the
// pooled latent outcomes, so zeros are assigned explicitly, never computed.
Dataset generate(const ScenarioSpec& scenario, RngStream& rng);

Metrics compute_metrics(const std::vector<PredictionSet>& predictions,
                        const std::vector<double>& truths);

ExperimentRecord run_replication(const ScenarioSpec& scenario, const std::string& method,
                                 const CpciConfig& config, const SeedSpec& seeds,
                                 std::size_t replication);

// Replication sweep; records come back ordered by (method, replication)
// regardless of worker scheduling.  threads = 0 picks hardware concurrency.
std::vector<ExperimentRecord> run_sweep(const ScenarioSpec& scenario,
                                        const std::vector<std::string>& methods,
                                        const CpciConfig& config, const SeedSpec& seeds,
                                        std::size_t replications, std::size_t threads = 0);

// Runs a fixed dataset (e.g. the Air Quality outcome) through repeated
// random five-way equal splits.  One record per (method, split).
std::vector<ExperimentRecord> run_dataset_sweep(const Dataset& data,
                                                const std::string& scenario_label,
                                                const std::vector<std::string>& methods,
                                                const CpciConfig& config, const SeedSpec& seeds,
                                                std::size_t n_splits, std::size_t threads = 0);

// Fit, calibrate, and score one method on already-partitioned data.
// Shared by both sweeps; exposed for the equivalence tests.
ExperimentRecord evaluate_method(const DataSplits& splits, const std::string& method,
                                 const CpciConfig& config, std::uint64_t adversarial_salt);

}  // namespace cpci
