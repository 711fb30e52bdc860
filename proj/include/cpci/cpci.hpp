#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "cpci/data.hpp"
#include "cpci/models.hpp"

namespace cpci {

enum class Objective { OverallLength, NonzeroLength };

struct CpciConfig {
    double alpha = 0.9;                 // nominal marginal coverage
    std::vector<double> grid;           // strictly increasing, subset of [0,1)
    double adjustment_c = 2.5;          // finite-sample beta adjustment, must be > 2
    Objective objective = Objective::OverallLength;
    bool clip_at_zero = false;
    // When set, the effective level uses the adjusted beta_tilde instead of
    // beta_hat.  This buys a high-probability per-run coverage floor at the
    // cost of (much) wider intervals: for C * sqrt(log n / n) > 1 - alpha
    // (i.e. any n below ~6000 at alpha = 0.9, C = 2.5) the effective level
    // saturates at 1 for every r > 0, so selection degenerates to r = 0.
    bool adjusted_level = false;

    static std::vector<double> default_grid();  // {0, 0.05, ..., 0.95}
    void validate() const;
};

// Frozen artifact of a calibration run: everything needed to predict for
// a new x.  alpha_r and q_r may be the -inf / +inf sentinels.
struct CpciCalibration {
    double r_hat = 0.0;
    double alpha_r = -kInf;
    double beta_hat = 0.0;
    double beta_tilde = 0.0;   // may be negative; never clamped below
    double gamma = 0.0;
    double q_r = kInf;
    double alpha = 0.9;
    bool clip_at_zero = false;
    bool fallback_warning = false;  // set when every grid objective was infinite

    const Classifier* classifier = nullptr;
    const Regressor* regressor = nullptr;

    nlohmann::json numbers_to_json() const;
    static CpciCalibration numbers_from_json(const nlohmann::json& j);
};

// alpha_r = quantile({p_hat over cal1} u {1}, r); r = 0 gives the -inf
// sentinel so no sample is predicted zero.
double classification_threshold(const Dataset& cal1, const Classifier& classifier, double r);

// NPV estimate on the validation set, clamped to [0,1]; 0 by convention at r = 0.
double estimate_beta(const Dataset& val, const Classifier& classifier, double alpha_r, double r);

// Finite-sample adjustment: beta_hat - C * r^-1 * sqrt(log(n)/n).
double adjust_beta(double beta_hat, double r, std::size_t n_val, double c_const);

// gamma = clamp((alpha - r*beta_tilde)/(1 - r), 0, 1)
double effective_level(double alpha, double r, double beta_tilde);

// Conformal radius over cal2 samples with p_hat >= alpha_r (the interval
// branch: p_hat < alpha_r routes to the zero singleton).  Empty filtered
// set or gamma = 1 gives +inf; gamma = 0 floors the radius at 0.
double conformal_radius(const Dataset& cal2, const Classifier& classifier,
                        const Regressor& regressor, double alpha_r, double gamma);

// Full calibration at one fixed grid point.
CpciCalibration calibrate_at_r(const DataSplits& splits, const Classifier& classifier,
                               const Regressor& regressor, const CpciConfig& config, double r);

// Grid search minimizing 2(1-r)q_r (overall) or q_r (nonzero); ties break
// toward smaller r, infinite objectives lose to any finite one.
CpciCalibration select_r(const DataSplits& splits, const Classifier& classifier,
                         const Regressor& regressor, const CpciConfig& config);

PredictionSet cpci_predict(const std::vector<double>& x, const CpciCalibration& cal);

}  // namespace cpci
