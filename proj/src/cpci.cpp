#include "cpci/cpci.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpci/quantile.hpp"

namespace cpci {

std::vector<double> CpciConfig::default_grid() {
    std::vector<double> g;
    for (int k = 0; k < 20; ++k) g.push_back(0.05 * k);
    return g;
}

void CpciConfig::validate() const {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("CpciConfig: alpha must be in (0,1)");
    if (grid.empty()) throw std::invalid_argument("CpciConfig: empty r grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] >= 1.0)
            throw std::invalid_argument("CpciConfig: grid values must lie in [0,1)");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("CpciConfig: grid must be strictly increasing");
    }
    if (adjustment_c <= 2.0)
        throw std::invalid_argument("CpciConfig: adjustment constant must exceed 2");
}

nlohmann::json CpciCalibration::numbers_to_json() const {
    auto enc = [](double v) -> nlohmann::json {
        if (v == kInf) return "+inf";
        if (v == -kInf) return "-inf";
        return v;
    };
    return {{"r_hat", r_hat},     {"alpha_r", enc(alpha_r)}, {"beta_hat", beta_hat},
            {"beta_tilde", beta_tilde}, {"gamma", gamma},    {"q_r", enc(q_r)},
            {"alpha", alpha},     {"clip_at_zero", clip_at_zero}};
}

CpciCalibration CpciCalibration::numbers_from_json(const nlohmann::json& j) {
    auto dec = [](const nlohmann::json& v) -> double {
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s == "+inf") return kInf;
            if (s == "-inf") return -kInf;
            throw std::runtime_error("bad extended-real encoding: " + s);
        }
        return v.get<double>();
    };
    CpciCalibration c;
    c.r_hat = j.at("r_hat").get<double>();
    c.alpha_r = dec(j.at("alpha_r"));
    c.beta_hat = j.at("beta_hat").get<double>();
    c.beta_tilde = j.at("beta_tilde").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.q_r = dec(j.at("q_r"));
    c.alpha = j.at("alpha").get<double>();
    c.clip_at_zero = j.at("clip_at_zero").get<bool>();
    return c;
}

double classification_threshold(const Dataset& cal1, const Classifier& classifier, double r) {
    if (cal1.empty()) throw std::invalid_argument("classification_threshold: empty cal1");
    if (r < 0.0 || r >= 1.0)
        throw std::invalid_argument("classification_threshold: r must lie in [0,1)");
    std::vector<double> probs;
    probs.reserve(cal1.size() + 1);
    for (const auto& s : cal1) probs.push_back(classifier.predict_proba(s.features));
    probs.push_back(1.0);
    return empirical_quantile(std::move(probs), r);
}

double estimate_beta(const Dataset& val, const Classifier& classifier, double alpha_r, double r) {
    if (val.empty()) throw std::invalid_argument("estimate_beta: empty validation set");
    if (r == 0.0) return 0.0;
    // Strictly below the threshold: probability mass sitting exactly at
    // alpha_r (discrete classifiers such as k-NN) routes to the interval
    // branch, keeping the zero-branch fraction at most r.  Routing ties to
    // the zero branch would inflate it past r and break the coverage
    // accounting.
    std::size_t qualifying = 0;
    for (const auto& s : val)
        if (classifier.predict_proba(s.features) < alpha_r && s.is_zero()) ++qualifying;
    const double raw = static_cast<double>(qualifying) / (static_cast<double>(val.size()) * r);
    return std::clamp(raw, 0.0, 1.0);
}

double adjust_beta(double beta_hat, double r, std::size_t n_val, double c_const) {
    if (r <= 0.0) throw std::invalid_argument("adjust_beta: r must be positive (bypass at r=0)");
    if (n_val < 3) throw std::invalid_argument("adjust_beta: need n_val >= 3");
    if (c_const <= 2.0) throw std::invalid_argument("adjust_beta: C must exceed 2");
    const double n = static_cast<double>(n_val);
    return beta_hat - (c_const / r) * std::sqrt(std::log(n) / n);
}

double effective_level(double alpha, double r, double beta_tilde) {
    if (r == 0.0) return alpha;
    return std::clamp((alpha - r * beta_tilde) / (1.0 - r), 0.0, 1.0);
}

double conformal_radius(const Dataset& cal2, const Classifier& classifier,
                        const Regressor& regressor, double alpha_r, double gamma) {
    std::vector<double> scores;
    for (const auto& s : cal2)
        if (classifier.predict_proba(s.features) >= alpha_r)
            scores.push_back(std::abs(s.outcome - regressor.predict(s.features)));
    if (scores.empty()) return kInf;  // vacuous calibration
    const double q = conformal_threshold(std::move(scores), gamma);
    return std::max(q, 0.0);  // gamma = 0 sentinel -> point interval
}

CpciCalibration calibrate_at_r(const DataSplits& splits, const Classifier& classifier,
                               const Regressor& regressor, const CpciConfig& config, double r) {
    CpciCalibration cal;
    cal.r_hat = r;
    cal.alpha = config.alpha;
    cal.clip_at_zero = config.clip_at_zero;
    cal.classifier = &classifier;
    cal.regressor = &regressor;
    cal.alpha_r = classification_threshold(splits.cal1, classifier, r);
    if (r == 0.0) {
        cal.beta_hat = 0.0;
        cal.beta_tilde = 0.0;
        cal.gamma = config.alpha;
    } else {
        cal.beta_hat = estimate_beta(splits.val, classifier, cal.alpha_r, r);
        cal.beta_tilde = adjust_beta(cal.beta_hat, r, splits.val.size(), config.adjustment_c);
        cal.gamma = effective_level(config.alpha, r,
                                    config.adjusted_level ? cal.beta_tilde : cal.beta_hat);
    }
    cal.q_r = conformal_radius(splits.cal2, classifier, regressor, cal.alpha_r, cal.gamma);
    return cal;
}

namespace {

double objective_value(const CpciCalibration& cal, Objective objective) {
    if (objective == Objective::NonzeroLength) return cal.q_r;
    return 2.0 * (1.0 - cal.r_hat) * cal.q_r;
}

}  // namespace

namespace {

// model evaluations shared by every grid point; predictions can be the
// dominant cost (k-NN), so they are computed once per calibration set
struct EvalCache {
    std::vector<double> cal1_probs;
    std::vector<double> val_probs;
    std::vector<double> cal2_probs;
    std::vector<double> cal2_scores;
};

EvalCache build_cache(const DataSplits& splits, const Classifier& classifier,
                      const Regressor& regressor) {
    EvalCache c;
    c.cal1_probs.reserve(splits.cal1.size());
    for (const auto& s : splits.cal1) c.cal1_probs.push_back(classifier.predict_proba(s.features));
    c.val_probs.reserve(splits.val.size());
    for (const auto& s : splits.val) c.val_probs.push_back(classifier.predict_proba(s.features));
    c.cal2_probs.reserve(splits.cal2.size());
    c.cal2_scores.reserve(splits.cal2.size());
    for (const auto& s : splits.cal2) {
        c.cal2_probs.push_back(classifier.predict_proba(s.features));
        c.cal2_scores.push_back(std::abs(s.outcome - regressor.predict(s.features)));
    }
    return c;
}

// same arithmetic as calibrate_at_r, reading the cached evaluations
CpciCalibration calibrate_cached(const EvalCache& cache, const DataSplits& splits,
                                 const Classifier& classifier, const Regressor& regressor,
                                 const CpciConfig& config, double r) {
    CpciCalibration cal;
    cal.r_hat = r;
    cal.alpha = config.alpha;
    cal.clip_at_zero = config.clip_at_zero;
    cal.classifier = &classifier;
    cal.regressor = &regressor;
    if (splits.cal1.empty()) throw std::invalid_argument("classification_threshold: empty cal1");
    {
        std::vector<double> probs = cache.cal1_probs;
        probs.push_back(1.0);
        cal.alpha_r = empirical_quantile(std::move(probs), r);
    }
    if (r == 0.0) {
        cal.beta_hat = 0.0;
        cal.beta_tilde = 0.0;
        cal.gamma = config.alpha;
    } else {
        if (splits.val.empty()) throw std::invalid_argument("estimate_beta: empty validation set");
        std::size_t qualifying = 0;
        for (std::size_t i = 0; i < splits.val.size(); ++i)
            if (cache.val_probs[i] < cal.alpha_r && splits.val[i].is_zero()) ++qualifying;
        cal.beta_hat = std::clamp(
            static_cast<double>(qualifying) / (static_cast<double>(splits.val.size()) * r), 0.0,
            1.0);
        cal.beta_tilde = adjust_beta(cal.beta_hat, r, splits.val.size(), config.adjustment_c);
        cal.gamma = effective_level(config.alpha, r,
                                    config.adjusted_level ? cal.beta_tilde : cal.beta_hat);
    }
    std::vector<double> scores;
    for (std::size_t i = 0; i < splits.cal2.size(); ++i)
        if (cache.cal2_probs[i] >= cal.alpha_r) scores.push_back(cache.cal2_scores[i]);
    cal.q_r = scores.empty() ? kInf : std::max(conformal_threshold(std::move(scores), cal.gamma),
                                               0.0);
    return cal;
}

}  // namespace

CpciCalibration select_r(const DataSplits& splits, const Classifier& classifier,
                         const Regressor& regressor, const CpciConfig& config) {
    config.validate();
    const EvalCache cache = build_cache(splits, classifier, regressor);
    bool have_best = false;
    CpciCalibration best;
    double best_obj = kInf;
    for (double r : config.grid) {
        CpciCalibration cal = calibrate_cached(cache, splits, classifier, regressor, config, r);
        const double obj = objective_value(cal, config.objective);
        if (obj == kInf) continue;
        if (!have_best || obj < best_obj) {  // strict: ties stay at the smaller r
            best = cal;
            best_obj = obj;
            have_best = true;
        }
    }
    if (!have_best) {
        // every grid point degenerate; fall back to pure VCI at r = 0
        best = calibrate_at_r(splits, classifier, regressor, config, 0.0);
        best.fallback_warning = true;
    }
    return best;
}

PredictionSet cpci_predict(const std::vector<double>& x, const CpciCalibration& cal) {
    if (cal.classifier == nullptr || cal.regressor == nullptr)
        throw std::invalid_argument("cpci_predict: not calibrated");
    if (cal.classifier->predict_proba(x) < cal.alpha_r) return PredictionSet::zero_singleton();
    if (cal.q_r == kInf) return PredictionSet::unbounded();
    const double center = cal.regressor->predict(x);
    double lo = center - cal.q_r;
    const double hi = center + cal.q_r;
    if (cal.clip_at_zero) lo = std::max(lo, 0.0);
    if (lo > hi) return PredictionSet::interval(hi, hi);
    return PredictionSet::interval(lo, hi);
}

}  // namespace cpci
