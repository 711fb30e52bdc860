#include "cpci/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "cpci/quantile.hpp"

namespace cpci {

ClassCondCalibration classcond_calibrate(const Dataset& cal, const Classifier& classifier,
                                         const Regressor& regressor, double level) {
    std::vector<double> zero_scores, nonzero_scores;
    for (const auto& s : cal) {
        if (s.is_zero())
            zero_scores.push_back(classifier.predict_proba(s.features));
        else
            nonzero_scores.push_back(std::abs(s.outcome - regressor.predict(s.features)));
    }
    if (zero_scores.empty() || nonzero_scores.empty())
        throw std::runtime_error("classcond_calibrate: calibration set is missing a class");
    ClassCondCalibration out;
    out.classifier = &classifier;
    out.regressor = &regressor;
    out.level = level;
    out.t_zero = conformal_threshold(std::move(zero_scores), level);
    out.t_nonzero = conformal_threshold(std::move(nonzero_scores), level);
    return out;
}

PredictionSet classcond_predict(const std::vector<double>& x, const ClassCondCalibration& cal) {
    if (cal.classifier == nullptr) throw std::invalid_argument("classcond_predict: not calibrated");
    const bool include_zero = cal.classifier->predict_proba(x) <= cal.t_zero;
    if (cal.t_nonzero == kInf) return PredictionSet::unbounded();
    const double radius = std::max(cal.t_nonzero, 0.0);
    const double center = cal.regressor->predict(x);
    const double lo = center - radius, hi = center + radius;
    // The interval branch enumerates non-zero candidates, so when the
    // zero-membership test fails the point 0 stays outside the set even if
    // the interval straddles it; otherwise the union over-covers zeros.
    if (!include_zero) return PredictionSet::interval_excluding_zero(lo, hi);
    return PredictionSet::zero_plus_interval(lo, hi);
}

WeightedVciCalibration weighted_calibrate(const Dataset& cal, const Classifier& classifier,
                                          const Regressor& regressor, double level) {
    if (cal.empty()) throw std::invalid_argument("weighted_calibrate: empty calibration set");
    std::vector<double> scores;
    scores.reserve(cal.size());
    for (const auto& s : cal) {
        if (s.is_zero())
            scores.push_back(classifier.predict_proba(s.features));
        else
            scores.push_back(std::abs(s.outcome - regressor.predict(s.features)));
    }
    WeightedVciCalibration out;
    out.classifier = &classifier;
    out.regressor = &regressor;
    out.level = level;
    out.q_hat = conformal_threshold(std::move(scores), level);
    return out;
}

PredictionSet weighted_predict(const std::vector<double>& x, const WeightedVciCalibration& cal) {
    if (cal.classifier == nullptr) throw std::invalid_argument("weighted_predict: not calibrated");
    if (cal.q_hat == kInf) return PredictionSet::unbounded();
    const bool include_zero = cal.classifier->predict_proba(x) <= cal.q_hat;
    const double radius = std::max(cal.q_hat, 0.0);
    const double center = cal.regressor->predict(x);
    const double lo = center - radius, hi = center + radius;
    if (!include_zero) return PredictionSet::interval(lo, hi);
    return PredictionSet::zero_plus_interval(lo, hi);
}

}  // namespace cpci
