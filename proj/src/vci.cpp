#include "cpci/vci.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpci/quantile.hpp"

namespace cpci {

double conformity_score(const std::vector<double>& x, double y, const Regressor& regressor) {
    return std::abs(y - regressor.predict(x));
}

VciCalibration vci_calibrate(const Dataset& cal, const Regressor& regressor, double level,
                             bool clip_at_zero) {
    if (cal.empty()) throw std::invalid_argument("vci_calibrate: empty calibration set");
    std::vector<double> scores;
    scores.reserve(cal.size());
    for (const auto& s : cal) scores.push_back(conformity_score(s.features, s.outcome, regressor));
    VciCalibration out;
    out.regressor = &regressor;
    out.level = level;
    out.clip_at_zero = clip_at_zero;
    out.q_hat = conformal_threshold(std::move(scores), level);
    return out;
}

PredictionSet vci_predict(const std::vector<double>& x, const VciCalibration& cal) {
    if (cal.regressor == nullptr) throw std::invalid_argument("vci_predict: not calibrated");
    if (cal.q_hat == kInf) return PredictionSet::unbounded();
    const double radius = std::max(cal.q_hat, 0.0);  // -inf sentinel -> point interval
    const double center = cal.regressor->predict(x);
    double lo = center - radius;
    const double hi = center + radius;
    if (cal.clip_at_zero) lo = std::max(lo, 0.0);
    if (lo > hi) return PredictionSet::interval(hi, hi);  // clipped past the top
    return PredictionSet::interval(lo, hi);
}

}  // namespace cpci
