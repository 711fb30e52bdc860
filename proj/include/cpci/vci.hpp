#pragma once

#include "cpci/data.hpp"
#include "cpci/models.hpp"

namespace cpci {

// Vanilla split conformal: absolute-residual score calibrated on a held-out
// set; also serves as the second-step engine inside CPCI.
struct VciCalibration {
    const Regressor* regressor = nullptr;
    double q_hat = kInf;       // order statistic of {scores} u {+inf}
    double level = 0.0;
    bool clip_at_zero = false;
};

double conformity_score(const std::vector<double>& x, double y, const Regressor& regressor);

VciCalibration vci_calibrate(const Dataset& cal, const Regressor& regressor, double level,
                             bool clip_at_zero = false);

PredictionSet vci_predict(const std::vector<double>& x, const VciCalibration& cal);

}  // namespace cpci
