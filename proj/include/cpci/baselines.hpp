#pragma once

#include "cpci/data.hpp"
#include "cpci/models.hpp"

namespace cpci {

// Class-conditional (Mondrian) conformal: each class calibrated separately
// at the same level.  Zero class scores p_hat(x); non-zero class scores the
// absolute residual.  Prediction sets may be disconnected.
struct ClassCondCalibration {
    const Classifier* classifier = nullptr;
    const Regressor* regressor = nullptr;
    double t_zero = kInf;     // threshold over zero-class probabilities
    double t_nonzero = kInf;  // threshold over non-zero-class residuals
    double level = 0.0;
};

ClassCondCalibration classcond_calibrate(const Dataset& cal, const Classifier& classifier,
                                         const Regressor& regressor, double level);

PredictionSet classcond_predict(const std::vector<double>& x, const ClassCondCalibration& cal);

// Weighted-score conformal: one threshold over the mixed score
// S = p_hat(x) 1{y=0} + |y - f_hat(x)| 1{y!=0}.  Scales differ by design;
// the procedure is implemented exactly as stated.
struct WeightedVciCalibration {
    const Classifier* classifier = nullptr;
    const Regressor* regressor = nullptr;
    double q_hat = kInf;
    double level = 0.0;
};

WeightedVciCalibration weighted_calibrate(const Dataset& cal, const Classifier& classifier,
                                          const Regressor& regressor, double level);

PredictionSet weighted_predict(const std::vector<double>& x, const WeightedVciCalibration& cal);

}  // namespace cpci
