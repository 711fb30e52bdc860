#include "cpci/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpci {

namespace {

// ceil(q * n) robust to cases like 0.9 * 10 landing at 9.000000000000002
std::size_t quantile_rank(double q, std::size_t n) {
    const double raw = q * static_cast<double>(n);
    const double rounded = std::round(raw);
    const double tol = 1e-9 * std::max(1.0, raw);
    double k = (std::abs(raw - rounded) <= tol) ? rounded : std::ceil(raw);
    if (k < 1.0) k = 1.0;
    if (k > static_cast<double>(n)) k = static_cast<double>(n);
    return static_cast<std::size_t>(k);
}

}  // namespace

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("empirical_quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("empirical_quantile: q outside [0,1]");
    if (q == 0.0) return -kInf;
    const std::size_t k = quantile_rank(q, values.size());
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
    return values[k - 1];
}

double conformal_threshold(std::vector<double> scores, double level) {
    scores.push_back(kInf);
    return empirical_quantile(std::move(scores), level);
}

}  // namespace cpci
