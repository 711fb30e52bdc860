#pragma once

#include <vector>

#include "cpci/data.hpp"

namespace cpci {

// Empirical quantile with one convention everywhere: the k-th smallest
// element with k = ceil(q * |values|).  q = 0 returns the -inf sentinel.
// Values may contain +inf (augmentation sentinels); duplicates allowed.
double empirical_quantile(std::vector<double> values, double q);

// Conformal threshold: empirical_quantile(scores u {+inf}, level).
// level = 1 yields +inf, level = 0 yields the -inf sentinel.
double conformal_threshold(std::vector<double> scores, double level);

}  // namespace cpci
