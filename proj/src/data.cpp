#include "cpci/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpci {

DataSplits partition(const Dataset& data, const SplitFractions& fractions, RngStream& rng) {
    double total = 0.0;
    for (double f : fractions) {
        if (f < 0.0) throw std::invalid_argument("split fraction must be non-negative");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1");

    const std::size_t n = data.size();
    std::array<std::size_t, 5> sizes{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        sizes[k] = static_cast<std::size_t>(std::floor(fractions[k] * static_cast<double>(n)));
        assigned += sizes[k];
    }
    // remainder in declaration order, skipping zero-fraction splits
    std::size_t remainder = n - assigned;
    for (std::size_t k = 0; k < 5 && remainder > 0; ++k) {
        if (fractions[k] > 0.0) {
            ++sizes[k];
            --remainder;
        }
    }
    for (std::size_t k = 0; k < 5; ++k) {
        if (fractions[k] > 0.0 && sizes[k] == 0)
            throw std::runtime_error("partition: a requested split rounded to zero samples");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Fisher-Yates with the portable stream
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(idx[i - 1], idx[j]);
    }

    DataSplits out{Dataset(data.feature_dim()), Dataset(data.feature_dim()),
                   Dataset(data.feature_dim()), Dataset(data.feature_dim()),
                   Dataset(data.feature_dim())};
    Dataset* dests[5] = {&out.train, &out.val, &out.cal1, &out.cal2, &out.test};
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t c = 0; c < sizes[k]; ++c) dests[k]->add(data[idx[pos++]]);
    }
    return out;
}

std::pair<Dataset, Dataset> merge_for_two_way(const DataSplits& splits) {
    Dataset cal(splits.train.feature_dim());
    for (const auto* part : {&splits.val, &splits.cal1, &splits.cal2})
        for (const auto& s : *part) cal.add(s);
    return {splits.train, std::move(cal)};
}

}  // namespace cpci
