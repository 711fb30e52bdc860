#include <doctest.h>

#include <algorithm>
#include <vector>

#include "cpci/quantile.hpp"
#include "cpci/random.hpp"

using namespace cpci;

namespace {

// Independent counting oracle: smallest t in the multiset with
// #{v <= t} >= ceil(q * n).
double quantile_oracle(const std::vector<double>& values, double q) {
    const std::size_t n = values.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    if (k < 1) k = 1;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (double t : sorted) {
        std::size_t count = 0;
        for (double v : values)
            if (v <= t) ++count;
        if (count >= k) return t;
    }
    return sorted.back();
}

}  // namespace

TEST_CASE("empirical_quantile basic convention") {
    CHECK(empirical_quantile({3, 1, 2}, 1.0) == 3);
    CHECK(empirical_quantile({3, 1, 2}, 0.34) == 2);  // k = ceil(1.02) = 2
    CHECK(empirical_quantile({0.5}, 0.0) == -kInf);
    CHECK_THROWS(empirical_quantile({}, 0.5));
    CHECK_THROWS(empirical_quantile({1.0}, 1.5));
}

TEST_CASE("empirical_quantile matches the counting oracle on random multisets") {
    SeedSpec seeds{20240901};
    RngStream rng = seeds.stream(0, "quantile-oracle");
    for (int trial = 0; trial < 20000; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> values(n);
        for (auto& v : values) v = std::floor(rng.uniform() * 10.0);  // force ties
        double q = rng.uniform();
        if (trial % 7 == 0) q = static_cast<double>(rng.below(n + 1)) / static_cast<double>(n);
        if (q == 0.0) continue;
        CAPTURE(n);
        CAPTURE(q);
        REQUIRE(empirical_quantile(values, q) == quantile_oracle(values, q));
    }
}

TEST_CASE("monotonicity in q") {
    SeedSpec seeds{7};
    RngStream rng = seeds.stream(0, "quantile-mono");
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.normal();
        const double q1 = rng.uniform(), q2 = rng.uniform();
        const double lo = std::min(q1, q2), hi = std::max(q1, q2);
        CHECK(empirical_quantile(values, lo) <= empirical_quantile(values, hi));
    }
}

TEST_CASE("translation equivariance") {
    SeedSpec seeds{11};
    RngStream rng = seeds.stream(0, "quantile-shift");
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(15);
        std::vector<double> values(n), shifted(n);
        const double c = rng.normal() * 3.0;
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = rng.normal();
            shifted[i] = values[i] + c;
        }
        const double q = 0.01 + 0.98 * rng.uniform();
        CHECK(empirical_quantile(shifted, q) ==
              doctest::Approx(empirical_quantile(values, q) + c).epsilon(1e-12));
    }
}

TEST_CASE("conformal_threshold augments with +inf") {
    std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(conformal_threshold(nine, 0.9) == 9);  // k = ceil(0.9*10) = 9
    std::vector<double> nineteen(19);
    for (int i = 0; i < 19; ++i) nineteen[i] = i + 1;
    CHECK(conformal_threshold(nineteen, 0.9) == 18);  // k = ceil(0.9*20) = 18
    CHECK(conformal_threshold(nine, 1.0) == kInf);
    CHECK(conformal_threshold(nine, 0.0) == -kInf);
    CHECK(conformal_threshold({}, 0.5) == kInf);  // only the sentinel present
}

TEST_CASE("exchangeability coverage of the conformal threshold") {
    // P(S_new <= threshold) >= level for i.i.d. continuous scores
    SeedSpec seeds{99};
    const double level = 0.9;
    const std::size_t m = 50;
    const int reps = 4000;
    int covered = 0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng = seeds.stream(rep, "exchangeability");
        std::vector<double> scores(m);
        for (auto& s : scores) s = std::abs(rng.normal());
        const double t = conformal_threshold(scores, level);
        if (std::abs(rng.normal()) <= t) ++covered;
    }
    const double coverage = static_cast<double>(covered) / reps;
    const double se = std::sqrt(level * (1 - level) / reps);
    CHECK(coverage >= level - 3 * se);
}
