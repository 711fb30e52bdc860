#include <doctest.h>

#include <cmath>

#include "cpci/random.hpp"
#include "cpci/vci.hpp"

using namespace cpci;

namespace {

// fixed-prediction regressor for score arithmetic
struct FixedRegressor final : Regressor {
    double value = 0.0;
    double predict(const std::vector<double>&) const override { return value; }
    nlohmann::json to_json() const override { return {{"type", "fixed"}}; }
};

Dataset scores_as_dataset(const std::vector<double>& outcomes) {
    Dataset d(1);
    for (double y : outcomes) d.add({{0.0}, y});
    return d;
}

}  // namespace

TEST_CASE("conformity score is the absolute residual") {
    FixedRegressor reg;
    reg.value = 2.0;
    CHECK(conformity_score({0.0}, 2.0, reg) == 0.0);
    CHECK(conformity_score({0.0}, 0.5, reg) == 1.5);
    CHECK(conformity_score({0.0}, 2.0 + 0.7, reg) ==
          doctest::Approx(conformity_score({0.0}, 2.0 - 0.7, reg)));
}

TEST_CASE("vci_calibrate picks the augmented order statistic") {
    FixedRegressor reg;
    reg.value = 0.0;
    const auto cal = vci_calibrate(scores_as_dataset({1, 2, 3, 4, 5, 6, 7, 8, 9}), reg, 0.9);
    CHECK(cal.q_hat == 9);

    const auto full = vci_calibrate(scores_as_dataset({1, 2, 3}), reg, 1.0);
    CHECK(full.q_hat == kInf);
    CHECK(vci_predict({0.0}, full).kind == PredictionSet::Kind::Unbounded);

    CHECK_THROWS(vci_calibrate(Dataset(1), reg, 0.9));
}

TEST_CASE("vci_predict interval arithmetic and clipping") {
    FixedRegressor reg;
    reg.value = 2.0;
    VciCalibration cal;
    cal.regressor = &reg;
    cal.q_hat = 0.5;
    const auto set = vci_predict({0.0}, cal);
    CHECK(set.lo == doctest::Approx(1.5));
    CHECK(set.hi == doctest::Approx(2.5));
    CHECK(set.length() == doctest::Approx(2 * cal.q_hat));

    reg.value = 0.3;
    cal.clip_at_zero = true;
    const auto clipped = vci_predict({0.0}, cal);
    CHECK(clipped.lo == 0.0);
    CHECK(clipped.hi == doctest::Approx(0.8));
}

TEST_CASE("vci marginal coverage under exchangeability") {
    // i.i.d. Gaussian residual world: coverage >= level - 1/(m+1) - 3 SE
    SeedSpec seeds{314};
    const double level = 0.9;
    const std::size_t m = 500;
    const int reps = 1000;
    FixedRegressor reg;  // true mean is 0, model predicts 0
    reg.value = 0.0;
    long covered = 0, total = 0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng = seeds.stream(rep, "vci-coverage");
        Dataset cal_set(1);
        for (std::size_t i = 0; i < m; ++i) cal_set.add({{0.0}, std::abs(rng.normal())});
        const auto cal = vci_calibrate(cal_set, reg, level);
        for (int t = 0; t < 20; ++t) {
            if (vci_predict({0.0}, cal).contains(std::abs(rng.normal()))) ++covered;
            ++total;
        }
    }
    const double coverage = static_cast<double>(covered) / total;
    const double se = std::sqrt(level * (1 - level) / reps);  // conservative: reps, not total
    CHECK(coverage >= level - 1.0 / (m + 1) - 3 * se);
}

TEST_CASE("interval length is 2*q_hat regardless of the center") {
    FixedRegressor reg;
    VciCalibration cal;
    cal.regressor = &reg;
    cal.q_hat = 1.25;
    for (double center : {-10.0, 0.0, 3.5}) {
        reg.value = center;
        CHECK(vci_predict({0.0}, cal).length() == doctest::Approx(2.5));
    }
}
