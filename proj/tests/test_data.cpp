#include <doctest.h>

#include <set>

#include "cpci/data.hpp"
#include "cpci/quantile.hpp"

using namespace cpci;

namespace {

Dataset toy_dataset(std::size_t n) {
    Dataset d(1);
    for (std::size_t i = 0; i < n; ++i)
        d.add({{static_cast<double>(i)}, static_cast<double>(i % 3)});
    return d;
}

}  // namespace

TEST_CASE("partition splits 100 samples into four quarters") {
    SeedSpec seeds{42};
    RngStream rng = seeds.stream(0, "partition");
    const auto splits = partition(toy_dataset(100), {0.25, 0.25, 0.25, 0.25, 0.0}, rng);
    CHECK(splits.train.size() == 25);
    CHECK(splits.val.size() == 25);
    CHECK(splits.cal1.size() == 25);
    CHECK(splits.cal2.size() == 25);
    CHECK(splits.test.size() == 0);
}

TEST_CASE("partition is deterministic and disjoint") {
    SeedSpec seeds{42};
    const Dataset data = toy_dataset(101);
    RngStream r1 = seeds.stream(3, "partition");
    RngStream r2 = seeds.stream(3, "partition");
    const auto a = partition(data, {0.25, 0.25, 0.25, 0.25, 0.0}, r1);
    const auto b = partition(data, {0.25, 0.25, 0.25, 0.25, 0.0}, r2);
    // identical assignment (features identify samples here)
    for (std::size_t i = 0; i < a.train.size(); ++i)
        CHECK(a.train[i].features[0] == b.train[i].features[0]);

    std::multiset<double> seen;
    for (const auto* part : {&a.train, &a.val, &a.cal1, &a.cal2})
        for (const auto& s : *part) seen.insert(s.features[0]);
    CHECK(seen.size() == 101);
    CHECK(std::set<double>(seen.begin(), seen.end()).size() == 101);  // disjoint
    // remainder went to the first split in declaration order
    CHECK(a.train.size() == 26);
}

TEST_CASE("partition rejects bad fractions and empty splits") {
    SeedSpec seeds{1};
    RngStream rng = seeds.stream(0, "partition");
    CHECK_THROWS(partition(toy_dataset(10), {0.5, 0.5, 0.5, 0.0, 0.0}, rng));
    RngStream rng2 = seeds.stream(0, "partition");
    // 0.01 of 10 rounds to zero samples even after remainder distribution
    CHECK_THROWS(partition(toy_dataset(2), {0.4, 0.3, 0.2, 0.05, 0.05}, rng2));
}

TEST_CASE("merge_for_two_way pools val and both calibration folds") {
    SeedSpec seeds{5};
    RngStream rng = seeds.stream(0, "partition");
    const auto splits = partition(toy_dataset(100), {0.25, 0.25, 0.25, 0.25, 0.0}, rng);
    const auto [train, cal] = merge_for_two_way(splits);
    CHECK(train.size() == 25);
    CHECK(cal.size() == 75);
    std::set<double> train_ids, cal_ids;
    for (const auto& s : train) train_ids.insert(s.features[0]);
    for (const auto& s : cal) cal_ids.insert(s.features[0]);
    for (double id : train_ids) CHECK(cal_ids.count(id) == 0);
}

TEST_CASE("prediction set membership, length, disconnectedness") {
    const auto zero = PredictionSet::zero_singleton();
    CHECK(zero.contains(0.0));
    CHECK_FALSE(zero.contains(1e-300));  // exact-zero discipline
    CHECK(zero.length() == 0.0);
    CHECK_FALSE(zero.is_disconnected());

    const auto interval = PredictionSet::interval(1.5, 2.5);
    CHECK(interval.contains(1.5));
    CHECK(interval.contains(2.5));
    CHECK_FALSE(interval.contains(0.0));
    CHECK(interval.length() == doctest::Approx(1.0));

    const auto split_set = PredictionSet::zero_plus_interval(1.5, 2.5);
    CHECK(split_set.kind == PredictionSet::Kind::ZeroPlusInterval);
    CHECK(split_set.contains(0.0));
    CHECK(split_set.contains(2.0));
    CHECK(split_set.is_disconnected());

    // collapse rule: 0 inside the interval gives a plain connected interval
    const auto collapsed = PredictionSet::zero_plus_interval(-0.1, 0.4);
    CHECK(collapsed.kind == PredictionSet::Kind::Interval);
    CHECK_FALSE(collapsed.is_disconnected());

    const auto unbounded = PredictionSet::unbounded();
    CHECK(unbounded.contains(1e18));
    CHECK(unbounded.length() == kInf);

    CHECK_THROWS(PredictionSet::interval(2.0, 1.0));
}

TEST_CASE("downstream statistics ignore within-split order") {
    SeedSpec seeds{8};
    RngStream rng = seeds.stream(0, "perm");
    std::vector<double> scores;
    for (int i = 0; i < 40; ++i) scores.push_back(rng.normal());
    std::vector<double> reversed(scores.rbegin(), scores.rend());
    CHECK(conformal_threshold(scores, 0.9) == conformal_threshold(reversed, 0.9));
}
