#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpci/random.hpp"

namespace cpci {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One observation: feature vector plus a non-negative outcome.
// The zero-inflated atom is the exact value 0.0, never an epsilon band.
struct LabeledSample {
    std::vector<double> features;
    double outcome = 0.0;

    bool is_zero() const { return outcome == 0.0; }
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t feature_dim) : feature_dim_(feature_dim) {}

    void add(LabeledSample s) {
        if (s.features.size() != feature_dim_)
            throw std::invalid_argument("sample feature count does not match feature_dim");
        if (s.outcome < 0.0)
            throw std::invalid_argument("outcome must be non-negative");
        samples_.push_back(std::move(s));
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    std::size_t feature_dim() const { return feature_dim_; }
    const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<LabeledSample>& samples() const { return samples_; }

    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::vector<LabeledSample> samples_;
    std::size_t feature_dim_ = 0;
};

// Five-way partition driving the two-step procedure.
struct DataSplits {
    Dataset train, val, cal1, cal2, test;
};

// Prediction set: {0}, a closed interval, {0} union an interval, or
// the whole line.  The unbounded case is its own variant so the
// q_r = +inf degenerate calibration stays type-visible.
struct PredictionSet {
    enum class Kind { ZeroSingleton, Interval, ZeroPlusInterval, Unbounded };

    Kind kind = Kind::ZeroSingleton;
    double lo = 0.0;
    double hi = 0.0;
    // Marks an interval that stands for non-zero candidates only, so the
    // point 0 is carved out even when lo <= 0 <= hi (class-conditional sets
    // whose zero-membership test failed).
    bool zero_excluded = false;

    static PredictionSet zero_singleton() { return {Kind::ZeroSingleton, 0.0, 0.0}; }
    static PredictionSet unbounded() { return {Kind::Unbounded, -kInf, kInf}; }
    static PredictionSet interval(double lo, double hi) {
        if (lo > hi) throw std::invalid_argument("interval requires lo <= hi");
        return {Kind::Interval, lo, hi};
    }
    static PredictionSet interval_excluding_zero(double lo, double hi) {
        if (lo > hi) throw std::invalid_argument("interval requires lo <= hi");
        return {Kind::Interval, lo, hi, true};
    }
    // Collapses to a plain interval when 0 already lies inside [lo, hi].
    static PredictionSet zero_plus_interval(double lo, double hi) {
        if (lo > hi) throw std::invalid_argument("interval requires lo <= hi");
        if (lo <= 0.0 && 0.0 <= hi) return {Kind::Interval, lo, hi};
        return {Kind::ZeroPlusInterval, lo, hi};
    }

    bool contains(double y) const {
        switch (kind) {
            case Kind::ZeroSingleton: return y == 0.0;
            case Kind::Interval:
                if (zero_excluded && y == 0.0) return false;
                return lo <= y && y <= hi;
            case Kind::ZeroPlusInterval: return y == 0.0 || (lo <= y && y <= hi);
            case Kind::Unbounded: return true;
        }
        return false;
    }

    double length() const {
        switch (kind) {
            case Kind::ZeroSingleton: return 0.0;
            case Kind::Interval:
            case Kind::ZeroPlusInterval: return hi - lo;
            case Kind::Unbounded: return kInf;
        }
        return 0.0;
    }

    bool is_disconnected() const {
        return kind == Kind::ZeroPlusInterval && !(lo <= 0.0 && 0.0 <= hi);
    }

    bool operator==(const PredictionSet& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::ZeroSingleton || kind == Kind::Unbounded) return true;
        return lo == o.lo && hi == o.hi && zero_excluded == o.zero_excluded;
    }
};

// Split fractions over (train, val, cal1, cal2, test); must sum to 1.
using SplitFractions = std::array<double, 5>;

// Shuffles and partitions. Sizes use floor-then-distribute-remainder,
// remainder going to splits in declaration order. Deterministic given seed.
DataSplits partition(const Dataset& data, const SplitFractions& fractions, RngStream& rng);

// (train, val u cal1 u cal2): two-split methods see the same data budget.
std::pair<Dataset, Dataset> merge_for_two_way(const DataSplits& splits);

}  // namespace cpci
