#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cpci/models.hpp"
#include "cpci/random.hpp"

using namespace cpci;

namespace {

Dataset linear_exact(std::size_t n) {
    // y = 2*x + 1, no noise
    Dataset d(1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / 3.0;
        d.add({{x}, 2.0 * x + 1.0});
    }
    return d;
}

double logistic_loglik(const Dataset& data, double intercept, const std::vector<double>& coef,
                       double ridge) {
    double ll = 0.0;
    for (const auto& s : data) {
        double eta = intercept;
        for (std::size_t j = 0; j < coef.size(); ++j) eta += coef[j] * s.features[j];
        const double y = s.is_zero() ? 0.0 : 1.0;
        ll += y * eta - std::log1p(std::exp(-std::abs(eta))) - std::max(eta, 0.0);
    }
    double penalty = intercept * intercept;
    for (double c : coef) penalty += c * c;
    return ll - 0.5 * ridge * penalty;
}

}  // namespace

TEST_CASE("fit_ols recovers an exact linear relationship") {
    const auto model = fit_ols(linear_exact(10));
    CHECK(model->intercept == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(model->coefficients[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("fit_ols on a constant outcome") {
    Dataset d(1);
    for (int i = 0; i < 10; ++i) d.add({{static_cast<double>(i)}, 5.0});
    const auto model = fit_ols(d);
    CHECK(model->intercept == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(std::abs(model->coefficients[0]) < 1e-8);
}

TEST_CASE("fit_ols residuals are orthogonal to the design") {
    SeedSpec seeds{31};
    RngStream rng = seeds.stream(0, "ols");
    Dataset d(4);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.normal();
        const double y = 3.0 + x[0] - 2.0 * x[1] + 0.5 * x[3] + 0.3 * rng.normal();
        d.add({x, std::abs(y)});
    }
    const auto model = fit_ols(d);
    std::vector<double> xtr(5, 0.0);  // [intercept column, features] . residual
    for (const auto& s : d) {
        const double r = s.outcome - model->predict(s.features);
        xtr[0] += r;
        for (int j = 0; j < 4; ++j) xtr[j + 1] += s.features[j] * r;
    }
    for (double v : xtr) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("fit_ols requires more samples than features") {
    CHECK_THROWS(fit_ols(linear_exact(1)));
}

TEST_CASE("fit_logistic with no signal predicts the base rate") {
    SeedSpec seeds{77};
    RngStream rng = seeds.stream(0, "logit-coin");
    Dataset d(1);
    for (int i = 0; i < 4000; ++i)
        d.add({{rng.normal()}, rng.uniform() < 0.5 ? 0.0 : 1.0});
    const auto model = fit_logistic(d);
    for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0})
        CHECK(model->predict_proba({x}) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("fit_logistic is monotone with a single positive coefficient") {
    Dataset d(1);
    SeedSpec seeds{78};
    RngStream rng = seeds.stream(0, "logit-sep");
    for (int i = 0; i < 200; ++i) {
        const double x = rng.normal();
        d.add({{x}, x > 0 ? 1.0 : 0.0});
    }
    const auto model = fit_logistic(d);
    double prev = -1.0;
    for (double x = -3.0; x <= 3.0; x += 0.25) {
        const double p = model->predict_proba({x});
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("fit_logistic gradient vanishes at the optimum (finite differences)") {
    SeedSpec seeds{79};
    RngStream rng = seeds.stream(0, "logit-fd");
    Dataset d(2);
    for (int i = 0; i < 400; ++i) {
        std::vector<double> x{rng.normal(), rng.normal()};
        const double p = 1.0 / (1.0 + std::exp(-(0.3 + x[0] - 0.7 * x[1])));
        d.add({x, rng.uniform() < p ? 1.0 : 0.0});
    }
    const auto model = fit_logistic(d);
    const double h = 1e-5, ridge = 1e-6;
    // central differences so the quadratic term cancels
    CHECK(std::abs((logistic_loglik(d, model->intercept + h, model->coefficients, ridge) -
                    logistic_loglik(d, model->intercept - h, model->coefficients, ridge)) /
                   (2 * h)) < 1e-4);
    for (std::size_t j = 0; j < 2; ++j) {
        auto up = model->coefficients, down = model->coefficients;
        up[j] += h;
        down[j] -= h;
        CHECK(std::abs((logistic_loglik(d, model->intercept, up, ridge) -
                        logistic_loglik(d, model->intercept, down, ridge)) /
                       (2 * h)) < 1e-4);
    }
}

TEST_CASE("fit_logistic rejects one-class data") {
    Dataset d(1);
    for (int i = 0; i < 10; ++i) d.add({{static_cast<double>(i)}, 0.0});
    CHECK_THROWS(fit_logistic(d));
}

TEST_CASE("knn with k equal to the training size gives the global fraction") {
    Dataset d(1);
    for (int i = 0; i < 10; ++i) d.add({{static_cast<double>(i)}, i < 4 ? 0.0 : 1.0});
    const auto model = fit_knn_classifier(d, 10);
    CHECK(model->predict_proba({100.0}) == doctest::Approx(0.6));
    CHECK(model->predict_proba({-5.0}) == doctest::Approx(0.6));
}

TEST_CASE("knn at a training point with k=1 returns that point's values") {
    Dataset d(2);
    d.add({{1.0, 1.0}, 3.0});
    d.add({{-1.0, 2.0}, 0.0});
    d.add({{4.0, -1.0}, 7.0});
    const auto cls = fit_knn_classifier(d, 1);
    const auto reg = fit_knn_regressor(d, 1);
    CHECK(cls->predict_proba({-1.0, 2.0}) == 0.0);
    CHECK(reg->predict({4.0, -1.0}) == 7.0);
}

TEST_CASE("knn matches an exhaustive sort oracle on small sets") {
    SeedSpec seeds{90};
    RngStream rng = seeds.stream(0, "knn-oracle");
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3 + rng.below(18);
        Dataset d(2);
        for (std::size_t i = 0; i < n; ++i)
            d.add({{rng.normal(), rng.normal()}, rng.uniform() < 0.4 ? 0.0 : rng.uniform() * 5});
        const std::size_t k = 1 + rng.below(n);
        const auto cls = fit_knn_classifier(d, k);
        const auto reg = fit_knn_regressor(d, k);
        const std::vector<double> q{rng.normal(), rng.normal()};

        // brute-force neighbor search with the same tie rule
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            for (int j = 0; j < 2; ++j) {
                const double delta = d[i].features[j] - q[j];
                acc += delta * delta;
            }
            dist.emplace_back(acc, i);
        }
        std::sort(dist.begin(), dist.end());
        double frac = 0, mean = 0;
        for (std::size_t i = 0; i < k; ++i) {
            frac += d[dist[i].second].is_zero() ? 0.0 : 1.0;
            mean += d[dist[i].second].outcome;
        }
        CHECK(cls->predict_proba(q) == doctest::Approx(frac / k).epsilon(1e-12));
        CHECK(reg->predict(q) == doctest::Approx(mean / k).epsilon(1e-12));
    }
}

TEST_CASE("knn rejects out-of-range k") {
    Dataset d(1);
    d.add({{0.0}, 1.0});
    CHECK_THROWS(fit_knn_classifier(d, 0));
    CHECK_THROWS(fit_knn_classifier(d, 2));
}

TEST_CASE("standardizer centers and scales on train statistics only") {
    SeedSpec seeds{91};
    RngStream rng = seeds.stream(0, "standardize");
    Dataset train(3);
    for (int i = 0; i < 500; ++i)
        train.add({{5.0 + 2.0 * rng.normal(), rng.normal(), 7.0 /* constant */}, 1.0});
    const auto s = Standardizer::fit(train);
    CHECK(s.output_dim() == 2);  // constant feature dropped
    CHECK(s.dropped_count() == 1);

    const Dataset z = s.transform(train);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0;
        for (const auto& smp : z) mean += smp.features[j];
        mean /= z.size();
        double var = 0;
        for (const auto& smp : z) var += (smp.features[j] - mean) * (smp.features[j] - mean);
        var /= z.size();
        CHECK(std::abs(mean) < 1e-10);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-10));
    }

    // a shifted test set keeps the train statistics
    const auto zx = s.transform(std::vector<double>{5.0, 0.0, 7.0});
    const auto zy = s.transform(std::vector<double>{7.0, 0.0, 7.0});
    CHECK(zy[0] > zx[0]);
    CHECK(zx[1] == zy[1]);
}

TEST_CASE("random-output classifier is deterministic and in range") {
    RandomOutputClassifier c;
    c.salt = 1234;
    const std::vector<double> x{0.5, -1.25};
    const double p = c.predict_proba(x);
    CHECK(p == c.predict_proba(x));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    RandomOutputClassifier other;
    other.salt = 99;
    CHECK(other.predict_proba(x) != p);
}

TEST_CASE("model JSON round trip preserves predictions") {
    SeedSpec seeds{92};
    RngStream rng = seeds.stream(0, "serialize");
    Dataset d(2);
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x{rng.normal(), rng.normal()};
        d.add({x, x[0] > 0 ? std::abs(x[1]) + 1.0 : 0.0});
    }
    const auto cls = fit_logistic(d);
    const auto reg = fit_ols(d, true);
    const auto knn = fit_knn_regressor(d, 3);
    const auto cls2 = classifier_from_json(cls->to_json());
    const auto reg2 = regressor_from_json(reg->to_json());
    const auto knn2 = regressor_from_json(knn->to_json());
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> x{rng.normal(), rng.normal()};
        CHECK(cls->predict_proba(x) == cls2->predict_proba(x));
        CHECK(reg->predict(x) == reg2->predict(x));
        CHECK(knn->predict(x) == knn2->predict(x));
    }
}
