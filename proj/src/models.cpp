#include "cpci/models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace cpci {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd design_matrix(const Dataset& data) {
    const std::size_t n = data.size(), d = data.feature_dim();
    MatrixXd X(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < d; ++j) X(i, j + 1) = data[i].features[j];
    }
    return X;
}

double dot_with_intercept(double intercept, const std::vector<double>& coef,
                          const std::vector<double>& x) {
    if (x.size() != coef.size())
        throw std::invalid_argument("feature dimension mismatch at predict time");
    double acc = intercept;
    for (std::size_t j = 0; j < coef.size(); ++j) acc += coef[j] * x[j];
    return acc;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("standardize: empty training set");
    const std::size_t d = train.feature_dim(), n = train.size();
    Standardizer s;
    s.input_dim_ = d;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto& smp : train) mean += smp.features[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& smp : train) {
            const double c = smp.features[j] - mean;
            var += c * c;
        }
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd > 0.0) {
            s.kept_.push_back(j);
            s.mean_.push_back(mean);
            s.sd_.push_back(sd);
        }
    }
    if (s.kept_.empty()) throw std::runtime_error("standardize: all features constant");
    return s;
}

std::vector<double> Standardizer::transform(const std::vector<double>& x) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("standardize: feature dimension mismatch");
    std::vector<double> out(kept_.size());
    for (std::size_t j = 0; j < kept_.size(); ++j)
        out[j] = (x[kept_[j]] - mean_[j]) / sd_[j];
    return out;
}

Dataset Standardizer::transform(const Dataset& data) const {
    Dataset out(kept_.size());
    for (const auto& s : data) out.add({transform(s.features), s.outcome});
    return out;
}

nlohmann::json Standardizer::to_json() const {
    return {{"input_dim", input_dim_}, {"kept", kept_}, {"mean", mean_}, {"sd", sd_}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
    Standardizer s;
    s.input_dim_ = j.at("input_dim").get<std::size_t>();
    s.kept_ = j.at("kept").get<std::vector<std::size_t>>();
    s.mean_ = j.at("mean").get<std::vector<double>>();
    s.sd_ = j.at("sd").get<std::vector<double>>();
    return s;
}

// ---------------------------------------------------------------------------
// OLS

double OlsRegressor::predict(const std::vector<double>& x) const {
    return dot_with_intercept(intercept, coefficients, x);
}

nlohmann::json OlsRegressor::to_json() const {
    return {{"type", "ols"}, {"intercept", intercept}, {"coefficients", coefficients}};
}

Dataset nonzero_subset(const Dataset& data) {
    Dataset out(data.feature_dim());
    for (const auto& s : data)
        if (!s.is_zero()) out.add(s);
    return out;
}

std::unique_ptr<OlsRegressor> fit_ols(const Dataset& train_in, bool nonzero_only) {
    const Dataset train = nonzero_only ? nonzero_subset(train_in) : train_in;
    if (train.size() <= train.feature_dim())
        throw std::invalid_argument("fit_ols: need more samples than features");
    const MatrixXd X = design_matrix(train);
    VectorXd y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) y(i) = train[i].outcome;

    MatrixXd gram = X.transpose() * X;
    VectorXd rhs = X.transpose() * y;
    Eigen::LDLT<MatrixXd> solver(gram);
    VectorXd beta;
    if (solver.info() == Eigen::Success) beta = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !beta.allFinite() ||
        (gram * beta - rhs).norm() > 1e-6 * (1.0 + rhs.norm())) {
        const double ridge = 1e-8 * gram.trace() / static_cast<double>(gram.rows());
        gram.diagonal().array() += std::max(ridge, 1e-12);
        beta = gram.ldlt().solve(rhs);
        if (!beta.allFinite()) throw std::runtime_error("fit_ols: singular system");
    }

    auto model = std::make_unique<OlsRegressor>();
    model->intercept = beta(0);
    model->coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    return model;
}

// ---------------------------------------------------------------------------
// Logistic (IRLS)

double LogisticClassifier::predict_proba(const std::vector<double>& x) const {
    const double p = sigmoid(dot_with_intercept(intercept, coefficients, x));
    return std::clamp(p, 0.0, 1.0);
}

nlohmann::json LogisticClassifier::to_json() const {
    return {{"type", "logistic"}, {"intercept", intercept}, {"coefficients", coefficients}};
}

std::unique_ptr<LogisticClassifier> fit_logistic(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("fit_logistic: empty training set");
    const std::size_t n = train.size();
    VectorXd y(n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        y(i) = train[i].is_zero() ? 0.0 : 1.0;
        positives += static_cast<std::size_t>(y(i));
    }
    if (positives == 0 || positives == n)
        throw std::runtime_error("fit_logistic: only one class present");

    const MatrixXd X = design_matrix(train);
    const std::size_t p = X.cols();
    const double ridge = 1e-6;
    VectorXd beta = VectorXd::Zero(p);

    for (int iter = 0; iter < 200; ++iter) {
        VectorXd eta = X * beta;
        VectorXd mu(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            mu(i) = sigmoid(eta(i));
            w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
        }
        VectorXd grad = X.transpose() * (y - mu) - ridge * beta;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-6) break;
        MatrixXd hess = X.transpose() * w.asDiagonal() * X;
        hess.diagonal().array() += ridge;
        VectorXd step = hess.ldlt().solve(grad);
        if (!step.allFinite()) break;
        beta += step;
    }

    auto model = std::make_unique<LogisticClassifier>();
    model->intercept = beta(0);
    model->coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    return model;
}

// ---------------------------------------------------------------------------
// k-NN

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

// indices of the k nearest training points; ties by lower index
std::vector<std::size_t> k_nearest(const std::vector<std::vector<double>>& train,
                                   const std::vector<double>& x, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) dist[i] = {sq_dist(train[i], x), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

}  // namespace

double KnnClassifier::predict_proba(const std::vector<double>& x) const {
    const auto nn = k_nearest(train_features, x, k);
    double frac = 0.0;
    for (std::size_t i : nn) frac += labels[i];
    return std::clamp(frac / static_cast<double>(k), 0.0, 1.0);
}

nlohmann::json KnnClassifier::to_json() const {
    return {{"type", "knn_classifier"}, {"k", k}, {"train_features", train_features},
            {"labels", labels}};
}

double KnnRegressor::predict(const std::vector<double>& x) const {
    const auto nn = k_nearest(train_features, x, k);
    double mean = 0.0;
    for (std::size_t i : nn) mean += outcomes[i];
    return mean / static_cast<double>(k);
}

nlohmann::json KnnRegressor::to_json() const {
    return {{"type", "knn_regressor"}, {"k", k}, {"train_features", train_features},
            {"outcomes", outcomes}};
}

std::size_t default_knn_k(std::size_t n_train) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_train))));
}

std::unique_ptr<KnnClassifier> fit_knn_classifier(const Dataset& train, std::size_t k) {
    if (k < 1 || k > train.size()) throw std::invalid_argument("fit_knn_classifier: k out of range");
    auto model = std::make_unique<KnnClassifier>();
    model->k = k;
    for (const auto& s : train) {
        model->train_features.push_back(s.features);
        model->labels.push_back(s.is_zero() ? 0 : 1);
    }
    return model;
}

std::unique_ptr<KnnRegressor> fit_knn_regressor(const Dataset& train_in, std::size_t k,
                                                bool nonzero_only) {
    const Dataset train = nonzero_only ? nonzero_subset(train_in) : train_in;
    if (k < 1 || k > train.size()) throw std::invalid_argument("fit_knn_regressor: k out of range");
    auto model = std::make_unique<KnnRegressor>();
    model->k = k;
    for (const auto& s : train) {
        model->train_features.push_back(s.features);
        model->outcomes.push_back(s.outcome);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Adversarial built-ins

double RandomOutputClassifier::predict_proba(const std::vector<double>& x) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ salt;
    for (double v : x) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h ^= bits;
        h *= 0x100000001b3ULL;
    }
    h = SeedSpec::mix(h, 0x5bd1e995u);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

nlohmann::json RandomOutputClassifier::to_json() const {
    return {{"type", "random_classifier"}, {"salt", salt}};
}

nlohmann::json ConstantRegressor::to_json() const {
    return {{"type", "constant"}, {"value", value}};
}

// ---------------------------------------------------------------------------
// Deserialization

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "logistic") {
        auto m = std::make_unique<LogisticClassifier>();
        m->intercept = j.at("intercept").get<double>();
        m->coefficients = j.at("coefficients").get<std::vector<double>>();
        return m;
    }
    if (type == "knn_classifier") {
        auto m = std::make_unique<KnnClassifier>();
        m->k = j.at("k").get<std::size_t>();
        m->train_features = j.at("train_features").get<std::vector<std::vector<double>>>();
        m->labels = j.at("labels").get<std::vector<int>>();
        return m;
    }
    if (type == "random_classifier") {
        auto m = std::make_unique<RandomOutputClassifier>();
        m->salt = j.at("salt").get<std::uint64_t>();
        return m;
    }
    throw std::runtime_error("unknown classifier type: " + type);
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ols") {
        auto m = std::make_unique<OlsRegressor>();
        m->intercept = j.at("intercept").get<double>();
        m->coefficients = j.at("coefficients").get<std::vector<double>>();
        return m;
    }
    if (type == "knn_regressor") {
        auto m = std::make_unique<KnnRegressor>();
        m->k = j.at("k").get<std::size_t>();
        m->train_features = j.at("train_features").get<std::vector<std::vector<double>>>();
        m->outcomes = j.at("outcomes").get<std::vector<double>>();
        return m;
    }
    if (type == "constant") {
        auto m = std::make_unique<ConstantRegressor>();
        m->value = j.at("value").get<double>();
        return m;
    }
    throw std::runtime_error("unknown regressor type: " + type);
}

}  // namespace cpci
