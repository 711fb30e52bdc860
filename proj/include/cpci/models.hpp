#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpci/data.hpp"

namespace cpci {

// Estimates P(Y != 0 | X = x).  Output always in [0,1]; deterministic
// given fitted state, so predictions are safe to run in parallel.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual double predict_proba(const std::vector<double>& x) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict(const std::vector<double>& x) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

// Per-feature z-scoring with train statistics only; constant features
// are dropped (their indices are simply omitted from the kept list).
class Standardizer {
public:
    Standardizer() = default;
    static Standardizer fit(const Dataset& train);

    std::vector<double> transform(const std::vector<double>& x) const;
    Dataset transform(const Dataset& data) const;

    std::size_t output_dim() const { return kept_.size(); }
    std::size_t dropped_count() const { return input_dim_ - kept_.size(); }

    nlohmann::json to_json() const;
    static Standardizer from_json(const nlohmann::json& j);

private:
    std::size_t input_dim_ = 0;
    std::vector<std::size_t> kept_;
    std::vector<double> mean_, sd_;
};

// Least squares via normal equations; a small ridge stabilizer is added
// when the Gram matrix is near singular.
class OlsRegressor final : public Regressor {
public:
    double predict(const std::vector<double>& x) const override;
    nlohmann::json to_json() const override;

    double intercept = 0.0;
    std::vector<double> coefficients;
};

// Logistic regression by iteratively reweighted least squares with a
// 1e-6 ridge penalty; stops at gradient inf-norm < 1e-6 or 200 iterations.
class LogisticClassifier final : public Classifier {
public:
    double predict_proba(const std::vector<double>& x) const override;
    nlohmann::json to_json() const override;

    double intercept = 0.0;
    std::vector<double> coefficients;
};

// k nearest neighbors (Euclidean); distance ties break toward the lower
// training index.
class KnnClassifier final : public Classifier {
public:
    double predict_proba(const std::vector<double>& x) const override;
    nlohmann::json to_json() const override;

    std::size_t k = 1;
    std::vector<std::vector<double>> train_features;
    std::vector<int> labels;  // 1{y != 0}
};

class KnnRegressor final : public Regressor {
public:
    double predict(const std::vector<double>& x) const override;
    nlohmann::json to_json() const override;

    std::size_t k = 1;
    std::vector<std::vector<double>> train_features;
    std::vector<double> outcomes;
};

// Adversarial classifier: a deterministic hash of the feature bits mapped
// to [0,1].  Looks random, carries no signal; exists to exercise the
// model-agnostic coverage guarantee.
class RandomOutputClassifier final : public Classifier {
public:
    double predict_proba(const std::vector<double>& x) const override;
    nlohmann::json to_json() const override;

    std::uint64_t salt = 0;
};

class ConstantRegressor final : public Regressor {
public:
    double predict(const std::vector<double>&) const override { return value; }
    nlohmann::json to_json() const override;

    double value = 0.0;
};

Dataset nonzero_subset(const Dataset& data);

std::unique_ptr<OlsRegressor> fit_ols(const Dataset& train, bool nonzero_only = false);
std::unique_ptr<LogisticClassifier> fit_logistic(const Dataset& train);
std::unique_ptr<KnnClassifier> fit_knn_classifier(const Dataset& train, std::size_t k);
std::unique_ptr<KnnRegressor> fit_knn_regressor(const Dataset& train, std::size_t k,
                                                bool nonzero_only = false);

// default k for the k-NN built-ins: ceil(sqrt(|train|))
std::size_t default_knn_k(std::size_t n_train);

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);
std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j);

}  // namespace cpci
