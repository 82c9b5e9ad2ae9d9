#include "compsurv/scores.hpp"

#include <algorithm>
#include <cmath>

namespace compsurv {

nlohmann::json ScoreModel::to_json() const {
    return {{"weights", weights}, {"bias", bias}};
}

ScoreModel ScoreModel::from_json(const nlohmann::json& j) {
    ScoreModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    return m;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double softplus(double z) {
    // log(1 + e^z) without overflow
    return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

} // namespace

double logistic_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& w, double bias, double l2) {
    const double n = static_cast<double>(X.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double z = dot(w, X[i]) + bias;
        loss += softplus(z) - static_cast<double>(y[i]) * z;
    }
    loss /= n;
    for (double wj : w) loss += 0.5 * l2 * wj * wj;
    return loss;
}

void logistic_gradient(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const std::vector<double>& w, double bias, double l2,
                       std::vector<double>& grad_w, double& grad_b) {
    const double n = static_cast<double>(X.size());
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double resid = sigmoid(dot(w, X[i]) + bias) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += resid * X[i][j];
        grad_b += resid;
    }
    for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = grad_w[j] / n + l2 * w[j];
    grad_b /= n;
}

ScoreModel train_classifier(const SurvivalDataset& train, const TrainConfig& config) {
    train.validate();
    std::vector<int> y;
    y.reserve(train.size());
    for (const auto& r : train.records) y.push_back(r.event);
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    if (!has0 || !has1)
        throw DataError("classifier training needs both event classes present");

    const auto X = train.covariate_matrix();
    ScoreModel model;
    model.config = config;
    model.weights.assign(train.width(), 0.0);
    model.bias = 0.0;

    std::vector<double> grad_w;
    double grad_b = 0.0;
    double prev_loss = logistic_loss(X, y, model.weights, model.bias, config.l2);
    model.loss_trace.push_back(prev_loss);
    for (int it = 0; it < config.max_iters; ++it) {
        logistic_gradient(X, y, model.weights, model.bias, config.l2, grad_w, grad_b);
        for (std::size_t j = 0; j < model.weights.size(); ++j)
            model.weights[j] -= config.learning_rate * grad_w[j];
        model.bias -= config.learning_rate * grad_b;
        const double loss = logistic_loss(X, y, model.weights, model.bias, config.l2);
        model.loss_trace.push_back(loss);
        if (std::fabs(prev_loss - loss) < config.tol) break;
        prev_loss = loss;
    }
    return model;
}

std::vector<double> raw_scores(const ScoreModel& model,
                               const std::vector<std::vector<double>>& X) {
    std::vector<double> r;
    r.reserve(X.size());
    for (const auto& x : X) {
        if (x.size() != model.weights.size())
            throw DataError("raw_scores: covariate width mismatch");
        r.push_back(dot(model.weights, x));
    }
    return r;
}

std::pair<std::vector<double>, ScoreNormalization>
normalize_scores(const std::vector<double>& r) {
    if (r.empty()) throw DataError("normalize_scores: empty score vector");
    ScoreNormalization norm;
    norm.min_r = *std::min_element(r.begin(), r.end());
    norm.max_r = *std::max_element(r.begin(), r.end());
    const double denom = std::fabs(norm.min_r) + norm.max_r;
    std::vector<double> out(r.size());
    if (denom == 0.0) {
        log_warn("degenerate score range, mapping all scores to 0.5");
        std::fill(out.begin(), out.end(), 0.5);
        return {std::move(out), norm};
    }
    for (std::size_t i = 0; i < r.size(); ++i)
        out[i] = (std::fabs(norm.min_r) + r[i]) / denom;
    return {std::move(out), norm};
}

double apply_normalization(const ScoreNormalization& norm, double r) {
    const double clamped = std::clamp(r, norm.min_r, norm.max_r);
    const double denom = std::fabs(norm.min_r) + norm.max_r;
    if (denom == 0.0) return 0.5;
    return (std::fabs(norm.min_r) + clamped) / denom;
}

} // namespace compsurv
