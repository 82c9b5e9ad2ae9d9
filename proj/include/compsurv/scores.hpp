#ifndef COMPSURV_SCORES_HPP
#define COMPSURV_SCORES_HPP

#include <utility>
#include <vector>

#include "compsurv/dataset.hpp"
#include "json.hpp"

namespace compsurv {

struct TrainConfig {
    double learning_rate = 0.1;
    int max_iters = 1000;
    double l2 = 1e-4;
    double tol = 1e-8;
};

/// Logistic regression weights; the bias participates in training only,
/// survival scores are the plain dot product w.x.
struct ScoreModel {
    std::vector<double> weights;
    double bias = 0.0;
    TrainConfig config;
    std::vector<double> loss_trace; // per-iteration training loss, not serialized

    nlohmann::json to_json() const;
    static ScoreModel from_json(const nlohmann::json& j);
};

/// Raw-score extrema fitted on training data, reused (with clamping) on
/// held-out members.
struct ScoreNormalization {
    double min_r = 0.0;
    double max_r = 0.0;
};

/// Mean cross-entropy plus 0.5 * l2 * |w|^2 (bias unpenalized).
double logistic_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& w, double bias, double l2);

void logistic_gradient(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const std::vector<double>& w, double bias, double l2,
                       std::vector<double>& grad_w, double& grad_b);

/// Full-batch gradient descent from zero initialization; stops when the loss
/// change drops below tol or max_iters is reached. Labels are the event
/// indicators, time is ignored.
ScoreModel train_classifier(const SurvivalDataset& train, const TrainConfig& config = {});

std::vector<double> raw_scores(const ScoreModel& model,
                               const std::vector<std::vector<double>>& X);

/// r_i -> (|min r| + r_i) / (|min r| + max r). A zero denominator (all raw
/// scores equal and non-positive) maps everything to 0.5 with a warning.
std::pair<std::vector<double>, ScoreNormalization>
normalize_scores(const std::vector<double>& r);

/// Training-time normalization applied to one held-out raw score (clamped
/// into the fitted [min_r, max_r] first).
double apply_normalization(const ScoreNormalization& norm, double r);

} // namespace compsurv

#endif
