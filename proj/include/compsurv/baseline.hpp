#ifndef COMPSURV_BASELINE_HPP
#define COMPSURV_BASELINE_HPP

#include <vector>

#include "compsurv/dataset.hpp"
#include "json.hpp"

namespace compsurv {

struct GaussianParams {
    double mu = 0.0;
    double sigma = kSigmaFloor;
};

/// Population-level curve: per-step hazard accumulator and baseline survival.
struct BaselineCurve {
    TimeGrid grid;
    std::vector<double> hazard_score;
    std::vector<double> survival;

    double survival_at(long t) const { return survival[grid.index_of(t)]; }

    nlohmann::json to_json() const;
    static BaselineCurve from_json(const nlohmann::json& j);
};

/// Kaplan-Meier estimate of the censoring distribution G(t), floored so IPCW
/// weights stay finite.
struct CensoringCurve {
    TimeGrid grid;
    std::vector<double> g;

    double at(long t) const { return g[grid.index_of(t)]; }
    /// G evaluated just before t (previous grid step; 1 at or before t_0).
    double at_prev(long t) const { return t <= grid.steps.front() ? 1.0 : at(t - 1); }

    nlohmann::json to_json() const;
    static CensoringCurve from_json(const nlohmann::json& j);
};

/// Sample mean and population standard deviation, sigma floored.
GaussianParams mle_params(const std::vector<double>& history);

/// 1 + sum_i [ log(1/sqrt(2 pi sigma^2)) - 0.5 ((x_i - mu)/sigma)^2 ].
double loglik_term(const std::vector<double>& history, const GaussianParams& params);

/**
 * Recursive Bayesian baseline. Per covariate, a log-space accumulator starts
 * at 0 (unit prior) and, at every step where the event history has grown,
 * adds the shifted Gaussian log-likelihood of the full history (mean/std by
 * MLE on events up to and including that step). The per-covariate
 * accumulators are summed into the hazard score h, survival is
 * 1 - h/max(h), and unless `raw` is set a running-minimum envelope plus
 * min-max rescale maps the curve onto a non-increasing [0,1] range.
 */
BaselineCurve fit_bayesian_baseline(const SurvivalDataset& train, const TimeGrid& grid,
                                    bool raw = false);

/// Product-limit estimate on the discretized grid; steps with an empty risk
/// set carry the previous value forward.
BaselineCurve fit_km_baseline(const SurvivalDataset& train, const TimeGrid& grid);

/// Product-limit with the censoring indicator treated as the event.
CensoringCurve fit_censoring_km(const SurvivalDataset& train, const TimeGrid& grid);

} // namespace compsurv

#endif
