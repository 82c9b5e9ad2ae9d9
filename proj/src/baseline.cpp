#include "compsurv/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace compsurv {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727; // 0.5 * log(2*pi)
}

nlohmann::json BaselineCurve::to_json() const {
    return {{"times", grid.steps}, {"hazard_score", hazard_score}, {"survival", survival}};
}

BaselineCurve BaselineCurve::from_json(const nlohmann::json& j) {
    BaselineCurve c;
    c.grid.steps = j.at("times").get<std::vector<long>>();
    c.hazard_score = j.at("hazard_score").get<std::vector<double>>();
    c.survival = j.at("survival").get<std::vector<double>>();
    return c;
}

nlohmann::json CensoringCurve::to_json() const {
    return {{"times", grid.steps}, {"g", g}};
}

CensoringCurve CensoringCurve::from_json(const nlohmann::json& j) {
    CensoringCurve c;
    c.grid.steps = j.at("times").get<std::vector<long>>();
    c.g = j.at("g").get<std::vector<double>>();
    return c;
}

GaussianParams mle_params(const std::vector<double>& history) {
    if (history.empty()) throw DataError("mle_params: empty history");
    const double n = static_cast<double>(history.size());
    double sum = 0.0;
    for (double x : history) sum += x;
    const double mu = sum / n;
    double ss = 0.0;
    for (double x : history) {
        const double d = x - mu;
        ss += d * d;
    }
    GaussianParams p;
    p.mu = mu;
    p.sigma = std::max(std::sqrt(ss / n), kSigmaFloor);
    return p;
}

double loglik_term(const std::vector<double>& history, const GaussianParams& params) {
    if (history.empty()) throw DataError("loglik_term: empty history");
    double acc = 1.0;
    const double log_norm = -kHalfLog2Pi - std::log(params.sigma);
    for (double x : history) {
        const double z = (x - params.mu) / params.sigma;
        acc += log_norm - 0.5 * z * z;
    }
    return acc;
}

BaselineCurve fit_bayesian_baseline(const SurvivalDataset& train, const TimeGrid& grid,
                                    bool raw) {
    train.validate();
    const std::size_t n_steps = grid.size();
    const std::size_t p = train.width();

    // Event covariate values bucketed by discretized step.
    std::vector<std::vector<std::size_t>> events_at(n_steps);
    std::size_t n_events = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.records[i].event != 1) continue;
        const long t = discretize_time(train.records[i].event_time);
        events_at[grid.index_of(t)].push_back(i);
        ++n_events;
    }
    if (n_events == 0) throw DataError("no events in training data");

    // Running history moments per covariate; the closed form of the shifted
    // log-likelihood only needs count, sum and sum of squares.
    std::vector<double> sum(p, 0.0), sumsq(p, 0.0);
    std::vector<double> accum(p, 0.0); // log-space accumulator A_i
    std::size_t count = 0;
    std::size_t last_update_count = 0;

    std::vector<double> h(n_steps, 0.0);
    auto absorb = [&](std::size_t j) {
        for (std::size_t idx : events_at[j]) {
            const auto& x = train.records[idx].covariates;
            for (std::size_t c = 0; c < p; ++c) {
                sum[c] += x[c];
                sumsq[c] += x[c] * x[c];
            }
            ++count;
        }
    };

    absorb(0); // events at t_0 join the history, the prior stays uninformative
    h[0] = 0.0;
    for (std::size_t j = 1; j < n_steps; ++j) {
        absorb(j);
        if (count > last_update_count) {
            const double n = static_cast<double>(count);
            for (std::size_t c = 0; c < p; ++c) {
                const double mu = sum[c] / n;
                double ss = sumsq[c] - n * mu * mu;
                if (ss < 0.0) ss = 0.0;
                const double sigma = std::max(std::sqrt(ss / n), kSigmaFloor);
                accum[c] += 1.0 + n * (-kHalfLog2Pi - std::log(sigma)) -
                            0.5 * ss / (sigma * sigma);
            }
            last_update_count = count;
        }
        double total = 0.0;
        for (std::size_t c = 0; c < p; ++c) total += accum[c];
        h[j] = total;
    }

    // Normalizer for 1 - h/max(h). h(t_0) = 0, so max >= 0; when the
    // accumulator only ever decreases the max degenerates to that leading
    // zero and the largest negative value carries the scale instead (the
    // final curve is invariant to the positive part of this affine choice).
    double divisor = *std::max_element(h.begin(), h.end());
    if (divisor <= 0.0) {
        divisor = 0.0;
        for (double v : h)
            if (v < 0.0 && (divisor == 0.0 || v > divisor)) divisor = v;
        if (divisor == 0.0) divisor = 1.0; // h identically zero
    }

    BaselineCurve curve;
    curve.grid = grid;
    curve.hazard_score = h;
    curve.survival.resize(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j)
        curve.survival[j] = 1.0 - h[j] / divisor;

    if (!raw) {
        // Monotone non-increasing envelope, then affine rescale to [0,1].
        double running = curve.survival[0];
        for (std::size_t j = 0; j < n_steps; ++j) {
            running = std::min(running, curve.survival[j]);
            curve.survival[j] = running;
        }
        const double hi = curve.survival.front();
        const double lo = curve.survival.back();
        if (hi > lo) {
            for (auto& s : curve.survival) s = (s - lo) / (hi - lo);
        } else {
            std::fill(curve.survival.begin(), curve.survival.end(), 1.0);
        }
    }
    return curve;
}

BaselineCurve fit_km_baseline(const SurvivalDataset& train, const TimeGrid& grid) {
    train.validate();
    const std::size_t n_steps = grid.size();
    std::vector<double> deaths(n_steps, 0.0), leaving(n_steps, 0.0);
    for (const auto& r : train.records) {
        const std::size_t j = grid.index_of(discretize_time(r.event_time));
        leaving[j] += 1.0;
        if (r.event == 1) deaths[j] += 1.0;
    }
    BaselineCurve curve;
    curve.grid = grid;
    curve.hazard_score.assign(n_steps, 0.0);
    curve.survival.assign(n_steps, 1.0);
    double at_risk = static_cast<double>(train.size());
    double s = 1.0;
    for (std::size_t j = 0; j < n_steps; ++j) {
        if (at_risk > 0.0 && deaths[j] > 0.0) {
            curve.hazard_score[j] = deaths[j] / at_risk;
            s *= 1.0 - deaths[j] / at_risk;
        }
        curve.survival[j] = s;
        at_risk -= leaving[j];
    }
    return curve;
}

CensoringCurve fit_censoring_km(const SurvivalDataset& train, const TimeGrid& grid) {
    SurvivalDataset flipped = train;
    for (auto& r : flipped.records) r.event = 1 - r.event;
    const BaselineCurve km = fit_km_baseline(flipped, grid);
    CensoringCurve curve;
    curve.grid = grid;
    curve.g.resize(km.survival.size());
    for (std::size_t j = 0; j < km.survival.size(); ++j)
        curve.g[j] = std::max(km.survival[j], kCensorFloor);
    return curve;
}

} // namespace compsurv
