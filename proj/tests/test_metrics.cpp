#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "compsurv/metrics.hpp"

using namespace compsurv;

namespace {

TimeGrid make_grid(long horizon) {
    TimeGrid g;
    for (long t = 0; t <= horizon; ++t) g.steps.push_back(t);
    return g;
}

SurvivalDataset outcomes(const std::vector<double>& times, const std::vector<int>& events) {
    SurvivalDataset ds;
    ds.covariate_names = {"x"};
    ds.covariate_kinds = {CovariateKind::Continuous};
    for (std::size_t i = 0; i < times.size(); ++i)
        ds.records.push_back({{0.0}, times[i], events[i]});
    return ds;
}

SurvivalCurveMatrix curve_matrix(long horizon, const std::vector<std::vector<double>>& rows) {
    SurvivalCurveMatrix m;
    m.grid = make_grid(horizon);
    m.values = rows;
    for (std::size_t i = 0; i < rows.size(); ++i) m.member_ids.push_back(std::to_string(i));
    return m;
}

CensoringCurve unit_censoring(long horizon) {
    CensoringCurve g;
    g.grid = make_grid(horizon);
    g.g.assign(g.grid.size(), 1.0);
    return g;
}

} // namespace

TEST_CASE("brier_at exact value without censoring") {
    // event member predicted 0.5 at its own time, survivor predicted 0.5
    const auto curves = curve_matrix(2, {{1.0, 0.5, 0.2}, {1.0, 0.5, 0.4}});
    const auto test = outcomes({1, 2}, {1, 1});
    CHECK(brier_at(curves, test, 1, unit_censoring(2)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("brier_at ipcw weighting uses G at t-minus for events") {
    const auto curves = curve_matrix(2, {{1.0, 0.3, 0.1}, {1.0, 0.6, 0.4}, {1.0, 0.5, 0.2}});
    const auto test = outcomes({1, 2, 1}, {1, 0, 0});
    CensoringCurve g;
    g.grid = make_grid(2);
    g.g = {1.0, 0.8, 0.6};
    // event at 1: 0.3^2 / G(0);  alive at 1: 0.4^2 / G(1);  censored at 1: dropped
    const double expected = (0.09 / 1.0 + 0.16 / 0.8 + 0.0) / 3.0;
    CHECK(brier_at(curves, test, 1, g) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("brier_at matches the plain brier score on uncensored data") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long horizon = 6;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> rows;
        std::vector<double> times;
        std::vector<int> events;
        for (int i = 0; i < 25; ++i) {
            std::vector<double> row(horizon + 1, 1.0);
            for (std::size_t j = 1; j < row.size(); ++j) row[j] = row[j - 1] * unit(rng);
            rows.push_back(row);
            times.push_back(std::floor(unit(rng) * horizon));
            events.push_back(1);
        }
        const auto curves = curve_matrix(horizon, rows);
        const auto test = outcomes(times, events);
        for (long t = 0; t <= horizon; ++t) {
            double brute = 0.0;
            for (int i = 0; i < 25; ++i) {
                const double ind = times[static_cast<std::size_t>(i)] > t ? 1.0 : 0.0;
                const double s = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
                brute += (ind - s) * (ind - s);
            }
            brute /= 25.0;
            CHECK(brier_at(curves, test, t, unit_censoring(horizon)) ==
                  doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("integrated_brier trapezoid values and window handling") {
    const std::vector<std::pair<long, double>> curve = {{0, 0.1}, {1, 0.3}, {2, 0.2}};
    CHECK(integrated_brier(curve, 0, 2) == doctest::Approx(0.225).epsilon(1e-12));
    CHECK(integrated_brier(curve, 1, 2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(integrated_brier(curve, 2, 2), ConfigError);
    CHECK_THROWS_AS(integrated_brier(curve, 5, 9), DataError);
}

TEST_CASE("c_index hand examples") {
    const auto test = outcomes({1, 2, 3}, {1, 1, 0});
    const auto good = curve_matrix(3, {{1, 0.2, 0.1, 0.0}, {1, 0.5, 0.3, 0.2}, {1, 0.8, 0.7, 0.6}});
    CHECK(c_index_antolini(good, test) == doctest::Approx(1.0));

    const auto bad = curve_matrix(3, {{1, 0.8, 0.7, 0.6}, {1, 0.5, 0.3, 0.2}, {1, 0.2, 0.1, 0.0}});
    CHECK(c_index_antolini(bad, test) == doctest::Approx(0.0));

    // one tied pair at the earlier member's event time counts one half
    const auto tied = curve_matrix(3, {{1, 0.5, 0.1, 0.0}, {1, 0.5, 0.3, 0.2}, {1, 0.8, 0.7, 0.6}});
    CHECK(c_index_antolini(tied, test) == doctest::Approx(2.5 / 3.0));
}

TEST_CASE("c_index censored members only appear as the later element of a pair") {
    // the censored early member must not contribute pairs of its own
    const auto test = outcomes({1, 2}, {0, 1});
    const auto curves = curve_matrix(2, {{1, 0.9, 0.8}, {1, 0.2, 0.1}});
    // the only event is at t=2, nothing is observed beyond it
    CHECK_THROWS_AS(c_index_antolini(curves, test), DataError);
}

TEST_CASE("c_index flips under curve reversal") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.001, 1.0);
    const long horizon = 8;
    std::vector<std::vector<double>> rows, flipped;
    std::vector<double> times;
    std::vector<int> events;
    for (int i = 0; i < 30; ++i) {
        std::vector<double> row(horizon + 1, 1.0);
        for (std::size_t j = 1; j < row.size(); ++j) row[j] = row[j - 1] * unit(rng);
        std::vector<double> neg(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) neg[j] = 1.0 - row[j];
        rows.push_back(row);
        flipped.push_back(neg);
        times.push_back(std::floor(unit(rng) * horizon));
        events.push_back(i % 4 == 0 ? 0 : 1);
    }
    const auto test = outcomes(times, events);
    const double c = c_index_antolini(curve_matrix(horizon, rows), test);
    const double c_flip = c_index_antolini(curve_matrix(horizon, flipped), test);
    CHECK(c + c_flip == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("auc_at tie handling") {
    // case risk 0.9; controls at 0.5 and 0.9
    const auto test = outcomes({1, 2, 2}, {1, 1, 1});
    const std::vector<double> risk = {0.9, 0.5, 0.9};
    const auto g = unit_censoring(2);
    CHECK(auc_at(risk, test, 1, g, AucTieRule::FullCredit) == doctest::Approx(1.0));
    CHECK(auc_at(risk, test, 1, g, AucTieRule::HalfCredit) == doctest::Approx(0.75));
}

TEST_CASE("auc_at separates a perfect ranking") {
    const auto test = outcomes({1, 1, 3, 3}, {1, 1, 1, 1});
    const std::vector<double> risk = {0.9, 0.8, 0.2, 0.1};
    const auto g = unit_censoring(3);
    CHECK(auc_at(risk, test, 1, g) == doctest::Approx(1.0));
    const std::vector<double> reversed = {0.1, 0.2, 0.8, 0.9};
    CHECK(auc_at(reversed, test, 1, g, AucTieRule::HalfCredit) == doctest::Approx(0.0));
}

TEST_CASE("auc_at ipcw weights come from G at the case's t-minus") {
    const auto test = outcomes({1, 2, 3, 3}, {1, 1, 1, 1});
    const std::vector<double> risk = {0.9, 0.4, 0.5, 0.1};
    CensoringCurve g;
    g.grid = make_grid(3);
    g.g = {1.0, 0.5, 0.25, 0.25};
    // cases at t<=2: weights 1/G(0)=1 and 1/G(1)=2; controls {0.5, 0.1}
    // case risks 0.9 (beats both) and 0.4 (beats only 0.1)
    const double expected = (1.0 * 2.0 + 2.0 * 1.0) / (2.0 * 3.0);
    CHECK(auc_at(risk, test, 2, g, AucTieRule::FullCredit) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("auc_at needs both comparison groups") {
    const auto test = outcomes({1, 1}, {1, 1});
    CHECK_THROWS_AS(auc_at({0.5, 0.5}, test, 1, unit_censoring(1)), DataError);
}

TEST_CASE("mean_auc two-step hand example") {
    BaselineCurve weights;
    weights.grid = make_grid(2);
    weights.survival = {1.0, 0.6, 0.2};
    weights.hazard_score = {0, 0, 0};
    const std::vector<std::pair<long, double>> auc = {{1, 0.5}, {2, 0.9}};
    CHECK(mean_auc(auc, weights, 0, 2, MeanAucVariant::Unsquared) ==
          doctest::Approx(0.7).epsilon(1e-12));
    CHECK(mean_auc(auc, weights, 0, 2, MeanAucVariant::AsWritten) ==
          doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("mean_auc of a constant auc curve is that constant (unsquared)") {
    BaselineCurve weights;
    weights.grid = make_grid(4);
    weights.survival = {1.0, 0.8, 0.5, 0.3, 0.1};
    weights.hazard_score.assign(5, 0.0);
    const std::vector<std::pair<long, double>> auc = {{1, 0.65}, {2, 0.65}, {3, 0.65}, {4, 0.65}};
    CHECK(mean_auc(auc, weights, 0, 4, MeanAucVariant::Unsquared) ==
          doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("mean_auc error paths") {
    BaselineCurve weights;
    weights.grid = make_grid(2);
    weights.survival = {1.0, 1.0, 1.0};
    weights.hazard_score.assign(3, 0.0);
    const std::vector<std::pair<long, double>> auc = {{1, 0.5}};
    CHECK_THROWS_AS(mean_auc(auc, weights, 2, 1, MeanAucVariant::Unsquared), ConfigError);
    CHECK_THROWS_AS(mean_auc(auc, weights, 0, 2, MeanAucVariant::Unsquared), DataError);
}

namespace {

SurvivalDataset synth_cohort(unsigned seed, std::size_t n, double censoring) {
    SynthConfig cfg;
    cfg.n = n;
    cfg.n_covariates = 3;
    cfg.hazard = {0.25};
    cfg.censoring_rate = censoring;
    cfg.seed = seed;
    return synth_generate(cfg);
}

} // namespace

TEST_CASE("evaluate produces a full, in-range report") {
    const auto model = fit(synth_cohort(1, 400, 0.25));
    auto test = synth_cohort(2, 200, 0.25);
    test = standardize(test, model.preprocessing.stats).first;
    const auto report = evaluate(model, test);

    CHECK(report.c_index >= 0.0);
    CHECK(report.c_index <= 1.0);
    CHECK(report.ibs >= 0.0);
    CHECK(report.brier_curve.size() == model.grid.size());
    for (const auto& [t, v] : report.auc_curve) {
        CHECK(t % 7 == 0);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    if (!report.auc_curve.empty()) {
        CHECK(std::isfinite(report.mean_auc_unsquared));
    }
}

TEST_CASE("evaluate honours a custom protocol") {
    const auto model = fit(synth_cohort(3, 400, 0.2));
    auto test = synth_cohort(4, 200, 0.2);
    test = standardize(test, model.preprocessing.stats).first;

    EvalProtocol protocol;
    protocol.auc_times = {2, 4, 10000}; // out-of-grid times are dropped
    protocol.ibs_t1 = 0;
    protocol.ibs_t2 = 5;
    const auto report = evaluate(model, test, protocol);
    for (const auto& [t, v] : report.auc_curve) CHECK((t == 2 || t == 4));

    std::vector<std::pair<long, double>> window;
    for (const auto& p : report.brier_curve)
        if (p.first <= 5) window.push_back(p);
    CHECK(report.ibs == doctest::Approx(integrated_brier(window, 0, 5)).epsilon(1e-12));
}

TEST_CASE("metric report json round trips with NaN as null") {
    MetricReport r;
    r.c_index = 0.61;
    r.ibs = 0.18;
    r.mean_auc_as_written = std::numeric_limits<double>::quiet_NaN();
    r.mean_auc_unsquared = 0.7;
    r.brier_curve = {{0, 0.1}, {5, 0.2}};
    r.auc_curve = {{7, 0.66}};

    const auto j = nlohmann::json::parse(r.to_json().dump());
    CHECK(j.at("mean_auc").at("as_written").is_null());
    const auto back = MetricReport::from_json(j);
    CHECK(back.c_index == r.c_index);
    CHECK(std::isnan(back.mean_auc_as_written));
    CHECK(back.mean_auc_unsquared == r.mean_auc_unsquared);
    CHECK(back.brier_curve == r.brier_curve);
}
