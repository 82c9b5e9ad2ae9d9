#include "compsurv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace compsurv {

namespace {

double or_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::vector<std::pair<long, double>> curve_from_json(const nlohmann::json& j) {
    std::vector<std::pair<long, double>> out;
    for (const auto& p : j) out.emplace_back(p.at(0).get<long>(), p.at(1).get<double>());
    return out;
}

nlohmann::json curve_to_json(const std::vector<std::pair<long, double>>& curve) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [t, v] : curve) j.push_back({t, v});
    return j;
}

} // namespace

nlohmann::json MetricReport::to_json() const {
    return {{"c_index", c_index},
            {"ibs", ibs},
            {"mean_auc", {{"as_written", mean_auc_as_written}, {"unsquared", mean_auc_unsquared}}},
            {"brier_curve", curve_to_json(brier_curve)},
            {"auc_curve", curve_to_json(auc_curve)}};
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
    MetricReport r;
    r.c_index = or_nan(j.at("c_index"));
    r.ibs = or_nan(j.at("ibs"));
    r.mean_auc_as_written = or_nan(j.at("mean_auc").at("as_written"));
    r.mean_auc_unsquared = or_nan(j.at("mean_auc").at("unsquared"));
    r.brier_curve = curve_from_json(j.at("brier_curve"));
    r.auc_curve = curve_from_json(j.at("auc_curve"));
    return r;
}

double brier_at(const SurvivalCurveMatrix& curves, const SurvivalDataset& test, long t,
                const CensoringCurve& g) {
    if (curves.n_members() != test.size())
        throw DataError("brier_at: curve/test size mismatch");
    const std::size_t col = curves.grid.index_of(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const long ti = discretize_time(test.records[i].event_time);
        const double s = curves.values[i][col];
        if (ti <= t && test.records[i].event == 1) {
            acc += s * s / g.at_prev(ti);
        } else if (ti > t) {
            acc += (1.0 - s) * (1.0 - s) / g.at(t);
        }
        // censored before t contributes nothing
    }
    return acc / static_cast<double>(test.size());
}

double integrated_brier(const std::vector<std::pair<long, double>>& brier_curve,
                        long t1, long t2) {
    if (t1 >= t2) throw ConfigError("integrated_brier: need t1 < t2");
    std::vector<std::pair<long, double>> pts;
    for (const auto& p : brier_curve)
        if (p.first >= t1 && p.first <= t2) pts.push_back(p);
    if (pts.size() < 2) throw DataError("integrated_brier: fewer than two points in window");
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        area += 0.5 * (pts[k].second + pts[k + 1].second) *
                static_cast<double>(pts[k + 1].first - pts[k].first);
    return area / static_cast<double>(t2 - t1);
}

double c_index_antolini(const SurvivalCurveMatrix& curves, const SurvivalDataset& test) {
    if (curves.n_members() != test.size())
        throw DataError("c_index: curve/test size mismatch");
    const std::size_t n = test.size();
    double concordant = 0.0;
    double comparable = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (test.records[j].event != 1) continue;
        const long tj = discretize_time(test.records[j].event_time);
        const std::size_t col = curves.grid.index_of(tj);
        const double sj = curves.values[j][col];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            if (discretize_time(test.records[i].event_time) <= tj) continue;
            comparable += 1.0;
            const double si = curves.values[i][col];
            if (sj < si)
                concordant += 1.0;
            else if (sj == si)
                concordant += 0.5;
        }
    }
    if (comparable == 0.0)
        throw DataError("c_index: no comparable pairs (need an event preceding another "
                        "member's observation time)");
    return concordant / comparable;
}

double auc_at(const std::vector<double>& risk, const SurvivalDataset& test, long t,
              const CensoringCurve& g, AucTieRule ties) {
    if (risk.size() != test.size()) throw DataError("auc_at: risk/test size mismatch");
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const long ti = discretize_time(test.records[i].event_time);
        if (ti > t)
            controls.push_back(i);
        else if (test.records[i].event == 1)
            cases.push_back(i);
    }
    if (cases.empty() || controls.empty())
        throw DataError("auc_at: a comparison group is empty at t=" + std::to_string(t));
    double num = 0.0;
    double weight_sum = 0.0;
    for (std::size_t i : cases) {
        const double w = 1.0 / g.at_prev(discretize_time(test.records[i].event_time));
        weight_sum += w;
        for (std::size_t j : controls) {
            if (ties == AucTieRule::FullCredit) {
                if (risk[j] <= risk[i]) num += w;
            } else {
                if (risk[j] < risk[i])
                    num += w;
                else if (risk[j] == risk[i])
                    num += 0.5 * w;
            }
        }
    }
    return num / (static_cast<double>(controls.size()) * weight_sum);
}

double mean_auc(const std::vector<std::pair<long, double>>& auc_curve,
                const BaselineCurve& weights, long tau1, long tau2, MeanAucVariant variant) {
    if (tau1 >= tau2) throw ConfigError("mean_auc: need tau1 < tau2");
    const double s1 = weights.survival_at(tau1);
    const double s2 = weights.survival_at(tau2);
    const double norm = s1 - s2;
    if (norm == 0.0) throw DataError("mean_auc: baseline survival is flat over the window");
    std::vector<std::pair<long, double>> pts;
    for (const auto& p : auc_curve)
        if (p.first > tau1 && p.first <= tau2) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    long prev = tau1;
    for (const auto& [t, a] : pts) {
        acc += a * (weights.survival_at(prev) - weights.survival_at(t));
        prev = t;
    }
    return variant == MeanAucVariant::AsWritten ? acc / (norm * norm) : acc / norm;
}

MetricReport evaluate(const CompositeModel& model, const SurvivalDataset& test,
                      const EvalProtocol& protocol) {
    test.validate();
    SurvivalDataset discretized = test;
    for (auto& r : discretized.records)
        r.event_time = static_cast<double>(discretize_time(r.event_time));

    const SurvivalCurveMatrix curves = predict_curves(model, discretized.covariate_matrix());
    const long horizon = model.grid.horizon();

    MetricReport report;
    report.c_index = c_index_antolini(curves, discretized);

    for (long t : model.grid.steps)
        report.brier_curve.emplace_back(t, brier_at(curves, discretized, t, model.censoring));
    const long t1 = protocol.ibs_t1 >= 0 ? protocol.ibs_t1 : model.grid.steps.front();
    const long t2 = protocol.ibs_t2 >= 0 ? protocol.ibs_t2 : horizon;
    report.ibs = integrated_brier(report.brier_curve, t1, t2);

    // Single risk estimate per member: probability of failure at the last step.
    std::vector<double> risk(curves.n_members());
    for (std::size_t i = 0; i < risk.size(); ++i)
        risk[i] = 1.0 - curves.values[i].back();

    std::vector<long> auc_times = protocol.auc_times;
    if (auc_times.empty()) {
        for (long t = 7; t <= 84; t += 7)
            if (t <= horizon) auc_times.push_back(t);
        if (horizon >= 90) auc_times.push_back(90);
    }
    for (long t : auc_times) {
        if (t > horizon) continue;
        try {
            report.auc_curve.emplace_back(
                t, auc_at(risk, discretized, t, model.censoring, protocol.auc_ties));
        } catch (const DataError&) {
            // step skipped: one of the comparison groups is empty
        }
    }

    report.mean_auc_as_written = std::numeric_limits<double>::quiet_NaN();
    report.mean_auc_unsquared = std::numeric_limits<double>::quiet_NaN();
    if (!report.auc_curve.empty()) {
        const long tau1 = model.grid.steps.front();
        const long tau2 = report.auc_curve.back().first;
        try {
            report.mean_auc_as_written =
                mean_auc(report.auc_curve, model.baseline, tau1, tau2, MeanAucVariant::AsWritten);
            report.mean_auc_unsquared =
                mean_auc(report.auc_curve, model.baseline, tau1, tau2, MeanAucVariant::Unsquared);
        } catch (const DataError&) {
            // flat baseline over the window, summary left undefined
        }
    }
    return report;
}

} // namespace compsurv
