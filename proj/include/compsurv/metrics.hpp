#ifndef COMPSURV_METRICS_HPP
#define COMPSURV_METRICS_HPP

#include <utility>
#include <vector>

#include "compsurv/composite.hpp"
#include "json.hpp"

namespace compsurv {

/// Eq-literal tie handling awards full credit to tied risks; HalfCredit is the
/// conventional strict-inequality-plus-half-ties variant for cross-checking.
enum class AucTieRule { FullCredit, HalfCredit };

enum class MeanAucVariant { AsWritten, Unsquared };

struct EvalProtocol {
    /// AUC evaluation times; empty means weekly steps {7,14,...,84,90}
    /// intersected with the model grid.
    std::vector<long> auc_times;
    /// Brier integration window; negative bounds mean the full grid.
    long ibs_t1 = -1;
    long ibs_t2 = -1;
    AucTieRule auc_ties = AucTieRule::FullCredit;
};

struct MetricReport {
    double c_index = 0.0;
    double ibs = 0.0;
    double mean_auc_as_written = 0.0;
    double mean_auc_unsquared = 0.0;
    std::vector<std::pair<long, double>> brier_curve;
    std::vector<std::pair<long, double>> auc_curve;

    nlohmann::json to_json() const;
    static MetricReport from_json(const nlohmann::json& j);
};

/// IPCW Brier score at grid step t. Test event times are taken on the grid
/// scale (already discretized); g must come from the training fold.
double brier_at(const SurvivalCurveMatrix& curves, const SurvivalDataset& test, long t,
                const CensoringCurve& g);

/// Trapezoidal mean of the Brier curve over [t1, t2].
double integrated_brier(const std::vector<std::pair<long, double>>& brier_curve,
                        long t1, long t2);

/// Antolini's time-dependent concordance: pairs (i,j) with T_i > T_j and
/// D_j = 1 are concordant when member j's predicted survival at its own event
/// time is below member i's; ties count one half.
double c_index_antolini(const SurvivalCurveMatrix& curves, const SurvivalDataset& test);

/// IPCW time-dependent AUC at grid step t for scalar risks f (higher = worse).
double auc_at(const std::vector<double>& risk, const SurvivalDataset& test, long t,
              const CensoringCurve& g, AucTieRule ties = AucTieRule::FullCredit);

/// Stieltjes mean of the AUC curve over (tau1, tau2], weighted by drops of the
/// baseline survival; normalized by (S(tau1)-S(tau2))^2 as written or by the
/// plain difference for the unsquared variant.
double mean_auc(const std::vector<std::pair<long, double>>& auc_curve,
                const BaselineCurve& weights, long tau1, long tau2, MeanAucVariant variant);

/// Full evaluation suite. Test covariates must carry the model's
/// preprocessing; event times may still be raw (they are discretized here).
MetricReport evaluate(const CompositeModel& model, const SurvivalDataset& test,
                      const EvalProtocol& protocol = {});

} // namespace compsurv

#endif
