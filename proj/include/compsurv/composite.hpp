#ifndef COMPSURV_COMPOSITE_HPP
#define COMPSURV_COMPOSITE_HPP

#include <string>
#include <vector>

#include "compsurv/baseline.hpp"
#include "compsurv/dataset.hpp"
#include "compsurv/scores.hpp"
#include "json.hpp"

namespace compsurv {

enum class BaselineKind { Bayesian, KaplanMeier };

/// How predicted curves are mapped back onto [0,1]: each member divided by its
/// own maximum (default, anchors every curve at 1), or the whole matrix
/// divided by its global maximum.
enum class CurveScaling { PerMember, Global };

struct FitOptions {
    BaselineKind baseline = BaselineKind::Bayesian;
    TrainConfig classifier;
    bool raw_baseline = false;
    CurveScaling scaling = CurveScaling::PerMember;
};

/// Everything needed to reproduce predictions on raw CSV input.
struct Preprocessing {
    StandardizationStats stats;
    OneHotVocab vocab;
    CsvSchema schema;
    std::vector<std::string> covariate_names;
    std::vector<CovariateKind> covariate_kinds;
};

struct CompositeModel {
    BaselineCurve baseline;
    BaselineKind baseline_kind = BaselineKind::Bayesian;
    CensoringCurve censoring; // fitted on the training fold, used by the metrics
    ScoreModel scores;
    ScoreNormalization norm;
    TimeGrid grid;
    Preprocessing preprocessing;
    CurveScaling scaling = CurveScaling::PerMember;

    nlohmann::json to_json() const;
    static CompositeModel from_json(const nlohmann::json& j);
};

/// Per-member, per-step survival probabilities.
struct SurvivalCurveMatrix {
    std::vector<std::string> member_ids;
    TimeGrid grid;
    std::vector<std::vector<double>> values; // rows = members

    std::size_t n_members() const { return values.size(); }
};

/// Standardize -> discretize -> baseline fit -> classifier fit -> score
/// normalization, all on the same training fold.
CompositeModel fit(const SurvivalDataset& train, const FitOptions& options = {});

/// Table-level variant that also learns and stores the one-hot vocabularies.
CompositeModel fit_from_table(const RawTable& table, const CsvSchema& schema,
                              const FitOptions& options = {});

/// exp((1 + score) * baseline), divided by its own maximum.
std::vector<double> composed_curve(const std::vector<double>& baseline_survival,
                                   double normalized_score);

/// X must already carry the model's preprocessing (see apply_preprocessing).
SurvivalCurveMatrix predict_curves(const CompositeModel& model,
                                   const std::vector<std::vector<double>>& X);

/// Encode + standardize a raw table with the model's stored preprocessing.
/// Outcome columns are optional; rows without them get zero time/event.
SurvivalDataset apply_preprocessing(const CompositeModel& model, const RawTable& table);

void save_model(const CompositeModel& model, const std::string& path);
CompositeModel load_model(const std::string& path);

const char* baseline_kind_name(BaselineKind kind);
BaselineKind baseline_kind_from_name(const std::string& name);

} // namespace compsurv

#endif
