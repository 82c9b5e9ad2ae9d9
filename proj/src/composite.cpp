#include "compsurv/composite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace compsurv {

const char* baseline_kind_name(BaselineKind kind) {
    return kind == BaselineKind::Bayesian ? "bayesian" : "kaplan-meier";
}

BaselineKind baseline_kind_from_name(const std::string& name) {
    if (name == "bayesian" || name == "bayes") return BaselineKind::Bayesian;
    if (name == "kaplan-meier" || name == "km") return BaselineKind::KaplanMeier;
    throw ConfigError("unknown baseline kind: " + name);
}

nlohmann::json CompositeModel::to_json() const {
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [col, vals] : preprocessing.vocab) cats[col] = vals;
    std::vector<std::string> kinds;
    kinds.reserve(preprocessing.covariate_kinds.size());
    for (auto k : preprocessing.covariate_kinds)
        kinds.emplace_back(k == CovariateKind::Continuous ? "continuous" : "categorical-onehot");
    nlohmann::json j;
    j["version"] = kModelFormatVersion;
    j["baseline_kind"] = baseline_kind_name(baseline_kind);
    j["scaling"] = scaling == CurveScaling::PerMember ? "per-member" : "global";
    j["grid"] = {{"steps", grid.steps}};
    j["baseline"] = baseline.to_json();
    j["censoring"] = censoring.to_json();
    j["scores"] = scores.to_json();
    j["norm"] = {{"min", norm.min_r}, {"max", norm.max_r}};
    j["preprocessing"] = {
        {"covariate_names", preprocessing.covariate_names},
        {"covariate_kinds", kinds},
        {"mean", preprocessing.stats.mean},
        {"stddev", preprocessing.stats.stddev},
        {"schema",
         {{"duration", preprocessing.schema.duration_column},
          {"event", preprocessing.schema.event_column},
          {"categorical", cats}}}};
    return j;
}

CompositeModel CompositeModel::from_json(const nlohmann::json& j) {
    const std::string version = j.at("version").get<std::string>();
    if (version != kModelFormatVersion)
        throw DataError("unsupported model version '" + version + "' (expected '" +
                        std::string(kModelFormatVersion) + "')");
    CompositeModel m;
    m.baseline_kind = baseline_kind_from_name(j.at("baseline_kind").get<std::string>());
    m.scaling = j.at("scaling").get<std::string>() == "global" ? CurveScaling::Global
                                                               : CurveScaling::PerMember;
    m.grid.steps = j.at("grid").at("steps").get<std::vector<long>>();
    m.baseline = BaselineCurve::from_json(j.at("baseline"));
    m.censoring = CensoringCurve::from_json(j.at("censoring"));
    m.scores = ScoreModel::from_json(j.at("scores"));
    m.norm.min_r = j.at("norm").at("min").get<double>();
    m.norm.max_r = j.at("norm").at("max").get<double>();
    const auto& pp = j.at("preprocessing");
    m.preprocessing.covariate_names = pp.at("covariate_names").get<std::vector<std::string>>();
    for (const auto& k : pp.at("covariate_kinds"))
        m.preprocessing.covariate_kinds.push_back(k.get<std::string>() == "continuous"
                                                      ? CovariateKind::Continuous
                                                      : CovariateKind::CategoricalOneHot);
    m.preprocessing.stats.mean = pp.at("mean").get<std::vector<double>>();
    m.preprocessing.stats.stddev = pp.at("stddev").get<std::vector<double>>();
    const auto& schema = pp.at("schema");
    m.preprocessing.schema.duration_column = schema.at("duration").get<std::string>();
    m.preprocessing.schema.event_column = schema.at("event").get<std::string>();
    for (const auto& [col, vals] : schema.at("categorical").items()) {
        m.preprocessing.schema.categorical_columns.push_back(col);
        m.preprocessing.vocab[col] = vals.get<std::vector<std::string>>();
    }
    return m;
}

CompositeModel fit(const SurvivalDataset& train, const FitOptions& options) {
    train.validate();
    CompositeModel model;
    model.baseline_kind = options.baseline;
    model.scaling = options.scaling;

    auto [standardized, stats] = standardize(train);
    auto [discretized, grid] = discretize_times(standardized);
    model.grid = grid;
    model.preprocessing.stats = std::move(stats);
    model.preprocessing.covariate_names = train.covariate_names;
    model.preprocessing.covariate_kinds = train.covariate_kinds;

    model.baseline = options.baseline == BaselineKind::Bayesian
                         ? fit_bayesian_baseline(discretized, grid, options.raw_baseline)
                         : fit_km_baseline(discretized, grid);
    model.censoring = fit_censoring_km(discretized, grid);
    model.scores = train_classifier(discretized, options.classifier);
    const auto r = raw_scores(model.scores, discretized.covariate_matrix());
    model.norm = normalize_scores(r).second;
    return model;
}

CompositeModel fit_from_table(const RawTable& table, const CsvSchema& schema,
                              const FitOptions& options) {
    OneHotVocab vocab;
    const SurvivalDataset ds = encode_table(table, schema, nullptr, &vocab, true);
    CompositeModel model = fit(ds, options);
    model.preprocessing.vocab = std::move(vocab);
    model.preprocessing.schema = schema;
    return model;
}

std::vector<double> composed_curve(const std::vector<double>& baseline_survival,
                                   double normalized_score) {
    std::vector<double> row(baseline_survival.size());
    double max_v = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = std::exp((1.0 + normalized_score) * baseline_survival[j]);
        max_v = std::max(max_v, row[j]);
    }
    for (auto& v : row) v /= max_v;
    return row;
}

SurvivalCurveMatrix predict_curves(const CompositeModel& model,
                                   const std::vector<std::vector<double>>& X) {
    SurvivalCurveMatrix out;
    out.grid = model.grid;
    out.values.reserve(X.size());
    out.member_ids.reserve(X.size());
    double global_max = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != model.scores.weights.size())
            throw DataError("predict_curves: covariate width mismatch");
        double r = 0.0;
        for (std::size_t j = 0; j < X[i].size(); ++j)
            r += model.scores.weights[j] * X[i][j];
        const double score = apply_normalization(model.norm, r);
        std::vector<double> row(model.baseline.survival.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = std::exp((1.0 + score) * model.baseline.survival[j]);
            global_max = std::max(global_max, row[j]);
        }
        out.values.push_back(std::move(row));
        out.member_ids.push_back(std::to_string(i));
    }
    for (auto& row : out.values) {
        const double div = model.scaling == CurveScaling::PerMember
                               ? *std::max_element(row.begin(), row.end())
                               : global_max;
        for (auto& v : row) v /= div;
    }
    return out;
}

SurvivalDataset apply_preprocessing(const CompositeModel& model, const RawTable& table) {
    SurvivalDataset ds = encode_table(table, model.preprocessing.schema,
                                      &model.preprocessing.vocab, nullptr, false);
    if (ds.covariate_names != model.preprocessing.covariate_names)
        throw DataError("input columns do not match the model's covariates");
    return standardize(ds, model.preprocessing.stats).first;
}

void save_model(const CompositeModel& model, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw DataError("cannot write model file: " + path);
    file << model.to_json().dump(2) << "\n";
}

CompositeModel load_model(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        file >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
    try {
        return CompositeModel::from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
}

} // namespace compsurv
