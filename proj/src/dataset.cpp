#include "compsurv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace compsurv {

std::vector<std::vector<double>> SurvivalDataset::covariate_matrix() const {
    std::vector<std::vector<double>> X;
    X.reserve(records.size());
    for (const auto& r : records) X.push_back(r.covariates);
    return X;
}

void SurvivalDataset::validate() const {
    if (records.empty()) throw DataError("dataset is empty");
    if (covariate_names.size() != covariate_kinds.size())
        throw DataError("covariate names/kinds length mismatch");
    std::set<std::string> seen;
    for (const auto& n : covariate_names)
        if (!seen.insert(n).second)
            throw DataError("duplicate covariate name: " + n);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.covariates.size() != covariate_names.size())
            throw DataError("record " + std::to_string(i + 1) + " has inconsistent width");
        if (r.event != 0 && r.event != 1)
            throw DataError("record " + std::to_string(i + 1) + " has event outside {0,1}");
        if (!(r.event_time >= 0.0))
            throw DataError("record " + std::to_string(i + 1) + " has negative event time");
    }
}

std::size_t TimeGrid::index_of(long t) const {
    if (t <= steps.front()) return 0;
    auto it = std::upper_bound(steps.begin(), steps.end(), t);
    return static_cast<std::size_t>(std::distance(steps.begin(), it)) - 1;
}

std::size_t RawTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
        if (column_names[i] == name) return i;
    throw ConfigError("schema error: column '" + name + "' not found");
}

RawTable RawTable::subset(const std::vector<std::size_t>& row_indices) const {
    RawTable out;
    out.column_names = column_names;
    out.rows.reserve(row_indices.size());
    for (auto i : row_indices) out.rows.push_back(rows.at(i));
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& token, std::size_t row, const std::string& column) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0')
        throw DataError("parse error at row " + std::to_string(row) + ", column '" + column +
                        "': '" + token + "' is not numeric");
    return v;
}

} // namespace

RawTable read_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open file: " + path);
    RawTable table;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(file, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_line(line);
        if (!have_header) {
            table.column_names = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.column_names.size())
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(table.column_names.size()) + " fields, got " +
                            std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw DataError("file has no header row: " + path);
    return table;
}

SurvivalDataset encode_table(const RawTable& table, const CsvSchema& schema,
                             const OneHotVocab* fitted, OneHotVocab* learned,
                             bool require_outcome) {
    if (table.rows.empty()) throw DataError("table has no data rows");

    const std::set<std::string> categorical(schema.categorical_columns.begin(),
                                            schema.categorical_columns.end());
    for (const auto& c : schema.categorical_columns)
        table.column_index(c); // existence check

    std::size_t dur_idx = table.column_names.size();
    std::size_t ev_idx = table.column_names.size();
    bool have_outcome = false;
    if (require_outcome) {
        if (schema.duration_column.empty() || schema.event_column.empty())
            throw ConfigError("schema error: duration and event columns are required");
        dur_idx = table.column_index(schema.duration_column);
        ev_idx = table.column_index(schema.event_column);
        have_outcome = true;
    } else {
        const auto& names = table.column_names;
        auto find = [&](const std::string& n) {
            return static_cast<std::size_t>(
                std::find(names.begin(), names.end(), n) - names.begin());
        };
        dur_idx = schema.duration_column.empty() ? names.size() : find(schema.duration_column);
        ev_idx = schema.event_column.empty() ? names.size() : find(schema.event_column);
        have_outcome = dur_idx < names.size() && ev_idx < names.size();
    }

    // Vocabularies in order of first appearance, learned unless supplied.
    OneHotVocab vocab;
    if (fitted != nullptr) {
        vocab = *fitted;
    } else {
        for (const auto& row : table.rows) {
            for (const auto& col : schema.categorical_columns) {
                const std::size_t ci = table.column_index(col);
                auto& cats = vocab[col];
                if (std::find(cats.begin(), cats.end(), row[ci]) == cats.end())
                    cats.push_back(row[ci]);
            }
        }
    }

    SurvivalDataset ds;
    for (std::size_t ci = 0; ci < table.column_names.size(); ++ci) {
        if (ci == dur_idx || ci == ev_idx) continue;
        const auto& name = table.column_names[ci];
        if (categorical.count(name)) {
            for (const auto& cat : vocab.at(name)) {
                ds.covariate_names.push_back(name + "=" + cat);
                ds.covariate_kinds.push_back(CovariateKind::CategoricalOneHot);
            }
        } else {
            ds.covariate_names.push_back(name);
            ds.covariate_kinds.push_back(CovariateKind::Continuous);
        }
    }
    if (ds.covariate_names.empty())
        throw ConfigError("schema error: no covariate columns remain");

    bool warned_unseen = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        SurvivalRecord rec;
        rec.covariates.reserve(ds.covariate_names.size());
        for (std::size_t ci = 0; ci < table.column_names.size(); ++ci) {
            if (ci == dur_idx || ci == ev_idx) continue;
            const auto& name = table.column_names[ci];
            if (categorical.count(name)) {
                const auto& cats = vocab.at(name);
                const auto it = std::find(cats.begin(), cats.end(), row[ci]);
                if (it == cats.end() && !warned_unseen) {
                    log_warn("unseen category '" + row[ci] + "' in column '" + name +
                             "', encoding as all-zeros");
                    warned_unseen = true;
                }
                for (const auto& cat : cats)
                    rec.covariates.push_back(cat == row[ci] ? 1.0 : 0.0);
            } else {
                rec.covariates.push_back(parse_number(row[ci], r + 1, name));
            }
        }
        if (have_outcome) {
            rec.event_time = parse_number(row[dur_idx], r + 1, table.column_names[dur_idx]);
            const double ev = parse_number(row[ev_idx], r + 1, table.column_names[ev_idx]);
            if (ev != 0.0 && ev != 1.0)
                throw DataError("validation error at row " + std::to_string(r + 1) +
                                ": event value must be 0 or 1, got '" + row[ev_idx] + "'");
            rec.event = static_cast<int>(ev);
            if (rec.event_time < 0.0)
                throw DataError("validation error at row " + std::to_string(r + 1) +
                                ": negative duration");
        }
        ds.records.push_back(std::move(rec));
    }
    if (learned != nullptr) *learned = vocab;
    return ds;
}

SurvivalDataset load_csv(const std::string& path, const CsvSchema& schema,
                         OneHotVocab* learned) {
    return encode_table(read_csv(path), schema, nullptr, learned, true);
}

std::pair<SurvivalDataset, StandardizationStats>
standardize(const SurvivalDataset& ds, const std::optional<StandardizationStats>& stats) {
    ds.validate();
    const std::size_t p = ds.width();
    StandardizationStats fitted;
    if (stats.has_value()) {
        if (stats->mean.size() != p || stats->stddev.size() != p)
            throw DataError("standardization stats width mismatch");
        fitted = *stats;
    } else {
        fitted.mean.assign(p, 0.0);
        fitted.stddev.assign(p, 1.0);
        const double n = static_cast<double>(ds.size());
        for (std::size_t j = 0; j < p; ++j) {
            if (ds.covariate_kinds[j] != CovariateKind::Continuous) continue;
            double sum = 0.0;
            for (const auto& r : ds.records) sum += r.covariates[j];
            const double mu = sum / n;
            double ss = 0.0;
            for (const auto& r : ds.records) {
                const double d = r.covariates[j] - mu;
                ss += d * d;
            }
            double sigma = std::sqrt(ss / n); // population std
            if (sigma < kSigmaFloor) {
                log_warn("zero-variance column '" + ds.covariate_names[j] +
                         "', flooring stddev");
                sigma = kSigmaFloor;
            }
            fitted.mean[j] = mu;
            fitted.stddev[j] = sigma;
        }
    }
    SurvivalDataset out = ds;
    for (auto& r : out.records)
        for (std::size_t j = 0; j < p; ++j)
            if (out.covariate_kinds[j] == CovariateKind::Continuous)
                r.covariates[j] = (r.covariates[j] - fitted.mean[j]) / fitted.stddev[j];
    return {std::move(out), std::move(fitted)};
}

long discretize_time(double t) {
    return static_cast<long>(std::floor(t + 0.5));
}

std::pair<SurvivalDataset, TimeGrid> discretize_times(const SurvivalDataset& ds) {
    if (ds.records.empty()) throw DataError("cannot discretize an empty dataset");
    SurvivalDataset out = ds;
    long max_step = 0;
    for (auto& r : out.records) {
        const long s = discretize_time(r.event_time);
        r.event_time = static_cast<double>(s);
        max_step = std::max(max_step, s);
    }
    if (max_step < 1) max_step = 1; // grid needs at least one interval
    TimeGrid grid;
    grid.steps.resize(static_cast<std::size_t>(max_step) + 1);
    std::iota(grid.steps.begin(), grid.steps.end(), 0L);
    return {std::move(out), std::move(grid)};
}

SurvivalDataset subset(const SurvivalDataset& ds, const std::vector<std::size_t>& idx) {
    SurvivalDataset out;
    out.covariate_names = ds.covariate_names;
    out.covariate_kinds = ds.covariate_kinds;
    out.records.reserve(idx.size());
    for (auto i : idx) out.records.push_back(ds.records.at(i));
    return out;
}

std::pair<SurvivalDataset, SurvivalDataset>
split_train_test(const SurvivalDataset& ds, double fraction, unsigned seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("split fraction must be in (0,1)");
    const std::size_t n = ds.size();
    if (n < 2) throw DataError("need at least 2 records to split");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test_idx(idx.begin() + static_cast<long>(n_train), idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {subset(ds, train_idx), subset(ds, test_idx)};
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
k_fold_indices(std::size_t n, std::size_t k, unsigned seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2");
    if (k > n) throw ConfigError("fold count exceeds dataset size");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        std::vector<std::size_t> test(idx.begin() + static_cast<long>(start),
                                      idx.begin() + static_cast<long>(start + len));
        std::vector<std::size_t> train;
        train.reserve(n - len);
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<long>(start));
        train.insert(train.end(), idx.begin() + static_cast<long>(start + len), idx.end());
        std::sort(test.begin(), test.end());
        std::sort(train.begin(), train.end());
        folds.emplace_back(std::move(train), std::move(test));
        start += len;
    }
    return folds;
}

std::vector<std::pair<SurvivalDataset, SurvivalDataset>>
k_fold(const SurvivalDataset& ds, std::size_t k, unsigned seed) {
    std::vector<std::pair<SurvivalDataset, SurvivalDataset>> out;
    for (const auto& [train_idx, test_idx] : k_fold_indices(ds.size(), k, seed))
        out.emplace_back(subset(ds, train_idx), subset(ds, test_idx));
    return out;
}

namespace {

/// Inverse of the cumulative piecewise-constant hazard at exponential deviate e.
double invert_hazard(const std::vector<double>& hazard, double e) {
    double acc = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double h = k < hazard.size() ? hazard[k] : hazard.back();
        if (acc + h >= e) return static_cast<double>(k) + (e - acc) / h;
        acc += h;
    }
}

} // namespace

SurvivalDataset synth_generate(const SynthConfig& config) {
    if (config.n < 1) throw ConfigError("synth: n must be at least 1");
    if (config.n_covariates < 1) throw ConfigError("synth: need at least 1 covariate");
    if (config.hazard.empty()) throw ConfigError("synth: hazard must be non-empty");
    for (double h : config.hazard)
        if (!(h > 0.0)) throw ConfigError("synth: hazard values must be positive");
    if (!(config.censoring_rate >= 0.0 && config.censoring_rate < 1.0))
        throw ConfigError("synth: censoring rate must be in [0,1)");

    double mean_hazard = 0.0;
    for (double h : config.hazard) mean_hazard += h;
    mean_hazard /= static_cast<double>(config.hazard.size());
    // With exponential censoring at this rate, P(censor first) hits the target
    // exactly under a constant hazard and approximately otherwise.
    const double censor_rate =
        config.censoring_rate > 0.0
            ? mean_hazard * config.censoring_rate / (1.0 - config.censoring_rate)
            : 0.0;

    std::mt19937 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SurvivalDataset ds;
    for (std::size_t j = 0; j < config.n_covariates; ++j) {
        ds.covariate_names.push_back("x" + std::to_string(j));
        ds.covariate_kinds.push_back(CovariateKind::Continuous);
    }
    ds.records.reserve(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        SurvivalRecord rec;
        rec.covariates.reserve(config.n_covariates);
        for (std::size_t j = 0; j < config.n_covariates; ++j)
            rec.covariates.push_back(gauss(rng));
        const double t_event = invert_hazard(config.hazard, -std::log1p(-unif(rng)));
        const double u_cens = unif(rng);
        const double t_cens = censor_rate > 0.0
                                  ? -std::log1p(-u_cens) / censor_rate
                                  : std::numeric_limits<double>::infinity();
        rec.event = t_event <= t_cens ? 1 : 0;
        rec.event_time = std::min(t_event, t_cens);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

} // namespace compsurv
