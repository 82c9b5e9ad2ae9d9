#ifndef COMPSURV_DATASET_HPP
#define COMPSURV_DATASET_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compsurv/common.hpp"

namespace compsurv {

enum class CovariateKind { Continuous, CategoricalOneHot };

/// One study member: covariate row (post-encoding), last observed time, event indicator.
struct SurvivalRecord {
    std::vector<double> covariates;
    double event_time = 0.0;
    int event = 0; // 1 = event observed, 0 = right-censored
};

struct SurvivalDataset {
    std::vector<SurvivalRecord> records;
    std::vector<std::string> covariate_names;
    std::vector<CovariateKind> covariate_kinds;

    std::size_t size() const { return records.size(); }
    std::size_t width() const { return covariate_names.size(); }

    std::vector<std::vector<double>> covariate_matrix() const;

    /// Checks the structural invariants (consistent widths, names unique,
    /// event in {0,1}, times >= 0). Throws DataError on violation.
    void validate() const;
};

/// Discretized study timeline {t_0=0, ..., t_J}, strictly increasing integers.
struct TimeGrid {
    std::vector<long> steps;

    long horizon() const { return steps.back(); }
    std::size_t size() const { return steps.size(); }

    /// Index of the largest step <= t, clamped to [0, J].
    std::size_t index_of(long t) const;
};

/// Per-continuous-covariate mean and (population) standard deviation.
/// One-hot columns carry identity entries (mean 0, stddev 1).
struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

struct CsvSchema {
    std::string duration_column;
    std::string event_column;
    std::vector<std::string> categorical_columns;
};

/// CSV contents before numeric conversion and encoding.
struct RawTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t column_index(const std::string& name) const; // throws ConfigError
    RawTable subset(const std::vector<std::size_t>& row_indices) const;
};

/// Category vocabulary per categorical column, in order of first appearance.
using OneHotVocab = std::map<std::string, std::vector<std::string>>;

RawTable read_csv(const std::string& path);

/// Numeric conversion plus one-hot expansion of the categorical columns.
/// With `fitted` supplied the stored vocabularies are applied (unseen test
/// categories encode as all-zeros with a warning); otherwise vocabularies are
/// learned from the table and written to `learned` when non-null.
/// When `require_outcome` is false a table without duration/event columns is
/// accepted and those fields are filled with zeros (covariate-only input).
SurvivalDataset encode_table(const RawTable& table, const CsvSchema& schema,
                             const OneHotVocab* fitted = nullptr,
                             OneHotVocab* learned = nullptr,
                             bool require_outcome = true);

SurvivalDataset load_csv(const std::string& path, const CsvSchema& schema,
                         OneHotVocab* learned = nullptr);

/// Fit-and-apply when stats are absent; apply-as-is when supplied (test path).
std::pair<SurvivalDataset, StandardizationStats>
standardize(const SurvivalDataset& ds,
            const std::optional<StandardizationStats>& stats = std::nullopt);

/// Round-half-up to the nearest integer step.
long discretize_time(double t);

/// Replaces every event time by its discretized step and returns the grid
/// spanning 0..max step.
std::pair<SurvivalDataset, TimeGrid> discretize_times(const SurvivalDataset& ds);

SurvivalDataset subset(const SurvivalDataset& ds, const std::vector<std::size_t>& idx);

std::pair<SurvivalDataset, SurvivalDataset>
split_train_test(const SurvivalDataset& ds, double fraction, unsigned seed);

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
k_fold_indices(std::size_t n, std::size_t k, unsigned seed);

std::vector<std::pair<SurvivalDataset, SurvivalDataset>>
k_fold(const SurvivalDataset& ds, std::size_t k, unsigned seed);

struct SynthConfig {
    std::size_t n = 1000;
    std::size_t n_covariates = 3;
    /// Per-unit-time hazard for intervals [0,1), [1,2), ...; the last entry
    /// extends to infinity. A single entry gives a constant (exponential) law.
    std::vector<double> hazard = {0.1};
    double censoring_rate = 0.0; // in [0,1)
    unsigned seed = 0;
};

/// Gaussian covariates, event times from the configured hazard, independent
/// exponential censoring tuned to the target censored fraction.
SurvivalDataset synth_generate(const SynthConfig& config);

} // namespace compsurv

#endif
