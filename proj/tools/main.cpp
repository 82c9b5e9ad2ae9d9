#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "compsurv/composite.hpp"
#include "compsurv/metrics.hpp"
#include "json.hpp"

using namespace compsurv;
using nlohmann::json;

namespace {

struct Options {
    std::string data;
    std::string duration;
    std::string event;
    std::vector<std::string> categorical;
    std::string baseline = "bayes";
    bool raw_baseline = false;
    unsigned seed = 0;
    double split = 0.0;
    std::size_t k = 5;
    double lr = 0.1;
    int iters = 1000;
    double l2 = 1e-4;
    std::string auc_grid;
    std::string format = "csv";
    std::string out;
    std::string model_path;
    // synth
    std::size_t n = 1000;
    std::size_t covariates = 3;
    std::string hazard = "0.1";
    double censoring = 0.0;
};

CsvSchema make_schema(const Options& opt) {
    CsvSchema schema;
    schema.duration_column = opt.duration;
    schema.event_column = opt.event;
    schema.categorical_columns = opt.categorical;
    return schema;
}

FitOptions make_fit_options(const Options& opt) {
    FitOptions fo;
    fo.baseline = baseline_kind_from_name(opt.baseline);
    fo.raw_baseline = opt.raw_baseline;
    fo.classifier.learning_rate = opt.lr;
    fo.classifier.max_iters = opt.iters;
    fo.classifier.l2 = opt.l2;
    return fo;
}

std::vector<long> parse_auc_grid(const std::string& spec) {
    if (spec.empty()) return {};
    long start = 0, stop = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%ld:%ld:%ld", &start, &stop, &step) != 3 || step <= 0 ||
        start > stop)
        throw ConfigError("bad --auc-grid spec '" + spec + "', expected start:stop:step");
    std::vector<long> times;
    for (long t = start; t <= stop; t += step) times.push_back(t);
    if (times.back() != stop) times.push_back(stop);
    return times;
}

std::vector<double> parse_hazard(const std::string& spec) {
    std::vector<double> values;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad --hazard value '" + tok + "'");
        }
    }
    if (values.empty()) throw ConfigError("empty --hazard spec");
    return values;
}

json config_echo(const std::string& command, const Options& opt) {
    return {{"command", command},
            {"data", opt.data},
            {"duration", opt.duration},
            {"event", opt.event},
            {"categorical", opt.categorical},
            {"baseline", opt.baseline},
            {"raw_baseline", opt.raw_baseline},
            {"seed", opt.seed},
            {"split", opt.split},
            {"k", opt.k},
            {"lr", opt.lr},
            {"iters", opt.iters},
            {"l2", opt.l2},
            {"auc_grid", opt.auc_grid},
            {"format", opt.format},
            {"out", opt.out},
            {"model", opt.model_path}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) throw DataError("cannot write output file: " + path);
    file << text;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double censored_fraction(const SurvivalDataset& ds) {
    double c = 0.0;
    for (const auto& r : ds.records) c += r.event == 0 ? 1.0 : 0.0;
    return c / static_cast<double>(ds.size());
}

void cmd_fit(const Options& opt) {
    RawTable table = read_csv(opt.data);
    if (opt.split != 0.0) {
        if (!(opt.split > 0.0 && opt.split < 1.0))
            throw ConfigError("--split must be in (0,1)");
        std::vector<std::size_t> idx(table.n_rows());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::mt19937 rng(opt.seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_train =
            static_cast<std::size_t>(std::llround(opt.split * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        idx.resize(n_train);
        std::sort(idx.begin(), idx.end());
        table = table.subset(idx);
    }
    CompositeModel model = fit_from_table(table, make_schema(opt), make_fit_options(opt));
    json j = model.to_json();
    j["config"] = config_echo("fit", opt);
    j["tool_version"] = kToolVersion;
    write_text(opt.out, j.dump(2) + "\n");

    const SurvivalDataset ds = encode_table(table, make_schema(opt));
    std::printf("fit: N=%zu J=%ld censored=%.1f%% baseline=%s\n", ds.size(),
                model.grid.horizon(), 100.0 * censored_fraction(ds),
                baseline_kind_name(model.baseline_kind));
}

EvalProtocol make_protocol(const Options& opt) {
    EvalProtocol protocol;
    protocol.auc_times = parse_auc_grid(opt.auc_grid);
    return protocol;
}

void print_report_line(const MetricReport& report) {
    std::printf("C=%.3f IBS=%.3f meanAUC=%.3f\n", report.c_index, report.ibs,
                report.mean_auc_as_written);
}

void cmd_evaluate(const Options& opt) {
    const CompositeModel model = load_model(opt.model_path);
    const RawTable table = read_csv(opt.data);
    const SurvivalDataset test = apply_preprocessing(model, table);
    const MetricReport report = evaluate(model, test, make_protocol(opt));
    json j = report.to_json();
    j["config"] = config_echo("evaluate", opt);
    j["tool_version"] = kToolVersion;
    if (!opt.out.empty()) write_text(opt.out, j.dump(2) + "\n");
    print_report_line(report);
}

void cmd_cv(const Options& opt) {
    if (opt.k < 2) throw ConfigError("--k must be at least 2");
    const RawTable table = read_csv(opt.data);
    const CsvSchema schema = make_schema(opt);
    const FitOptions fit_options = make_fit_options(opt);
    const EvalProtocol protocol = make_protocol(opt);

    const auto folds = k_fold_indices(table.n_rows(), opt.k, opt.seed);
    json fold_rows = json::array();
    std::vector<double> cs, ibss, aucs;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const CompositeModel model =
            fit_from_table(table.subset(folds[f].first), schema, fit_options);
        const SurvivalDataset test = apply_preprocessing(model, table.subset(folds[f].second));
        const MetricReport report = evaluate(model, test, protocol);
        cs.push_back(report.c_index);
        ibss.push_back(report.ibs);
        aucs.push_back(report.mean_auc_as_written);
        json row = report.to_json();
        row["fold"] = f;
        fold_rows.push_back(std::move(row));
    }
    auto mean_std = [](const std::vector<double>& v) {
        double mu = 0.0;
        for (double x : v) mu += x;
        mu /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mu) * (x - mu);
        return std::pair<double, double>{mu, std::sqrt(ss / static_cast<double>(v.size()))};
    };
    const auto [c_mu, c_sd] = mean_std(cs);
    const auto [b_mu, b_sd] = mean_std(ibss);
    const auto [a_mu, a_sd] = mean_std(aucs);

    json j = {{"config", config_echo("cv", opt)},
              {"tool_version", kToolVersion},
              {"folds", fold_rows},
              {"summary",
               {{"c_index", {{"mean", c_mu}, {"std", c_sd}}},
                {"ibs", {{"mean", b_mu}, {"std", b_sd}}},
                {"mean_auc", {{"mean", a_mu}, {"std", a_sd}}}}}};
    if (!opt.out.empty()) write_text(opt.out, j.dump(2) + "\n");
    std::printf("C-index   %.3f ± %.3f\n", c_mu, c_sd);
    std::printf("Mean AUC  %.3f ± %.3f\n", a_mu, a_sd);
    std::printf("IBS       %.3f ± %.3f\n", b_mu, b_sd);
}

void cmd_curves(const Options& opt) {
    const CompositeModel model = load_model(opt.model_path);
    const RawTable table = read_csv(opt.data);
    const SurvivalDataset members = apply_preprocessing(model, table);
    const SurvivalCurveMatrix curves = predict_curves(model, members.covariate_matrix());

    if (opt.format == "json") {
        json j = {{"config", config_echo("curves", opt)},
                  {"tool_version", kToolVersion},
                  {"times", model.grid.steps},
                  {"baseline", model.baseline.survival},
                  {"member_ids", curves.member_ids},
                  {"curves", curves.values}};
        write_text(opt.out, j.dump(2) + "\n");
        return;
    }
    std::ostringstream csv;
    csv << "# tool_version: " << kToolVersion << "\n";
    csv << "# config: " << config_echo("curves", opt).dump() << "\n";
    csv << "member_id,time,survival\n";
    for (std::size_t j = 0; j < model.grid.steps.size(); ++j)
        csv << "__baseline__," << model.grid.steps[j] << ","
            << format_double(model.baseline.survival[j]) << "\n";
    for (std::size_t i = 0; i < curves.n_members(); ++i)
        for (std::size_t j = 0; j < model.grid.steps.size(); ++j)
            csv << curves.member_ids[i] << "," << model.grid.steps[j] << ","
                << format_double(curves.values[i][j]) << "\n";
    write_text(opt.out, csv.str());
}

void cmd_synth(const Options& opt) {
    SynthConfig config;
    config.n = opt.n;
    config.n_covariates = opt.covariates;
    config.hazard = parse_hazard(opt.hazard);
    config.censoring_rate = opt.censoring;
    config.seed = opt.seed;
    const SurvivalDataset ds = synth_generate(config);

    std::ostringstream csv;
    csv << "# tool_version: " << kToolVersion << "\n";
    csv << "# config: " << config_echo("synth", opt).dump() << "\n";
    for (std::size_t j = 0; j < ds.covariate_names.size(); ++j)
        csv << ds.covariate_names[j] << ",";
    csv << "duration,event\n";
    for (const auto& r : ds.records) {
        for (double x : r.covariates) csv << format_double(x) << ",";
        csv << format_double(r.event_time) << "," << r.event << "\n";
    }
    write_text(opt.out, csv.str());
    std::printf("synth: N=%zu censored=%.1f%%\n", ds.size(), 100.0 * censored_fraction(ds));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compsurv: composite survival analysis (baseline hazard x survival scores)"};
    app.require_subcommand(1);
    Options opt;

    auto add_schema_flags = [&](CLI::App* cmd) {
        cmd->add_option("--data", opt.data, "input CSV path")->required();
        cmd->add_option("--duration", opt.duration, "duration column name")->required();
        cmd->add_option("--event", opt.event, "event indicator column name")->required();
        cmd->add_option("--categorical", opt.categorical,
                        "comma-separated categorical column names")
            ->delimiter(',');
    };
    auto add_classifier_flags = [&](CLI::App* cmd) {
        cmd->add_option("--lr", opt.lr, "classifier learning rate");
        cmd->add_option("--iters", opt.iters, "classifier max iterations");
        cmd->add_option("--l2", opt.l2, "classifier L2 penalty");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit a composite model");
    add_schema_flags(fit);
    add_classifier_flags(fit);
    fit->add_option("--baseline", opt.baseline, "baseline kind: bayes|km");
    fit->add_flag("--raw-baseline", opt.raw_baseline,
                  "skip the envelope/rescale post-processing of the Bayesian baseline");
    fit->add_option("--seed", opt.seed, "random seed");
    fit->add_option("--split", opt.split, "train on this fraction of rows (seeded)");
    fit->add_option("--out", opt.out, "model output path")->required();

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a model on test data");
    evaluate->add_option("--model", opt.model_path, "model JSON path")->required();
    evaluate->add_option("--data", opt.data, "test CSV path")->required();
    evaluate->add_option("--auc-grid", opt.auc_grid, "AUC times as start:stop:step");
    evaluate->add_option("--out", opt.out, "report output path");

    CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation");
    add_schema_flags(cv);
    add_classifier_flags(cv);
    cv->add_option("--baseline", opt.baseline, "baseline kind: bayes|km");
    cv->add_flag("--raw-baseline", opt.raw_baseline);
    cv->add_option("--seed", opt.seed, "random seed");
    cv->add_option("--k", opt.k, "number of folds");
    cv->add_option("--auc-grid", opt.auc_grid, "AUC times as start:stop:step");
    cv->add_option("--out", opt.out, "aggregate report output path");

    CLI::App* curves = app.add_subcommand("curves", "emit plot-ready survival curves");
    curves->add_option("--model", opt.model_path, "model JSON path")->required();
    curves->add_option("--data", opt.data, "member CSV path (covariate columns)")->required();
    curves->add_option("--format", opt.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    curves->add_option("--out", opt.out, "curves output path")->required();

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic censored cohort");
    synth->add_option("--n", opt.n, "number of members");
    synth->add_option("--covariates", opt.covariates, "number of covariates");
    synth->add_option("--hazard", opt.hazard, "per-step hazard, comma-separated");
    synth->add_option("--censoring", opt.censoring, "target censored fraction in [0,1)");
    synth->add_option("--seed", opt.seed, "random seed");
    synth->add_option("--out", opt.out, "dataset CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) cmd_fit(opt);
        else if (evaluate->parsed()) cmd_evaluate(opt);
        else if (cv->parsed()) cmd_cv(opt);
        else if (curves->parsed()) cmd_curves(opt);
        else if (synth->parsed()) cmd_synth(opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
