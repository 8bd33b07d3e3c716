// anobench — typed-anomaly benchmark and evaluation toolkit.
//
// Subcommands: generate, inject, detect, classify, transform, evaluate,
// report, plot. Every subcommand accepts --config <file.json> whose fields
// use the flag names with underscores; explicit flags override config
// values. Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anobench/classify.hpp"
#include "anobench/csv.hpp"
#include "anobench/detectors.hpp"
#include "anobench/evaluation.hpp"
#include "anobench/injector.hpp"
#include "anobench/kernels.hpp"
#include "anobench/rng.hpp"
#include "anobench/sequence.hpp"
#include "anobench/svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anobench;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
}

// Config fallback: an option left at its default takes the config value.
template <typename T>
void cfg(const json& config, const CLI::Option* opt, const char* key, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (config.contains(key)) target = config[key].get<T>();
}

struct DataPaths {
    std::string dir;
    std::string dataset() const { return (fs::path(dir) / "dataset.csv").string(); }
    std::string schema() const { return (fs::path(dir) / "schema.json").string(); }
    std::string truth() const { return (fs::path(dir) / "truth.json").string(); }
};

Dataset load_data_dir(const std::string& dir) {
    const DataPaths paths{dir};
    const Schema schema = load_schema_file(paths.schema());
    return load_dataset_file(paths.dataset(), schema);
}

void write_data_dir(const std::string& dir, const Dataset& dataset) {
    fs::create_directories(dir);
    const DataPaths paths{dir};
    write_dataset_file(paths.dataset(), dataset);
    write_schema_file(paths.schema(), dataset.schema());
}

// Threshold flags shared by detect/classify/evaluate/inject; config keys
// match the flag names with underscores.
struct ThresholdFlags {
    DetectorParams params;
    std::string method = "mad";
    CLI::Option* o_k = nullptr;
    CLI::Option* o_method = nullptr;
    CLI::Option* o_loo = nullptr;
    CLI::Option* o_bin = nullptr;
    CLI::Option* o_bins = nullptr;
    CLI::Option* o_tau = nullptr;
    CLI::Option* o_c = nullptr;
    CLI::Option* o_knn = nullptr;
    CLI::Option* o_combo = nullptr;
    CLI::Option* o_gmin = nullptr;
    CLI::Option* o_lmax = nullptr;
    CLI::Option* o_eps = nullptr;
    CLI::Option* o_nostd = nullptr;
    bool no_standardize = false;

    void add(CLI::App* app) {
        o_k = app->add_option("--k-extreme", params.k_extreme,
                              "extreme-value threshold in scale units");
        o_method = app->add_option("--method", method, "scale method: sd|mad");
        o_loo = app->add_flag("--leave-one-out", params.leave_one_out,
                              "recompute center/scale without the case");
        o_bin = app->add_flag("--bin-rarity", params.bin_rarity,
                              "enable the 1-D empty-bin rarity signal");
        o_bins = app->add_option("--bins", params.bins, "equal-width bin count");
        o_tau = app->add_option("--tau-rare", params.tau_rare,
                                "class rarity frequency bound");
        o_c = app->add_option("--c-rare", params.c_rare, "class rarity count bound");
        o_knn = app->add_option("--knn", params.k_nn, "neighbourhood size");
        o_combo = app->add_option("--combo-order", params.combo_order,
                                  "largest categorical tuple examined");
        o_gmin = app->add_option("--g-min", params.min_global_freq,
                                 "minimum global frequency (type VI gate)");
        o_lmax = app->add_option("--l-max", params.max_local_freq,
                                 "maximum local frequency (type VI gate)");
        o_eps = app->add_option("--epsilon", params.density_quantile,
                                "joint-density flag quantile");
        o_nostd = app->add_flag("--no-standardize", no_standardize,
                                "skip robust standardization before distances");
    }

    DetectorParams resolve(const json& config) {
        cfg(config, o_k, "k_extreme", params.k_extreme);
        cfg(config, o_method, "method", method);
        cfg(config, o_loo, "leave_one_out", params.leave_one_out);
        cfg(config, o_bin, "bin_rarity", params.bin_rarity);
        cfg(config, o_bins, "bins", params.bins);
        cfg(config, o_tau, "tau_rare", params.tau_rare);
        cfg(config, o_c, "c_rare", params.c_rare);
        cfg(config, o_knn, "k_nn", params.k_nn);
        cfg(config, o_combo, "combo_order", params.combo_order);
        cfg(config, o_gmin, "min_global_freq", params.min_global_freq);
        cfg(config, o_lmax, "max_local_freq", params.max_local_freq);
        cfg(config, o_eps, "density_quantile", params.density_quantile);
        cfg(config, o_nostd, "no_standardize", no_standardize);
        params.method = scale_method_from_string(method);
        params.standardize = !no_standardize;
        params.validate();
        return params;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anobench: typed-anomaly benchmark generation, detection and "
                 "evaluation"};
    app.require_subcommand(1);

    // Subcommand callbacks only record the work; it runs after parsing so
    // that global options (like --kernels) are in effect first.
    std::function<void()> action;

    std::string kernels_choice = "auto";
    app.add_option("--kernels", kernels_choice,
                   "kernel set: auto|scalar|avx2 (also: ANOBENCH_KERNELS)");
    std::string output_dir = ".";
    app.add_option("--output-dir", output_dir,
                   "directory that relative output paths resolve against");

    const auto out_path = [&](const std::string& p) {
        fs::path path(p);
        if (path.is_absolute()) return p;
        return (fs::path(output_dir) / path).string();
    };

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "sample a simulated base dataset");
    std::string gen_spec_path, gen_out = "bench", gen_config;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec_path, "base spec JSON")->required();
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "override spec seed");
    gen->add_option("-o,--out", gen_out, "output directory");
    gen->add_option("--config", gen_config, "JSON config file");
    gen->callback([&] { action = [&] {
        const json config = load_config(gen_config);
        BaseSpec spec = BaseSpec::from_json(slurp(gen_spec_path));
        std::uint64_t seed = spec.seed;
        cfg(config, gen_seed_opt, "seed", seed);
        if (gen_seed_opt->count() > 0) seed = gen_seed;
        spec.seed = seed;
        write_data_dir(out_path(gen_out), generate_base(spec));
    }; });

    // ---- inject ------------------------------------------------------------
    auto* inj = app.add_subcommand(
        "inject", "append ground-truth-labelled anomalies of each type");
    std::string inj_data, inj_spec_path, inj_out = "bench", inj_config, inj_type;
    std::uint64_t inj_seed = 0;
    inj->add_option("--data", inj_data, "input data directory")->required();
    inj->add_option("--spec", inj_spec_path, "injection spec JSON")->required();
    auto* inj_seed_opt = inj->add_option("--seed", inj_seed, "override spec seed");
    inj->add_option("--type", inj_type, "inject one type only (I..VI)");
    inj->add_option("-o,--out", inj_out, "output directory");
    inj->add_option("--config", inj_config, "JSON config file");
    inj->callback([&] { action = [&] {
        const json config = load_config(inj_config);
        InjectionSpec spec = InjectionSpec::from_json(slurp(inj_spec_path));
        if (inj_seed_opt->count() > 0) spec.seed = inj_seed;
        else if (config.contains("seed")) spec.seed = config["seed"].get<std::uint64_t>();
        Dataset dataset = load_data_dir(inj_data);
        const std::size_t reference = dataset.n_cases();
        GroundTruth truth;
        if (!inj_type.empty()) {
            const AnomalyType type = anomaly_type_from_roman(inj_type);
            auto [ds, tr] = inject(dataset, type, spec, spec.seed, reference);
            dataset = std::move(ds);
            truth = std::move(tr);
        } else {
            for (AnomalyType type : kAllTypes) {
                auto [ds, tr] = inject(
                    dataset, type, spec,
                    Rng::derive(spec.seed, static_cast<std::uint64_t>(type)),
                    reference);
                dataset = std::move(ds);
                for (auto& e : tr.entries) truth.entries.push_back(std::move(e));
            }
        }
        const auto violations =
            construction_violations(dataset, truth, reference, spec);
        if (!violations.empty()) {
            for (const auto& v : violations) {
                std::cerr << "construction violation: " << v << "\n";
            }
            throw InfeasibleError("injection produced unsound constructions");
        }
        const std::string dir = out_path(inj_out);
        write_data_dir(dir, dataset);
        write_truth_file((fs::path(dir) / "truth.json").string(), truth);
    }; });

    // ---- detect ------------------------------------------------------------
    auto* det = app.add_subcommand("detect", "run a reference detector");
    std::string det_data, det_id, det_out = "scores.csv", det_config;
    ThresholdFlags det_flags;
    det->add_option("--data", det_data, "input data directory")->required();
    det->add_option("--detector", det_id, "detector id (type1..type6)")->required();
    det->add_option("-o,--out", det_out, "scores CSV path");
    det->add_option("--config", det_config, "JSON config file");
    det_flags.add(det);
    det->callback([&] { action = [&] {
        const json config = load_config(det_config);
        const DetectorParams params = det_flags.resolve(config);
        const Dataset dataset = load_data_dir(det_data);
        const ScoreVector scores = run_detector(det_id, dataset, params);
        const std::string path = out_path(det_out);
        if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        write_scores_file(path, scores);
        std::ofstream sidecar(path + ".params.json");
        sidecar << json::parse(scores.params_json).dump(2) << "\n";
    }; });

    // ---- classify ----------------------------------------------------------
    auto* cls = app.add_subcommand("classify", "attribute anomaly types to cases");
    std::string cls_data, cls_out = "attributions.json", cls_config;
    std::int64_t cls_case = -1;
    bool cls_multi = false;
    bool cls_flagged_only = false;
    ThresholdFlags cls_flags;
    cls->add_option("--data", cls_data, "input data directory")->required();
    cls->add_option("--case-id", cls_case, "classify one case and print to stdout");
    cls->add_flag("--multi-label", cls_multi, "also list every firing type");
    cls->add_flag("--flagged-only", cls_flagged_only,
                  "write only cases attributed a type");
    cls->add_option("-o,--out", cls_out, "attributions JSON path");
    cls->add_option("--config", cls_config, "JSON config file");
    cls_flags.add(cls);
    cls->callback([&] { action = [&] {
        const json config = load_config(cls_config);
        ClassificationParams params;
        params.thresholds = cls_flags.resolve(config);
        params.multi_label = cls_multi;
        const Dataset dataset = load_data_dir(cls_data);
        if (cls_case >= 0) {
            std::cout << classify_case(dataset, cls_case, params).to_json() << "\n";
            return;
        }
        const auto attributions = classify_all(dataset, params);
        const std::string path = out_path(cls_out);
        if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        std::ofstream out(path);
        if (!out) throw ParseError("cannot open output file: " + path);
        out << "[\n";
        bool first = true;
        for (const auto& a : attributions) {
            if (cls_flagged_only && !a.primary) continue;
            if (!first) out << ",\n";
            out << "  " << a.to_json();
            first = false;
        }
        out << "\n]\n";
    }; });

    // ---- transform ---------------------------------------------------------
    auto* tra = app.add_subcommand(
        "transform", "conceptual-level transforms (difference, segment-cycles, "
                     "windowize, aggregate)");
    std::string tra_data, tra_tokens, tra_op, tra_out = "transformed", tra_config;
    std::string tra_group_key;
    std::vector<std::string> tra_aggs;
    std::size_t tra_period = 0, tra_width = 0;
    double tra_cutoff = 0.0;
    tra->add_option("--data", tra_data, "input data directory");
    tra->add_option("--tokens", tra_tokens, "symbol sequence file (one per line)");
    tra->add_option("--op", tra_op,
                    "difference|segment-cycles|windowize|aggregate")
        ->required();
    tra->add_option("--period", tra_period, "cycle length (segment-cycles)");
    tra->add_option("--cutoff", tra_cutoff, "new-class distance cutoff");
    tra->add_option("--width", tra_width, "window width (windowize)");
    tra->add_option("--group-key", tra_group_key, "grouping attribute (aggregate)");
    tra->add_option("--agg", tra_aggs,
                    "aggregation attr:fn with fn in mean|min|max|count|mode");
    tra->add_option("-o,--out", tra_out, "output directory");
    tra->add_option("--config", tra_config, "JSON config file");
    tra->callback([&] { action = [&] {
        Dataset result;
        if (tra_op == "difference") {
            result = difference(load_data_dir(tra_data));
        } else if (tra_op == "segment-cycles") {
            if (tra_period < 2) throw ParamError("segment-cycles needs --period");
            result = segment_cycles(load_data_dir(tra_data), tra_period, tra_cutoff);
        } else if (tra_op == "windowize") {
            if (tra_tokens.empty()) throw ParamError("windowize needs --tokens");
            if (tra_width < 2) throw ParamError("windowize needs --width >= 2");
            result = windowize(SymbolSequence::load(tra_tokens), tra_width);
        } else if (tra_op == "aggregate") {
            if (tra_group_key.empty()) throw ParamError("aggregate needs --group-key");
            std::vector<Aggregation> aggs;
            for (const auto& spec : tra_aggs) {
                const auto colon = spec.find(':');
                if (colon == std::string::npos) {
                    throw ParamError("--agg expects attr:fn, got '" + spec + "'");
                }
                aggs.push_back({spec.substr(0, colon),
                                aggregate_fn_from_string(spec.substr(colon + 1))});
            }
            result = aggregate_by(load_data_dir(tra_data), tra_group_key, aggs);
        } else {
            throw ParamError("unknown transform op '" + tra_op + "'");
        }
        write_data_dir(out_path(tra_out), result);
    }; });

    // ---- evaluate ----------------------------------------------------------
    auto* eva = app.add_subcommand("evaluate",
                                   "rank-based per-type evaluation of scores");
    std::string eva_data, eva_truth, eva_scores, eva_out = "report.json";
    std::string eva_csv, eva_config;
    std::vector<std::string> eva_detectors;
    ThresholdFlags eva_flags;
    eva->add_option("--data", eva_data, "benchmark data directory")->required();
    eva->add_option("--truth", eva_truth, "ground truth JSON")->required();
    eva->add_option("--scores", eva_scores, "external score CSV (case_id,score)");
    eva->add_option("--detectors", eva_detectors,
                    "detector ids to run (or 'all')");
    eva->add_option("-o,--out", eva_out, "report JSON path");
    eva->add_option("--csv", eva_csv, "also write the flat CSV form here");
    eva->add_option("--config", eva_config, "JSON config file");
    eva_flags.add(eva);
    eva->callback([&] { action = [&] {
        const json config = load_config(eva_config);
        const DetectorParams params = eva_flags.resolve(config);
        const Dataset dataset = load_data_dir(eva_data);
        const GroundTruth truth = load_truth_file(eva_truth);
        EvaluationReport report;
        if (!eva_scores.empty()) {
            const ScoreVector scores = load_external_scores_file(eva_scores, dataset);
            report.benchmark_id = eva_data;
            report.params_json = params.to_json();
            for (const auto& [type, metrics] :
                 evaluate_scores(scores, truth, dataset)) {
                report.rows.push_back({scores.detector_id, type, metrics});
            }
            report.overall.emplace_back(scores.detector_id,
                                        evaluate_overall(scores, truth, dataset));
        } else {
            std::vector<std::string> ids = eva_detectors;
            if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) {
                ids = registered_detectors();
            }
            report = cross_matrix(ids, dataset, truth, params, eva_data);
        }
        const std::string path = out_path(eva_out);
        if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        std::ofstream out(path);
        if (!out) throw ParseError("cannot open output file: " + path);
        out << report.to_json();
        if (!eva_csv.empty()) {
            std::ofstream csv(out_path(eva_csv));
            if (!csv) throw ParseError("cannot open output file: " + eva_csv);
            report.write_csv(csv);
        }
    }; });

    // ---- report ------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "print a report as a table");
    std::string rep_path;
    rep->add_option("--report", rep_path, "report JSON path")->required();
    rep->callback([&] { action = [&] {
        const EvaluationReport report = EvaluationReport::from_json(slurp(rep_path));
        report.write_table(std::cout);
    }; });

    // ---- plot --------------------------------------------------------------
    auto* plo = app.add_subcommand("plot", "scatter plot with anomaly overlay");
    std::string plo_data, plo_truth, plo_x, plo_y, plo_color;
    std::string plo_out = "plot.svg";
    plo->add_option("--data", plo_data, "input data directory")->required();
    plo->add_option("--truth", plo_truth, "ground truth JSON (optional)");
    plo->add_option("--x", plo_x, "x attribute")->required();
    plo->add_option("--y", plo_y, "y attribute")->required();
    plo->add_option("--color", plo_color, "categorical colour attribute");
    plo->add_option("-o,--out", plo_out, "SVG output path");
    plo->callback([&] { action = [&] {
        const Dataset dataset = load_data_dir(plo_data);
        GroundTruth truth;
        if (!plo_truth.empty()) truth = load_truth_file(plo_truth);
        PlotOptions options;
        options.x_attr = plo_x;
        options.y_attr = plo_y;
        if (!plo_color.empty()) options.color_attr = plo_color;
        const std::string path = out_path(plo_out);
        if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        std::ofstream out(path);
        if (!out) throw ParseError("cannot open output file: " + path);
        out << render_scatter(dataset, truth, options);
    }; });

    try {
        app.parse(argc, argv);
        if (kernels_choice != "auto") kernels::force(kernels_choice);
        if (action) action();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
