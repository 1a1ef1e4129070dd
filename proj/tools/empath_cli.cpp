// empath_cli.cpp - batch entry point wiring the pipeline modules together
//
// Subcommands: ingest, label, featurize, train, evaluate, compare, analyze,
// synth. Every command that writes files also drops a manifest.json beside
// them. Exit codes: 0 ok, 2 usage, 3 validation, 4 internal.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "empath.hpp"

namespace fs = std::filesystem;
using namespace empath;

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

RunManifest start_manifest(const std::string& command) {
    RunManifest m;
    m.command = command;
    m.started_at = utc_timestamp();
    return m;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

void run_ingest(const std::string& data_dir, const std::string& out_dir) {
    RunManifest manifest = start_manifest("ingest");
    manifest.inputs = {data_dir};

    ingest::Dataset raw = ingest::load_dataset(data_dir);
    for (const auto& s : raw.sessions) {
        if (s.low_quality()) {
            std::cout << "warning: session " << s.id() << " success fraction "
                      << format_double(s.success_fraction) << " below "
                      << format_double(ingest::kLowQualityThreshold) << "\n";
        }
    }
    auto [clean, removed] = ingest::clean_features(raw);

    fs::create_directories(out_dir);
    ingest::write_dataset(clean, out_dir);
    {
        csv::Writer w((fs::path(out_dir) / "removed_features.csv").string());
        w.row({"feature", "reason"});
        for (const auto& r : removed) w.row({r.name, r.reason});
    }
    manifest.outputs = {out_dir + "/metadata.csv", out_dir + "/sessions",
                       out_dir + "/removed_features.csv"};
    write_manifest(manifest, out_dir);
    std::cout << "sessions: " << clean.sessions.size() << "\n"
              << "features kept: " << clean.catalog.size() << "\n"
              << "features removed: " << removed.size() << "\n";
}

void run_label(const std::string& questionnaire_path, const std::string& out_dir) {
    RunManifest manifest = start_manifest("label");
    manifest.inputs = {questionnaire_path};

    auto responses = labels::read_questionnaire(questionnaire_path);
    labels::LabelSet ls = labels::label_responses(responses);
    double alpha = labels::cronbach_alpha(responses);

    fs::create_directories(out_dir);
    labels::write_labels(ls, (fs::path(out_dir) / "labels.csv").string());
    manifest.outputs = {out_dir + "/labels.csv"};
    write_manifest(manifest, out_dir);

    long n_emp = 0;
    for (const auto& [key, label] : ls.labels) {
        if (label == labels::EmpathyLabel::empathic) ++n_emp;
    }
    std::cout << "responses: " << responses.size() << "\n"
              << "cronbach_alpha: " << format_double(alpha) << "\n"
              << "median: " << format_double(ls.median) << "\n"
              << "empathic: " << n_emp << " / " << ls.labels.size() << "\n";
}

void run_featurize(const std::string& data_dir, const std::string& labels_path,
                   const std::string& out_dir) {
    RunManifest manifest = start_manifest("featurize");
    manifest.inputs = {data_dir};

    ingest::Dataset ds = ingest::load_dataset(data_dir);
    labels::LabelSet ls;
    const labels::LabelSet* ls_ptr = nullptr;
    if (!labels_path.empty()) {
        ls = labels::read_labels(labels_path);
        ls_ptr = &ls;
        manifest.inputs.push_back(labels_path);
    }
    features::SummaryTable table = features::featurize_dataset(ds, ls_ptr);

    fs::create_directories(fs::path(out_dir) / "sequences");
    features::write_summary_table(table, (fs::path(out_dir) / "summary.csv").string());
    for (const auto& s : ds.sessions) {
        features::ResampledSequence seq = features::resample_sequence(s, ds.catalog);
        features::write_resampled(seq, (fs::path(out_dir) / "sequences" / (s.id() + ".csv")).string());
    }
    manifest.outputs = {out_dir + "/summary.csv", out_dir + "/sequences"};
    write_manifest(manifest, out_dir);
    std::cout << "samples: " << table.n_samples() << "\n"
              << "summary features: " << table.n_features() << "\n";
}

void run_train(const std::string& features_path, const std::string& config_path, uint64_t seed,
               bool seed_given, const std::string& out_dir) {
    RunManifest manifest = start_manifest("train");
    manifest.config_path = config_path;
    manifest.inputs = {features_path, config_path};

    learn::ModelSpec spec = load_json(config_path).get<learn::ModelSpec>();
    if (seed_given) spec.seed = seed;
    manifest.seed = spec.seed;

    features::SummaryTable table = features::read_summary_table(features_path);
    Matrix X(table.n_samples(), table.n_features());
    for (size_t i = 0; i < table.n_samples(); ++i) {
        const auto& v = table.samples[i].vector;
        std::copy(v.begin(), v.end(), X.row(i).begin());
    }
    learn::TrainedModel model = learn::fit(spec, X, table.label_vector());
    model.feature_names = table.feature_names;

    fs::create_directories(out_dir);
    std::string model_path = (fs::path(out_dir) / "model.json").string();
    {
        std::ofstream out(model_path, std::ios::binary);
        if (!out) throw UsageError("cannot write file: " + model_path);
        out << learn::serialize_model(model) << '\n';
    }
    manifest.outputs = {model_path};
    write_manifest(manifest, out_dir);
    std::cout << "algorithm: " << learn::algorithm_name(spec.algorithm) << "\n"
              << "features: " << model.feature_count << "\n"
              << "model: " << model_path << "\n";
}

void write_report_files(const harness::CVReport& report, const std::string& out_dir) {
    harness::write_cv_report(report, (fs::path(out_dir) / "cv_report.json").string());
    harness::write_fold_csv(report, (fs::path(out_dir) / "cv_folds.csv").string());
    harness::write_summary_csv(report, (fs::path(out_dir) / "cv_summary.csv").string());
}

void run_evaluate(const std::string& features_path, const std::string& config_path,
                  const std::string& grid_path, uint64_t seed, bool seed_given, int jobs,
                  const std::string& out_dir) {
    RunManifest manifest = start_manifest("evaluate");
    manifest.config_path = config_path;
    manifest.inputs = {features_path, config_path};
    manifest.jobs = jobs;

    harness::CVConfig config = load_json(config_path).get<harness::CVConfig>();
    if (seed_given) {
        config.seed = seed;
        config.model.seed = derive_seed(seed, 1);
    }
    manifest.seed = config.seed;

    features::SummaryTable table = features::read_summary_table(features_path);
    fs::create_directories(out_dir);

    if (grid_path.empty()) {
        harness::CVReport report = harness::run_cv(table, config, jobs);
        write_report_files(report, out_dir);
        manifest.outputs = {out_dir + "/cv_report.json", out_dir + "/cv_folds.csv",
                           out_dir + "/cv_summary.csv"};
        std::cout << "folds: " << report.folds.size() << "\n"
                  << "accuracy: " << format_double(report.aggregate.accuracy) << "\n"
                  << "auc_roc: " << format_double(report.aggregate.auc_roc) << "\n"
                  << "auc_pr: " << format_double(report.aggregate.auc_pr) << "\n";
    } else {
        manifest.inputs.push_back(grid_path);
        auto grid = load_json(grid_path).get<std::vector<learn::ModelSpec>>();
        if (seed_given) {
            for (size_t g = 0; g < grid.size(); ++g) {
                grid[g].seed = derive_seed(seed, 2, g);
            }
        }
        auto ranked = harness::grid_search(table, grid, config, jobs);
        csv::Writer w((fs::path(out_dir) / "grid_summary.csv").string());
        w.row({"rank", "algorithm", "accuracy", "auc_roc", "auc_pr"});
        for (size_t i = 0; i < ranked.size(); ++i) {
            const auto& agg = ranked[i].second.aggregate;
            w.row({std::to_string(i + 1), learn::algorithm_name(ranked[i].first.algorithm),
                   format_double(agg.accuracy), format_double(agg.auc_roc),
                   format_double(agg.auc_pr)});
        }
        write_report_files(ranked.front().second, out_dir);
        manifest.outputs = {out_dir + "/grid_summary.csv", out_dir + "/cv_report.json",
                           out_dir + "/cv_folds.csv", out_dir + "/cv_summary.csv"};
        std::cout << "grid size: " << ranked.size() << "\n"
                  << "best: " << learn::algorithm_name(ranked.front().first.algorithm)
                  << " accuracy " << format_double(ranked.front().second.aggregate.accuracy)
                  << "\n";
    }
    write_manifest(manifest, out_dir);
}

void run_compare(const std::string& report_a, const std::string& report_b,
                 const std::string& out_dir) {
    harness::CVReport a = harness::read_cv_report(report_a);
    harness::CVReport b = harness::read_cv_report(report_b);
    stats::TestResult r = harness::compare_models(a, b);
    std::cout << "test: " << r.test_name << "\n"
              << "statistic: " << format_double(r.statistic) << "\n"
              << "p_value: " << format_double(r.p_value) << "\n"
              << "pairs: " << a.pooled_correctness().size() << "\n";
    if (!out_dir.empty()) {
        RunManifest manifest = start_manifest("compare");
        manifest.inputs = {report_a, report_b};
        fs::create_directories(out_dir);
        csv::Writer w((fs::path(out_dir) / "comparison.csv").string());
        w.row({"test", "statistic", "dof", "p_value"});
        w.row({r.test_name, format_double(r.statistic), format_double(r.dof),
               format_double(r.p_value)});
        manifest.outputs = {out_dir + "/comparison.csv"};
        write_manifest(manifest, out_dir);
    }
}

std::vector<features::ResampledSequence> load_sequences(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw ValidationError("no sequence files in " + dir);
    std::vector<features::ResampledSequence> out;
    for (const auto& p : paths) {
        std::string stem = fs::path(p).stem().string();
        size_t sep = stem.rfind('_');
        if (sep == std::string::npos) {
            throw ValidationError("sequence file name '" + stem + "' is not participant_story");
        }
        out.push_back(
            features::read_resampled(p, stem.substr(0, sep), stem.substr(sep + 1)));
    }
    return out;
}

void run_analyze(const std::string& features_path, const std::string& report_path,
                 long top_n, const std::string& sequences_dir, const std::string& labels_path,
                 const std::string& curve_feature, bool subsets, const std::string& config_path,
                 int jobs, const std::string& out_dir) {
    RunManifest manifest = start_manifest("analyze");
    manifest.inputs = {features_path, report_path};
    manifest.jobs = jobs;
    fs::create_directories(out_dir);

    features::SummaryTable table = features::read_summary_table(features_path);
    harness::CVReport report = harness::read_cv_report(report_path);

    auto findings =
        analysis::rank_feature_contributions(report, table, static_cast<size_t>(top_n));
    analysis::write_findings(findings, (fs::path(out_dir) / "findings.csv").string());
    manifest.outputs.push_back(out_dir + "/findings.csv");
    std::cout << "findings: " << findings.size() << "\n";
    if (!findings.empty()) {
        std::cout << "top: " << findings.front().feature << " importance "
                  << format_double(findings.front().mean_importance) << "\n";
    }

    if (!curve_feature.empty()) {
        if (sequences_dir.empty() || labels_path.empty()) {
            throw UsageError("--curve-feature needs --sequences and --labels");
        }
        manifest.inputs.push_back(sequences_dir);
        manifest.inputs.push_back(labels_path);
        auto sequences = load_sequences(sequences_dir);
        labels::LabelSet ls = labels::read_labels(labels_path);
        analysis::ClassCurves curves =
            analysis::class_conditional_curves(sequences, ls, curve_feature);
        analysis::write_curves(curves, (fs::path(out_dir) / "curves.csv").string());
        analysis::write_curve_means(curves, (fs::path(out_dir) / "curve_means.csv").string());
        manifest.outputs.push_back(out_dir + "/curves.csv");
        manifest.outputs.push_back(out_dir + "/curve_means.csv");
        std::cout << "curve " << curve_feature << ": empathic "
                  << format_double(curves.empathic_mean) << ", less_empathic "
                  << format_double(curves.less_empathic_mean) << "\n";
    }

    if (subsets) {
        if (config_path.empty()) throw UsageError("--subsets needs --config");
        manifest.inputs.push_back(config_path);
        manifest.config_path = config_path;
        harness::CVConfig config = load_json(config_path).get<harness::CVConfig>();
        manifest.seed = config.seed;
        std::vector<std::string> bases;
        for (const auto& name : table.feature_names) {
            std::string base = features::base_feature_of(name);
            if (bases.empty() || bases.back() != base) bases.push_back(base);
        }
        FeatureCatalog catalog = FeatureCatalog::from_names(bases);
        auto results =
            analysis::subset_evaluation(table, group_features(catalog), config, jobs);
        analysis::write_subsets(results, (fs::path(out_dir) / "subsets.csv").string());
        manifest.outputs.push_back(out_dir + "/subsets.csv");
        for (const auto& r : results) {
            std::cout << "subset " << r.group << ": "
                      << (r.skipped ? "skipped (empty)"
                                    : "accuracy " + format_double(r.aggregate.accuracy))
                      << "\n";
        }
    }
    write_manifest(manifest, out_dir);
}

void run_synth(const std::string& config_path, uint64_t seed, bool seed_given,
               const std::string& out_dir) {
    RunManifest manifest = start_manifest("synth");
    manifest.config_path = config_path;
    manifest.inputs = {config_path};

    synth::SynthConfig config = load_json(config_path).get<synth::SynthConfig>();
    if (seed_given) config.seed = seed;
    manifest.seed = config.seed;

    synth::SynthResult result = synth::generate_dataset(config);
    fs::create_directories(out_dir);
    synth::write_synth(result, out_dir);
    manifest.outputs = {out_dir + "/metadata.csv", out_dir + "/sessions",
                       out_dir + "/questionnaire.csv", out_dir + "/truth_labels.csv"};
    write_manifest(manifest, out_dir);
    std::cout << "sessions: " << result.dataset.sessions.size() << "\n"
              << "features: " << result.dataset.catalog.size() << "\n"
              << "frames per session: " << result.dataset.sessions.front().frames.size() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"empathy-detection pipeline"};
    app.require_subcommand(1);

    std::string data_dir, out_dir, questionnaire_path, labels_path, features_path;
    std::string config_path, grid_path, report_a, report_b, sequences_dir, curve_feature;
    uint64_t seed = 0;
    int jobs = 1;
    long top_n = 25;
    bool subsets = false;

    auto* c_ingest = app.add_subcommand("ingest", "parse and clean a frame-level dataset");
    c_ingest->add_option("--data", data_dir, "dataset directory (metadata.csv + sessions/)")
        ->required();
    c_ingest->add_option("--out", out_dir, "output directory")->required();

    auto* c_label = app.add_subcommand("label", "score questionnaires and median-split");
    c_label->add_option("--questionnaire", questionnaire_path, "questionnaire csv")->required();
    c_label->add_option("--out", out_dir, "output directory")->required();

    auto* c_feat = app.add_subcommand("featurize", "summary vectors and 1 Hz sequences");
    c_feat->add_option("--data", data_dir, "dataset directory")->required();
    c_feat->add_option("--labels", labels_path, "labels csv (optional)");
    c_feat->add_option("--out", out_dir, "output directory")->required();

    auto* c_train = app.add_subcommand("train", "fit one model on the full table");
    c_train->add_option("--features", features_path, "summary csv")->required();
    c_train->add_option("--config", config_path, "model spec json")->required();
    auto* train_seed = c_train->add_option("--seed", seed, "override the spec seed");
    c_train->add_option("--out", out_dir, "output directory")->required();

    auto* c_eval = app.add_subcommand("evaluate", "repeated stratified cross-validation");
    c_eval->add_option("--features", features_path, "summary csv")->required();
    c_eval->add_option("--config", config_path, "cv config json")->required();
    c_eval->add_option("--grid", grid_path, "model grid json (optional)");
    auto* eval_seed = c_eval->add_option("--seed", seed, "override config seeds");
    c_eval->add_option("--jobs", jobs, "parallel fold workers");
    c_eval->add_option("--out", out_dir, "output directory")->required();

    auto* c_cmp = app.add_subcommand("compare", "McNemar between two cv reports");
    c_cmp->add_option("--report-a", report_a, "first cv_report.json")->required();
    c_cmp->add_option("--report-b", report_b, "second cv_report.json")->required();
    c_cmp->add_option("--out", out_dir, "output directory (optional)");

    auto* c_ana = app.add_subcommand("analyze", "rankings, curves, subset ablation");
    c_ana->add_option("--features", features_path, "summary csv")->required();
    c_ana->add_option("--report", report_a, "cv_report.json")->required();
    c_ana->add_option("--top-n", top_n, "findings to keep");
    c_ana->add_option("--sequences", sequences_dir, "resampled sequence directory");
    c_ana->add_option("--labels", labels_path, "labels csv (for curves)");
    c_ana->add_option("--curve-feature", curve_feature, "base feature for curves");
    c_ana->add_flag("--subsets", subsets, "run the per-group ablation");
    c_ana->add_option("--config", config_path, "cv config json (for --subsets)");
    c_ana->add_option("--jobs", jobs, "parallel fold workers");
    c_ana->add_option("--out", out_dir, "output directory")->required();

    auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset");
    c_synth->add_option("--config", config_path, "synth config json")->required();
    auto* synth_seed = c_synth->add_option("--seed", seed, "override the config seed");
    c_synth->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_ingest) run_ingest(data_dir, out_dir);
        else if (*c_label) run_label(questionnaire_path, out_dir);
        else if (*c_feat) run_featurize(data_dir, labels_path, out_dir);
        else if (*c_train) run_train(features_path, config_path, seed, !train_seed->empty(), out_dir);
        else if (*c_eval) {
            run_evaluate(features_path, config_path, grid_path, seed, !eval_seed->empty(), jobs,
                         out_dir);
        } else if (*c_cmp) run_compare(report_a, report_b, out_dir);
        else if (*c_ana) {
            run_analyze(features_path, report_a, top_n, sequences_dir, labels_path, curve_feature,
                        subsets, config_path, jobs, out_dir);
        } else if (*c_synth) run_synth(config_path, seed, !synth_seed->empty(), out_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
