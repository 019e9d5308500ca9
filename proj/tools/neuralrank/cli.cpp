#include "neuralrank/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "neuralrank/digest.hpp"
#include "neuralrank/embedding_store.hpp"
#include "neuralrank/error.hpp"
#include "neuralrank/ranker.hpp"
#include "neuralrank/report_io.hpp"
#include "neuralrank/synth.hpp"

namespace neuralrank::cli {

namespace {

/// Raised for flag combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    RunConfig config;
    std::string out_path;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool literal_denominator = false;
    bool strict = false;
};

void add_output(CLI::App& sub, Common& common, bool with_format = true) {
    sub.add_option("--out", common.out_path, "Write the machine-readable result to this path");
    if (with_format)
        sub.add_option("--format", common.config.format, "Report format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
}

void add_scoring(CLI::App& sub, Common& common) {
    auto& c = common.config;
    sub.add_option("--layer", c.layer, "Layer selector: last-dense, index:N, or a layer id")->capture_default_str();
    sub.add_option("--d", c.pca_d, "PCA target dimensionality")->check(CLI::PositiveNumber)->capture_default_str();
    sub.add_option("--metric", c.metric, "Distance metric")
        ->check(CLI::IsMember({"cosine", "euclidean"}))
        ->capture_default_str();
    sub.add_option("--denominator", c.denominator, "Centroid/cohesion normalization")
        ->check(CLI::IsMember({"mean", "literal"}))
        ->capture_default_str();
    sub.add_flag("--literal-denominator", common.literal_denominator, "Shorthand for --denominator literal");
    sub.add_option("--zero-norm", c.zero_norm, "Zero-norm rows under cosine: error or epsilon")
        ->check(CLI::IsMember({"error", "epsilon"}))
        ->capture_default_str();
    sub.add_option("--jobs", common.jobs, "Worker threads (NEURALRANK_JOBS overrides)")->check(CLI::PositiveNumber);
}

ScoringConfig scoring_config(const Common& common) {
    ScoringConfig config;
    config.layer = LayerSelector(common.config.layer);
    config.pca_d = common.config.pca_d;
    config.metric = parse_metric(common.config.metric);
    config.denominator = parse_denominator(common.config.denominator);
    config.zero_norm = parse_zero_norm(common.config.zero_norm);
    config.jobs = common.jobs;
    return config;
}

void finalize(Common& common) {
    if (common.literal_denominator) common.config.denominator = "literal";
    if (const char* env = std::getenv("NEURALRANK_JOBS"); env && *env) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(env, &end, 10);
        if (*end != '\0' || value == 0 || value > 4096)
            throw UsageError(std::string("NEURALRANK_JOBS must be a positive integer, got '") + env + "'");
        common.jobs = static_cast<unsigned>(value);
    }
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw IoError("failed to write '" + path + "'");
}

/// Machine output goes to --out when given, else to stdout. Returns the
/// stream suitable for the human-readable summary (never the one carrying data).
std::ostream& emit(const std::string& text, const Common& common, std::ostream& out, std::ostream& err) {
    if (common.out_path.empty()) {
        out << text;
        return err;
    }
    write_text(text, common.out_path);
    return out;
}

void warn_errors(const std::vector<ModelError>& errors, std::ostream& err) {
    for (const auto& e : errors) err << "warning: model '" << e.model_id << "' skipped (" << e.kind << "): " << e.message << "\n";
}

int cmd_rank(Common& common, std::ostream& out, std::ostream& err) {
    const auto manifest = load_manifest(common.config.manifest_path);
    ScoreReport report = neural_rank(manifest, scoring_config(common));
    report.config_digest = common.config.digest();
    const bool json = common.config.format == "json";
    std::ostream& human = emit(json ? to_json(report) : to_csv(report), common, out, err);
    human << std::left << std::setw(6) << "rank" << std::setw(24) << "model" << std::setw(16) << "layer"
          << "sc_score\n";
    for (const auto& e : report.entries)
        human << std::setw(6) << e.rank << std::setw(24) << e.model_id << std::setw(16) << e.layer_id
              << std::fixed << std::setprecision(4) << e.sc_score << std::defaultfloat << "\n";
    for (const auto& e : report.entries)
        if (e.effective_d < report.requested_d)
            err << "warning: model '" << e.model_id << "': D clamped from " << report.requested_d << " to "
                << e.effective_d << "\n";
    warn_errors(report.errors, err);
    return common.strict && !report.errors.empty() ? kExitFailure : kExitOk;
}

int cmd_sweep(Common& common, const std::string& model_id, std::ostream& out, std::ostream& err) {
    const auto manifest = load_manifest(common.config.manifest_path);
    const SweepReport report = layer_sweep(manifest, model_id, scoring_config(common));
    const bool json = common.config.format == "json";
    std::ostream& human = emit(json ? to_json(report) : to_csv(report), common, out, err);
    bool any = false;
    for (const auto& p : report.layers) {
        human << std::left << std::setw(16) << p.layer_id;
        if (p.sc_score) {
            any = true;
            human << std::fixed << std::setprecision(4) << *p.sc_score << std::defaultfloat << "\n";
        } else {
            human << "error: " << p.error << "\n";
        }
    }
    if (!any) return kExitFailure;
    return common.strict && report.layers.size() != static_cast<std::size_t>(std::count_if(
                                report.layers.begin(), report.layers.end(), [](const auto& p) { return p.sc_score.has_value(); }))
               ? kExitFailure
               : kExitOk;
}

int cmd_sensitivity(Common& common, const std::vector<std::int64_t>& grid, std::ostream& out, std::ostream& err) {
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (grid[g] < 1 || (g > 0 && grid[g] <= grid[g - 1]))
            throw UsageError("--grid must be strictly increasing positive integers");
    const auto manifest = load_manifest(common.config.manifest_path);
    const SensitivityReport report = pca_sensitivity(manifest, grid, scoring_config(common));
    const bool json = common.config.format == "json";
    std::ostream& human = emit(json ? to_json(report) : to_csv(report), common, out, err);
    human << "ranking change points:";
    if (report.ranking_change_points.empty()) human << " none";
    for (auto d : report.ranking_change_points) human << " " << d;
    human << "\n";
    warn_errors(report.errors, err);
    return common.strict && !report.errors.empty() ? kExitFailure : kExitOk;
}

int cmd_agree(Common& common, const std::string& report_path, std::ostream& out, std::ostream& err) {
    ScoreReport scores;
    ZooManifest manifest;
    if (!report_path.empty()) {
        std::ifstream in(report_path);
        if (!in) throw IoError("cannot open score report '" + report_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        scores = score_report_from_json(text.str());
        manifest = load_manifest(common.config.manifest_path, {.require_files = false});
    } else {
        manifest = load_manifest(common.config.manifest_path);
        scores = neural_rank(manifest, scoring_config(common));
        warn_errors(scores.errors, err);
    }
    const AgreementReport report = rank_accuracy_agreement(scores, manifest);
    const bool json = common.config.format == "json";
    std::ostream& human = emit(json ? to_json(report) : to_csv(report), common, out, err);
    human << "spearman rho = " << format_double(report.spearman_rho)
          << ", kendall tau = " << format_double(report.kendall_tau)
          << ", top-3 match = " << (report.top_k_match(3) ? "yes" : "no") << " (" << report.pairs.size()
          << " models)\n";
    return kExitOk;
}

int cmd_viz(Common& common, const std::string& input, std::ostream& out, std::ostream& err) {
    const EmbeddingSet set = read_embedding_file(input);
    std::ostringstream csv;
    viz_export(set, csv);
    std::ostream& human = emit(csv.str(), common, out, err);
    if (!common.out_path.empty()) human << "wrote " << set.rows() << " rows to " << common.out_path << "\n";
    return kExitOk;
}

std::string describe_offset(const std::exception& e) {
    if (const auto* t = dynamic_cast<const TruncationError*>(&e))
        return " (byte offset " + std::to_string(t->offset()) + ")";
    return "";
}

bool starts_with_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && std::equal(magic, magic + 4, kNrnkMagic);
}

int cmd_validate(Common& common, const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
    std::ostringstream summary;
    int failures = 0;
    auto check_file = [&](const std::string& path) {
        const EmbeddingSet set = read_embedding_file(path);
        return set;
    };
    for (const auto& path : paths) {
        try {
            if (!std::filesystem::exists(path)) throw IoError("no such file");
            if (starts_with_magic(path) || std::filesystem::path(path).extension() == ".nrnk") {
                const EmbeddingSet set = check_file(path);
                summary << "ok " << path << ": nrnk v1, " << set.rows() << "x" << set.dims() << ", "
                        << distinct_classes(set.labels).size() << " classes\n";
                continue;
            }
            const auto manifest = load_manifest(path);
            std::size_t files = 0;
            for (const auto& model : manifest.models) {
                for (const auto& layer : model.layers) {
                    try {
                        const EmbeddingSet set = check_file(layer.path.string());
                        if (set.dims() != layer.dims)
                            throw ValidationError("manifest declares " + std::to_string(layer.dims) + " dims, file has " +
                                                  std::to_string(set.dims()));
                        ++files;
                    } catch (const Error& e) {
                        ++failures;
                        err << "invalid " << path << " [" << model.model_id << "/" << layer.layer_id << " -> "
                            << layer.path.string() << "]: " << e.what() << describe_offset(e) << "\n";
                    }
                }
            }
            summary << "ok " << path << ": manifest, " << manifest.models.size() << " models, " << files
                    << " valid layer files\n";
        } catch (const std::exception& e) {
            ++failures;
            err << "invalid " << path << ": " << e.what() << describe_offset(e) << "\n";
        }
    }
    emit(summary.str(), common, out, err);
    return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_synth(Common& common, const SynthSpec& spec, std::ostream& out, std::ostream&) {
    if (common.out_path.empty()) throw UsageError("synth requires --out <directory>");
    const auto manifest = synth_zoo(spec, common.out_path);
    out << manifest.source.string() << "\n";
    return kExitOk;
}

}  // namespace

std::string RunConfig::digest() const {
    std::ostringstream canonical;
    canonical << "manifest=" << manifest_path << ";layer=" << layer << ";pca_d=" << pca_d << ";metric=" << metric
              << ";denominator=" << denominator << ";zero_norm=" << zero_norm << ";format=" << format
              << ";seed=" << seed;
    return digest_string(canonical.str());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"neuralrank: rank pre-trained models by the cluster quality of their latent-space activations"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    Common common;
    auto& c = common.config;

    auto* rank = app.add_subcommand("rank", "Score and rank every model of a zoo on one layer");
    rank->add_option("--manifest", c.manifest_path, "Zoo manifest (JSON)")->required();
    add_scoring(*rank, common);
    add_output(*rank, common);
    rank->add_flag("--strict", common.strict, "Exit 1 if any model could not be scored");

    std::string model_id;
    auto* sweep = app.add_subcommand("sweep", "Score every declared layer of one model");
    sweep->add_option("--manifest", c.manifest_path, "Zoo manifest (JSON)")->required();
    sweep->add_option("--model", model_id, "Model id")->required();
    add_scoring(*sweep, common);
    add_output(*sweep, common);
    sweep->add_flag("--strict", common.strict, "Exit 1 if any layer could not be scored");

    std::vector<std::int64_t> grid;
    auto* sensitivity = app.add_subcommand("sensitivity", "Score the selected layer over a grid of PCA dimensions");
    sensitivity->add_option("--manifest", c.manifest_path, "Zoo manifest (JSON)")->required();
    sensitivity->add_option("--grid", grid, "Comma-separated, strictly increasing D values")
        ->required()
        ->delimiter(',');
    add_scoring(*sensitivity, common);
    add_output(*sensitivity, common);
    sensitivity->add_flag("--strict", common.strict, "Exit 1 if any model could not be scored");

    std::string report_path;
    auto* agree = app.add_subcommand("agree", "Rank correlation between scores and reported accuracies");
    agree->add_option("--manifest", c.manifest_path, "Manifest carrying per-model accuracy")->required();
    agree->add_option("--report", report_path, "Existing score report (JSON); scores the zoo when omitted");
    add_scoring(*agree, common);
    add_output(*agree, common);

    std::string viz_input;
    auto* viz = app.add_subcommand("viz", "Export a 3-D PCA of one embedding file as CSV");
    viz->add_option("--input", viz_input, "NRNK file")->required();
    add_output(*viz, common, false);

    std::vector<std::string> validate_paths;
    auto* validate_cmd = app.add_subcommand("validate", "Check NRNK files and manifests without scoring");
    validate_cmd->add_option("paths", validate_paths, "NRNK files or manifests")->required();
    add_output(*validate_cmd, common, false);

    SynthSpec spec;
    auto* synth = app.add_subcommand("synth", "Generate a planted-separation zoo");
    synth->add_option("--separations", spec.separations, "Comma-separated separation levels, one model each")
        ->required()
        ->delimiter(',');
    synth->add_option("--classes", spec.classes, "Classes K")->capture_default_str();
    synth->add_option("--samples", spec.samples, "Samples T")->capture_default_str();
    synth->add_option("--dims", spec.dims, "Activation width d")->capture_default_str();
    synth->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    synth->add_option("--dataset-id", spec.dataset_id, "Target dataset id")->capture_default_str();
    synth->add_option("--out", common.out_path, "Output directory")->required();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    }

    try {
        finalize(common);
        if (*rank) return cmd_rank(common, out, err);
        if (*sweep) return cmd_sweep(common, model_id, out, err);
        if (*sensitivity) return cmd_sensitivity(common, grid, out, err);
        if (*agree) return cmd_agree(common, report_path, out, err);
        if (*viz) return cmd_viz(common, viz_input, out, err);
        if (*validate_cmd) return cmd_validate(common, validate_paths, out, err);
        if (*synth) {
            spec.seed = c.seed;
            return cmd_synth(common, spec, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << describe_offset(e) << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace neuralrank::cli
