#include "neuralrank/ranker.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "neuralrank/digest.hpp"
#include "neuralrank/error.hpp"
#include "neuralrank/rank_correlation.hpp"
#include "neuralrank/reduction.hpp"
#include "neuralrank/report_io.hpp"
#include "parallel.hpp"

namespace neuralrank {

namespace {

constexpr std::string_view kLastDense = "last-dense";
constexpr std::string_view kIndexPrefix = "index:";

std::string error_kind(const std::exception_ptr& failure) {
    try {
        std::rethrow_exception(failure);
    } catch (const LookupError&) {
        return "lookup";
    } catch (const ValidationError&) {
        return "validation";
    } catch (const FormatError&) {
        return "format";
    } catch (const IoError&) {
        return "io";
    } catch (const ResolutionError&) {
        return "resolution";
    } catch (const DegenerateVectorError&) {
        return "degenerate";
    } catch (...) {
        return "error";
    }
}

std::string error_message(const std::exception_ptr& failure) {
    try {
        std::rethrow_exception(failure);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

ModelError capture(const std::string& model_id, const std::exception_ptr& failure) {
    return {model_id, error_kind(failure), error_message(failure)};
}

/// Loads the layer file and checks it against the manifest's declarations.
EmbeddingSet load_layer(const ZooManifest& manifest, const ModelEntry& model, const LayerEntry& layer) {
    EmbeddingSet set = read_embedding_file(layer.path);
    if (set.dims() != layer.dims)
        throw ValidationError("model '" + model.model_id + "', layer '" + layer.layer_id + "': manifest declares " +
                              std::to_string(layer.dims) + " dims, file has " + std::to_string(set.dims()));
    if (!manifest.dataset_id.empty() && set.dataset_id != manifest.dataset_id)
        throw ValidationError("model '" + model.model_id + "', layer '" + layer.layer_id + "': file targets dataset '" +
                              set.dataset_id + "', manifest targets '" + manifest.dataset_id + "'");
    return set;
}

SilhouetteOptions silhouette_options(const ScoringConfig& config, unsigned jobs) {
    return {config.metric, config.denominator, config.zero_norm, jobs};
}

/// Splits `jobs` between concurrent models and the per-sample loop inside each.
std::pair<unsigned, unsigned> split_jobs(unsigned jobs, std::size_t models) {
    const unsigned total = std::max(1u, jobs);
    const unsigned outer = static_cast<unsigned>(std::clamp<std::size_t>(models, 1, total));
    return {outer, std::max(1u, total / outer)};
}

void sort_and_rank(std::vector<ScoreEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ScoreEntry& l, const ScoreEntry& r) {
        if (l.sc_score != r.sc_score) return l.sc_score > r.sc_score;
        return l.model_id < r.model_id;
    });
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k].rank = static_cast<std::int64_t>(k + 1);
}

std::string joined_errors(const std::vector<ModelError>& errors) {
    std::string text;
    for (const auto& e : errors) text += (text.empty() ? "" : "; ") + e.model_id + ": " + e.message;
    return text;
}

}  // namespace

LayerSelector::LayerSelector(std::string text) : text_(std::move(text)) {
    if (text_.empty()) throw ValidationError("layer selector is empty");
    if (text_ == kLastDense) {
        kind_ = Kind::last_dense;
    } else if (text_.starts_with(kIndexPrefix)) {
        const std::string_view digits = std::string_view(text_).substr(kIndexPrefix.size());
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index_);
        if (ec != std::errc{} || end != digits.data() + digits.size() || digits.empty())
            throw ValidationError("layer selector '" + text_ + "': expected index:<non-negative integer>");
        kind_ = Kind::index;
    } else {
        kind_ = Kind::id;
    }
}

const LayerEntry& LayerSelector::resolve(const ModelEntry& model) const {
    switch (kind_) {
        case Kind::last_dense: {
            const LayerEntry* flagged = nullptr;
            for (const auto& layer : model.layers)
                if (layer.last_dense) flagged = &layer;
            if (flagged) return *flagged;
            if (model.layers.empty()) throw LookupError("model '" + model.model_id + "' declares no layers");
            return model.layers.back();
        }
        case Kind::index:
            if (index_ >= model.layers.size())
                throw LookupError("model '" + model.model_id + "' has " + std::to_string(model.layers.size()) +
                                  " layers; layer index " + std::to_string(index_) + " is out of range");
            return model.layers[index_];
        case Kind::id:
            if (const auto* layer = model.find_layer(text_)) return *layer;
            throw LookupError("model '" + model.model_id + "' has no layer '" + text_ + "'");
    }
    throw LookupError("unreachable layer selector kind");
}

std::string ScoringConfig::digest() const {
    std::ostringstream canonical;
    canonical << "layer=" << layer.text() << ";pca_d=" << pca_d << ";metric=" << to_string(metric)
              << ";denominator=" << to_string(denominator) << ";zero_norm=" << to_string(zero_norm);
    return digest_string(canonical.str());
}

bool AgreementReport::top_k_match(std::size_t k) const {
    if (k > pairs.size()) k = pairs.size();
    auto top = [&](auto key) {
        std::vector<const Pair*> order;
        for (const auto& p : pairs) order.push_back(&p);
        std::stable_sort(order.begin(), order.end(), [&](const Pair* l, const Pair* r) {
            if (key(*l) != key(*r)) return key(*l) > key(*r);
            return l->model_id < r->model_id;
        });
        std::set<std::string> ids;
        for (std::size_t i = 0; i < k; ++i) ids.insert(order[i]->model_id);
        return ids;
    };
    return top([](const Pair& p) { return p.sc_score; }) == top([](const Pair& p) { return p.accuracy; });
}

LayerScore score_embedding(const EmbeddingSet& set, const ScoringConfig& config) {
    validate(set);
    const PCAProjection projection = pca_fit_transform(set.data, config.pca_d);
    LayerScore score;
    score.effective_d = projection.effective_d();
    score.silhouette = silhouette(projection.reduced, set.labels, silhouette_options(config, config.jobs));
    return score;
}

ScoreReport neural_rank(const ZooManifest& manifest, const ScoringConfig& config) {
    if (config.pca_d < 1) throw ValidationError("pca_d must be >= 1");
    const auto& models = manifest.models;
    const auto [outer, inner] = split_jobs(config.jobs, models.size());
    ScoringConfig per_model = config;
    per_model.jobs = inner;

    std::vector<std::optional<ScoreEntry>> scored(models.size());
    std::vector<std::exception_ptr> failures(models.size());
    detail::parallel_for(static_cast<std::int64_t>(models.size()), outer, [&](std::int64_t m) {
        const auto& model = models[m];
        try {
            const LayerEntry& layer = config.layer.resolve(model);
            const LayerScore score = score_embedding(load_layer(manifest, model, layer), per_model);
            scored[m] = ScoreEntry{model.model_id,
                                   layer.layer_id,
                                   score.silhouette.score,
                                   score.silhouette.degenerate_count,
                                   score.silhouette.singleton_count,
                                   score.effective_d,
                                   0};
        } catch (...) {
            failures[m] = std::current_exception();
        }
    });

    ScoreReport report;
    report.target_dataset_id = manifest.dataset_id;
    report.layer_selector = config.layer.text();
    report.requested_d = config.pca_d;
    report.metric = to_string(config.metric);
    report.denominator = to_string(config.denominator);
    report.zero_norm = to_string(config.zero_norm);
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (scored[m]) report.entries.push_back(*scored[m]);
        else report.errors.push_back(capture(models[m].model_id, failures[m]));
    }
    if (report.entries.empty()) throw Error("no model could be scored: " + joined_errors(report.errors));
    sort_and_rank(report.entries);
    report.generated_at = utc_timestamp();
    report.config_digest = config.digest();
    return report;
}

SweepReport layer_sweep(const ZooManifest& manifest, const std::string& model_id, const ScoringConfig& config) {
    const ModelEntry* model = manifest.find_model(model_id);
    if (!model) throw LookupError("unknown model '" + model_id + "'");
    const auto [outer, inner] = split_jobs(config.jobs, model->layers.size());
    ScoringConfig per_layer = config;
    per_layer.jobs = inner;

    SweepReport report;
    report.model_id = model_id;
    report.layers.resize(model->layers.size());
    detail::parallel_for(static_cast<std::int64_t>(model->layers.size()), outer, [&](std::int64_t n) {
        const auto& layer = model->layers[n];
        auto& point = report.layers[n];
        point.layer_id = layer.layer_id;
        try {
            const LayerScore score = score_embedding(load_layer(manifest, *model, layer), per_layer);
            point.sc_score = score.silhouette.score;
            point.effective_d = score.effective_d;
        } catch (...) {
            point.error = error_message(std::current_exception());
        }
    });
    return report;
}

SensitivityReport pca_sensitivity(const ZooManifest& manifest, const std::vector<std::int64_t>& d_grid,
                                  const ScoringConfig& config) {
    if (d_grid.empty()) throw ValidationError("sensitivity: D grid is empty");
    for (std::size_t g = 0; g < d_grid.size(); ++g) {
        if (d_grid[g] < 1) throw ValidationError("sensitivity: D values must be >= 1");
        if (g > 0 && d_grid[g] <= d_grid[g - 1]) throw ValidationError("sensitivity: D grid must be strictly increasing");
    }
    const auto& models = manifest.models;
    const auto [outer, inner] = split_jobs(config.jobs, models.size());
    const SilhouetteOptions options = silhouette_options(config, inner);

    std::vector<std::optional<std::vector<double>>> curves(models.size());
    std::vector<std::exception_ptr> failures(models.size());
    detail::parallel_for(static_cast<std::int64_t>(models.size()), outer, [&](std::int64_t m) {
        const auto& model = models[m];
        try {
            const EmbeddingSet set = load_layer(manifest, model, config.layer.resolve(model));
            validate(set);
            // Leading components do not depend on how many are requested, so one
            // fit at the largest D serves every grid point.
            const PCAProjection projection = pca_fit_transform(set.data, d_grid.back());
            std::vector<double> curve;
            for (const auto d : d_grid) {
                const auto cols = std::min(d, projection.effective_d());
                const Matrix reduced = projection.reduced.leftCols(cols);
                curve.push_back(silhouette(reduced, set.labels, options).score);
            }
            curves[m] = std::move(curve);
        } catch (...) {
            failures[m] = std::current_exception();
        }
    });

    SensitivityReport report;
    report.d_grid = d_grid;
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (curves[m]) report.curves.push_back({models[m].model_id, *curves[m]});
        else report.errors.push_back(capture(models[m].model_id, failures[m]));
    }
    if (report.curves.empty()) throw Error("no model could be scored: " + joined_errors(report.errors));

    std::vector<std::string> previous;
    for (std::size_t g = 0; g < d_grid.size(); ++g) {
        std::vector<ScoreEntry> entries;
        for (const auto& curve : report.curves) entries.push_back({curve.model_id, "", curve.sc_scores[g], 0, 0, 0, 0});
        sort_and_rank(entries);
        std::vector<std::string> order;
        for (const auto& e : entries) order.push_back(e.model_id);
        if (g > 0 && order != previous) report.ranking_change_points.push_back(d_grid[g]);
        previous = std::move(order);
    }
    return report;
}

AgreementReport rank_accuracy_agreement(const ScoreReport& report, const ZooManifest& manifest) {
    AgreementReport agreement;
    for (const auto& entry : report.entries) {
        const ModelEntry* model = manifest.find_model(entry.model_id);
        if (model && model->reported_accuracy)
            agreement.pairs.push_back({entry.model_id, entry.sc_score, *model->reported_accuracy});
    }
    if (agreement.pairs.size() < 2)
        throw ValidationError("agreement: need at least 2 scored models with a reported accuracy, found " +
                              std::to_string(agreement.pairs.size()));
    std::vector<double> scores, accuracies;
    for (const auto& p : agreement.pairs) {
        scores.push_back(p.sc_score);
        accuracies.push_back(p.accuracy);
    }
    agreement.spearman_rho = spearman_rho(scores, accuracies);
    agreement.kendall_tau = kendall_tau(scores, accuracies);
    return agreement;
}

void viz_export(const EmbeddingSet& set, std::ostream& out) {
    validate(set);
    const PCAProjection projection = pca_fit_transform(set.data, 3);
    out << "x,y,z,label\n";
    for (std::int64_t i = 0; i < set.rows(); ++i) {
        for (std::int64_t k = 0; k < 3; ++k) {
            const double v = k < projection.effective_d() ? projection.reduced(i, k) : 0.0;
            out << format_double(v) << ',';
        }
        out << set.labels[i] << '\n';
    }
    if (!out) throw IoError("failed to write visualization CSV");
}

}  // namespace neuralrank
