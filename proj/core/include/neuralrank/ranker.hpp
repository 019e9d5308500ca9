#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "neuralrank/embedding_store.hpp"
#include "neuralrank/metrics.hpp"
#include "neuralrank/types.hpp"

namespace neuralrank {

/// Picks one layer per model. Three forms are accepted:
///   "last-dense"   the layer flagged last_dense, else the last declared layer
///   "index:N"      the N-th declared layer (0 = input-most)
///   anything else  an exact layer id
class LayerSelector {
public:
    LayerSelector() : LayerSelector("last-dense") {}
    explicit LayerSelector(std::string text);

    /// Throws LookupError when the model cannot satisfy the selector.
    const LayerEntry& resolve(const ModelEntry& model) const;
    const std::string& text() const noexcept { return text_; }

private:
    enum class Kind { last_dense, index, id };
    std::string text_;
    Kind kind_;
    std::size_t index_ = 0;
};

struct ScoringConfig {
    LayerSelector layer;
    std::int64_t pca_d = 10;
    DistanceMetric metric = DistanceMetric::cosine;
    DenominatorMode denominator = DenominatorMode::mean;
    ZeroNormMode zero_norm = ZeroNormMode::error;
    unsigned jobs = 1;

    /// Stable hash of every field that can change a score ("fnv1a64:<hex>").
    std::string digest() const;
};

struct ScoreEntry {
    std::string model_id;
    std::string layer_id;
    double sc_score = 0.0;
    std::int64_t degenerate_count = 0;
    std::int64_t singleton_count = 0;
    std::int64_t effective_d = 0;
    std::int64_t rank = 0;
};

struct ModelError {
    std::string model_id;
    std::string kind;  ///< lookup | validation | format | io | degenerate | error
    std::string message;
};

struct ScoreReport {
    std::string target_dataset_id;
    std::string layer_selector;
    std::int64_t requested_d = 0;
    std::string metric;
    std::string denominator;
    std::string zero_norm;
    std::vector<ScoreEntry> entries;  ///< sc_score desc, then model_id asc; rank 1..Z
    std::vector<ModelError> errors;
    std::string generated_at;
    std::string config_digest;
};

struct SweepReport {
    struct Point {
        std::string layer_id;
        std::optional<double> sc_score;
        std::int64_t effective_d = 0;
        std::string error;  ///< set when sc_score is empty
    };
    std::string model_id;
    std::vector<Point> layers;
};

struct SensitivityReport {
    struct Curve {
        std::string model_id;
        std::vector<double> sc_scores;  ///< one per grid value
    };
    std::vector<std::int64_t> d_grid;
    std::vector<Curve> curves;
    std::vector<std::int64_t> ranking_change_points;
    std::vector<ModelError> errors;
};

struct AgreementReport {
    struct Pair {
        std::string model_id;
        double sc_score = 0.0;
        double accuracy = 0.0;
    };
    double spearman_rho = 0.0;
    double kendall_tau = 0.0;
    std::vector<Pair> pairs;

    /// True when the k best models by score and by accuracy are the same set.
    bool top_k_match(std::size_t k) const;
};

/// Loads one embedding set and scores it: PCA to D, then silhouette.
struct LayerScore {
    SilhouetteResult silhouette;
    std::int64_t effective_d = 0;
};
LayerScore score_embedding(const EmbeddingSet& set, const ScoringConfig& config);

/// Ranks every model of the zoo on the selected layer. Per-model failures are
/// captured in `errors`; throws Error only when no model could be scored.
ScoreReport neural_rank(const ZooManifest& manifest, const ScoringConfig& config);

/// Scores every declared layer of one model in network order.
SweepReport layer_sweep(const ZooManifest& manifest, const std::string& model_id,
                        const ScoringConfig& config);

/// Scores the selected layer of every model over a strictly increasing D grid.
SensitivityReport pca_sensitivity(const ZooManifest& manifest, const std::vector<std::int64_t>& d_grid,
                                  const ScoringConfig& config);

/// Rank correlation between the report's scores and manifest accuracies.
AgreementReport rank_accuracy_agreement(const ScoreReport& report, const ZooManifest& manifest);

/// Writes "x,y,z,label" CSV rows of a 3-D PCA of the set (axes beyond the
/// effective rank are written as 0).
void viz_export(const EmbeddingSet& set, std::ostream& out);

}  // namespace neuralrank
