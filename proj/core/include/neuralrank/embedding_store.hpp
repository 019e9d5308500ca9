#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neuralrank/types.hpp"

namespace neuralrank {

/// Activation matrix of one model layer over a labeled target dataset.
/// Row i is the layer output for sample i; labels[i] is its class id.
struct EmbeddingSet {
    std::string model_id;
    std::string layer_id;
    std::string dataset_id;
    FloatMatrix data;
    std::vector<ClassId> labels;

    std::int64_t rows() const noexcept { return data.rows(); }
    std::int64_t dims() const noexcept { return data.cols(); }

    bool operator==(const EmbeddingSet& other) const;
};

/// Throws ValidationError naming the first violated invariant:
/// rows >= 2, dims >= 1, labels sized to rows, >= 2 classes, finite values.
void validate(const EmbeddingSet& set);

/// NRNK v1 container layout (all integers little-endian):
///   [0,4)      magic "NRNK"
///   [4,8)      u32 format version (1)
///   [8,12)     u32 header length H
///   [12,12+H)  UTF-8 JSON header
///   remainder  rows*dims float32 LE, row-major
inline constexpr char kNrnkMagic[4] = {'N', 'R', 'N', 'K'};
inline constexpr std::uint32_t kNrnkVersion = 1;
inline constexpr std::size_t kNrnkPreambleSize = 12;

std::vector<std::uint8_t> encode_embedding_set(const EmbeddingSet& set);
EmbeddingSet decode_embedding_set(std::span<const std::uint8_t> bytes);

void write_embedding_set(const EmbeddingSet& set, std::ostream& sink);
EmbeddingSet read_embedding_set(std::istream& source);

void write_embedding_file(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embedding_file(const std::filesystem::path& path);

struct LayerEntry {
    std::string layer_id;
    std::int64_t dims = 0;
    std::filesystem::path path;  ///< resolved against the manifest directory
    bool last_dense = false;
};

struct ModelEntry {
    std::string model_id;
    std::vector<LayerEntry> layers;  ///< network order, index 0 = input-most
    std::map<std::string, std::string> metadata;
    std::optional<double> reported_accuracy;

    const LayerEntry* find_layer(std::string_view layer_id) const;
};

struct ZooManifest {
    std::string dataset_id;
    std::vector<ModelEntry> models;
    std::filesystem::path source;  ///< manifest file the entries were loaded from

    const ModelEntry* find_model(std::string_view model_id) const;
};

struct ManifestOptions {
    /// When false, layer paths are resolved but not checked for existence.
    /// Useful for accuracy-only manifests consumed by the agreement step.
    bool require_files = true;
};

ZooManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ManifestOptions& options = {});
ZooManifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

/// Serializes a manifest; layer paths are written relative to `base_dir`.
std::string manifest_to_json(const ZooManifest& manifest, const std::filesystem::path& base_dir);

}  // namespace neuralrank
