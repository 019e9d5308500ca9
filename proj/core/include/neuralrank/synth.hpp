#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "neuralrank/embedding_store.hpp"

namespace neuralrank {

/// Parameters of a planted-separation model zoo.
///
/// Each model's "dense" layer holds K Gaussian classes with unit within-class
/// standard deviation per axis. Class centers sit on random orthonormal
/// directions, scaled so the distance between any two centers equals
/// `separation * sqrt(dims)`, i.e. `separation` times the within-class RMS
/// radius. Every model also gets an identical "input" layer.
struct SynthSpec {
    std::vector<double> separations;
    std::int64_t classes = 5;
    std::int64_t samples = 500;
    std::int64_t dims = 64;
    std::uint64_t seed = 0;
    std::string dataset_id = "synthetic";
    double input_separation = 0.5;
};

void validate(const SynthSpec& spec);

/// Model id for the i-th separation level.
std::string synth_model_id(std::size_t index);

/// One model's planted embeddings; deterministic in (spec.seed, stream).
EmbeddingSet synth_embedding(const SynthSpec& spec, double separation, std::uint64_t stream,
                             const std::string& model_id, const std::string& layer_id);

/// Writes `<dir>/zoo.json` plus one NRNK file per (model, layer) and returns
/// the loaded manifest.
ZooManifest synth_zoo(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace neuralrank
