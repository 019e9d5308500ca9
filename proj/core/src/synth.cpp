#include "neuralrank/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <Eigen/QR>

#include "neuralrank/error.hpp"

namespace neuralrank {

namespace {

constexpr const char* kInputLayer = "input";
constexpr const char* kDenseLayer = "dense";

std::string format_level(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

}  // namespace

void validate(const SynthSpec& spec) {
    if (spec.separations.empty()) throw ValidationError("synth: at least one separation level is required");
    std::set<double> seen;
    for (double s : spec.separations) {
        if (!std::isfinite(s) || s < 0.0) throw ValidationError("synth: separation levels must be finite and >= 0");
        if (!seen.insert(s).second) throw ValidationError("synth: separation levels must be distinct");
    }
    if (spec.classes < 2) throw ValidationError("synth: need at least 2 classes");
    if (spec.samples < 2 * spec.classes) throw ValidationError("synth: samples must be at least 2 * classes");
    if (spec.dims < 1) throw ValidationError("synth: dims must be >= 1");
    if (!std::isfinite(spec.input_separation) || spec.input_separation < 0.0)
        throw ValidationError("synth: input separation must be finite and >= 0");
}

std::string synth_model_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "model-%02zu", index);
    return buf;
}

EmbeddingSet synth_embedding(const SynthSpec& spec, double separation, std::uint64_t stream,
                             const std::string& model_id, const std::string& layer_id) {
    const auto k = spec.classes;
    const auto d = spec.dims;
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Random directions, orthonormalized when there is room for K of them.
    Eigen::MatrixXd gaussian(d, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < d; ++r) gaussian(r, c) = normal(rng);
    Eigen::MatrixXd directions(d, k);
    if (k <= d) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
        directions = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    } else {
        directions = gaussian.colwise().normalized();
    }
    // |q_a - q_b| = sqrt(2) for orthonormal q, so this puts centers
    // separation * sqrt(d) apart.
    const Eigen::MatrixXd centers = directions * (separation * std::sqrt(static_cast<double>(d)) / std::sqrt(2.0));

    EmbeddingSet set;
    set.model_id = model_id;
    set.layer_id = layer_id;
    set.dataset_id = spec.dataset_id;
    set.data.resize(spec.samples, d);
    set.labels.resize(static_cast<std::size_t>(spec.samples));
    for (std::int64_t i = 0; i < spec.samples; ++i) {
        const auto label = static_cast<ClassId>(i % k);
        set.labels[i] = label;
        for (std::int64_t c = 0; c < d; ++c)
            set.data(i, c) = static_cast<float>(centers(c, label) + normal(rng));
    }
    return set;
}

ZooManifest synth_zoo(const SynthSpec& spec, const std::filesystem::path& dir) {
    validate(spec);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    ZooManifest manifest;
    manifest.dataset_id = spec.dataset_id;

    // Every model sees the same raw inputs, so the input layer is one shared file.
    const auto input_path = dir / "input.nrnk";
    write_embedding_file(synth_embedding(spec, spec.input_separation, 0, "shared-input", kInputLayer), input_path);

    for (std::size_t m = 0; m < spec.separations.size(); ++m) {
        ModelEntry model;
        model.model_id = synth_model_id(m);
        const auto dense_path = dir / (model.model_id + "-dense.nrnk");
        write_embedding_file(synth_embedding(spec, spec.separations[m], m + 1, model.model_id, kDenseLayer),
                             dense_path);
        model.layers.push_back({kInputLayer, spec.dims, input_path, false});
        model.layers.push_back({kDenseLayer, spec.dims, dense_path, true});
        model.metadata["generator"] = "synth";
        model.metadata["separation"] = format_level(spec.separations[m]);
        manifest.models.push_back(std::move(model));
    }

    const auto manifest_path = dir / "zoo.json";
    {
        std::ofstream out(manifest_path, std::ios::trunc);
        if (!out) throw IoError("cannot write '" + manifest_path.string() + "'");
        out << manifest_to_json(manifest, dir);
        if (!out) throw IoError("failed to write '" + manifest_path.string() + "'");
    }
    return load_manifest(manifest_path);
}

}  // namespace neuralrank
