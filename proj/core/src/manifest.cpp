#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "neuralrank/embedding_store.hpp"
#include "neuralrank/error.hpp"

namespace neuralrank {

namespace {

using json = nlohmann::json;

std::string field_text(const json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
}

LayerEntry parse_layer(const json& node, const std::string& model_id, const std::filesystem::path& base_dir) {
    if (!node.is_object()) throw ValidationError("model '" + model_id + "': layer entries must be objects");
    LayerEntry layer;
    auto id = node.find("layer_id");
    if (id == node.end() || !id->is_string() || id->get<std::string>().empty())
        throw ValidationError("model '" + model_id + "': layer is missing a layer_id");
    layer.layer_id = id->get<std::string>();

    auto dims = node.find("dims");
    if (dims == node.end() || !dims->is_number_integer() || dims->get<std::int64_t>() < 1)
        throw ValidationError("model '" + model_id + "', layer '" + layer.layer_id + "': dims must be an integer >= 1");
    layer.dims = dims->get<std::int64_t>();

    auto path = node.find("path");
    if (path == node.end() || !path->is_string() || path->get<std::string>().empty())
        throw ValidationError("model '" + model_id + "', layer '" + layer.layer_id + "': missing path");
    std::filesystem::path p(path->get<std::string>());
    layer.path = p.is_absolute() ? p : base_dir / p;

    if (auto flag = node.find("last_dense"); flag != node.end()) {
        if (!flag->is_boolean())
            throw ValidationError("model '" + model_id + "', layer '" + layer.layer_id + "': last_dense must be boolean");
        layer.last_dense = flag->get<bool>();
    }
    return layer;
}

ModelEntry parse_model(const json& node, const std::filesystem::path& base_dir) {
    if (!node.is_object()) throw ValidationError("models: entries must be objects");
    ModelEntry model;
    auto id = node.find("model_id");
    if (id == node.end() || !id->is_string() || id->get<std::string>().empty())
        throw ValidationError("models: entry is missing a model_id");
    model.model_id = id->get<std::string>();

    auto layers = node.find("layers");
    if (layers == node.end() || !layers->is_array() || layers->empty())
        throw ValidationError("model '" + model.model_id + "': must list at least one layer");
    std::set<std::string> seen;
    for (const auto& l : *layers) {
        model.layers.push_back(parse_layer(l, model.model_id, base_dir));
        if (!seen.insert(model.layers.back().layer_id).second)
            throw ValidationError("model '" + model.model_id + "': duplicate layer_id '" +
                                  model.layers.back().layer_id + "'");
    }

    if (auto meta = node.find("metadata"); meta != node.end() && !meta->is_null()) {
        if (!meta->is_object()) throw ValidationError("model '" + model.model_id + "': metadata must be an object");
        for (const auto& [key, value] : meta->items()) model.metadata[key] = field_text(value);
    }

    if (auto acc = node.find("accuracy"); acc != node.end() && !acc->is_null()) {
        if (!acc->is_number()) throw ValidationError("model '" + model.model_id + "': accuracy must be a number");
        const double value = acc->get<double>();
        if (!(value >= 0.0 && value <= 1.0))
            throw ValidationError("model '" + model.model_id + "': accuracy must lie in [0, 1]");
        model.reported_accuracy = value;
    }
    return model;
}

}  // namespace

const LayerEntry* ModelEntry::find_layer(std::string_view layer_id) const {
    for (const auto& layer : layers)
        if (layer.layer_id == layer_id) return &layer;
    return nullptr;
}

const ModelEntry* ZooManifest::find_model(std::string_view model_id) const {
    for (const auto& model : models)
        if (model.model_id == model_id) return &model;
    return nullptr;
}

ZooManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ManifestOptions& options) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw FormatError("manifest must be a JSON object");

    ZooManifest manifest;
    auto dataset = root.find("dataset_id");
    if (dataset == root.end() || !dataset->is_string()) throw ValidationError("manifest: missing dataset_id");
    manifest.dataset_id = dataset->get<std::string>();

    auto models = root.find("models");
    if (models == root.end() || !models->is_array()) throw ValidationError("manifest: missing models list");
    if (models->empty()) throw ValidationError("manifest: models list is empty");

    std::set<std::string> ids;
    for (const auto& node : *models) {
        manifest.models.push_back(parse_model(node, base_dir));
        if (!ids.insert(manifest.models.back().model_id).second)
            throw ValidationError("manifest: duplicate model_id '" + manifest.models.back().model_id + "'");
    }

    if (options.require_files) {
        std::ostringstream missing;
        std::size_t count = 0;
        for (const auto& model : manifest.models)
            for (const auto& layer : model.layers)
                if (!std::filesystem::is_regular_file(layer.path)) {
                    missing << (count++ ? "; " : "") << model.model_id << "/" << layer.layer_id << " -> "
                            << layer.path.string();
                }
        if (count > 0)
            throw ResolutionError("manifest references " + std::to_string(count) +
                                  " missing embedding file(s): " + missing.str());
    }
    return manifest;
}

ZooManifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    auto manifest = parse_manifest(text.str(), path.parent_path(), options);
    manifest.source = path;
    return manifest;
}

std::string manifest_to_json(const ZooManifest& manifest, const std::filesystem::path& base_dir) {
    json models = json::array();
    for (const auto& model : manifest.models) {
        json layers = json::array();
        for (const auto& layer : model.layers) {
            auto relative = layer.path.lexically_relative(base_dir);
            json entry = {
                {"layer_id", layer.layer_id},
                {"dims", layer.dims},
                {"path", (relative.empty() ? layer.path : relative).generic_string()},
            };
            if (layer.last_dense) entry["last_dense"] = true;
            layers.push_back(std::move(entry));
        }
        json node = {{"model_id", model.model_id}, {"layers", std::move(layers)}, {"metadata", model.metadata}};
        if (model.reported_accuracy) node["accuracy"] = *model.reported_accuracy;
        models.push_back(std::move(node));
    }
    json root = {{"dataset_id", manifest.dataset_id}, {"models", std::move(models)}};
    return root.dump(2) + "\n";
}

}  // namespace neuralrank
