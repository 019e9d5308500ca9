#include "neuralrank/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "neuralrank/error.hpp"

namespace neuralrank {

namespace {

using json = nlohmann::json;

constexpr const char* kScoreSchema = "neuralrank.score_report/1";

json errors_json(const std::vector<ModelError>& errors) {
    json out = json::array();
    for (const auto& e : errors) out.push_back({{"model_id", e.model_id}, {"kind", e.kind}, {"message", e.message}});
    return out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

template <typename T>
T get_or_throw(const json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end()) throw FormatError(std::string("score report missing key '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("score report key '") + key + "' has the wrong type");
    }
}

}  // namespace

std::string format_double(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

std::string to_json(const ScoreReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"rank", e.rank},
                           {"model_id", e.model_id},
                           {"layer_id", e.layer_id},
                           {"sc_score", e.sc_score},
                           {"degenerate_count", e.degenerate_count},
                           {"singleton_count", e.singleton_count},
                           {"effective_d", e.effective_d},
                           {"d_clamped", e.effective_d < report.requested_d}});
    }
    json root = {
        {"schema", kScoreSchema},
        {"target_dataset_id", report.target_dataset_id},
        {"layer_selector", report.layer_selector},
        {"pca_d", {{"requested", report.requested_d}}},
        {"metric", report.metric},
        {"denominator", report.denominator},
        {"zero_norm", report.zero_norm},
        {"entries", std::move(entries)},
        {"errors", errors_json(report.errors)},
        {"generated_at", report.generated_at},
        {"config_digest", report.config_digest},
    };
    return root.dump(2) + "\n";
}

std::string to_csv(const ScoreReport& report) {
    std::ostringstream out;
    out << "rank,model_id,layer_id,sc_score,effective_d,degenerate_count,singleton_count\n";
    for (const auto& e : report.entries)
        out << e.rank << ',' << csv_field(e.model_id) << ',' << csv_field(e.layer_id) << ','
            << format_double(e.sc_score) << ',' << e.effective_d << ',' << e.degenerate_count << ','
            << e.singleton_count << '\n';
    return out.str();
}

ScoreReport score_report_from_json(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("score report is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw FormatError("score report must be a JSON object");
    if (auto schema = root.find("schema"); schema != root.end() && *schema != kScoreSchema)
        throw FormatError("unsupported score report schema " + schema->dump());

    ScoreReport report;
    report.target_dataset_id = root.value("target_dataset_id", "");
    report.layer_selector = root.value("layer_selector", "");
    if (auto pca = root.find("pca_d"); pca != root.end() && pca->is_object())
        report.requested_d = pca->value("requested", std::int64_t{0});
    report.metric = root.value("metric", "");
    report.denominator = root.value("denominator", "");
    report.zero_norm = root.value("zero_norm", "");
    report.generated_at = root.value("generated_at", "");
    report.config_digest = root.value("config_digest", "");

    auto entries = root.find("entries");
    if (entries == root.end() || !entries->is_array()) throw FormatError("score report missing entries");
    for (const auto& node : *entries) {
        ScoreEntry e;
        e.model_id = get_or_throw<std::string>(node, "model_id");
        e.sc_score = get_or_throw<double>(node, "sc_score");
        e.layer_id = node.value("layer_id", "");
        e.rank = node.value("rank", std::int64_t{0});
        e.degenerate_count = node.value("degenerate_count", std::int64_t{0});
        e.singleton_count = node.value("singleton_count", std::int64_t{0});
        e.effective_d = node.value("effective_d", std::int64_t{0});
        report.entries.push_back(std::move(e));
    }
    if (auto errors = root.find("errors"); errors != root.end() && errors->is_array())
        for (const auto& node : *errors)
            report.errors.push_back(
                {node.value("model_id", ""), node.value("kind", ""), node.value("message", "")});
    return report;
}

std::string to_json(const SweepReport& report) {
    json layers = json::array();
    for (const auto& p : report.layers) {
        json node = {{"layer_id", p.layer_id}};
        if (p.sc_score) {
            node["sc_score"] = *p.sc_score;
            node["effective_d"] = p.effective_d;
        } else {
            node["sc_score"] = nullptr;
            node["error"] = p.error;
        }
        layers.push_back(std::move(node));
    }
    json root = {{"schema", "neuralrank.sweep_report/1"}, {"model_id", report.model_id}, {"layers", std::move(layers)}};
    return root.dump(2) + "\n";
}

std::string to_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "model_id,layer_id,sc_score,effective_d,error\n";
    for (const auto& p : report.layers)
        out << csv_field(report.model_id) << ',' << csv_field(p.layer_id) << ','
            << (p.sc_score ? format_double(*p.sc_score) : "") << ',' << (p.sc_score ? std::to_string(p.effective_d) : "")
            << ',' << csv_field(p.error) << '\n';
    return out.str();
}

std::string to_json(const SensitivityReport& report) {
    json curves = json::array();
    for (const auto& c : report.curves) curves.push_back({{"model_id", c.model_id}, {"sc_scores", c.sc_scores}});
    json root = {{"schema", "neuralrank.sensitivity_report/1"},
                 {"d_grid", report.d_grid},
                 {"curves", std::move(curves)},
                 {"ranking_change_points", report.ranking_change_points},
                 {"errors", errors_json(report.errors)}};
    return root.dump(2) + "\n";
}

std::string to_csv(const SensitivityReport& report) {
    std::ostringstream out;
    out << "model_id,d,sc_score\n";
    for (const auto& c : report.curves)
        for (std::size_t g = 0; g < report.d_grid.size(); ++g)
            out << csv_field(c.model_id) << ',' << report.d_grid[g] << ',' << format_double(c.sc_scores[g]) << '\n';
    return out.str();
}

std::string to_json(const AgreementReport& report) {
    json pairs = json::array();
    for (const auto& p : report.pairs)
        pairs.push_back({{"model_id", p.model_id}, {"sc_score", p.sc_score}, {"accuracy", p.accuracy}});
    json root = {{"schema", "neuralrank.agreement_report/1"},
                 {"spearman_rho", report.spearman_rho},
                 {"kendall_tau", report.kendall_tau},
                 {"top3_match", report.top_k_match(3)},
                 {"pairs", std::move(pairs)}};
    return root.dump(2) + "\n";
}

std::string to_csv(const AgreementReport& report) {
    std::ostringstream out;
    out << "model_id,sc_score,accuracy\n";
    for (const auto& p : report.pairs)
        out << csv_field(p.model_id) << ',' << format_double(p.sc_score) << ',' << format_double(p.accuracy) << '\n';
    return out.str();
}

}  // namespace neuralrank
