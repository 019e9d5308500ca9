#include "neuralrank/types.hpp"

#include <string>

#include "neuralrank/error.hpp"

namespace neuralrank {

std::string_view to_string(DistanceMetric metric) noexcept {
    return metric == DistanceMetric::cosine ? "cosine" : "euclidean";
}

std::string_view to_string(DenominatorMode mode) noexcept {
    return mode == DenominatorMode::mean ? "mean" : "literal";
}

std::string_view to_string(ZeroNormMode mode) noexcept {
    return mode == ZeroNormMode::error ? "error" : "epsilon";
}

DistanceMetric parse_metric(std::string_view text) {
    if (text == "cosine") return DistanceMetric::cosine;
    if (text == "euclidean") return DistanceMetric::euclidean;
    throw ValidationError("unknown metric '" + std::string(text) + "' (expected cosine|euclidean)");
}

DenominatorMode parse_denominator(std::string_view text) {
    if (text == "mean") return DenominatorMode::mean;
    if (text == "literal") return DenominatorMode::literal;
    throw ValidationError("unknown denominator mode '" + std::string(text) + "' (expected mean|literal)");
}

ZeroNormMode parse_zero_norm(std::string_view text) {
    if (text == "error") return ZeroNormMode::error;
    if (text == "epsilon") return ZeroNormMode::epsilon;
    throw ValidationError("unknown zero-norm mode '" + std::string(text) + "' (expected error|epsilon)");
}

}  // namespace neuralrank
