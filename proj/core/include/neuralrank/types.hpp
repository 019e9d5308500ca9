#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace neuralrank {

using ClassId = std::uint32_t;

/// Row-major double matrix used for all scoring math.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Row-major float matrix matching the on-disk activation payload.
using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class DistanceMetric { cosine, euclidean };

/// How the centroid and cohesion sums are normalized.
///  - mean: divide by the number of terms summed (class size, class size - 1).
///  - literal: divide by the total sample count T for both.
enum class DenominatorMode { mean, literal };

/// Zero-norm rows under cosine: fail, or add a 1e-12 floor to every norm.
enum class ZeroNormMode { error, epsilon };

inline constexpr double kZeroNormEpsilon = 1e-12;

std::string_view to_string(DistanceMetric metric) noexcept;
std::string_view to_string(DenominatorMode mode) noexcept;
std::string_view to_string(ZeroNormMode mode) noexcept;

DistanceMetric parse_metric(std::string_view text);
DenominatorMode parse_denominator(std::string_view text);
ZeroNormMode parse_zero_norm(std::string_view text);

}  // namespace neuralrank
