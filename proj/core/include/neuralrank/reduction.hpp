#pragma once

#include <cstdint>

#include "neuralrank/types.hpp"

namespace neuralrank {

/// Centered (not whitened) principal component projection.
struct PCAProjection {
    Vector mean;                 ///< d column means
    Matrix components;           ///< D x d, orthonormal rows, descending variance
    Vector explained_variance;   ///< D, non-increasing, sample variance (T - 1)
    Matrix reduced;              ///< T x D coordinates
    std::int64_t requested_d = 0;
    double total_variance = 0.0; ///< trace of the sample covariance

    std::int64_t effective_d() const noexcept { return components.rows(); }
    bool clamped() const noexcept { return effective_d() < requested_d; }
};

/// Fits PCA through an SVD of the centered data and projects onto the top
/// components. D is clamped to min(requested_d, T - 1, d, numerical rank).
/// Each component is sign-normalized so its largest-magnitude entry is >= 0.
PCAProjection pca_fit_transform(const Matrix& data, std::int64_t requested_d);
PCAProjection pca_fit_transform(const FloatMatrix& data, std::int64_t requested_d);

/// (data - mean) * components^T
Matrix pca_transform(const PCAProjection& projection, const Matrix& data);

}  // namespace neuralrank
