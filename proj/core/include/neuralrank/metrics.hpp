#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuralrank/types.hpp"

namespace neuralrank {

/// Per-class mean vectors. Row k of `centroids` belongs to `classes[k]`.
struct CentroidSet {
    std::vector<ClassId> classes;  ///< sorted, unique
    Matrix centroids;              ///< K x d
    std::vector<std::int64_t> counts;

    std::size_t size() const noexcept { return classes.size(); }
    /// Row index of `label`, or -1 if the class is absent.
    std::int64_t index_of(ClassId label) const noexcept;
};

struct SilhouetteOptions {
    DistanceMetric metric = DistanceMetric::cosine;
    DenominatorMode denominator = DenominatorMode::mean;
    ZeroNormMode zero_norm = ZeroNormMode::error;
    /// Worker threads for the per-sample loop. Results do not depend on it.
    unsigned jobs = 1;
};

struct SilhouetteResult {
    double score = 0.0;
    std::vector<double> per_sample;
    /// Samples with max(a, b) == 0; their silhouette is defined as 0.
    std::int64_t degenerate_count = 0;
    /// Samples alone in their class; cohesion is defined as 0 for them.
    std::int64_t singleton_count = 0;
    /// Class id of the nearest foreign centroid per sample (ties: smallest id).
    std::vector<ClassId> nearest_class;
};

/// 1 - u.v / (|u| |v|). Throws DegenerateVectorError for a zero-norm input
/// unless `zero_norm` is epsilon.
double cosine_distance(std::span<const double> u, std::span<const double> v,
                       ZeroNormMode zero_norm = ZeroNormMode::error);
double euclidean_distance(std::span<const double> u, std::span<const double> v);
double distance(std::span<const double> u, std::span<const double> v, DistanceMetric metric,
                ZeroNormMode zero_norm = ZeroNormMode::error);

CentroidSet compute_centroids(const Matrix& data, std::span<const ClassId> labels,
                              DenominatorMode denominator = DenominatorMode::mean);

/// Mean distance from row i to the other rows of its class (cohesion a_i).
/// A singleton class yields 0.
double intra_distance(std::int64_t i, const Matrix& data, std::span<const ClassId> labels,
                      const SilhouetteOptions& options = {});

struct Separation {
    double distance = 0.0;
    ClassId nearest_class = 0;
};

/// Distance from row i to the nearest centroid of a class other than its own (b_i).
Separation inter_distance(std::int64_t i, const Matrix& data, std::span<const ClassId> labels,
                          const CentroidSet& centroids, const SilhouetteOptions& options = {});

/// Centroid-based silhouette: s_i = (b_i - a_i) / max(a_i, b_i), averaged over rows.
SilhouetteResult silhouette(const Matrix& data, std::span<const ClassId> labels,
                            const SilhouetteOptions& options = {});

/// Distinct labels in ascending order.
std::vector<ClassId> distinct_classes(std::span<const ClassId> labels);

}  // namespace neuralrank
