#include "neuralrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neuralrank/error.hpp"
#include "parallel.hpp"

namespace neuralrank {

namespace {

/// Rounding in 1 - dot leaves a few ulps for identical directions; snap those to 0.
double clamp_cosine(double value) {
    if (value < 8.0 * std::numeric_limits<double>::epsilon()) return 0.0;
    return std::min(value, 2.0);
}

double norm_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_labels(const Matrix& data, std::span<const ClassId> labels) {
    if (static_cast<std::int64_t>(labels.size()) != data.rows())
        throw ValidationError("labels: length " + std::to_string(labels.size()) + " does not match rows " +
                              std::to_string(data.rows()));
}

/// Precomputed per-class layout shared by cohesion and separation.
///
/// Rows are regrouped into one contiguous block per class. Under cosine the
/// blocks hold unit vectors, so a distance is 1 - dot; under euclidean they
/// hold the raw rows.
class Scorer {
public:
    Scorer(const Matrix& data, std::span<const ClassId> labels, const SilhouetteOptions& options)
        : options_(options), total_rows_(data.rows()) {
        check_labels(data, labels);
        centroids_ = compute_centroids(data, labels, options.denominator);
        const auto k = static_cast<std::int64_t>(centroids_.size());
        if (k < 2) throw ValidationError("labels: fewer than 2 classes");

        class_of_.resize(labels.size());
        position_.resize(labels.size());
        std::vector<std::int64_t> fill(static_cast<std::size_t>(k), 0);
        blocks_.resize(static_cast<std::size_t>(k));
        for (std::int64_t c = 0; c < k; ++c) blocks_[c].resize(centroids_.counts[c], data.cols());

        const bool cosine = options.metric == DistanceMetric::cosine;
        const double eps = options.zero_norm == ZeroNormMode::epsilon ? kZeroNormEpsilon : 0.0;
        for (std::int64_t i = 0; i < data.rows(); ++i) {
            const auto c = centroids_.index_of(labels[i]);
            class_of_[i] = c;
            position_[i] = fill[c]++;
            auto row = blocks_[c].row(position_[i]);
            row = data.row(i);
            if (cosine) {
                const double norm = row.norm();
                if (norm == 0.0 && eps == 0.0)
                    throw DegenerateVectorError("row " + std::to_string(i) + " has zero norm under cosine distance", i);
                row /= norm + eps;
            }
        }

        unit_centroids_ = centroids_.centroids;
        if (cosine) {
            for (std::int64_t c = 0; c < k; ++c) {
                const double norm = unit_centroids_.row(c).norm();
                if (norm == 0.0 && eps == 0.0)
                    throw DegenerateVectorError("centroid of class " + std::to_string(centroids_.classes[c]) +
                                                " has zero norm under cosine distance");
                unit_centroids_.row(c) /= norm + eps;
            }
        }
    }

    std::int64_t class_size(std::int64_t i) const { return centroids_.counts[class_of_[i]]; }

    double cohesion(std::int64_t i) const {
        const auto& block = blocks_[class_of_[i]];
        const auto self = position_[i];
        const auto n = block.rows();
        if (n <= 1) return 0.0;
        const auto x = block.row(self);
        double sum = 0.0;
        if (options_.metric == DistanceMetric::cosine) {
            for (std::int64_t j = 0; j < n; ++j)
                if (j != self) sum += clamp_cosine(1.0 - block.row(j).dot(x));
        } else {
            for (std::int64_t j = 0; j < n; ++j)
                if (j != self) sum += (block.row(j) - x).norm();
        }
        const double denom = options_.denominator == DenominatorMode::literal ? static_cast<double>(total_rows_)
                                                                              : static_cast<double>(n - 1);
        return sum / denom;
    }

    Separation separation(std::int64_t i) const {
        const auto own = class_of_[i];
        const auto x = blocks_[own].row(position_[i]);
        Separation best{INFINITY, 0};
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(centroids_.size()); ++c) {
            if (c == own) continue;
            const double d = options_.metric == DistanceMetric::cosine
                                 ? clamp_cosine(1.0 - unit_centroids_.row(c).dot(x))
                                 : (centroids_.centroids.row(c) - x).norm();
            // Classes are visited in ascending id order, so strict < keeps the smallest id on ties.
            if (d < best.distance) best = {d, centroids_.classes[c]};
        }
        return best;
    }

private:
    SilhouetteOptions options_;
    std::int64_t total_rows_;
    CentroidSet centroids_;
    Matrix unit_centroids_;
    std::vector<Matrix> blocks_;
    std::vector<std::int64_t> class_of_;
    std::vector<std::int64_t> position_;
};

}  // namespace

std::int64_t CentroidSet::index_of(ClassId label) const noexcept {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) return -1;
    return it - classes.begin();
}

std::vector<ClassId> distinct_classes(std::span<const ClassId> labels) {
    std::vector<ClassId> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

double cosine_distance(std::span<const double> u, std::span<const double> v, ZeroNormMode zero_norm) {
    if (u.size() != v.size()) throw ValidationError("cosine_distance: dimension mismatch");
    double nu = norm_of(u);
    double nv = norm_of(v);
    if (zero_norm == ZeroNormMode::epsilon) {
        nu += kZeroNormEpsilon;
        nv += kZeroNormEpsilon;
    } else if (nu == 0.0 || nv == 0.0) {
        throw DegenerateVectorError("cosine distance of a zero-norm vector");
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
    return clamp_cosine(1.0 - dot / (nu * nv));
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ValidationError("euclidean_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
    return std::sqrt(s);
}

double distance(std::span<const double> u, std::span<const double> v, DistanceMetric metric, ZeroNormMode zero_norm) {
    return metric == DistanceMetric::cosine ? cosine_distance(u, v, zero_norm) : euclidean_distance(u, v);
}

CentroidSet compute_centroids(const Matrix& data, std::span<const ClassId> labels, DenominatorMode denominator) {
    check_labels(data, labels);
    CentroidSet set;
    set.classes = distinct_classes(labels);
    const auto k = static_cast<std::int64_t>(set.classes.size());
    set.centroids = Matrix::Zero(k, data.cols());
    set.counts.assign(static_cast<std::size_t>(k), 0);
    for (std::int64_t i = 0; i < data.rows(); ++i) {
        const auto c = set.index_of(labels[i]);
        set.centroids.row(c) += data.row(i);
        ++set.counts[c];
    }
    for (std::int64_t c = 0; c < k; ++c) {
        if (set.counts[c] == 0) throw Error("compute_centroids: empty class");
        const double denom = denominator == DenominatorMode::literal ? static_cast<double>(data.rows())
                                                                     : static_cast<double>(set.counts[c]);
        set.centroids.row(c) /= denom;
    }
    return set;
}

double intra_distance(std::int64_t i, const Matrix& data, std::span<const ClassId> labels,
                      const SilhouetteOptions& options) {
    if (i < 0 || i >= data.rows()) throw ValidationError("intra_distance: sample index out of range");
    check_labels(data, labels);
    // Only the sample's own class matters; a single-class input is fine here.
    const ClassId own = labels[i];
    Matrix members(std::count(labels.begin(), labels.end(), own), data.cols());
    std::int64_t self = 0;
    for (std::int64_t j = 0, r = 0; j < data.rows(); ++j) {
        if (labels[j] != own) continue;
        if (j == i) self = r;
        members.row(r++) = data.row(j);
    }
    if (members.rows() <= 1) return 0.0;
    double sum = 0.0;
    for (std::int64_t r = 0; r < members.rows(); ++r) {
        if (r == self) continue;
        sum += distance({members.row(self).data(), static_cast<std::size_t>(data.cols())},
                        {members.row(r).data(), static_cast<std::size_t>(data.cols())}, options.metric,
                        options.zero_norm);
    }
    const double denom = options.denominator == DenominatorMode::literal ? static_cast<double>(data.rows())
                                                                         : static_cast<double>(members.rows() - 1);
    return sum / denom;
}

Separation inter_distance(std::int64_t i, const Matrix& data, std::span<const ClassId> labels,
                          const CentroidSet& centroids, const SilhouetteOptions& options) {
    if (i < 0 || i >= data.rows()) throw ValidationError("inter_distance: sample index out of range");
    check_labels(data, labels);
    if (centroids.size() < 2) throw ValidationError("inter_distance: fewer than 2 classes");
    if (centroids.centroids.cols() != data.cols()) throw ValidationError("inter_distance: centroid width mismatch");
    const std::span<const double> x{data.row(i).data(), static_cast<std::size_t>(data.cols())};
    Separation best{INFINITY, 0};
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (centroids.classes[c] == labels[i]) continue;
        const auto row = centroids.centroids.row(static_cast<std::int64_t>(c));
        const double d = distance(x, {row.data(), static_cast<std::size_t>(row.size())}, options.metric,
                                  options.zero_norm);
        if (d < best.distance) best = {d, centroids.classes[c]};
    }
    return best;
}

SilhouetteResult silhouette(const Matrix& data, std::span<const ClassId> labels, const SilhouetteOptions& options) {
    check_labels(data, labels);
    if (data.rows() < 2) throw ValidationError("silhouette: need at least 2 samples");
    const Scorer scorer(data, labels, options);

    const std::int64_t t = data.rows();
    SilhouetteResult result;
    result.per_sample.assign(static_cast<std::size_t>(t), 0.0);
    result.nearest_class.assign(static_cast<std::size_t>(t), 0);
    std::vector<unsigned char> degenerate(static_cast<std::size_t>(t), 0);

    detail::parallel_for(t, options.jobs, [&](std::int64_t i) {
        const double a = scorer.cohesion(i);
        const Separation b = scorer.separation(i);
        result.nearest_class[i] = b.nearest_class;
        const double m = std::max(a, b.distance);
        if (m == 0.0) {
            degenerate[i] = 1;
            result.per_sample[i] = 0.0;
        } else {
            result.per_sample[i] = std::clamp((b.distance - a) / m, -1.0, 1.0);
        }
    });

    double sum = 0.0;
    for (std::int64_t i = 0; i < t; ++i) {
        sum += result.per_sample[i];
        result.degenerate_count += degenerate[i];
        if (scorer.class_size(i) == 1) ++result.singleton_count;
    }
    result.score = sum / static_cast<double>(t);
    return result;
}

}  // namespace neuralrank
