#include "neuralrank/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "neuralrank/error.hpp"

namespace neuralrank {

namespace {

struct RightSingular {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // d x r, columns
};

// Right singular vectors of a centered T x d matrix. Tall inputs are first
// reduced to their d x d R factor, which has the same singular values and
// right singular vectors but is far cheaper to decompose.
RightSingular right_singular(const Eigen::MatrixXd& centered) {
    RightSingular out;
    if (centered.rows() > centered.cols()) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered);
        const auto d = centered.cols();
        Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinV);
        out.values = svd.singularValues();
        out.vectors = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
        out.values = svd.singularValues();
        out.vectors = svd.matrixV();
    }
    return out;
}

}  // namespace

PCAProjection pca_fit_transform(const Matrix& data, std::int64_t requested_d) {
    const std::int64_t t = data.rows();
    const std::int64_t d = data.cols();
    if (requested_d < 1) throw ValidationError("pca: requested dimensionality must be >= 1");
    if (t < 2) throw ValidationError("pca: need at least 2 samples, got " + std::to_string(t));
    if (d < 1) throw ValidationError("pca: need at least 1 column");
    if (!data.allFinite()) throw ValidationError("pca: input contains non-finite values");

    PCAProjection projection;
    projection.requested_d = requested_d;
    projection.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - projection.mean.transpose();
    projection.total_variance = centered.squaredNorm() / static_cast<double>(t - 1);

    const RightSingular svd = right_singular(centered);
    const double largest = svd.values.size() > 0 ? svd.values(0) : 0.0;
    const double tolerance =
        static_cast<double>(std::max(t, d)) * std::numeric_limits<double>::epsilon() * largest;
    std::int64_t rank = 0;
    while (rank < svd.values.size() && svd.values(rank) > tolerance) ++rank;

    const std::int64_t effective = std::min({requested_d, t - 1, d, rank});
    projection.components = svd.vectors.leftCols(effective).transpose();
    for (std::int64_t k = 0; k < effective; ++k) {
        Eigen::Index pivot = 0;
        projection.components.row(k).cwiseAbs().maxCoeff(&pivot);
        if (projection.components(k, pivot) < 0.0) projection.components.row(k) *= -1.0;
    }
    projection.explained_variance =
        svd.values.head(effective).array().square() / static_cast<double>(t - 1);
    projection.reduced = centered * projection.components.transpose();
    return projection;
}

PCAProjection pca_fit_transform(const FloatMatrix& data, std::int64_t requested_d) {
    return pca_fit_transform(Matrix(data.cast<double>()), requested_d);
}

Matrix pca_transform(const PCAProjection& projection, const Matrix& data) {
    if (data.cols() != projection.mean.size())
        throw ValidationError("pca_transform: expected width " + std::to_string(projection.mean.size()) + ", got " +
                              std::to_string(data.cols()));
    return (data.rowwise() - projection.mean.transpose()) * projection.components.transpose();
}

}  // namespace neuralrank
