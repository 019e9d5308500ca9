#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "neuralrank/error.hpp"
#include "neuralrank/metrics.hpp"
#include "unit/test_support.hpp"

using namespace neuralrank;
using testing_support::to_matrix;

namespace {

double cos_d(std::vector<double> u, std::vector<double> v) { return cosine_distance(u, v); }

Matrix rows(std::initializer_list<std::initializer_list<double>> init) {
    oracle::Rows r;
    for (const auto& row : init) r.emplace_back(row);
    return to_matrix(r);
}

SilhouetteOptions euclid() { return {DistanceMetric::euclidean}; }

}  // namespace

TEST(CosineDistance, ReferenceAngles) {
    EXPECT_DOUBLE_EQ(cos_d({1, 0}, {1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(cos_d({1, 0}, {-1, 0}), 2.0);
    EXPECT_DOUBLE_EQ(cos_d({1, 0}, {0, 1}), 1.0);
}

TEST(CosineDistance, SymmetricAndScaleInvariant) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> u(6), v(6);
        for (auto& x : u) x = n(rng);
        for (auto& x : v) x = n(rng);
        const double d = cos_d(u, v);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
        EXPECT_NEAR(d, cos_d(v, u), 1e-15);
        auto scaled = u;
        for (auto& x : scaled) x *= 37.5;
        EXPECT_NEAR(d, cos_d(scaled, v), 1e-12);
    }
}

TEST(CosineDistance, ZeroNormIsAnErrorUnlessEpsilon) {
    EXPECT_THROW(cos_d({0, 0}, {1, 0}), DegenerateVectorError);
    const std::vector<double> zero{0, 0}, x{1, 0};
    EXPECT_DOUBLE_EQ(cosine_distance(zero, x, ZeroNormMode::epsilon), 1.0);
}

TEST(Centroids, TwoPointMean) {
    const auto data = rows({{0, 0}, {2, 2}, {4, 0}});
    const std::vector<ClassId> labels{0, 0, 1};
    const auto c = compute_centroids(data, labels);
    ASSERT_EQ(c.classes, (std::vector<ClassId>{0, 1}));
    EXPECT_EQ(c.centroids(0, 0), 1.0);
    EXPECT_EQ(c.centroids(0, 1), 1.0);
    EXPECT_EQ(c.centroids(1, 0), 4.0);
    EXPECT_EQ(c.centroids(1, 1), 0.0);
    EXPECT_EQ(c.counts, (std::vector<std::int64_t>{2, 1}));
}

TEST(Centroids, OneSamplePerClassIsIdentity) {
    const auto data = rows({{1, 2, 3}, {-4, 5, 6}, {7, -8, 9}});
    const std::vector<ClassId> labels{9, 2, 5};
    const auto c = compute_centroids(data, labels);
    ASSERT_EQ(c.classes, (std::vector<ClassId>{2, 5, 9}));
    EXPECT_EQ(Vector(c.centroids.row(0)), Vector(data.row(1)));
    EXPECT_EQ(Vector(c.centroids.row(1)), Vector(data.row(2)));
    EXPECT_EQ(Vector(c.centroids.row(2)), Vector(data.row(0)));
}

TEST(Centroids, MatchReverseOrderResummation) {
    std::mt19937_64 rng(11);
    const auto inst = oracle::random_instance(rng, 30, 7, 3);
    const auto expected = oracle::centroids(inst.x, inst.y);
    const auto got = compute_centroids(to_matrix(inst.x), inst.y);
    ASSERT_EQ(got.size(), 3u);
    for (std::size_t k = 0; k < got.size(); ++k)
        for (int c = 0; c < 7; ++c)
            EXPECT_NEAR(got.centroids(static_cast<Eigen::Index>(k), c), expected.at(got.classes[k])[c], 1e-7);
}

TEST(Centroids, LiteralDenominatorDividesByTotal) {
    const auto data = rows({{0, 0}, {2, 2}, {4, 0}});
    const std::vector<ClassId> labels{0, 0, 1};
    const auto c = compute_centroids(data, labels, DenominatorMode::literal);
    EXPECT_DOUBLE_EQ(c.centroids(0, 0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.centroids(1, 0), 4.0 / 3.0);
}

TEST(IntraDistance, IdenticalPointsHaveZeroCohesion) {
    const auto data = rows({{1, 1}, {1, 1}, {1, 1}, {-1, 0}});
    const std::vector<ClassId> labels{0, 0, 0, 1};
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(intra_distance(i, data, labels), 0.0);
}

TEST(IntraDistance, OrthogonalPairUnderCosine) {
    const auto data = rows({{1, 0}, {0, 1}, {-1, -1}});
    const std::vector<ClassId> labels{0, 0, 1};
    EXPECT_DOUBLE_EQ(intra_distance(0, data, labels), 1.0);
    EXPECT_DOUBLE_EQ(intra_distance(1, data, labels), 1.0);
    EXPECT_DOUBLE_EQ(intra_distance(2, data, labels), 0.0);  // singleton
}

TEST(IntraDistance, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(5);
    const auto inst = oracle::random_instance(rng, 8, 4, 2);
    const auto data = to_matrix(inst.x);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(intra_distance(static_cast<std::int64_t>(i), data, inst.y), oracle::cohesion(i, inst.x, inst.y, true), 1e-9);
        EXPECT_NEAR(intra_distance(static_cast<std::int64_t>(i), data, inst.y, euclid()),
                    oracle::cohesion(i, inst.x, inst.y, false), 1e-9);
    }
}

TEST(InterDistance, OrthogonalBeatsOpposite) {
    const auto data = rows({{1, 0}, {0, 1}, {-1, 0}});
    const std::vector<ClassId> labels{0, 1, 2};
    const auto c = compute_centroids(data, labels);
    const auto b = inter_distance(0, data, labels, c);
    EXPECT_DOUBLE_EQ(b.distance, 1.0);
    EXPECT_EQ(b.nearest_class, 1u);
}

TEST(InterDistance, TwoClassesUseTheOtherCentroid) {
    const auto data = rows({{1, 0}, {1, 0.2}, {0, 1}, {0.2, 1}});
    const std::vector<ClassId> labels{4, 4, 7, 7};
    const auto c = compute_centroids(data, labels);
    const std::vector<double> x{1, 0}, other{0.1, 1};
    EXPECT_NEAR(inter_distance(0, data, labels, c).distance, cosine_distance(x, other), 1e-15);
    EXPECT_EQ(inter_distance(0, data, labels, c).nearest_class, 7u);
}

TEST(InterDistance, TiesReportSmallestClassId) {
    const auto data = rows({{1, 0}, {0, 1}, {0, -1}});
    const std::vector<ClassId> labels{5, 9, 3};
    const auto c = compute_centroids(data, labels);
    EXPECT_EQ(inter_distance(0, data, labels, c).nearest_class, 3u);
}

TEST(InterDistance, MatchesExhaustiveMinOracle) {
    std::mt19937_64 rng(8);
    const auto inst = oracle::random_instance(rng, 10, 5, 3);
    const auto data = to_matrix(inst.x);
    const auto c = compute_centroids(data, inst.y);
    const auto oc = oracle::centroids(inst.x, inst.y);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto idx = static_cast<std::int64_t>(i);
        EXPECT_NEAR(inter_distance(idx, data, inst.y, c).distance, oracle::separation(i, inst.x, inst.y, oc, true), 1e-9);
        EXPECT_NEAR(inter_distance(idx, data, inst.y, c, euclid()).distance,
                    oracle::separation(i, inst.x, inst.y, oc, false), 1e-9);
    }
}

TEST(Silhouette, PerfectTwoDirectionSeparationScoresOne) {
    oracle::Rows r;
    std::vector<ClassId> labels;
    for (int i = 0; i < 6; ++i) {
        r.push_back({1, 0});
        labels.push_back(0);
        r.push_back({0, 1});
        labels.push_back(1);
    }
    const auto result = silhouette(to_matrix(r), labels);
    EXPECT_EQ(result.score, 1.0);
    EXPECT_EQ(result.degenerate_count, 0);
    for (double s : result.per_sample) EXPECT_EQ(s, 1.0);
}

TEST(Silhouette, TwelvePointPlantedInstanceMatchesOracle) {
    std::mt19937_64 rng(12);
    const auto inst = oracle::random_instance(rng, 12, 3, 2, 2.5);
    const auto data = to_matrix(inst.x);
    EXPECT_NEAR(silhouette(data, inst.y).score, oracle::silhouette(inst.x, inst.y, true), 1e-9);
    EXPECT_NEAR(silhouette(data, inst.y, euclid()).score, oracle::silhouette(inst.x, inst.y, false), 1e-9);
}

TEST(Silhouette, LiteralDenominatorMatchesOracle) {
    std::mt19937_64 rng(21);
    const auto inst = oracle::random_instance(rng, 20, 4, 3, 2.0);
    const auto data = to_matrix(inst.x);
    for (bool cosine : {true, false}) {
        SilhouetteOptions opts{cosine ? DistanceMetric::cosine : DistanceMetric::euclidean, DenominatorMode::literal};
        EXPECT_NEAR(silhouette(data, inst.y, opts).score, oracle::silhouette(inst.x, inst.y, cosine, true), 1e-9);
    }
}

TEST(Silhouette, PermutationNullIsNearZero) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0, 1);
    const int t = 500;
    Matrix data(t, 10);
    for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = n(rng);
    std::vector<ClassId> labels(t);
    for (int i = 0; i < t; ++i) labels[i] = static_cast<ClassId>(i % 2);
    double total = 0.0;
    for (int s = 0; s < 100; ++s) {
        std::shuffle(labels.begin(), labels.end(), rng);
        total += silhouette(data, labels).score;
    }
    EXPECT_LT(std::abs(total / 100.0), 0.1);
}

TEST(Silhouette, WithinClassButNotAcrossGoesNegative) {
    // Each class is tight but sits on top of the other class's centroid.
    const auto data = rows({{1, 0.01}, {1, -0.01}, {1, 0.02}, {1, -0.02}, {0.98, 0.0}});
    const std::vector<ClassId> labels{0, 0, 1, 1, 1};
    EXPECT_LT(silhouette(data, labels, euclid()).score, 0.0);
}

TEST(Silhouette, DegenerateAndSingletonAccounting) {
    // Everything points the same way: a = b = 0 for every sample.
    const auto same = rows({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    const auto r = silhouette(same, std::vector<ClassId>{0, 0, 1, 1});
    EXPECT_EQ(r.score, 0.0);
    EXPECT_EQ(r.degenerate_count, 4);

    const auto data = rows({{1, 0}, {0.9, 0.1}, {0, 1}});
    const auto s = silhouette(data, std::vector<ClassId>{0, 0, 1});
    EXPECT_EQ(s.singleton_count, 1);
    EXPECT_EQ(s.per_sample[2], 1.0);  // a := 0 for the singleton, b > 0
}

TEST(Silhouette, ErrorsOnBadInput) {
    const auto data = rows({{1, 0}, {0, 1}, {1, 1}});
    EXPECT_THROW(silhouette(data, std::vector<ClassId>{0, 0, 0}), ValidationError);
    EXPECT_THROW(silhouette(data, std::vector<ClassId>{0, 1}), ValidationError);

    const auto with_zero = rows({{1, 0}, {0, 0}, {0, 1}});
    try {
        silhouette(with_zero, std::vector<ClassId>{0, 0, 1});
        FAIL() << "expected DegenerateVectorError";
    } catch (const DegenerateVectorError& e) {
        EXPECT_EQ(e.row(), 1);
    }
    SilhouetteOptions eps;
    eps.zero_norm = ZeroNormMode::epsilon;
    EXPECT_NO_THROW(silhouette(with_zero, std::vector<ClassId>{0, 0, 1}, eps));
    EXPECT_NO_THROW(silhouette(with_zero, std::vector<ClassId>{0, 0, 1}, euclid()));
}

// ---- Properties --------------------------------------------------------

class SilhouetteProperties : public ::testing::TestWithParam<int> {};

TEST_P(SilhouetteProperties, Hold) {
    std::mt19937_64 rng(1000 + GetParam());
    const std::uint32_t ks[] = {2, 3, 5};
    const std::uint32_t k = ks[rng() % 3];
    const std::size_t t = k + 1 + rng() % (64 - k);
    const std::size_t d = 1 + rng() % 16;
    const auto inst = oracle::random_instance(rng, t, d, k, 0.5 + (rng() % 30) / 10.0);
    const auto data = to_matrix(inst.x);

    for (bool cosine : {true, false}) {
        SilhouetteOptions opts{cosine ? DistanceMetric::cosine : DistanceMetric::euclidean};
        const auto base = silhouette(data, inst.y, opts);

        // Range and aggregate consistency.
        EXPECT_GE(base.score, -1.0);
        EXPECT_LE(base.score, 1.0);
        for (double s : base.per_sample) {
            EXPECT_GE(s, -1.0);
            EXPECT_LE(s, 1.0);
        }
        EXPECT_NEAR(base.score,
                    std::accumulate(base.per_sample.begin(), base.per_sample.end(), 0.0) / static_cast<double>(t),
                    1e-15);

        // Oracle equivalence.
        EXPECT_NEAR(base.score, oracle::silhouette(inst.x, inst.y, cosine), 1e-9);

        // Determinism, including across thread counts.
        SilhouetteOptions threaded = opts;
        threaded.jobs = 4;
        const auto again = silhouette(data, inst.y, threaded);
        EXPECT_EQ(again.score, base.score);
        EXPECT_EQ(again.per_sample, base.per_sample);

        // Permutation of samples.
        std::vector<std::size_t> perm(t);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix permuted(data.rows(), data.cols());
        std::vector<ClassId> permuted_labels(t);
        for (std::size_t i = 0; i < t; ++i) {
            permuted.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(perm[i]));
            permuted_labels[i] = inst.y[perm[i]];
        }
        EXPECT_NEAR(silhouette(permuted, permuted_labels, opts).score, base.score, 1e-9);

        // Bijective relabeling, including one that reverses class order.
        std::vector<ClassId> renamed(t);
        for (std::size_t i = 0; i < t; ++i) renamed[i] = 1000 - 7 * inst.y[i];
        EXPECT_EQ(silhouette(data, renamed, opts).score, base.score);
    }

    // Global positive scaling under cosine.
    const Matrix scaled = data * 3.75;
    EXPECT_NEAR(silhouette(scaled, inst.y).score, silhouette(data, inst.y).score, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(RandomInstances, SilhouetteProperties, ::testing::Range(0, 40));
