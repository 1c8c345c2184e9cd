#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "tring/error.hpp"
#include "tring/metrics.hpp"
#include "test_util.hpp"

using namespace tring;
using namespace tring::testing;

namespace {

double brute_force_accuracy(const LabelVector& pred, const LabelVector& truth, int k) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) hit += perm[static_cast<std::size_t>(pred[i])] == truth[i];
        best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

double nmi_oracle(const LabelVector& a, const LabelVector& b) {
    const double n = static_cast<double>(a.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pa, pb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0 / n;
        pa[a[i]] += 1.0 / n;
        pb[b[i]] += 1.0 / n;
    }
    double mi = 0.0, ha = 0.0, hb = 0.0;
    for (const auto& [key, p] : joint) mi += p * std::log2(p / (pa[key.first] * pb[key.second]));
    for (const auto& [key, p] : pa) ha -= p * std::log2(p);
    for (const auto& [key, p] : pb) hb -= p * std::log2(p);
    return mi / std::max(ha, hb);
}

LabelVector random_labels(std::mt19937_64& rng, std::size_t n, int k) {
    std::uniform_int_distribution<int> u(0, k - 1);
    LabelVector l(n);
    for (int& v : l) v = u(rng);
    return l;
}

double wcss_of(const Matrix& x, const LabelVector& labels, std::size_t k) {
    Matrix c(k, x.cols());
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        count[l] += 1.0;
        for (std::size_t j = 0; j < x.cols(); ++j) c(l, j) += x(i, j);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double e = x(i, j) - c(l, j) / count[l];
            s += e * e;
        }
    }
    return s;
}

}  // namespace

TEST(Sparseness, Endpoints) {
    const std::vector<double> one_hot{0, 0, 1, 0}, constant{3, 3, 3, 3}, half{1, 1, 0, 0};
    EXPECT_EQ(sparseness(one_hot), 1.0);
    EXPECT_EQ(sparseness(constant), 0.0);
    EXPECT_NEAR(sparseness(half), 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(sparseness(half), 0.5858, 1e-4);
    EXPECT_EQ(sparseness(Matrix{{0, 0}, {5, 0}}), 1.0);
}

TEST(Sparseness, InvalidInputs) {
    const std::vector<double> single{1.0}, zeros{0, 0, 0};
    EXPECT_THROW((void)sparseness(single), DomainError);
    EXPECT_THROW((void)sparseness(zeros), DomainError);
}

TEST(Accuracy, WorkedExample) {
    EXPECT_NEAR(accuracy({1, 1, 1, 0, 0, 2}, {0, 0, 1, 1, 2, 2}), 4.0 / 6.0, 1e-15);
}

TEST(Accuracy, InvariantUnderRelabeling) {
    const LabelVector truth{0, 1, 2, 2, 1, 0, 3};
    EXPECT_EQ(accuracy(truth, truth), 1.0);
    LabelVector pred;
    for (int l : truth) pred.push_back((l + 2) % 4 + 10);
    EXPECT_EQ(accuracy(pred, truth), 1.0);
}

TEST(Accuracy, MatchesPermutationSearch) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + trial % 6;
        const std::size_t n = 5 + static_cast<std::size_t>(trial % 17);
        const auto truth = random_labels(rng, n, k);
        const auto pred = random_labels(rng, n, k);
        EXPECT_NEAR(accuracy(pred, truth), brute_force_accuracy(pred, truth, k), 1e-15) << "trial " << trial;
    }
}

TEST(Accuracy, MoreClustersThanClasses) {
    // Unmatched clusters count as errors.
    EXPECT_NEAR(accuracy({0, 1, 2, 3}, {0, 0, 1, 1}), 0.5, 1e-15);
}

TEST(Accuracy, LengthMismatchThrows) {
    EXPECT_THROW((void)accuracy({0, 1}, {0}), DimensionError);
    EXPECT_THROW((void)accuracy({}, {}), DimensionError);
}

TEST(Assignment, MaximizesTotalWeight) {
    const Matrix w{{1, 5, 3}, {4, 2, 6}, {7, 8, 1}};
    const auto a = max_weight_assignment(w);
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) total += w(i, static_cast<std::size_t>(a[i]));
    EXPECT_EQ(total, 5 + 6 + 7);
}

TEST(InformationMeasures, WorkedExamples) {
    EXPECT_NEAR(mutual_information({0, 0, 1, 1}, {0, 1, 0, 1}), 0.0, 1e-15);
    EXPECT_NEAR(nmi({0, 0, 1, 1}, {0, 1, 0, 1}), 0.0, 1e-15);
    EXPECT_NEAR(mutual_information({0, 0, 1, 1}, {0, 0, 0, 1}), 0.3113, 1e-4);
    EXPECT_NEAR(entropy({0, 0, 1, 1}), 1.0, 1e-15);
    EXPECT_NEAR(entropy({0, 0, 0, 1}), 0.8113, 1e-4);
    EXPECT_NEAR(nmi({0, 0, 1, 1}, {0, 0, 0, 1}), 0.3113, 1e-4);
    EXPECT_NEAR(nmi({2, 2, 0, 0, 1}, {2, 2, 0, 0, 1}), 1.0, 1e-15);
}

TEST(InformationMeasures, SingleClusterConventions) {
    EXPECT_EQ(nmi({0, 0, 0}, {4, 4, 4}), 1.0);
    EXPECT_EQ(nmi({0, 0, 0}, {0, 1, 2}), 0.0);
}

TEST(InformationMeasures, NmiMatchesDirectFormula) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 10 + static_cast<std::size_t>(trial % 30);
        const auto a = random_labels(rng, n, 2 + trial % 5);
        const auto b = random_labels(rng, n, 2 + trial % 4);
        if (entropy(a) == 0.0 || entropy(b) == 0.0) continue;
        EXPECT_NEAR(nmi(a, b), nmi_oracle(a, b), 1e-10);
        EXPECT_NEAR(nmi(a, b), nmi(b, a), 1e-15);
        EXPECT_GE(nmi(a, b), 0.0);
        EXPECT_LE(nmi(a, b), 1.0 + 1e-12);
    }
}

TEST(KMeans, SeparatesScalarBlobs) {
    const Matrix x{{0}, {0.1}, {10}, {10.1}};
    const auto labels = kmeans(x, 2, 10, 0);
    EXPECT_EQ(accuracy(labels, {0, 0, 1, 1}), 1.0);
}

TEST(KMeans, OneClusterPerSampleHasZeroWcss) {
    std::mt19937_64 rng(3);
    const auto x = random_matrix(6, 3, rng);
    const auto run = kmeans_best(x, 6, 5, 1);
    EXPECT_EQ(run.wcss, 0.0);
    LabelVector sorted = run.labels;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (LabelVector{0, 1, 2, 3, 4, 5}));
}

TEST(KMeans, FindsExhaustiveOptimumOnTwoTriads) {
    const Matrix x{{0, 0}, {0.3, 0.1}, {0.1, 0.4}, {3, 3}, {3.2, 2.9}, {2.8, 3.3}};
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << 6) - 1; ++mask) {
        LabelVector l(6);
        for (std::size_t i = 0; i < 6; ++i) l[i] = static_cast<int>((mask >> i) & 1u);
        best = std::min(best, wcss_of(x, l, 2));
    }
    const auto run = kmeans_best(x, 2, 200, 7);
    EXPECT_NEAR(run.wcss, best, 1e-12);
    EXPECT_NEAR(wcss_of(x, run.labels, 2), best, 1e-12);
}

TEST(KMeans, WcssNeverIncreasesAndIsDeterministic) {
    std::mt19937_64 rng(4);
    const auto x = random_matrix(40, 3, rng);
    const auto run = lloyd(x, 4, 11);
    for (std::size_t i = 1; i < run.wcss_history.size(); ++i)
        EXPECT_LE(run.wcss_history[i], run.wcss_history[i - 1] + 1e-12);
    EXPECT_EQ(run.labels, lloyd(x, 4, 11).labels);
    EXPECT_EQ(kmeans(x, 4, 20, 5), kmeans(x, 4, 20, 5));
    EXPECT_THROW((void)lloyd(x, 0, 1), DomainError);
    EXPECT_THROW((void)lloyd(x, 41, 1), DomainError);
    EXPECT_THROW((void)kmeans_best(x, 2, 0, 1), DomainError);
}

TEST(Knn, ExactMatchAndMajority) {
    const Matrix train{{0, 0}, {1, 0}, {0, 1}, {5, 5}};
    const LabelVector labels{0, 0, 1, 2};
    EXPECT_EQ(knn_classify(train, labels, Matrix{{5, 5}}, 1), (LabelVector{2}));
    EXPECT_EQ(knn_classify(train, labels, Matrix{{0.2, 0.2}}, 3), (LabelVector{0}));
}

TEST(Knn, VoteTieGoesToCloserClass) {
    const Matrix train{{0}, {3}};
    EXPECT_EQ(knn_classify(train, {4, 1}, Matrix{{1}}, 2), (LabelVector{4}));
    EXPECT_EQ(knn_classify(train, {4, 1}, Matrix{{2}}, 2), (LabelVector{1}));
    EXPECT_EQ(knn_classify(train, {4, 1}, Matrix{{1.5}}, 2), (LabelVector{1}));
}

TEST(Knn, MatchesExhaustiveScan) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto train = random_matrix(20, 3, rng);
        const auto labels = random_labels(rng, 20, 3);
        const auto test = random_matrix(10, 3, rng);
        const auto got = knn_classify(train, labels, test, 5);
        for (std::size_t t = 0; t < 10; ++t) {
            std::vector<std::pair<double, std::size_t>> d;
            for (std::size_t i = 0; i < 20; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < 3; ++j) s += (train(i, j) - test(t, j)) * (train(i, j) - test(t, j));
                d.emplace_back(s, i);
            }
            std::sort(d.begin(), d.end());
            std::map<int, std::pair<int, double>> votes;
            for (std::size_t q = 0; q < 5; ++q) {
                auto& v = votes[labels[d[q].second]];
                v.first += 1;
                v.second += std::sqrt(d[q].first);
            }
            int best = -1;
            std::pair<int, double> best_v{-1, 0.0};
            for (const auto& [label, v] : votes) {
                if (v.first > best_v.first || (v.first == best_v.first && v.second < best_v.second)) {
                    best = label;
                    best_v = v;
                }
            }
            EXPECT_EQ(got[t], best);
        }
    }
}

TEST(Knn, InvalidInputs) {
    const Matrix train{{0}, {1}};
    EXPECT_THROW((void)knn_classify(train, {0}, Matrix{{0}}, 1), DimensionError);
    EXPECT_THROW((void)knn_classify(train, {0, 1}, Matrix{{0, 1}}, 1), DimensionError);
    EXPECT_THROW((void)knn_classify(train, {0, 1}, Matrix{{0}}, 3), DomainError);
}
