#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tring/tensor.hpp"

namespace tring {

using LabelVector = std::vector<int>;
/// One row per sample.
using FeatureMatrix = Matrix;

/// Hoyer sparseness (sqrt(n) - ||h||_1 / ||h||_2) / (sqrt(n) - 1) over all entries.
/// 1 for a one-hot array, 0 for a constant one. Needs >= 2 entries, not all zero.
[[nodiscard]] double sparseness(std::span<const double> values);
[[nodiscard]] double sparseness(const Matrix& h);

/// Maximum-weight assignment on a rectangular weight matrix (rows to columns).
/// Returns, for each row, the assigned column or -1 when rows outnumber columns.
[[nodiscard]] std::vector<int> max_weight_assignment(const Matrix& weights);

/// Fraction of samples whose predicted cluster, mapped to a class by the
/// optimal one-to-one assignment, equals the true class.
[[nodiscard]] double accuracy(const LabelVector& pred, const LabelVector& truth);

/// Mutual information in bits.
[[nodiscard]] double mutual_information(const LabelVector& a, const LabelVector& b);
/// Shannon entropy of a labeling in bits.
[[nodiscard]] double entropy(const LabelVector& a);
/// MI / max(H(a), H(b)). Two single-cluster labelings score 1.
[[nodiscard]] double nmi(const LabelVector& a, const LabelVector& b);

struct KMeansRun {
    LabelVector labels;
    Matrix centroids;
    double wcss = 0.0;
    std::vector<double> wcss_history;  // after every assignment step
};

/// One Lloyd run from k distinct rows chosen uniformly at random.
/// Empty clusters are re-seeded at the point farthest from its centroid.
[[nodiscard]] KMeansRun lloyd(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                              std::size_t max_iter = 300);

/// Best (lowest WCSS) of `restarts` Lloyd runs. Restart r uses a seed derived
/// from (seed, r); the result does not depend on thread scheduling.
[[nodiscard]] KMeansRun kmeans_best(const FeatureMatrix& features, std::size_t k,
                                    std::size_t restarts, std::uint64_t seed);
[[nodiscard]] LabelVector kmeans(const FeatureMatrix& features, std::size_t k,
                                 std::size_t restarts = 200, std::uint64_t seed = 0);

/// k-nearest-neighbor majority vote with Euclidean distance. Neighbors with
/// equal distance rank by lower training index; tied votes go to the class with
/// the smaller summed distance, then the lower class id.
[[nodiscard]] LabelVector knn_classify(const FeatureMatrix& train, const LabelVector& train_labels,
                                       const FeatureMatrix& test, std::size_t k);

}  // namespace tring
