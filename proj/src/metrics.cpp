#include "tring/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "tring/error.hpp"
#include "tring/kernels.hpp"

namespace tring {

namespace {

// Dense re-indexing of arbitrary class ids, in increasing id order.
std::vector<std::size_t> compress(const LabelVector& labels, std::size_t& count) {
    std::map<int, std::size_t> ids;
    for (int l : labels) ids.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [id, idx] : ids) idx = next++;
    count = next;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
    return out;
}

void require_same_length(const LabelVector& a, const LabelVector& b) {
    if (a.empty()) throw DimensionError("label vectors must be nonempty");
    if (a.size() != b.size()) {
        throw DimensionError("label vectors differ in length: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
    }
}

// Joint contingency table of two compressed labelings.
Matrix contingency(const LabelVector& a, const LabelVector& b) {
    std::size_t ka = 0, kb = 0;
    const auto ca = compress(a, ka);
    const auto cb = compress(b, kb);
    Matrix table(ka, kb);
    for (std::size_t i = 0; i < a.size(); ++i) table(ca[i], cb[i]) += 1.0;
    return table;
}

double sq_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

double sparseness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw DomainError("sparseness needs at least two entries");
    double l1 = 0.0, l2 = 0.0;
    for (double v : values) {
        l1 += std::abs(v);
        l2 += v * v;
    }
    if (l2 == 0.0) throw DomainError("sparseness of an all-zero array is undefined");
    const double rn = std::sqrt(static_cast<double>(n));
    return (rn - l1 / std::sqrt(l2)) / (rn - 1.0);
}

double sparseness(const Matrix& h) { return sparseness(h.data()); }

std::vector<int> max_weight_assignment(const Matrix& weights) {
    const std::size_t rows = weights.rows(), cols = weights.cols();
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return {};
    double wmax = 0.0;
    for (double w : weights.data()) wmax = std::max(wmax, w);
    // Square min-cost problem, 1-based with potentials (Kuhn-Munkres, O(n^3)).
    auto cost = [&](std::size_t i, std::size_t j) {
        return (i < rows && j < cols) ? wmax - weights(i, j) : wmax;
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(rows, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) assignment[i - 1] = static_cast<int>(j - 1);
    }
    return assignment;
}

double accuracy(const LabelVector& pred, const LabelVector& truth) {
    require_same_length(pred, truth);
    const Matrix table = contingency(pred, truth);
    const auto assignment = max_weight_assignment(table);
    double matched = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r)
        if (assignment[r] >= 0) matched += table(r, static_cast<std::size_t>(assignment[r]));
    return matched / static_cast<double>(pred.size());
}

double entropy(const LabelVector& a) {
    if (a.empty()) throw DimensionError("label vector must be nonempty");
    std::map<int, double> counts;
    for (int l : a) counts[l] += 1.0;
    const double n = static_cast<double>(a.size());
    double h = 0.0;
    for (const auto& [id, c] : counts) {
        const double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

double mutual_information(const LabelVector& a, const LabelVector& b) {
    require_same_length(a, b);
    const Matrix table = contingency(a, b);
    const double n = static_cast<double>(a.size());
    std::vector<double> pa(table.rows(), 0.0), pb(table.cols(), 0.0);
    for (std::size_t i = 0; i < table.rows(); ++i)
        for (std::size_t j = 0; j < table.cols(); ++j) {
            pa[i] += table(i, j) / n;
            pb[j] += table(i, j) / n;
        }
    double mi = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i)
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double p = table(i, j) / n;
            if (p > 0.0) mi += p * std::log2(p / (pa[i] * pb[j]));
        }
    return std::max(0.0, mi);
}

double nmi(const LabelVector& a, const LabelVector& b) {
    require_same_length(a, b);
    const double denom = std::max(entropy(a), entropy(b));
    if (denom == 0.0) return 1.0;  // both labelings are a single cluster
    return std::clamp(mutual_information(a, b) / denom, 0.0, 1.0);
}

KMeansRun lloyd(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                std::size_t max_iter) {
    const std::size_t n = features.rows(), f = features.cols();
    if (k == 0 || k > n) {
        throw DomainError("k-means needs 1 <= k <= samples (k=" + std::to_string(k) +
                          ", samples=" + std::to_string(n) + ")");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);

    KMeansRun run;
    run.centroids = Matrix(k, f);
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = features.row(idx[c]);
        std::copy(src.begin(), src.end(), run.centroids.row(c).begin());
    }
    run.labels.assign(n, -1);
    std::vector<double> dist_to_own(n, 0.0);

    for (std::size_t it = 0; it < max_iter; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bestd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_distance(features.row(i), run.centroids.row(c));
                if (d < bestd) {
                    bestd = d;
                    best = static_cast<int>(c);
                }
            }
            if (run.labels[i] != best) changed = true;
            run.labels[i] = best;
            dist_to_own[i] = bestd;
            wcss += bestd;
        }
        run.wcss = wcss;
        run.wcss_history.push_back(wcss);
        if (!changed) break;

        std::vector<std::size_t> counts(k, 0);
        Matrix sums(k, f);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(run.labels[i]);
            ++counts[c];
            auto srow = sums.row(c);
            const auto x = features.row(i);
            for (std::size_t j = 0; j < f; ++j) srow[j] += x[j];
        }
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            auto crow = run.centroids.row(c);
            if (counts[c] > 0) {
                const auto srow = sums.row(c);
                for (std::size_t j = 0; j < f; ++j) crow[j] = srow[j] / static_cast<double>(counts[c]);
                continue;
            }
            // Empty cluster: move its centroid onto the worst-served point.
            std::size_t far = 0;
            double fard = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!taken[i] && dist_to_own[i] > fard) {
                    fard = dist_to_own[i];
                    far = i;
                }
            }
            taken[far] = true;
            const auto x = features.row(far);
            std::copy(x.begin(), x.end(), crow.begin());
        }
    }
    return run;
}

KMeansRun kmeans_best(const FeatureMatrix& features, std::size_t k, std::size_t restarts,
                      std::uint64_t seed) {
    if (restarts == 0) throw DomainError("k-means needs at least one restart");
    std::vector<KMeansRun> runs(restarts);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::array<std::uint32_t, 2> raw{};
        seq.generate(raw.begin(), raw.end());
        const std::uint64_t run_seed = (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
        runs[r] = lloyd(features, k, run_seed);
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (runs[r].wcss < runs[best].wcss) best = r;
    return std::move(runs[best]);
}

LabelVector kmeans(const FeatureMatrix& features, std::size_t k, std::size_t restarts,
                   std::uint64_t seed) {
    return kmeans_best(features, k, restarts, seed).labels;
}

LabelVector knn_classify(const FeatureMatrix& train, const LabelVector& train_labels,
                         const FeatureMatrix& test, std::size_t k) {
    if (train.rows() != train_labels.size()) {
        throw DimensionError("training labels do not match training rows");
    }
    if (train.cols() != test.cols()) throw DimensionError("train/test feature widths differ");
    if (k == 0 || k > train.rows()) {
        throw DomainError("k-NN needs 1 <= k <= training samples");
    }
    LabelVector out(test.rows());
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < test.rows(); ++t) {
        std::vector<std::pair<double, std::size_t>> cand(train.rows());
        for (std::size_t i = 0; i < train.rows(); ++i)
            cand[i] = {std::sqrt(sq_distance(test.row(t), train.row(i))), i};
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        std::map<int, std::pair<std::size_t, double>> votes;  // class -> (count, summed distance)
        for (std::size_t q = 0; q < k; ++q) {
            auto& v = votes[train_labels[cand[q].second]];
            ++v.first;
            v.second += cand[q].first;
        }
        int winner = votes.begin()->first;
        auto best = votes.begin()->second;
        for (const auto& [cls, v] : votes) {
            if (v.first > best.first || (v.first == best.first && v.second < best.second)) {
                winner = cls;
                best = v;
            }
        }
        out[t] = winner;
    }
    return out;
}

}  // namespace tring
