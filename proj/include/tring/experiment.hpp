#pragma once

// Experiment drivers behind the `tring` command line: synthetic data, feature
// extraction, clustering / classification / parameter sweeps, basis montages,
// and the CSV and manifest formats they emit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tring/apg.hpp"
#include "tring/graph.hpp"
#include "tring/io.hpp"
#include "tring/metrics.hpp"
#include "tring/tr_model.hpp"

namespace tring::experiment {

struct ExperimentConfig {
    std::optional<RankVector> ranks;  // default: see default_ranks
    double beta = 0.1;                // 0 fits the plain nonnegative ring
    std::size_t p = 5;
    std::size_t t_max = 100;
    double tol = 1e-6;
    std::size_t max_sweeps = 500;
    std::uint64_t seed = 0;
    std::size_t restarts = 200;  // k-means restarts
    std::size_t repeats = 10;    // independent fits per experiment

    [[nodiscard]] SolverConfig solver(std::uint64_t run_seed) const;
};

/// Ranks giving `features` features on the last core: (r_d, r_1) is the most
/// balanced factor pair a <= b of `features` with r_d = a, r_1 = b; every other rank is 2.
[[nodiscard]] RankVector default_ranks(std::size_t order, std::size_t features);

/// Tensor generated exactly by random nonnegative cores.
[[nodiscard]] DenseTensor synthetic_tr(const Shape& shape, const RankVector& ranks, std::uint64_t seed);

struct LabeledTensor {
    DenseTensor x;
    LabelVector labels;
};

/// height x width x channels x (classes * per_class) nonnegative tensor whose
/// classes are bright blocks at distinct image positions and channel mixes,
/// with per-sample brightness jitter and additive |noise|. Samples are
/// class-contiguous.
[[nodiscard]] LabeledTensor synthetic_blobs(std::size_t height, std::size_t width,
                                            std::size_t channels, std::size_t classes,
                                            std::size_t per_class, double noise,
                                            std::uint64_t seed);

/// Rows of the last core's mode-2 unfolding: one r_d * r_1 feature vector per sample.
[[nodiscard]] FeatureMatrix extract_features(const TRCores& cores);

/// NTR fit when beta == 0, otherwise graph-regularized with the p-NN graph of x.
[[nodiscard]] FitResult run_fit(const DenseTensor& x, const RankVector& ranks,
                                const ExperimentConfig& cfg, std::uint64_t run_seed,
                                const NeighborGraph* graph);

[[nodiscard]] std::size_t distinct_labels(const LabelVector& labels);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};
[[nodiscard]] Summary summarize(const std::vector<double>& values);

struct ClusterReport {
    RankVector ranks;
    std::vector<double> ac;
    std::vector<double> nmi;
    Summary ac_summary;
    Summary nmi_summary;
    double seconds = 0.0;
};

/// `repeats` fits (seed + r) -> features -> k-means with k = distinct labels.
[[nodiscard]] ClusterReport cluster_experiment(const DenseTensor& x, const LabelVector& labels,
                                               const ExperimentConfig& cfg);

struct ClassifyReport {
    RankVector ranks;
    double label_fraction = 0.0;
    std::vector<std::size_t> k_list;
    std::vector<std::vector<double>> accuracy;  // [run][k index]
    std::vector<Summary> summary;               // per k
};

/// First floor(fraction * n_c) samples of each class (at least one, never all)
/// form the training set.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
[[nodiscard]] Split prefix_split(const LabelVector& labels, double label_fraction);

[[nodiscard]] ClassifyReport classify_experiment(const DenseTensor& x, const LabelVector& labels,
                                                 const ExperimentConfig& cfg, double label_fraction,
                                                 const std::vector<std::size_t>& k_list);

enum class SweepParam { t_max, p, beta };
[[nodiscard]] SweepParam parse_sweep_param(const std::string& name);
[[nodiscard]] std::string sweep_param_name(SweepParam param);
[[nodiscard]] std::vector<double> default_sweep_values(SweepParam param);

struct SweepRow {
    double value;
    ClusterReport report;
};

[[nodiscard]] std::vector<SweepRow> sweep_experiment(const DenseTensor& x, const LabelVector& labels,
                                                     const ExperimentConfig& cfg, SweepParam param,
                                                     const std::vector<double>& values);

/// One basis tensor per feature: the ring contracted with the last core
/// replaced by a single-sample core whose mode-2 unfolding is the unit row e_f.
/// Each result has the data shape with the sample mode reduced to 1.
[[nodiscard]] std::vector<DenseTensor> basis_tensors(const TRCores& cores);

/// Maps a basis tensor (height x width [x 3] x 1) to 8 bits: min-max scaled to
/// [0, 255]; if any entry is negative, negative entries render white (255) and
/// the rest scale over [0, max].
[[nodiscard]] io::ByteImage render_basis(const DenseTensor& basis);

/// Tiles images row-major into a rows x cols grid; unused tiles stay black.
[[nodiscard]] io::ByteImage montage(const std::vector<io::ByteImage>& tiles, std::size_t rows,
                                    std::size_t cols);

/// Default near-square grid holding `count` tiles.
[[nodiscard]] std::pair<std::size_t, std::size_t> default_layout(std::size_t count);

// -- output formats --

/// Shortest round-trip decimal form.
[[nodiscard]] std::string fmt_double(double v);

/// sweep,objective,rel_change,seconds
[[nodiscard]] std::string fit_report_csv(const FitReport& report);
/// run,ac,nmi then mean and std rows
[[nodiscard]] std::string cluster_csv(const ClusterReport& report);
/// run,k,accuracy then mean and std rows per k
[[nodiscard]] std::string classify_csv(const ClassifyReport& report);
/// param,value,ac_mean,ac_std,nmi_mean,nmi_std,seconds
[[nodiscard]] std::string sweep_csv(SweepParam param, const std::vector<SweepRow>& rows);
/// feature,sparseness
[[nodiscard]] std::string basis_csv(const std::vector<DenseTensor>& basis);

}  // namespace tring::experiment
