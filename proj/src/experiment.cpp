#include "tring/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "tring/error.hpp"
#include "tring/tensor_ops.hpp"

namespace tring::experiment {

SolverConfig ExperimentConfig::solver(std::uint64_t run_seed) const {
    SolverConfig s;
    s.t_max = t_max;
    s.max_sweeps = max_sweeps;
    s.tol = tol;
    s.beta = beta;
    s.seed = run_seed;
    return s;
}

RankVector default_ranks(std::size_t order, std::size_t features) {
    if (order < 2) throw DimensionError("default ranks need an order >= 2 tensor");
    if (features == 0) throw DomainError("feature count must be positive");
    std::size_t a = 1;
    for (std::size_t f = 1; f * f <= features; ++f)
        if (features % f == 0) a = f;
    std::vector<std::size_t> r(order, 2);
    r[0] = features / a;
    r[order - 1] = a;
    return RankVector(std::move(r));
}

DenseTensor synthetic_tr(const Shape& shape, const RankVector& ranks, std::uint64_t seed) {
    return reconstruct(init_random(shape, ranks, seed));
}

LabeledTensor synthetic_blobs(std::size_t height, std::size_t width, std::size_t channels,
                              std::size_t classes, std::size_t per_class, double noise,
                              std::uint64_t seed) {
    if (classes == 0 || per_class == 0) throw DomainError("blob fixture needs classes and samples");
    if (classes > height) throw DomainError("blob fixture needs height >= classes");
    const std::size_t n = classes * per_class;
    std::vector<std::size_t> dims{height, width};
    if (channels > 1) dims.push_back(channels);
    dims.push_back(n);
    const std::size_t ch = std::max<std::size_t>(channels, 1);

    std::vector<DenseTensor> prototypes;
    for (std::size_t c = 0; c < classes; ++c) {
        DenseTensor proto(Shape{height, width, ch}, 0.05);
        const std::size_t y0 = c * height / classes, y1 = (c + 1) * height / classes;
        for (std::size_t y = y0; y < y1; ++y)
            for (std::size_t x = 0; x < width; ++x)
                for (std::size_t k = 0; k < ch; ++k) proto.at({y, x, k}) = k == c % ch ? 1.0 : 0.3;
        prototypes.push_back(std::move(proto));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LabeledTensor out{DenseTensor(Shape(dims)), LabelVector(n)};
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t c = s / per_class;
        out.labels[s] = static_cast<int>(c);
        const double scale = jitter(rng);
        const auto& proto = prototypes[c];
        for (std::size_t e = 0; e < proto.size(); ++e) {
            out.x[e * n + s] = scale * proto[e] + noise * std::abs(gauss(rng));
        }
    }
    return out;
}

FeatureMatrix extract_features(const TRCores& cores) { return core_unfold2(cores, cores.order() - 1); }

FitResult run_fit(const DenseTensor& x, const RankVector& ranks, const ExperimentConfig& cfg,
                  std::uint64_t run_seed, const NeighborGraph* graph) {
    return fit(x, ranks, cfg.solver(run_seed), cfg.beta > 0.0 ? graph : nullptr);
}

std::size_t distinct_labels(const LabelVector& labels) {
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return s;
}

namespace {

void check_labels(const DenseTensor& x, const LabelVector& labels) {
    if (labels.size() != x.dim(x.order() - 1)) {
        throw DimensionError("labels file has " + std::to_string(labels.size()) +
                             " entries but the sample mode has size " +
                             std::to_string(x.dim(x.order() - 1)));
    }
}

std::optional<NeighborGraph> maybe_graph(const DenseTensor& x, const ExperimentConfig& cfg) {
    if (cfg.beta <= 0.0) return std::nullopt;
    return build_sample_graph(x, GraphConfig{cfg.p});
}

RankVector resolve_ranks(const DenseTensor& x, const ExperimentConfig& cfg, std::size_t features) {
    RankVector r = cfg.ranks ? *cfg.ranks : default_ranks(x.order(), features);
    if (r.size() != x.order()) {
        throw DimensionError("--ranks has " + std::to_string(r.size()) + " entries for an order-" +
                             std::to_string(x.order()) + " tensor");
    }
    return r;
}

}  // namespace

ClusterReport cluster_experiment(const DenseTensor& x, const LabelVector& labels,
                                 const ExperimentConfig& cfg) {
    check_labels(x, labels);
    if (cfg.repeats == 0) throw DomainError("repeats must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t k = distinct_labels(labels);
    ClusterReport rep{resolve_ranks(x, cfg, k), {}, {}, {}, {}, 0.0};
    const auto graph = maybe_graph(x, cfg);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const auto result = run_fit(x, rep.ranks, cfg, cfg.seed + r, graph ? &*graph : nullptr);
        const LabelVector pred = kmeans(extract_features(result.cores), k, cfg.restarts, cfg.seed + r);
        rep.ac.push_back(accuracy(pred, labels));
        rep.nmi.push_back(nmi(labels, pred));
    }
    rep.ac_summary = summarize(rep.ac);
    rep.nmi_summary = summarize(rep.nmi);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

Split prefix_split(const LabelVector& labels, double label_fraction) {
    if (!(label_fraction > 0.0 && label_fraction < 1.0)) {
        throw DomainError("label fraction must lie strictly between 0 and 1");
    }
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    Split split;
    for (const auto& [cls, idx] : members) {
        if (idx.size() < 2) {
            throw DomainError("class " + std::to_string(cls) + " has fewer than two samples");
        }
        auto n_train = static_cast<std::size_t>(std::floor(label_fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

ClassifyReport classify_experiment(const DenseTensor& x, const LabelVector& labels,
                                   const ExperimentConfig& cfg, double label_fraction,
                                   const std::vector<std::size_t>& k_list) {
    check_labels(x, labels);
    if (cfg.repeats == 0) throw DomainError("repeats must be at least 1");
    if (k_list.empty()) throw DomainError("k list is empty");
    const Split split = prefix_split(labels, label_fraction);
    for (std::size_t k : k_list) {
        if (k == 0 || k > split.train.size()) {
            throw DomainError("k=" + std::to_string(k) + " exceeds the " +
                              std::to_string(split.train.size()) + " labeled samples");
        }
    }
    ClassifyReport rep{resolve_ranks(x, cfg, distinct_labels(labels)), label_fraction, k_list, {}, {}};
    const auto graph = maybe_graph(x, cfg);
    LabelVector train_labels, test_labels;
    for (std::size_t i : split.train) train_labels.push_back(labels[i]);
    for (std::size_t i : split.test) test_labels.push_back(labels[i]);

    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const auto result = run_fit(x, rep.ranks, cfg, cfg.seed + r, graph ? &*graph : nullptr);
        const FeatureMatrix feats = extract_features(result.cores);
        FeatureMatrix train(split.train.size(), feats.cols()), test(split.test.size(), feats.cols());
        for (std::size_t i = 0; i < split.train.size(); ++i)
            std::copy_n(feats.row(split.train[i]).begin(), feats.cols(), train.row(i).begin());
        for (std::size_t i = 0; i < split.test.size(); ++i)
            std::copy_n(feats.row(split.test[i]).begin(), feats.cols(), test.row(i).begin());
        std::vector<double> accs;
        for (std::size_t k : k_list) {
            const LabelVector pred = knn_classify(train, train_labels, test, k);
            std::size_t hit = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == test_labels[i];
            accs.push_back(static_cast<double>(hit) / static_cast<double>(pred.size()));
        }
        rep.accuracy.push_back(std::move(accs));
    }
    for (std::size_t q = 0; q < k_list.size(); ++q) {
        std::vector<double> col;
        for (const auto& row : rep.accuracy) col.push_back(row[q]);
        rep.summary.push_back(summarize(col));
    }
    return rep;
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "tmax" || name == "t_max") return SweepParam::t_max;
    if (name == "p") return SweepParam::p;
    if (name == "beta") return SweepParam::beta;
    throw DomainError("unknown sweep parameter '" + name + "' (tmax, p or beta)");
}

std::string sweep_param_name(SweepParam param) {
    switch (param) {
        case SweepParam::t_max: return "tmax";
        case SweepParam::p: return "p";
        case SweepParam::beta: return "beta";
    }
    return "?";
}

std::vector<double> default_sweep_values(SweepParam param) {
    switch (param) {
        case SweepParam::t_max: return {60, 80, 100, 120, 140};
        case SweepParam::p: return {3, 4, 5, 6, 7};
        case SweepParam::beta: return {0.1, 0.2, 0.3, 0.4, 0.5};
    }
    return {};
}

std::vector<SweepRow> sweep_experiment(const DenseTensor& x, const LabelVector& labels,
                                       const ExperimentConfig& cfg, SweepParam param,
                                       const std::vector<double>& values) {
    if (values.empty()) throw DomainError("sweep grid is empty");
    std::vector<SweepRow> rows;
    for (double v : values) {
        ExperimentConfig point = cfg;
        switch (param) {
            case SweepParam::t_max:
                if (v < 1 || v != std::floor(v)) throw DomainError("tmax values must be positive integers");
                point.t_max = static_cast<std::size_t>(v);
                break;
            case SweepParam::p:
                if (v < 1 || v != std::floor(v)) throw DomainError("p values must be positive integers");
                point.p = static_cast<std::size_t>(v);
                break;
            case SweepParam::beta:
                if (v < 0) throw DomainError("beta values must be >= 0");
                point.beta = v;
                break;
        }
        rows.push_back(SweepRow{v, cluster_experiment(x, labels, point)});
    }
    return rows;
}

std::vector<DenseTensor> basis_tensors(const TRCores& cores) {
    const std::size_t last = cores.order() - 1;
    const auto& feature_core = cores.core(last);
    const std::size_t rd = feature_core.dim(0), r1 = feature_core.dim(2);
    std::vector<DenseTensor> out;
    for (std::size_t f = 0; f < rd * r1; ++f) {
        Matrix unit(1, rd * r1);
        unit(0, f) = 1.0;
        std::vector<DenseTensor> ring = cores.cores();
        ring[last] = core_fold2(unit, rd, 1, r1);
        out.push_back(reconstruct(TRCores(std::move(ring), cores.nonneg())));
    }
    return out;
}

io::ByteImage render_basis(const DenseTensor& basis) {
    const std::size_t d = basis.order();
    if (d < 3 || d > 4 || basis.dim(d - 1) != 1 || (d == 4 && basis.dim(2) != 3)) {
        throw DimensionError("basis " + basis.shape().str() +
                             " is not a height x width [x 3] x 1 image");
    }
    io::ByteImage img{basis.dim(0), basis.dim(1), d == 4 ? 3U : 1U, {}};
    const auto [lo_it, hi_it] = std::minmax_element(basis.data().begin(), basis.data().end());
    const bool has_negative = *lo_it < 0.0;
    const double lo = has_negative ? 0.0 : *lo_it;
    const double hi = *hi_it;
    img.data.resize(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double v = basis[i];
        if (v < 0.0) {
            img.data[i] = 255;
        } else if (hi > lo) {
            img.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * (v - lo) / (hi - lo)));
        } else {
            img.data[i] = 0;
        }
    }
    return img;
}

io::ByteImage montage(const std::vector<io::ByteImage>& tiles, std::size_t rows, std::size_t cols) {
    if (tiles.empty()) throw DomainError("montage needs at least one tile");
    if (rows * cols < tiles.size()) {
        throw DomainError("layout " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " cannot hold " + std::to_string(tiles.size()) + " basis images");
    }
    const std::size_t h = tiles[0].height, w = tiles[0].width, ch = tiles[0].channels;
    io::ByteImage out{rows * h, cols * w, ch, std::vector<std::uint8_t>(rows * h * cols * w * ch, 0)};
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        const auto& tile = tiles[t];
        if (tile.height != h || tile.width != w || tile.channels != ch) {
            throw DimensionError("montage tiles differ in size");
        }
        const std::size_t ty = t / cols, tx = t % cols;
        for (std::size_t y = 0; y < h; ++y) {
            const auto* src = tile.data.data() + y * w * ch;
            auto* dst = out.data.data() + ((ty * h + y) * out.width + tx * w) * ch;
            std::copy_n(src, w * ch, dst);
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> default_layout(std::size_t count) {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    return {(count + cols - 1) / cols, cols};
}

std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string fit_report_csv(const FitReport& report) {
    std::ostringstream os;
    os << "sweep,objective,rel_change,seconds\n";
    for (std::size_t s = 0; s < report.sweeps_run; ++s) {
        os << s + 1 << ',' << fmt_double(report.objective_per_sweep[s]) << ','
           << fmt_double(report.rel_change_per_sweep[s]) << ','
           << fmt_double(report.seconds_per_sweep[s]) << '\n';
    }
    return os.str();
}

std::string cluster_csv(const ClusterReport& report) {
    std::ostringstream os;
    os << "run,ac,nmi\n";
    for (std::size_t r = 0; r < report.ac.size(); ++r)
        os << r << ',' << fmt_double(report.ac[r]) << ',' << fmt_double(report.nmi[r]) << '\n';
    os << "mean," << fmt_double(report.ac_summary.mean) << ',' << fmt_double(report.nmi_summary.mean) << '\n';
    os << "std," << fmt_double(report.ac_summary.stddev) << ',' << fmt_double(report.nmi_summary.stddev) << '\n';
    return os.str();
}

std::string classify_csv(const ClassifyReport& report) {
    std::ostringstream os;
    os << "run,k,accuracy\n";
    for (std::size_t r = 0; r < report.accuracy.size(); ++r)
        for (std::size_t q = 0; q < report.k_list.size(); ++q)
            os << r << ',' << report.k_list[q] << ',' << fmt_double(report.accuracy[r][q]) << '\n';
    for (std::size_t q = 0; q < report.k_list.size(); ++q)
        os << "mean," << report.k_list[q] << ',' << fmt_double(report.summary[q].mean) << '\n';
    for (std::size_t q = 0; q < report.k_list.size(); ++q)
        os << "std," << report.k_list[q] << ',' << fmt_double(report.summary[q].stddev) << '\n';
    return os.str();
}

std::string sweep_csv(SweepParam param, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "param,value,ac_mean,ac_std,nmi_mean,nmi_std,seconds\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        os << sweep_param_name(param) << ',' << fmt_double(row.value) << ','
           << fmt_double(r.ac_summary.mean) << ',' << fmt_double(r.ac_summary.stddev) << ','
           << fmt_double(r.nmi_summary.mean) << ',' << fmt_double(r.nmi_summary.stddev) << ','
           << fmt_double(r.seconds) << '\n';
    }
    return os.str();
}

std::string basis_csv(const std::vector<DenseTensor>& basis) {
    std::ostringstream os;
    os << "feature,sparseness\n";
    for (std::size_t f = 0; f < basis.size(); ++f) {
        // An all-zero basis has no defined sparseness; report it as empty.
        const double l2 = frobenius_norm(basis[f].data());
        os << f << ',' << (l2 > 0.0 ? fmt_double(sparseness(basis[f].data())) : std::string()) << '\n';
    }
    return os.str();
}

}  // namespace tring::experiment
