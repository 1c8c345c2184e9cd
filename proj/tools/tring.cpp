// tring: nonnegative tensor ring experiments from the command line.
//
//   tring fit|cluster|classify|sweep|basis --data <path.ten> [--labels <path.txt>]
//         --ranks r1,...,rd [--beta F] [--p N] [--tmax N] [--tol F] [--max-sweeps N]
//         [--seed N] [--restarts N] [--out <dir>]
//   tring generate --kind tr|blobs ...      synthetic fixtures
//   tring ingest --images <dir> ...         PGM/PPM corpus -> tensor + labels
//
// Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tring/error.hpp"
#include "tring/experiment.hpp"
#include "tring/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tring;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw DomainError(std::string("cannot parse ") + what + " '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw DomainError(std::string(what) + " is empty");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw DomainError("cannot parse value list '" + text + "'");
        }
    }
    if (out.empty()) throw DomainError("value list is empty");
    return out;
}

struct Options {
    std::string data;
    std::string labels;
    std::string ranks;
    std::string out = "tring_out";
    experiment::ExperimentConfig cfg;
    // classify
    double fraction = 0.2;
    std::string k_list = "1,3,5";
    // sweep
    std::string param = "beta";
    std::string values;
    // basis
    std::string layout;
    // generate
    std::string kind = "tr";
    std::string shape = "8,8,3,20";
    std::size_t classes = 3;
    std::size_t per_class = 20;
    double noise = 0.02;
    // ingest
    std::string images;
    std::size_t height = 32;
    std::size_t width = 32;
};

void add_model_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--ranks", o.ranks, "Ring ranks r1,...,rd");
    cmd->add_option("--beta", o.cfg.beta, "Graph regularization weight (0 = plain NTR)")->capture_default_str();
    cmd->add_option("--p", o.cfg.p, "Nearest neighbors in the sample graph")->capture_default_str();
    cmd->add_option("--tmax", o.cfg.t_max, "Inner APG iterations per core")->capture_default_str();
    cmd->add_option("--tol", o.cfg.tol, "Relative objective change stopping threshold")->capture_default_str();
    cmd->add_option("--max-sweeps", o.cfg.max_sweeps, "Outer sweep cap")->capture_default_str();
    cmd->add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void add_data_options(CLI::App* cmd, Options& o, bool labels_required) {
    cmd->add_option("--data", o.data, "Input tensor file (.ten)")->required();
    auto* lab = cmd->add_option("--labels", o.labels, "Labels file, one integer per line");
    if (labels_required) lab->required();
}

void add_experiment_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--restarts", o.cfg.restarts, "k-means restarts")->capture_default_str();
    cmd->add_option("--repeats", o.cfg.repeats, "Independent fits per experiment")->capture_default_str();
}

json config_json(const Options& o) {
    const auto& c = o.cfg;
    json j = {{"beta", c.beta},         {"p", c.p},
              {"tmax", c.t_max},        {"tol", c.tol},
              {"max_sweeps", c.max_sweeps}, {"seed", c.seed},
              {"restarts", c.restarts}, {"repeats", c.repeats}};
    if (c.ranks) j["ranks"] = c.ranks->values();
    return j;
}

class Run {
public:
    Run(std::string command, const Options& o, int argc, char** argv)
        : command_(std::move(command)), out_(o.out) {
        fs::create_directories(out_);
        manifest_["command"] = command_;
        manifest_["argv"] = std::vector<std::string>(argv, argv + argc);
        manifest_["config"] = config_json(o);
        manifest_["outputs"] = json::object();
    }

    DenseTensor load_data(const std::string& path) {
        const std::string bytes = io::read_file(path);
        DenseTensor x = io::decode_tensor(bytes);
        manifest_["data"] = {{"path", path}, {"sha256", io::sha256_hex(bytes)}, {"shape", x.shape().dims()}};
        return x;
    }

    LabelVector load_labels(const std::string& path) {
        const std::string bytes = io::read_file(path);
        LabelVector labels = io::read_labels(path);
        manifest_["labels"] = {{"path", path}, {"sha256", io::sha256_hex(bytes)}};
        return labels;
    }

    void emit(const std::string& name, const std::string& bytes) {
        io::atomic_write(out_ / name, bytes);
        manifest_["outputs"][name] = io::sha256_hex(bytes);
    }

    json& manifest() { return manifest_; }

    void finish() { io::atomic_write(out_ / "manifest.json", manifest_.dump(2) + "\n"); }

private:
    std::string command_;
    fs::path out_;
    json manifest_;
};

void resolve_ranks(Options& o) {
    if (!o.ranks.empty()) o.cfg.ranks = RankVector(parse_list(o.ranks, "--ranks"));
}

void report_fit(const FitResult& res, const DenseTensor& x) {
    const auto& r = res.report;
    std::cout << "sweeps: " << r.sweeps_run << " ("
              << (r.terminated_by == Termination::tolerance ? "tolerance" : "max_sweeps") << ")\n"
              << "objective: " << experiment::fmt_double(r.objective_per_sweep.back()) << '\n'
              << "relative_error: " << experiment::fmt_double(relative_error(x, res.cores)) << '\n'
              << "seconds: " << experiment::fmt_double(r.wall_seconds) << '\n';
}

int cmd_fit(Options& o, int argc, char** argv) {
    resolve_ranks(o);
    if (!o.cfg.ranks) throw DomainError("fit requires --ranks");
    Run run("fit", o, argc, argv);
    const DenseTensor x = run.load_data(o.data);
    std::optional<NeighborGraph> graph;
    if (o.cfg.beta > 0.0) graph = build_sample_graph(x, GraphConfig{o.cfg.p});
    const FitResult res = experiment::run_fit(x, *o.cfg.ranks, o.cfg, o.cfg.seed, graph ? &*graph : nullptr);
    for (std::size_t n = 0; n < res.cores.order(); ++n) {
        run.emit("core_" + std::to_string(n + 1) + ".ten", io::encode_tensor(res.cores.core(n)));
    }
    run.emit("fit_report.csv", experiment::fit_report_csv(res.report));
    run.manifest()["result"] = {{"sweeps", res.report.sweeps_run},
                                {"relative_error", relative_error(x, res.cores)}};
    run.finish();
    report_fit(res, x);
    return 0;
}

int cmd_cluster(Options& o, int argc, char** argv) {
    resolve_ranks(o);
    Run run("cluster", o, argc, argv);
    const DenseTensor x = run.load_data(o.data);
    const LabelVector labels = run.load_labels(o.labels);
    const auto rep = experiment::cluster_experiment(x, labels, o.cfg);
    run.manifest()["ranks"] = rep.ranks.values();
    run.emit("cluster.csv", experiment::cluster_csv(rep));
    run.finish();
    std::cout << "k: " << experiment::distinct_labels(labels) << '\n'
              << "AC: " << experiment::fmt_double(rep.ac_summary.mean) << " +/- "
              << experiment::fmt_double(rep.ac_summary.stddev) << '\n'
              << "NMI: " << experiment::fmt_double(rep.nmi_summary.mean) << " +/- "
              << experiment::fmt_double(rep.nmi_summary.stddev) << '\n';
    return 0;
}

int cmd_classify(Options& o, int argc, char** argv) {
    resolve_ranks(o);
    Run run("classify", o, argc, argv);
    run.manifest()["config"]["label_fraction"] = o.fraction;
    run.manifest()["config"]["k_list"] = o.k_list;
    const DenseTensor x = run.load_data(o.data);
    const LabelVector labels = run.load_labels(o.labels);
    const auto rep = experiment::classify_experiment(x, labels, o.cfg, o.fraction,
                                                     parse_list(o.k_list, "--k-list"));
    run.manifest()["ranks"] = rep.ranks.values();
    run.emit("classify.csv", experiment::classify_csv(rep));
    run.finish();
    for (std::size_t q = 0; q < rep.k_list.size(); ++q) {
        std::cout << "k-NN(k=" << rep.k_list[q] << "): " << experiment::fmt_double(rep.summary[q].mean)
                  << " +/- " << experiment::fmt_double(rep.summary[q].stddev) << '\n';
    }
    return 0;
}

int cmd_sweep(Options& o, int argc, char** argv) {
    resolve_ranks(o);
    const auto param = experiment::parse_sweep_param(o.param);
    const auto values = o.values.empty() ? experiment::default_sweep_values(param) : parse_doubles(o.values);
    Run run("sweep", o, argc, argv);
    run.manifest()["config"]["param"] = experiment::sweep_param_name(param);
    run.manifest()["config"]["values"] = values;
    const DenseTensor x = run.load_data(o.data);
    const LabelVector labels = run.load_labels(o.labels);
    const auto rows = experiment::sweep_experiment(x, labels, o.cfg, param, values);
    const std::string csv = experiment::sweep_csv(param, rows);
    run.emit("sweep.csv", csv);
    run.finish();
    std::cout << csv;
    return 0;
}

int cmd_basis(Options& o, int argc, char** argv) {
    resolve_ranks(o);
    if (!o.cfg.ranks) throw DomainError("basis requires --ranks");
    Run run("basis", o, argc, argv);
    const DenseTensor x = run.load_data(o.data);
    std::optional<NeighborGraph> graph;
    if (o.cfg.beta > 0.0) graph = build_sample_graph(x, GraphConfig{o.cfg.p});
    const FitResult res = experiment::run_fit(x, *o.cfg.ranks, o.cfg, o.cfg.seed, graph ? &*graph : nullptr);
    const auto basis = experiment::basis_tensors(res.cores);
    std::vector<io::ByteImage> tiles;
    for (const auto& b : basis) tiles.push_back(experiment::render_basis(b));
    auto [rows, cols] = experiment::default_layout(tiles.size());
    if (!o.layout.empty()) {
        const auto sep = o.layout.find('x');
        if (sep == std::string::npos) throw DomainError("--layout must look like ROWSxCOLS");
        rows = parse_list(o.layout.substr(0, sep), "--layout")[0];
        cols = parse_list(o.layout.substr(sep + 1), "--layout")[0];
    }
    const io::ByteImage img = experiment::montage(tiles, rows, cols);
    const std::string name = img.channels == 1 ? "basis.pgm" : "basis.ppm";
    run.emit(name, io::encode_pnm(img));
    run.emit("basis_sparseness.csv", experiment::basis_csv(basis));
    for (std::size_t n = 0; n < res.cores.order(); ++n) {
        run.emit("core_" + std::to_string(n + 1) + ".ten", io::encode_tensor(res.cores.core(n)));
    }
    run.manifest()["layout"] = {rows, cols};
    run.finish();
    std::cout << "basis images: " << basis.size() << " -> " << (fs::path(o.out) / name).string() << " ("
              << img.width << "x" << img.height << ")\n";
    return 0;
}

int cmd_generate(Options& o, int argc, char** argv) {
    Run run("generate", o, argc, argv);
    if (o.kind == "tr") {
        resolve_ranks(o);
        const Shape shape(parse_list(o.shape, "--shape"));
        const RankVector ranks = o.cfg.ranks ? *o.cfg.ranks : RankVector(std::vector<std::size_t>(shape.order(), 2));
        run.emit("data.ten", io::encode_tensor(experiment::synthetic_tr(shape, ranks, o.cfg.seed)));
    } else if (o.kind == "blobs") {
        const auto dims = parse_list(o.shape, "--shape");
        if (dims.size() != 2 && dims.size() != 3) {
            throw DomainError("blob --shape is height,width[,channels]");
        }
        const auto blobs = experiment::synthetic_blobs(dims[0], dims[1], dims.size() == 3 ? dims[2] : 1,
                                                       o.classes, o.per_class, o.noise, o.cfg.seed);
        run.emit("data.ten", io::encode_tensor(blobs.x));
        std::string labels;
        for (int l : blobs.labels) labels += std::to_string(l) + "\n";
        run.emit("labels.txt", labels);
    } else {
        throw DomainError("--kind must be tr or blobs");
    }
    run.finish();
    return 0;
}

int cmd_ingest(Options& o, int argc, char** argv) {
    Run run("ingest", o, argc, argv);
    const auto corpus = io::ingest_images(o.images, o.height, o.width);
    run.emit("data.ten", io::encode_tensor(corpus.tensor));
    std::string labels, classes;
    for (int l : corpus.labels) labels += std::to_string(l) + "\n";
    for (const auto& c : corpus.class_names) classes += c + "\n";
    run.emit("labels.txt", labels);
    run.emit("classes.txt", classes);
    run.finish();
    std::cout << "samples: " << corpus.labels.size() << ", classes: " << corpus.class_names.size()
              << ", shape: " << corpus.tensor.shape().str() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonnegative tensor ring decomposition experiments"};
    app.require_subcommand(1);
    Options o;

    auto* fit = app.add_subcommand("fit", "Fit cores and write them with a convergence log");
    add_data_options(fit, o, false);
    add_model_options(fit, o);

    auto* cluster = app.add_subcommand("cluster", "k-means on last-core features; AC and NMI");
    add_data_options(cluster, o, true);
    add_model_options(cluster, o);
    add_experiment_options(cluster, o);

    auto* classify = app.add_subcommand("classify", "k-NN on last-core features with a per-class prefix split");
    add_data_options(classify, o, true);
    add_model_options(classify, o);
    add_experiment_options(classify, o);
    classify->add_option("--fraction", o.fraction, "Labeled fraction per class")->capture_default_str();
    classify->add_option("--k-list", o.k_list, "Neighbor counts")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Clustering over a grid of tmax, p or beta");
    add_data_options(sweep, o, true);
    add_model_options(sweep, o);
    add_experiment_options(sweep, o);
    sweep->add_option("--param", o.param, "tmax | p | beta")->capture_default_str();
    sweep->add_option("--values", o.values, "Comma-separated grid (default: 5-point grid)");

    auto* basis = app.add_subcommand("basis", "Render per-feature basis images as a montage");
    add_data_options(basis, o, false);
    add_model_options(basis, o);
    basis->add_option("--layout", o.layout, "Montage grid ROWSxCOLS");

    auto* generate = app.add_subcommand("generate", "Write a synthetic fixture");
    generate->add_option("--kind", o.kind, "tr | blobs")->capture_default_str();
    generate->add_option("--shape", o.shape, "tr: i1,...,id; blobs: height,width[,channels]")->capture_default_str();
    generate->add_option("--ranks", o.ranks, "tr: ring ranks (default all 2)");
    generate->add_option("--classes", o.classes, "blobs: class count")->capture_default_str();
    generate->add_option("--per-class", o.per_class, "blobs: samples per class")->capture_default_str();
    generate->add_option("--noise", o.noise, "blobs: additive noise level")->capture_default_str();
    generate->add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
    generate->add_option("--out", o.out, "Output directory")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Stack PGM/PPM images from class subdirectories");
    ingest->add_option("--images", o.images, "Directory of class subdirectories")->required();
    ingest->add_option("--height", o.height, "Target height")->capture_default_str();
    ingest->add_option("--width", o.width, "Target width")->capture_default_str();
    ingest->add_option("--out", o.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*fit) return cmd_fit(o, argc, argv);
        if (*cluster) return cmd_cluster(o, argc, argv);
        if (*classify) return cmd_classify(o, argc, argv);
        if (*sweep) return cmd_sweep(o, argc, argv);
        if (*basis) return cmd_basis(o, argc, argv);
        if (*generate) return cmd_generate(o, argc, argv);
        if (*ingest) return cmd_ingest(o, argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
