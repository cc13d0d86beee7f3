#include "app.hpp"

#include "config.hpp"
#include "manifest.hpp"
#include "svg.hpp"

#include "rtd/datasets.hpp"
#include "rtd/errors.hpp"
#include "rtd/grad.hpp"
#include "rtd/metrics.hpp"
#include "rtd/model.hpp"
#include "rtd/optimize.hpp"
#include "rtd/persistence.hpp"
#include "rtd/rcross.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>

namespace rtd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << text;
}

std::string absolute_or_same(const std::string& path) {
    std::error_code ec;
    const auto p = fs::absolute(path, ec);
    return ec ? path : p.lexically_normal().string();
}

// ---------------------------------------------------------------- barcode

struct BarcodeArgs {
    std::string input;
    std::string output = "-";
    std::vector<int> dims{0, 1};
    double max_value = kInfinity;
};

int cmd_barcode(const BarcodeArgs& a, std::ostream& out) {
    const auto cloud = load_csv(a.input);
    const std::set<int> dims(a.dims.begin(), a.dims.end());
    FiltrationOptions opt;
    opt.max_dim = *dims.rbegin() + 1;
    opt.max_value = a.max_value;
    const auto barcode = compute_barcode(build_filtration(pairwise_distances(cloud), opt), dims);
    if (a.output == "-") {
        write_barcode_csv(out, barcode);
    } else {
        save_barcode_csv(a.output, barcode);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- rtd

struct RtdArgs {
    std::string first;
    std::string second;
    std::string variant = "min";
    std::string grad_path;
    bool topoae = false;
    bool bypass = false;
};

void write_gradient_csv(const std::string& path, const GradientField& g) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "cloud,point,coord,value\n";
    const RowMatrix* parts[] = {&g.d_x, &g.d_x_tilde};
    for (int c = 0; c < 2; ++c) {
        const auto& m = *parts[c];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index k = 0; k < m.cols(); ++k) {
                out << c << ',' << i << ',' << k << ',' << format_double(m(i, k)) << '\n';
            }
        }
    }
}

int cmd_rtd(const RtdArgs& a, std::ostream& out) {
    const auto x = load_csv(a.first);
    const auto y = load_csv(a.second);
    const CrossVariant variant = a.variant == "max" ? CrossVariant::Max : CrossVariant::Min;
    if (!a.grad_path.empty()) {
        SubgradientOptions opt;
        opt.variant = variant;
        opt.minimum_bypass = a.bypass;
        const auto sg = rtd_subgradient(x, y, opt);
        out << "rtd " << format_double(sg.value) << '\n';
        write_gradient_csv(a.grad_path, sg.grads);
    } else {
        const double value = rtd::rtd(x, y, variant);
        out << "rtd " << format_double(value) << '\n';
    }
    if (a.topoae) {
        const double loss = topoae_loss(x, y);
        out << "topoae " << format_double(loss) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string source;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<int> size;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    CloudSource src;
    if (fs::path(a.source).extension() == ".json") {
        src = cloud_from_json(read_json_file(a.source), "");
    } else {
        src = cloud_from_json(json{{"name", a.source}}, "");
    }
    if (a.seed) src.spec.seed = *a.seed;
    if (a.size) {
        if (src.infinity) src.infinity_size = *a.size;
        else src.spec.size = *a.size;
        if (*a.size < 1) throw UsageError("--size: must be >= 1");
    }
    const auto cloud = src.make();
    save_csv(cloud, a.output);
    write_manifest(manifest_path_for(a.output),
                   {"gen", to_json(src), {src.spec.seed}, {absolute_or_same(a.output)}});
    out << "wrote " << cloud.size() << " x " << cloud.dim() << " to " << a.output << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string config;
    std::optional<std::string> out_dir;
    std::optional<int> epochs;
    std::optional<int> rtd_start;
    std::optional<double> lambda;
    std::optional<double> lr;
    std::optional<int> batch_size;
    std::optional<std::string> optimizer;
    std::optional<std::uint64_t> seed;
    bool no_eval = false;
};

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "epoch,reconstruction,rtd,total,skipped_rtd_batches\n";
    for (const auto& e : history) {
        out << e.epoch << ',' << format_double(e.reconstruction) << ',' << format_double(e.rtd) << ','
            << format_double(e.total) << ',' << e.skipped_rtd_batches << '\n';
    }
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    auto x = train_experiment_from_json(read_json_file(a.config));
    if (a.out_dir) x.output_dir = *a.out_dir;
    if (a.epochs) x.train.epochs_total = *a.epochs;
    if (a.rtd_start) x.train.rtd_start_epoch = *a.rtd_start;
    if (a.lambda) x.train.lambda = *a.lambda;
    if (a.lr) x.train.learning_rate = *a.lr;
    if (a.batch_size) x.train.batch_size = *a.batch_size;
    if (a.optimizer) {
        try {
            x.train.optimizer = parse_optimizer(*a.optimizer);
        } catch (const InputError& e) {
            throw UsageError(std::string("--optimizer: ") + e.what());
        }
    }
    if (a.seed) x.seeds = {*a.seed};
    if (a.no_eval) x.eval.enabled = false;
    if (x.seeds.empty()) x.seeds = {x.train.seed};
    validate_or_usage(x.train, "train");

    const auto data = x.data.make();
    fs::create_directories(x.output_dir);
    const fs::path dir(x.output_dir);
    std::vector<std::string> artifacts;
    save_csv(data, (dir / "data.csv").string());
    artifacts.push_back("data.csv");

    for (const auto seed : x.seeds) {
        TrainConfig c = x.train;
        c.seed = seed;
        const auto result = train(data, c);
        const fs::path sub = dir / ("seed-" + std::to_string(seed));
        fs::create_directories(sub);
        const std::string rel = "seed-" + std::to_string(seed) + "/";
        save_checkpoint((sub / "checkpoint.json").string(), result.params, c);
        write_history_csv((sub / "history.csv").string(), result.history);
        const auto z = encode(result.params, data);
        save_csv(z, (sub / "latent.csv").string());
        artifacts.insert(artifacts.end(), {rel + "checkpoint.json", rel + "history.csv", rel + "latent.csv"});
        out << "seed " << seed;
        if (!result.history.empty()) {
            out << ": reconstruction " << format_double(result.history.back().reconstruction);
        }
        if (x.eval.enabled) {
            const auto report = evaluate(data, z, x.eval.options);
            write_text((sub / "report.json").string(), report.to_json() + "\n");
            artifacts.push_back(rel + "report.json");
            out << ", rtd " << format_double(report.rtd.value) << ", lc "
                << format_double(report.linear_correlation.value);
        }
        out << '\n';
    }
    write_manifest((dir / "manifest.json").string(), {"train", to_json(x), x.seeds, artifacts});
    return kExitOk;
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
    std::string checkpoint;
    std::string input;
    std::string output;
};

int cmd_reduce(const ReduceArgs& a, std::ostream& out) {
    TrainConfig c;
    const auto params = load_checkpoint(a.checkpoint, &c);
    const auto data = load_csv(a.input);
    const auto z = encode(params, data);
    save_csv(z, a.output);
    const json config{{"checkpoint", absolute_or_same(a.checkpoint)},
                      {"input", absolute_or_same(a.input)},
                      {"train", to_json(c)}};
    write_manifest(manifest_path_for(a.output), {"reduce", config, {c.seed}, {absolute_or_same(a.output)}});
    out << "wrote " << z.size() << " x " << z.dim() << " to " << a.output << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string original;
    std::string embedded;
    std::string report;
    EvalOptions options;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const auto x = load_csv(a.original);
    const auto z = load_csv(a.embedded);
    const auto report = evaluate(x, z, a.options);
    const auto text = report.to_json();
    write_text(a.report, text + "\n");
    EvalToggles toggles;
    toggles.options = a.options;
    const json config{{"original", absolute_or_same(a.original)},
                      {"embedded", absolute_or_same(a.embedded)},
                      {"eval", to_json(toggles)}};
    write_manifest(manifest_path_for(a.report),
                   {"eval", config, {a.options.seed}, {absolute_or_same(a.report)}});
    out << text << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- morph

struct MorphArgs {
    std::string config;
    std::optional<std::string> out_dir;
    std::optional<int> steps;
    std::optional<double> lr;
    bool smoothing = false;
    bool bypass = false;
};

int cmd_morph(const MorphArgs& a, std::ostream& out) {
    auto x = morph_experiment_from_json(read_json_file(a.config));
    if (a.out_dir) x.output_dir = *a.out_dir;
    if (a.steps) x.optimizer.steps = *a.steps;
    if (a.lr) x.optimizer.schedule = {{0, *a.lr}};
    if (a.smoothing) x.optimizer.smoothing = true;
    if (a.bypass) x.optimizer.minimum_bypass = true;
    validate_or_usage(x.optimizer, "optimizer");

    const auto start = x.start.make();
    const auto target = x.target.make();
    OptimizerConfig c = x.optimizer;
    if (!x.warmstart_path.empty()) c.warmstart = load_csv(x.warmstart_path);
    const auto result = minimize_rtd(start, target, c);

    fs::create_directories(x.output_dir);
    const fs::path dir(x.output_dir);
    save_csv(start, (dir / "start.csv").string());
    save_csv(target, (dir / "target.csv").string());
    save_csv(result.cloud, (dir / "cloud.csv").string());
    {
        std::ofstream trace((dir / "trace.csv").string());
        if (!trace) throw InputError("cannot write trace.csv in " + x.output_dir);
        trace << "step,rtd\n";
        for (const auto& p : result.trace) trace << p.step << ',' << format_double(p.rtd) << '\n';
    }
    write_manifest((dir / "manifest.json").string(),
                   {"morph", to_json(x), {x.start.spec.seed, x.target.spec.seed},
                    {"start.csv", "target.csv", "cloud.csv", "trace.csv"}});
    if (!result.trace.empty()) {
        out << "rtd " << format_double(result.trace.front().rtd) << " -> "
            << format_double(result.trace.back().rtd) << " over " << c.steps << " steps\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
    std::string input;
    std::string output;
    std::string kind = "auto";
    std::string title;
};

bool looks_like_barcode(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string first;
    std::getline(in, first);
    return first.rfind("dim,birth,death", 0) == 0;
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    PlotStyle style;
    style.title = a.title;
    const bool bars = a.kind == "barcode" || (a.kind == "auto" && looks_like_barcode(a.input));
    std::string svg;
    if (bars) {
        svg = barcode_svg(load_barcode_csv(a.input), style);
    } else {
        svg = scatter_svg(load_csv(a.input), style);
    }
    write_text(a.output, svg);
    out << "wrote " << (bars ? "barcode" : "scatter") << " plot to " << a.output << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Representation Topology Divergence: barcodes, divergence, autoencoder training"};
    app.name("rtd");
    app.require_subcommand(1);
    app.set_version_flag("--version", RTD_VERSION);

    BarcodeArgs barcode_args;
    auto* barcode_cmd = app.add_subcommand("barcode", "Vietoris-Rips barcode of a CSV point cloud");
    barcode_cmd->add_option("input", barcode_args.input, "point cloud CSV")->required();
    barcode_cmd->add_option("-o,--out", barcode_args.output, "barcode CSV (dim,birth,death); - for stdout");
    barcode_cmd->add_option("--dim", barcode_args.dims, "homology dimensions")
        ->delimiter(',')
        ->check(CLI::Range(0, 8));
    barcode_cmd->add_option("--max-value", barcode_args.max_value, "truncate the filtration");

    RtdArgs rtd_args;
    auto* rtd_cmd = app.add_subcommand("rtd", "RTD between two equally sized clouds");
    rtd_cmd->add_option("first", rtd_args.first, "first cloud CSV")->required();
    rtd_cmd->add_option("second", rtd_args.second, "second cloud CSV")->required();
    rtd_cmd->add_option("--variant", rtd_args.variant, "min or max")
        ->check(CLI::IsMember({"min", "max"}));
    rtd_cmd->add_option("--grad", rtd_args.grad_path, "write the subgradient (cloud,point,coord,value)");
    rtd_cmd->add_flag("--bypass", rtd_args.bypass, "minimum bypass in the subgradient");
    rtd_cmd->add_flag("--topoae", rtd_args.topoae, "also print the TopoAE topological loss");

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "generate a dataset");
    gen_cmd->add_option("source", gen_args.source, "dataset name or spec JSON")->required();
    gen_cmd->add_option("output", gen_args.output, "output CSV")->required();
    gen_cmd->add_option("--seed", gen_args.seed, "override the seed");
    gen_cmd->add_option("--size", gen_args.size, "override the size");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train an RTD autoencoder from a JSON config");
    train_cmd->add_option("config", train_args.config, "experiment config JSON")->required();
    train_cmd->add_option("--out", train_args.out_dir, "output directory");
    train_cmd->add_option("--epochs", train_args.epochs);
    train_cmd->add_option("--rtd-start", train_args.rtd_start, "first epoch with the RTD term");
    train_cmd->add_option("--lambda", train_args.lambda);
    train_cmd->add_option("--lr", train_args.lr);
    train_cmd->add_option("--batch-size", train_args.batch_size);
    train_cmd->add_option("--optimizer", train_args.optimizer, "sgd or adam");
    train_cmd->add_option("--seed", train_args.seed, "single training seed");
    train_cmd->add_flag("--no-eval", train_args.no_eval, "skip the metric suite");

    ReduceArgs reduce_args;
    auto* reduce_cmd = app.add_subcommand("reduce", "encode a cloud with a trained checkpoint");
    reduce_cmd->add_option("checkpoint", reduce_args.checkpoint)->required();
    reduce_cmd->add_option("input", reduce_args.input)->required();
    reduce_cmd->add_option("output", reduce_args.output)->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "metric suite between a cloud and its embedding");
    eval_cmd->add_option("original", eval_args.original)->required();
    eval_cmd->add_option("embedded", eval_args.embedded)->required();
    eval_cmd->add_option("report", eval_args.report, "report JSON")->required();
    eval_cmd->add_option("--triplets", eval_args.options.num_triplets);
    eval_cmd->add_option("--seed", eval_args.options.seed);
    eval_cmd->add_flag("--h1", eval_args.options.with_h1, "also H1 Wasserstein");
    eval_cmd->add_option("--resamples", eval_args.options.resamples);
    eval_cmd->add_option("--sample-size", eval_args.options.sample_size, "0: library default");

    MorphArgs morph_args;
    auto* morph_cmd = app.add_subcommand("morph", "move a cloud to minimise RTD to a target");
    morph_cmd->add_option("config", morph_args.config, "experiment config JSON")->required();
    morph_cmd->add_option("--out", morph_args.out_dir, "output directory");
    morph_cmd->add_option("--steps", morph_args.steps);
    morph_cmd->add_option("--lr", morph_args.lr, "constant learning rate");
    morph_cmd->add_flag("--smoothing", morph_args.smoothing);
    morph_cmd->add_flag("--bypass", morph_args.bypass);

    PlotArgs plot_args;
    auto* plot_cmd = app.add_subcommand("plot", "SVG scatter of a cloud or diagram of a barcode");
    plot_cmd->add_option("input", plot_args.input, "cloud CSV or barcode CSV")->required();
    plot_cmd->add_option("output", plot_args.output, "SVG file")->required();
    plot_cmd->add_option("--kind", plot_args.kind)->check(CLI::IsMember({"auto", "scatter", "barcode"}));
    plot_cmd->add_option("--title", plot_args.title);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (barcode_cmd->parsed()) return cmd_barcode(barcode_args, out);
        if (rtd_cmd->parsed()) return cmd_rtd(rtd_args, out);
        if (gen_cmd->parsed()) return cmd_gen(gen_args, out);
        if (train_cmd->parsed()) return cmd_train(train_args, out);
        if (reduce_cmd->parsed()) return cmd_reduce(reduce_args, out);
        if (eval_cmd->parsed()) return cmd_eval(eval_args, out);
        if (morph_cmd->parsed()) return cmd_morph(morph_args, out);
        if (plot_cmd->parsed()) return cmd_plot(plot_args, out);
    } catch (const UsageError& e) {
        err << "rtd: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "rtd: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace rtd::cli
