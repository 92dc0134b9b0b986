// Command-line front end: synthesize datasets, train and evaluate models,
// verify analytic gradients, and export diagnostic CSVs.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pltr/baseline.hpp"
#include "pltr/checkpoint.hpp"
#include "pltr/eval.hpp"
#include "pltr/trainer.hpp"

namespace fs = std::filesystem;

namespace {

int log_level() {
    // PLTR_LOG: "error" silences progress notes, "debug" adds detail.
    static const int level = [] {
        const char* env = std::getenv("PLTR_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "error") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << msg << '\n';
}

pltr::FileFormat detect_format(const fs::path& path, const std::string& format_flag) {
    if (format_flag == "csv") return pltr::FileFormat::Csv;
    if (format_flag == "bin") return pltr::FileFormat::RawBinary;
    return path.extension() == ".csv" ? pltr::FileFormat::Csv : pltr::FileFormat::RawBinary;
}

pltr::DistanceKind parse_distance(const std::string& name) {
    if (name == "euclidean") return pltr::DistanceKind::Euclidean;
    if (name == "sqeuclidean") return pltr::DistanceKind::SquaredEuclidean;
    if (name == "cosine") return pltr::DistanceKind::Cosine;
    throw CLI::ValidationError("--distance", "unknown distance '" + name + "'");
}

pltr::TemperatureScheme::Kind parse_temps(const std::string& name) {
    if (name == "none") return pltr::TemperatureScheme::Kind::None;
    if (name == "channel") return pltr::TemperatureScheme::Kind::Channel;
    if (name == "class") return pltr::TemperatureScheme::Kind::Class;
    if (name == "dense") return pltr::TemperatureScheme::Kind::Dense;
    throw CLI::ValidationError("--temps", "unknown temperature scheme '" + name + "'");
}

struct DatasetFlags {
    std::string path;
    std::string format = "auto";
    bool header = false;
    bool remap = false;

    pltr::FeatureDataset load() const {
        return pltr::load_features(path, detect_format(path, format), remap, header);
    }
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags, const std::string& option,
                       const std::string& desc) {
    cmd->add_option(option, flags.path, desc)->required();
    cmd->add_option("--format", flags.format, "file format: auto|csv|bin")
        ->check(CLI::IsMember({"auto", "csv", "bin"}));
    cmd->add_flag("--header", flags.header, "skip one CSV header line");
    cmd->add_flag("--remap", flags.remap, "compact labels to the classes present");
}

int cmd_synth(const pltr::SynthSpec& spec, const std::string& out_dir) {
    const auto result = pltr::synth_longtailed(spec);
    fs::create_directories(out_dir);
    const fs::path train_path = fs::path(out_dir) / "train.bin";
    const fs::path test_path = fs::path(out_dir) / "test.bin";
    pltr::save_features(result.train, train_path, pltr::FileFormat::RawBinary);
    pltr::save_features(result.test, test_path, pltr::FileFormat::RawBinary);
    log_info("wrote " + train_path.string() + " (" + std::to_string(result.train.size()) +
             " samples) and " + test_path.string() + " (" + std::to_string(result.test.size()) +
             " samples)");
    return 0;
}

int cmd_train(const DatasetFlags& data, const std::string& model_name,
              const std::string& distance_name, const std::string& temps_name,
              const pltr::TrainConfig& cfg, const std::string& sampler_name,
              const std::string& out_path, const std::string& trace_path) {
    const auto ds = data.load();
    pltr::TrainConfig config = cfg;
    config.sampler = sampler_name == "instance" ? pltr::SamplerKind::InstanceBalanced
                                                : pltr::SamplerKind::ClassBalanced;

    if (model_name == "softmax") {
        const auto model = pltr::train_softmax(ds, config, config.sampler);
        pltr::save_checkpoint(model, out_path);
        log_info("wrote softmax checkpoint " + out_path);
        return 0;
    }

    const auto kind = parse_distance(distance_name);
    const auto temp_kind = parse_temps(temps_name);
    const auto centroids = pltr::compute_centroids(ds);
    if (model_name == "ncm") {
        const auto model = pltr::init_ncm(centroids, kind, temp_kind);
        pltr::save_checkpoint(model, out_path);
        log_info("wrote ncm checkpoint " + out_path);
        return 0;
    }

    auto result = pltr::train(ds, centroids, config, temp_kind, kind);
    pltr::save_checkpoint(result.model, out_path);
    if (!trace_path.empty()) pltr::write_trace_csv(result.trace, trace_path);
    log_info("wrote checkpoint " + out_path + " after " +
             std::to_string(result.trace.records.back().iteration) + " iterations, final loss " +
             std::to_string(result.trace.records.back().loss));
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const DatasetFlags& test_flags,
             const DatasetFlags& train_flags, const std::string& thresholds,
             const std::string& out_path) {
    const auto ckpt = pltr::load_checkpoint(ckpt_path);
    const auto test = test_flags.load();
    const auto train = train_flags.load();
    const auto stats = pltr::compute_class_stats(train);

    pltr::SplitThresholds th;
    if (!thresholds.empty()) {
        std::istringstream ss(thresholds);
        char comma = 0;
        if (!(ss >> th.many_min >> comma >> th.few_max) || comma != ',')
            throw CLI::ValidationError("--thresholds", "expected MANY_MIN,FEW_MAX");
    }

    pltr::PredictFn predict;
    if (const auto* model = std::get_if<pltr::PrototypeModel>(&ckpt))
        predict = [model](std::span<const double> x) { return pltr::predict(*model, x); };
    else
        predict = [linear = &std::get<pltr::LinearModel>(ckpt)](std::span<const double> x) {
            return pltr::predict_linear(*linear, x);
        };

    const auto acc = pltr::evaluate(predict, test, stats, th);
    const std::string json = pltr::split_accuracy_json(acc);
    std::cout << json << '\n';
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        out << json << '\n';
    }
    return 0;
}

int cmd_gradcheck(double tol, double h, const std::string& kind_filter,
                  const std::string& temps_filter, std::uint64_t seed, std::size_t num_classes,
                  std::size_t dim, std::size_t batch_size) {
    struct Combo {
        const char* kind;
        const char* temps;
    };
    const Combo combos[] = {{"euclidean", "none"},    {"sqeuclidean", "none"},
                            {"cosine", "none"},       {"euclidean", "channel"},
                            {"euclidean", "class"},   {"euclidean", "dense"}};

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> temp_draw(0.5, 2.0);

    bool all_passed = true;
    bool any_run = false;
    for (const auto& combo : combos) {
        if (!kind_filter.empty() && kind_filter != combo.kind) continue;
        if (!temps_filter.empty() && temps_filter != combo.temps) continue;
        any_run = true;

        pltr::PrototypeModel model;
        model.kind = parse_distance(combo.kind);
        model.prototypes = pltr::Matrix(num_classes, dim);
        for (double& v : model.prototypes.flat()) v = gauss(rng);
        const auto temp_kind = parse_temps(combo.temps);
        switch (temp_kind) {
            case pltr::TemperatureScheme::Kind::None:
                model.temps = pltr::TemperatureScheme::none();
                break;
            case pltr::TemperatureScheme::Kind::Channel:
                model.temps = pltr::TemperatureScheme::channel(dim);
                break;
            case pltr::TemperatureScheme::Kind::Class:
                model.temps = pltr::TemperatureScheme::per_class(num_classes);
                break;
            case pltr::TemperatureScheme::Kind::Dense:
                model.temps = pltr::TemperatureScheme::dense(num_classes, dim);
                break;
        }
        for (double& t : model.temps.values.flat()) t = temp_draw(rng);

        pltr::Batch batch;
        batch.features = pltr::Matrix(batch_size, dim);
        for (double& v : batch.features.flat()) v = gauss(rng);
        std::uniform_int_distribution<std::uint32_t> pick_label(
            0, static_cast<std::uint32_t>(num_classes - 1));
        batch.labels.resize(batch_size);
        for (auto& y : batch.labels) y = pick_label(rng);

        const auto report = pltr::fd_check(model, batch, nullptr, h, tol);
        std::ostringstream line;
        line << "kind=" << combo.kind << " temps=" << combo.temps;
        for (const auto& group : report.groups)
            line << ' ' << group.group << "_max_rel_err=" << group.max_rel_error;
        line << (report.passed ? " PASS" : " FAIL");
        std::cout << line.str() << '\n';
        all_passed = all_passed && report.passed;
    }
    if (!any_run) throw CLI::ValidationError("gradcheck", "filters matched no combination");
    return all_passed ? 0 : 2;
}

int cmd_analyze(const std::string& ckpt_path, const DatasetFlags& train_flags,
                const std::string& norms_path, const std::string& trace_in,
                const std::string& separation_path) {
    if (!ckpt_path.empty()) {
        const auto ckpt = pltr::load_checkpoint(ckpt_path);
        const auto train = train_flags.load();
        const auto stats = pltr::compute_class_stats(train);
        const pltr::Matrix& rows = std::holds_alternative<pltr::PrototypeModel>(ckpt)
                                       ? std::get<pltr::PrototypeModel>(ckpt).prototypes
                                       : std::get<pltr::LinearModel>(ckpt).weights;
        const auto report = pltr::norm_report(rows, stats);
        pltr::write_norms_csv(report, stats, norms_path);
        std::cout << "cov=" << report.coefficient_of_variation << " spearman=" << report.spearman
                  << (report.spearman_tied ? " (tied)" : "") << '\n';
        log_info("wrote " + norms_path);
    }
    if (!trace_in.empty()) {
        // Pass-through: select iteration,group,mean_dist,mean_cos from the trace.
        std::ifstream in(trace_in);
        if (!in) throw std::runtime_error("cannot open '" + trace_in + "'");
        std::ofstream out(separation_path);
        if (!out) throw std::runtime_error("cannot write '" + separation_path + "'");
        out << "iteration,group,mean_dist,mean_cos\n";
        std::string line;
        std::getline(in, line);  // header
        if (line != "iteration,loss,group,mean_dist,mean_cos")
            throw std::runtime_error("unrecognized trace header in '" + trace_in + "'");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto first = line.find(',');
            const auto second = line.find(',', first + 1);
            if (first == std::string::npos || second == std::string::npos)
                throw std::runtime_error("malformed trace row: " + line);
            out << line.substr(0, first) << line.substr(second) << '\n';
        }
        log_info("wrote " + separation_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prototype classifiers over fixed feature representations"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::simple);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a long-tailed Gaussian dataset");
    pltr::SynthSpec spec;
    std::string out_dir;
    synth->add_option("--classes", spec.num_classes, "number of classes")->check(CLI::PositiveNumber);
    synth->add_option("--dim", spec.dim, "feature dimension")->check(CLI::PositiveNumber);
    synth->add_option("--nmax", spec.n_max, "largest class size")->check(CLI::PositiveNumber);
    synth->add_option("--imbalance", spec.imbalance_ratio, "max/min class size ratio, >= 1")
        ->check(CLI::Range(1.0, 1e9));
    synth->add_option("--mean-scale", spec.class_mean_scale, "std of the class means");
    synth->add_option("--noise-std", spec.within_class_std, "within-class noise std");
    synth->add_option("--test-per-class", spec.test_per_class, "balanced test size per class")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", spec.seed, "RNG seed");
    synth->add_option("--out-dir", out_dir, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "train a classifier on feature vectors");
    DatasetFlags train_data;
    add_dataset_flags(train, train_data, "--train", "training feature file");
    std::string model_name = "pc";
    std::string distance_name = "euclidean";
    std::string temps_name = "none";
    std::string sampler_name = "class";
    std::string ckpt_out, trace_out;
    pltr::TrainConfig cfg;
    train->add_option("--model", model_name, "pc|ncm|softmax")
        ->check(CLI::IsMember({"pc", "ncm", "softmax"}));
    train->add_option("--distance", distance_name, "euclidean|sqeuclidean|cosine")
        ->check(CLI::IsMember({"euclidean", "sqeuclidean", "cosine"}));
    train->add_option("--temps", temps_name, "none|channel|class|dense")
        ->check(CLI::IsMember({"none", "channel", "class", "dense"}));
    train->add_option("--tau", cfg.tau, "logit-adjustment weight");
    train->add_option("--lr", cfg.lr_prototypes, "prototype learning rate");
    train->add_option("--lr-temps", cfg.lr_temps, "temperature learning rate");
    train->add_option("--momentum", cfg.momentum, "SGD momentum");
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--batch-size", cfg.batch_size, "mini-batch size");
    train->add_option("--seed", cfg.seed, "RNG seed");
    train->add_option("--sampler", sampler_name, "class|instance")
        ->check(CLI::IsMember({"class", "instance"}));
    train->add_option("--trace", trace_out, "write the training trace CSV here");
    train->add_option("--trace-every", cfg.trace_every, "iterations between trace records");
    train->add_option("--out", ckpt_out, "checkpoint output path")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "accuracy over Many/Med/Few/All splits");
    std::string eval_ckpt, thresholds, eval_out;
    DatasetFlags eval_test, eval_train;
    eval->add_option("--checkpoint", eval_ckpt, "model checkpoint")->required();
    add_dataset_flags(eval, eval_test, "--test", "test feature file");
    eval->add_option("--train", eval_train.path, "training feature file (defines the splits)")
        ->required();
    eval->add_option("--thresholds", thresholds, "MANY_MIN,FEW_MAX split override");
    eval->add_option("--out", eval_out, "also write the JSON report here");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of analytic gradients");
    double gc_tol = 1e-4, gc_h = 1e-6;
    std::string gc_kind, gc_temps;
    std::uint64_t gc_seed = 0;
    std::size_t gc_classes = 5, gc_dim = 8, gc_batch = 16;
    gradcheck->add_option("--tol", gc_tol, "max relative error allowed");
    gradcheck->add_option("--step", gc_h, "central-difference step");
    gradcheck->add_option("--kind", gc_kind, "only this distance kind");
    gradcheck->add_option("--temps", gc_temps, "only this temperature scheme");
    gradcheck->add_option("--seed", gc_seed, "RNG seed");
    gradcheck->add_option("--classes", gc_classes, "classes in the random instance");
    gradcheck->add_option("--dim", gc_dim, "dimension of the random instance");
    gradcheck->add_option("--batch", gc_batch, "batch size of the random instance");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "norm and separation reports");
    std::string an_ckpt, an_norms = "norms.csv", an_trace, an_sep = "separation.csv";
    DatasetFlags an_train;
    analyze->add_option("--checkpoint", an_ckpt, "checkpoint to report norms for");
    analyze->add_option("--train", an_train.path, "training feature file (class counts)");
    analyze->add_option("--out-norms", an_norms, "norms.csv output path");
    analyze->add_option("--trace", an_trace, "training trace CSV to convert");
    analyze->add_option("--out-separation", an_sep, "separation.csv output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(spec, out_dir);
        if (train->parsed()) {
            const bool needs_temps = parse_temps(temps_name) != pltr::TemperatureScheme::Kind::None;
            if (needs_temps && parse_distance(distance_name) != pltr::DistanceKind::Euclidean)
                throw std::invalid_argument("temperatures combine only with euclidean distance");
            return cmd_train(train_data, model_name, distance_name, temps_name, cfg, sampler_name,
                             ckpt_out, trace_out);
        }
        if (eval->parsed()) return cmd_eval(eval_ckpt, eval_test, eval_train, thresholds, eval_out);
        if (gradcheck->parsed())
            return cmd_gradcheck(gc_tol, gc_h, gc_kind, gc_temps, gc_seed, gc_classes, gc_dim,
                                 gc_batch);
        if (analyze->parsed()) {
            if (an_ckpt.empty() && an_trace.empty())
                throw std::invalid_argument("analyze needs --checkpoint and/or --trace");
            if (!an_ckpt.empty() && an_train.path.empty())
                throw std::invalid_argument("norm report needs --train for the class counts");
            return cmd_analyze(an_ckpt, an_train, an_norms, an_trace, an_sep);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
