// entscope command-line interface: dataset generation, training, evaluation,
// measurement-budget planning and resource reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "entscope/common.hpp"
#include "entscope/dataset.hpp"
#include "entscope/kplan.hpp"
#include "entscope/mvnet.hpp"
#include "entscope/structures.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace entscope;

namespace {

struct GenOptions {
    int n = 4;
    int samples_per_class = 100;
    std::uint64_t pool_size = 0;    // 0 = default for n
    std::uint64_t k = 0;            // 0 = k_formula(n)
    std::uint64_t max_classes = 0;  // 0 = all for n<=8, 100 otherwise
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    std::string out;
};

struct TrainOptions {
    std::string data;
    std::string out;
    mvnet::TrainConfig train;
    mvnet::LossConfig loss;
    bool use_f32 = false;
    int workers = 1;
};

struct EvalOptions {
    std::string data;
    std::string checkpoint;
    std::string split = "test";
    std::string format = "table";
};

struct PredictOptions {
    std::string data;
    std::string checkpoint;
    std::string split = "all";
    std::string format = "table";
};

struct SweepOptions {
    int n = 4;
    double threshold = 0.975;
    std::string k_spec = "1:5";
    int samples_per_class = 100;
    std::uint64_t pool_size = 0;
    std::uint64_t max_classes = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    bool stop_at_threshold = false;
    int epochs = 50;
    std::string out;
    std::string format = "table";
    int workers = 1;
};

struct FitOptions {
    std::string points;
    std::string format = "table";
};

struct ResourceOptions {
    std::string n_range = "4:19";
    double rank = 1.0;
    std::string format = "table";
};

std::pair<int, int> parse_range(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        const int v = parse_int(spec);
        return {v, v};
    }
    return {parse_int(spec.substr(0, colon)), parse_int(spec.substr(colon + 1))};
}

std::vector<int> parse_k_values(const std::string& spec) {
    std::vector<int> ks;
    if (spec.find(':') != std::string::npos) {
        const auto [lo, hi] = parse_range(spec);
        if (lo < 1 || hi < lo) {
            throw CLI::ValidationError("--k", "malformed K range: " + spec);
        }
        for (int k = lo; k <= hi; ++k) ks.push_back(k);
        return ks;
    }
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        const auto token = spec.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        ks.push_back(parse_int(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1])) {
            throw CLI::ValidationError("--k",
                                       "K values must be ascending: " + spec);
        }
    }
    return ks;
}

std::uint64_t apply_env_seed(std::uint64_t flag_seed) {
    if (const auto env = dataset::env_seed_override()) {
        if (*env != flag_seed) {
            std::cerr << "note: ENTSCOPE_SEED=" << *env
                      << " overrides the configured seed\n";
        }
        return *env;
    }
    return flag_seed;
}

void echo_config(const std::string& dir, const CLI::App& app,
                 const std::string& subcommand) {
    const CLI::App* sub = app.get_subcommand(subcommand);
    std::string text =
        "[" + subcommand + "]\n" + sub->config_to_str(true, false);
    write_text_file((fs::path(dir) / "config_resolved.txt").string(), text);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + dir + ": " +
                                 ec.message());
    }
}

dataset::DatasetSplit load_split(const dataset::Dataset& ds) {
    return dataset::split_dataset(ds.records, ds.manifest.split_ratios,
                                  ds.manifest.master_seed);
}

std::vector<std::size_t> select_split(const dataset::Dataset& ds,
                                      const std::string& which) {
    if (which == "all") {
        std::vector<std::size_t> all(ds.records.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    const auto split = load_split(ds);
    if (which == "train") return split.train;
    if (which == "val") return split.val;
    if (which == "test") return split.test;
    throw std::runtime_error("unknown split: " + which);
}

mvnet::Checkpoint load_checkpoint_for(const dataset::Dataset& ds,
                                      const std::string& path) {
    const auto ck = mvnet::load_checkpoint(
        path, dataset::class_table_hash(ds.manifest.class_labels));
    if (ck.n_qubits != ds.manifest.n) {
        throw std::runtime_error(
            "checkpoint qubit count does not match dataset");
    }
    const auto want = static_cast<int>(kplan::input_size(ds.manifest.n));
    if (ck.params.input_dim != want) {
        throw std::runtime_error(
            "checkpoint input width does not match dataset");
    }
    return ck;
}

int run_gen_dataset(const GenOptions& opt) {
    const std::uint64_t seed = apply_env_seed(opt.seed);
    const std::uint64_t pool_size =
        opt.pool_size > 0 ? opt.pool_size : dataset::default_pool_size(opt.n);
    const std::uint64_t k = opt.k > 0 ? opt.k : kplan::k_formula(opt.n);
    if (k > pool_size) {
        throw std::runtime_error("--k exceeds the measurement pool size");
    }
    const std::uint64_t max_classes =
        opt.max_classes > 0 ? opt.max_classes
                            : (opt.n <= 8 ? (1ull << (opt.n - 1)) : 100);

    const auto classes = dataset::default_class_table(
        opt.n, max_classes, mix_seed(seed, seed_stream::kClasses));
    const auto manifest = dataset::make_manifest(
        opt.n, classes, pool_size, static_cast<int>(k), opt.samples_per_class,
        seed, opt.shots);
    const auto records = dataset::generate_records(manifest);
    dataset::write_dataset(opt.out, manifest, records);

    std::printf("dataset: %zu records (%zu classes x %d samples)\n",
                records.size(), manifest.class_labels.size(),
                manifest.samples_per_class);
    std::printf("pool: %d Pauli strings (seed %llu), views per record: %d\n",
                manifest.pool.size(),
                static_cast<unsigned long long>(manifest.pool.seed),
                manifest.k);
    std::printf("view width: %llu, out: %s\n",
                static_cast<unsigned long long>(kplan::input_size(opt.n)),
                opt.out.c_str());
    return 0;
}

int run_train(const TrainOptions& opt) {
    const auto ds = dataset::read_dataset(opt.data);
    const auto split = load_split(ds);
    const auto train_set = mvnet::samples_from_records(ds.records, split.train);
    const auto val_set = mvnet::samples_from_records(ds.records, split.val);

    ensure_dir(opt.out);
    std::vector<mvnet::EpochStats> history;
    int best_epoch = 0;
    double best_val = 0.0;
    mvnet::ModelParams<double> best_params;
    if (opt.use_f32) {
        const auto train_f = mvnet::convert_samples<float>(train_set);
        const auto val_f = mvnet::convert_samples<float>(val_set);
        const auto result = mvnet::train(train_f, val_f, opt.train, opt.loss);
        history = result.history;
        best_epoch = result.best_epoch;
        best_val = result.best_val_accuracy;
        best_params = mvnet::convert_params<double>(result.best_params);
    } else {
        const auto result =
            mvnet::train(train_set, val_set, opt.train, opt.loss);
        history = result.history;
        best_epoch = result.best_epoch;
        best_val = result.best_val_accuracy;
        best_params = result.best_params;
    }

    const auto ckpt = (fs::path(opt.out) / "model.ckpt").string();
    mvnet::save_checkpoint(ckpt, best_params, ds.manifest.n,
                           dataset::class_table_hash(ds.manifest.class_labels));
    write_text_file((fs::path(opt.out) / "history.csv").string(),
                    mvnet::history_to_csv(history));
    std::printf("trained %zu epochs on %zu samples (val %zu)\n",
                history.size(), train_set.size(), val_set.size());
    std::printf("best validation accuracy %.4f at epoch %d\n", best_val,
                best_epoch);
    std::printf("checkpoint: %s\n", ckpt.c_str());
    return 0;
}

void print_metrics(const mvnet::Metrics& metrics,
                   const std::vector<std::string>& labels,
                   const std::string& format) {
    if (format == "json") {
        json j;
        j["accuracy"] = metrics.accuracy;
        json per_class = json::object();
        for (std::size_t c = 0; c < labels.size(); ++c) {
            const double p = metrics.per_class_precision[c];
            per_class[labels[c]] = std::isnan(p) ? json() : json(p);
        }
        j["per_class_precision"] = std::move(per_class);
        j["mean_precision"] = mvnet::mean_precision(metrics);
        std::printf("%s\n", j.dump(2).c_str());
        return;
    }
    std::printf("accuracy: %.4f\n", metrics.accuracy);
    std::printf("%-40s %s\n", "structure", "precision");
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const double p = metrics.per_class_precision[c];
        if (std::isnan(p)) {
            std::printf("%-40s %s\n", labels[c].c_str(), "undefined");
        } else {
            std::printf("%-40s %.3f\n", labels[c].c_str(), p);
        }
    }
    std::printf("mean precision: %.4f\n", mvnet::mean_precision(metrics));
}

int run_eval(const EvalOptions& opt) {
    const auto ds = dataset::read_dataset(opt.data);
    const auto ck = load_checkpoint_for(ds, opt.checkpoint);
    const auto indices = select_split(ds, opt.split);
    if (indices.empty()) throw std::runtime_error("selected split is empty");
    const auto samples = mvnet::samples_from_records(ds.records, indices);
    const auto metrics = mvnet::evaluate(ck.params, samples);
    print_metrics(metrics, ds.manifest.class_labels, opt.format);
    return 0;
}

int run_predict(const PredictOptions& opt) {
    const auto ds = dataset::read_dataset(opt.data);
    const auto ck = load_checkpoint_for(ds, opt.checkpoint);
    const auto indices = select_split(ds, opt.split);
    const auto samples = mvnet::samples_from_records(ds.records, indices);

    json rows = json::array();
    if (opt.format == "table") {
        std::printf("%-8s %-28s %-28s %s\n", "record", "label", "predicted",
                    "p(predicted)");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto out =
            mvnet::forward(ck.params, samples[i].views, mvnet::Mode::Eval);
        const auto probs = mvnet::softmax(out.logits);
        int best = 0;
        for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
            if (probs[static_cast<std::size_t>(c)] >
                probs[static_cast<std::size_t>(best)]) {
                best = c;
            }
        }
        const auto& labels = ds.manifest.class_labels;
        if (opt.format == "json") {
            json row;
            row["record"] = indices[i];
            row["label"] = ds.records[indices[i]].label;
            row["predicted"] = labels[static_cast<std::size_t>(best)];
            row["probabilities"] = probs;
            rows.push_back(std::move(row));
        } else {
            std::printf("%-8zu %-28s %-28s %.4f\n", indices[i],
                        ds.records[indices[i]].label.c_str(),
                        labels[static_cast<std::size_t>(best)].c_str(),
                        probs[static_cast<std::size_t>(best)]);
        }
    }
    if (opt.format == "json") std::printf("%s\n", rows.dump(2).c_str());
    return 0;
}

int run_k_sweep(const SweepOptions& opt) {
    kplan::SweepConfig cfg;
    cfg.n = opt.n;
    cfg.threshold = opt.threshold;
    cfg.k_values = parse_k_values(opt.k_spec);
    cfg.samples_per_class = opt.samples_per_class;
    cfg.pool_size = opt.pool_size;
    cfg.max_classes =
        opt.max_classes > 0 ? opt.max_classes
                            : (opt.n <= 8 ? (1ull << (opt.n - 1)) : 100);
    cfg.shots = opt.shots;
    cfg.seed = apply_env_seed(opt.seed);
    cfg.stop_at_threshold = opt.stop_at_threshold;
    cfg.train.epochs = opt.epochs;

    const auto result = kplan::k_sweep(cfg);

    std::string csv = "n,k,test_accuracy\n";
    for (const auto& e : result.entries) {
        csv += std::to_string(result.n) + "," + std::to_string(e.k) + "," +
               format_double(e.test_accuracy) + "\n";
    }
    if (!opt.out.empty()) {
        ensure_dir(opt.out);
        write_text_file((fs::path(opt.out) / "sweep.csv").string(), csv);
    }

    if (opt.format == "json") {
        json j;
        j["n"] = result.n;
        j["threshold"] = result.threshold;
        json entries = json::array();
        for (const auto& e : result.entries) {
            entries.push_back({{"k", e.k}, {"test_accuracy", e.test_accuracy}});
        }
        j["entries"] = std::move(entries);
        j["k_min"] = result.k_min ? json(*result.k_min) : json();
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("%-4s %-4s %s\n", "n", "k", "test_accuracy");
        for (const auto& e : result.entries) {
            std::printf("%-4d %-4d %.4f\n", result.n, e.k, e.test_accuracy);
        }
        if (result.k_min) {
            std::printf("k_min at threshold %.3f: %d\n", result.threshold,
                        *result.k_min);
        } else {
            std::printf("threshold %.3f not reached\n", result.threshold);
        }
    }
    return 0;
}

int run_fit_k(const FitOptions& opt) {
    const std::string text = read_text_file(opt.points);
    std::vector<std::pair<double, double>> points;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() || line[0] == '#') continue;
        const auto c1 = line.find(',');
        if (c1 == std::string::npos) continue;
        auto c2 = line.find(',', c1 + 1);
        if (c2 == std::string::npos) c2 = line.size();
        try {
            points.emplace_back(parse_double(line.substr(0, c1)),
                                parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
        } catch (const std::exception&) {
            continue;  // header row
        }
    }
    const auto fit = kplan::fit_power_law(points);
    if (opt.format == "json") {
        json j{{"a", fit.a},
               {"b", fit.b},
               {"c", fit.c},
               {"residual_norm", fit.residual_norm},
               {"converged", fit.converged}};
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("k(n) = a * n^b + c\n");
        std::printf("a = %.6g\nb = %.4f\nc = %.4f\nresidual = %.3g\n", fit.a,
                    fit.b, fit.c, fit.residual_norm);
        if (!fit.converged) {
            std::printf("warning: refinement did not converge; "
                        "best grid point reported\n");
        }
    }
    return 0;
}

int run_resources(const ResourceOptions& opt) {
    const auto [lo, hi] = parse_range(opt.n_range);
    const auto rows = kplan::resource_table(lo, hi, opt.rank);
    if (opt.format == "json") {
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"n", r.n},
                         {"k", r.k},
                         {"qst", r.qst},
                         {"cs_qst", r.cs_qst},
                         {"reduction", r.reduction},
                         {"input_size", r.input}});
        }
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("%-4s %-10s %-22s %-14s %-14s %s\n", "n", "K", "QST",
                    "CS-QST", "reduction", "input_size");
        for (const auto& r : rows) {
            std::printf("%-4d %-10llu %-22s %-14.4g %-14.4g %llu\n", r.n,
                        static_cast<unsigned long long>(r.k), r.qst.c_str(),
                        r.cs_qst, r.reduction,
                        static_cast<unsigned long long>(r.input));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entscope: entanglement structure detection from few global "
                 "Pauli measurements"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "flat key=value config with [command] sections");

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand(
        "gen-dataset", "generate a labeled multi-view measurement dataset");
    gen_cmd->add_option("--n", gen.n, "qubit count")
        ->required()
        ->check(CLI::Range(1, 24));
    gen_cmd
        ->add_option("--samples-per-class", gen.samples_per_class,
                     "states per structure class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_cmd->add_option("--pool-size", gen.pool_size,
                        "measurement pool size (0 = default for n)")
        ->capture_default_str();
    gen_cmd->add_option("--k", gen.k, "views per record (0 = budget formula)")
        ->capture_default_str();
    gen_cmd->add_option("--max-classes", gen.max_classes,
                        "class cap (0 = all for n<=8, 100 otherwise)")
        ->capture_default_str();
    gen_cmd->add_option("--shots", gen.shots,
                        "measurement shots per view (0 = exact probabilities)")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "master seed")
        ->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "output directory")->required();

    TrainOptions tr;
    auto* train_cmd =
        app.add_subcommand("train", "train the multi-view classifier");
    train_cmd->add_option("--data", tr.data, "dataset directory")->required();
    train_cmd->add_option("--out", tr.out, "output directory")->required();
    train_cmd->add_option("--epochs", tr.train.epochs, "training epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--lr", tr.train.lr0, "initial learning rate")
        ->capture_default_str();
    train_cmd->add_option("--clip", tr.train.clip_norm, "gradient norm limit")
        ->capture_default_str();
    train_cmd
        ->add_option("--batch-size", tr.train.batch_size, "minibatch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd
        ->add_option("--dropout", tr.train.dropout_rate,
                     "dropout rate on the fused representation")
        ->check(CLI::Range(0.0, 0.999))
        ->capture_default_str();
    train_cmd->add_option("--lambda", tr.loss.lambda, "contrastive loss weight")
        ->capture_default_str();
    train_cmd->add_option("--margin", tr.loss.margin, "contrastive margin")
        ->capture_default_str();
    train_cmd
        ->add_option("--patience", tr.train.scheduler_patience,
                     "epochs without improvement before halving lr")
        ->capture_default_str();
    train_cmd->add_option("--seed", tr.train.seed, "training seed")
        ->capture_default_str();
    train_cmd->add_flag("--f32", tr.use_f32,
                        "train in binary32 (checkpoint stays binary64)");
    train_cmd
        ->add_option("--workers", tr.workers,
                     "worker count (this build always runs one worker)")
        ->check(CLI::Range(1, 256));

    EvalOptions ev;
    auto* eval_cmd =
        app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
    eval_cmd->add_option("--data", ev.data, "dataset directory")->required();
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "model checkpoint")
        ->required();
    eval_cmd->add_option("--split", ev.split, "train|val|test|all")
        ->check(CLI::IsMember({"train", "val", "test", "all"}))
        ->capture_default_str();
    eval_cmd->add_option("--format", ev.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    PredictOptions pr;
    auto* predict_cmd = app.add_subcommand(
        "predict", "per-record predicted labels and class probabilities");
    predict_cmd->add_option("--data", pr.data, "dataset directory")->required();
    predict_cmd->add_option("--checkpoint", pr.checkpoint, "model checkpoint")
        ->required();
    predict_cmd->add_option("--split", pr.split, "train|val|test|all")
        ->check(CLI::IsMember({"train", "val", "test", "all"}))
        ->capture_default_str();
    predict_cmd->add_option("--format", pr.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    SweepOptions sw;
    auto* sweep_cmd = app.add_subcommand(
        "k-sweep", "test accuracy as a function of the measurement budget K");
    sweep_cmd->add_option("--n", sw.n, "qubit count")
        ->required()
        ->check(CLI::Range(1, 24));
    sweep_cmd->add_option("--threshold", sw.threshold, "accuracy threshold")
        ->capture_default_str();
    sweep_cmd->add_option("--k", sw.k_spec, "K values, e.g. 1:5 or 1,2,4")
        ->check(CLI::Validator(
            [](std::string& spec) {
                try {
                    parse_k_values(spec);
                } catch (const std::exception&) {
                    return std::string("K values must be ascending: ") + spec;
                }
                return std::string();
            },
            "KLIST"))
        ->capture_default_str();
    sweep_cmd
        ->add_option("--samples-per-class", sw.samples_per_class,
                     "states per structure class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--pool-size", sw.pool_size,
                          "measurement pool size (0 = default)")
        ->capture_default_str();
    sweep_cmd->add_option("--max-classes", sw.max_classes,
                          "class cap (0 = all for n<=8, 100 otherwise)")
        ->capture_default_str();
    sweep_cmd->add_option("--shots", sw.shots, "shots per view (0 = exact)")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "master seed")
        ->capture_default_str();
    sweep_cmd->add_option("--epochs", sw.epochs, "training epochs per K")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_flag("--stop-at-threshold", sw.stop_at_threshold,
                        "stop after the first K reaching the threshold");
    sweep_cmd->add_option("--out", sw.out, "directory for sweep.csv")
        ->capture_default_str();
    sweep_cmd->add_option("--format", sw.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    sweep_cmd
        ->add_option("--workers", sw.workers,
                     "worker count (this build always runs one worker)")
        ->check(CLI::Range(1, 256));

    FitOptions ft;
    auto* fit_cmd = app.add_subcommand(
        "fit-k", "fit k = a*n^b + c to (n, k) points from a CSV file");
    fit_cmd
        ->add_option("--points", ft.points,
                     "CSV with n in column 1 and k in column 2")
        ->required();
    fit_cmd->add_option("--format", ft.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    ResourceOptions rs;
    auto* res_cmd = app.add_subcommand(
        "resources", "measurement and input-size comparison table");
    res_cmd->add_option("--n-range", rs.n_range, "qubit range, e.g. 4:19")
        ->capture_default_str();
    res_cmd->add_option("--rank", rs.rank, "state rank r for the CS-QST curve")
        ->capture_default_str();
    res_cmd->add_option("--format", rs.format, "table|json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_cmd->parsed()) {
            ensure_dir(gen.out);
            echo_config(gen.out, app, "gen-dataset");
            return run_gen_dataset(gen);
        }
        if (train_cmd->parsed()) {
            ensure_dir(tr.out);
            echo_config(tr.out, app, "train");
            return run_train(tr);
        }
        if (eval_cmd->parsed()) return run_eval(ev);
        if (predict_cmd->parsed()) return run_predict(pr);
        if (sweep_cmd->parsed()) {
            if (!sw.out.empty()) {
                ensure_dir(sw.out);
                echo_config(sw.out, app, "k-sweep");
            }
            return run_k_sweep(sw);
        }
        if (fit_cmd->parsed()) return run_fit_k(ft);
        if (res_cmd->parsed()) return run_resources(rs);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
