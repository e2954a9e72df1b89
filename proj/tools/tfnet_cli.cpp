// tfnet: dataset generation, DCNN training and TFR evaluation from the command line.

#include "run_config.hpp"

#include "tfnet/dataset.hpp"
#include "tfnet/eval.hpp"
#include "tfnet/trainer.hpp"
#include "tfnet/weights_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace {

using namespace tfnet;
using cli::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Invalid flag values detected after parsing.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

int run_gen(const cli::GenOptions& o) {
    if (o.count < kMinDatasetCount) {
        throw UsageError("--count must be at least " + std::to_string(kMinDatasetCount));
    }
    if (o.length < 2 || o.length % 2 != 0) throw UsageError("--length must be even and >= 2");
    SignalClass signal_class{};
    double snr = 0.0;
    try {
        signal_class = parse_signal_class(o.signal_class);
        snr = parse_snr(o.snr);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const std::filesystem::path out = o.out;
    const auto manifest = generate_dataset(signal_class, snr, o.count, o.seed, out, o.length);
    std::cout << "manifest: " << (out / kManifestFileName).string() << '\n'
              << "class: " << to_string(manifest.signal_class) << ", snr: " << format_snr(manifest.noise_snr_db)
              << '\n'
              << "train: " << manifest.train_count << ", val: " << manifest.val_count << '\n';
    return kExitOk;
}

int run_train(const cli::TrainOptions& o) {
    if (o.data.empty()) throw UsageError("--data is required");
    if (o.batch < 1 || o.epochs < 1) throw UsageError("--batch and --epochs must be >= 1");
    if (o.layers < 2 || o.kernel % 2 == 0 || o.channels < 1) {
        throw UsageError("--layers must be >= 2, --kernel odd, --channels >= 1");
    }
    if (!(o.lr > 0.0)) throw UsageError("--lr must be positive");

    std::vector<ImagePair> train_set;
    std::vector<ImagePair> val_set;
    double noise_level = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < o.data.size(); ++i) {
        const std::filesystem::path dir = o.data[i];
        const auto manifest = load_manifest(dir / kManifestFileName);
        if (i == 0) {
            noise_level = manifest.noise_snr_db;
        } else if (format_snr(noise_level) != format_snr(manifest.noise_snr_db)) {
            noise_level = std::numeric_limits<double>::quiet_NaN();
        }
        auto train_part = load_pairs(dir, Split::Train);
        auto val_part = load_pairs(dir, Split::Validation);
        train_set.insert(train_set.end(), std::make_move_iterator(train_part.begin()),
                         std::make_move_iterator(train_part.end()));
        val_set.insert(val_set.end(), std::make_move_iterator(val_part.begin()), std::make_move_iterator(val_part.end()));
    }
    if (o.max_train != 0 && train_set.size() > o.max_train) train_set.resize(o.max_train);
    if (o.max_val != 0 && val_set.size() > o.max_val) val_set.resize(o.max_val);

    auto net = init_weights<float>(o.layers, o.channels, o.kernel, o.seed);
    net.info.noise_snr_db = noise_level;

    TrainConfig config;
    config.batch_size = o.batch;
    config.epochs = o.epochs;
    config.learning_rate = o.lr;
    config.patience = o.patience;
    config.shuffle_seed = o.seed;
    config.max_steps = o.max_steps;

    std::cerr << "training N=" << o.layers << " C=" << o.channels << " D=" << o.kernel << " M=" << o.batch << " on "
              << train_set.size() << " samples (" << val_set.size() << " validation)\n";
    const auto started = std::chrono::steady_clock::now();
    const auto result = train(std::move(net), train_set, val_set, config, [&](const TrainEvent& event) {
        if (event.kind == TrainEvent::Kind::Epoch) {
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cerr << "epoch " << event.epoch << " val_loss " << event.loss << " (" << seconds << " s)\n";
        }
        return true;
    });

    const std::filesystem::path out = o.out;
    std::filesystem::create_directories(out);
    save_network(result.network, out / "weights.tfw");
    std::ofstream csv(out / "loss_history.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (out / "loss_history.csv").string());
    csv << "epoch,batch,kind,loss\n";
    char value[64];
    std::size_t next = 0;
    const auto& history = result.history;
    for (std::size_t epoch = 1; epoch <= history.validation.size(); ++epoch) {
        for (; next < history.batches.size() && history.batches[next].epoch == epoch; ++next) {
            std::snprintf(value, sizeof value, "%.9g", history.batches[next].loss);
            csv << epoch << ',' << history.batches[next].batch << ",train," << value << '\n';
        }
        std::snprintf(value, sizeof value, "%.9g", history.validation[epoch - 1]);
        csv << epoch << ",,val," << value << '\n';
    }
    std::cout << "weights: " << (out / "weights.tfw").string() << '\n'
              << "best epoch: " << history.best_epoch << ", val loss " << history.best_validation << " (initial "
              << history.initial_validation << ")\n";
    return kExitOk;
}

int run_eval(const cli::EvalOptions& o) {
    std::vector<CaseStudy> cases;
    std::vector<Method> methods;
    std::vector<double> snrs;
    try {
        for (int id : o.cases) cases.push_back(case_study(id));
        for (const auto& name : o.methods) methods.push_back(parse_method(name));
        for (const auto& text : o.snrs) snrs.push_back(parse_snr(text));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (cases.empty() || methods.empty() || snrs.empty()) throw UsageError("--case, --method and --snr need values");
    if (o.trials < 1) throw UsageError("--trials must be >= 1");

    MethodContext context;
    Network<float> network;
    if (std::find(methods.begin(), methods.end(), Method::Dcnn) != methods.end()) {
        if (o.weights.empty()) {
            std::cerr << "error: --method dcnn requires --weights\n";
            return kExitFailure;
        }
        network = load_network(o.weights);
        context.network = &network;
    }

    const std::filesystem::path out = o.out;
    std::filesystem::create_directories(out);
    std::vector<NmseReport> reports;
    for (const auto& study : cases) {
        for (double snr : snrs) {
            for (Method method : methods) {
                TrialImages last;
                reports.push_back(run_case(study, method, snr, o.trials, o.seed, context, o.render ? &last : nullptr));
                std::cerr << "case " << study.id << " snr " << format_snr(snr) << ' ' << to_string(method) << ": "
                          << reports.back().nmse_db << " dB\n";
                if (o.render) {
                    const std::string stem = "case" + std::to_string(study.id) + "_snr" + format_snr(snr) + "_";
                    render_log_image(last.model, out / (stem + "model.pgm"));
                    render_log_image(last.input, out / (stem + "wvd.pgm"));
                    if (last.estimate.maxCoeff() > 0.0) {
                        render_log_image(last.estimate, out / (stem + to_string(method) + ".pgm"));
                    }
                }
            }
        }
    }
    std::ofstream csv(out / "nmse.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (out / "nmse.csv").string());
    write_csv(csv, reports);
    write_csv(std::cout, reports);
    return kExitOk;
}

int execute(const RunConfig& config) {
    if (config.command == "gen") {
        cli::write_run_config(config, config.gen.out);
        return run_gen(config.gen);
    }
    if (config.command == "train") {
        cli::write_run_config(config, config.train.out);
        return run_train(config.train);
    }
    cli::write_run_config(config, config.eval.out);
    return run_eval(config.eval);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tfnet: crossterm-free time-frequency representations with a deep CNN"};
    app.require_subcommand(1);

    RunConfig config;
    std::string replay_path;

    auto* gen = app.add_subcommand("gen", "Generate a labeled dataset of WVD / ideal-TFR pairs");
    gen->add_option("--class", config.gen.signal_class, "two-nlfm or lfm-sfm")
        ->check(CLI::IsMember({"two-nlfm", "lfm-sfm"}))
        ->capture_default_str();
    gen->add_option("--snr", config.gen.snr, "SNR in dB or inf")->capture_default_str();
    gen->add_option("--count", config.gen.count, "Number of samples")->capture_default_str();
    gen->add_option("--seed", config.gen.seed, "Master seed")->capture_default_str();
    gen->add_option("--length", config.gen.length, "Record length T")->capture_default_str();
    gen->add_option("--out", config.gen.out, "Output directory")->required();

    auto* train_cmd = app.add_subcommand("train", "Train the DCNN on one or more datasets");
    train_cmd->add_option("--data", config.train.data, "Dataset directory (repeat to pool)")->required();
    train_cmd->add_option("--epochs", config.train.epochs)->capture_default_str();
    train_cmd->add_option("--batch", config.train.batch, "Mini-batch size M")->capture_default_str();
    train_cmd->add_option("--lr", config.train.lr, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--patience", config.train.patience, "Early-stop patience in epochs")->capture_default_str();
    train_cmd->add_option("--seed", config.train.seed, "Initialization and shuffle seed")->capture_default_str();
    train_cmd->add_option("--layers", config.train.layers, "Depth N")->capture_default_str();
    train_cmd->add_option("--channels", config.train.channels, "Feature maps C")->capture_default_str();
    train_cmd->add_option("--kernel", config.train.kernel, "Filter size D")->capture_default_str();
    train_cmd->add_option("--max-train", config.train.max_train, "Use at most this many training samples (0 = all)");
    train_cmd->add_option("--max-val", config.train.max_val, "Use at most this many validation samples (0 = all)");
    train_cmd->add_option("--max-steps", config.train.max_steps, "Stop after this many steps (0 = no limit)");
    train_cmd->add_option("--out", config.train.out, "Output directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate NMSE on the case studies");
    eval_cmd->add_option("--case", config.eval.cases, "Case study 1, 2 or 3 (repeatable)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    eval_cmd->add_option("--method", config.eval.methods, "wvd, omp, l1prox or dcnn (repeatable)")
        ->check(CLI::IsMember({"wvd", "omp", "l1prox", "dcnn"}))
        ->capture_default_str();
    eval_cmd->add_option("--weights", config.eval.weights, "Weight file for the dcnn method");
    eval_cmd->add_option("--snr", config.eval.snrs, "SNR in dB or inf (repeatable)")->capture_default_str();
    eval_cmd->add_option("--trials", config.eval.trials, "Independent noise trials K")->capture_default_str();
    eval_cmd->add_option("--seed", config.eval.seed, "Master seed for trial noise")->capture_default_str();
    eval_cmd->add_flag("--render", config.eval.render, "Write PGM renders of the last trial");
    eval_cmd->add_option("--out", config.eval.out, "Output directory")->required();

    auto* replay = app.add_subcommand("replay", "Re-run a recorded run.json");
    replay->add_option("config", replay_path, "Path to run.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (replay->parsed()) {
            config = cli::read_run_config(replay_path);
        } else {
            config.command = app.get_subcommands().front()->get_name();
        }
        return execute(config);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
