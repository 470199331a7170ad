#include "cli.hpp"

#include <pdfs/bench.hpp>
#include <pdfs/classify.hpp>
#include <pdfs/data_io.hpp>
#include <pdfs/error.hpp>
#include <pdfs/solver.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace pdfs::cli {
namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const std::vector<std::string> kBalls{"l1", "l21", "l12", "nuclear"};
const std::vector<std::string> kLosses{"huber", "l1", "frobenius"};
const std::vector<std::string> kVariants{"base", "fixed-mu", "accelerated", "over-relaxed", "elastic"};

struct DataFlags {
    std::string path;
    std::string label_column = "label";
    std::string delimiter = ",";
};

struct ModelFlags {
    double eta = 1.0;
    std::string ball = "l1";
    std::string loss = "huber";
    double delta = 1.0;
    double rho = 1.0;
    double alpha = 0.0;
    double gamma = 0.0;
    std::string variant = "base";
    int iters = 1000;
    double beta = 1.0;
    std::uint64_t seed = 0;
    bool no_normalize = false;
    double early_stop = 0.0;
};

void add_data_flags(CLI::App* app, DataFlags& f) {
    app->add_option("--data", f.path, "Dataset CSV with a header row")->required();
    app->add_option("--label-column", f.label_column, "Name (or 0-based index) of the label column");
    app->add_option("--delimiter", f.delimiter, "Field delimiter (one character)");
}

void add_model_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--eta", f.eta, "Constraint radius")->check(CLI::PositiveNumber);
    app->add_option("--ball", f.ball, "Constraint ball")->check(CLI::IsMember(kBalls));
    app->add_option("--loss", f.loss, "Data-fit loss")->check(CLI::IsMember(kLosses));
    app->add_option("--delta", f.delta, "Huber knee (0 gives the l1 loss)")->check(CLI::NonNegativeNumber);
    app->add_option("--rho", f.rho, "Weight of the center penalty")->check(CLI::NonNegativeNumber);
    app->add_option("--alpha", f.alpha, "Elastic-net weight (elastic variant)")->check(CLI::NonNegativeNumber);
    app->add_option("--gamma", f.gamma, "Over-relaxation parameter in (-1, 1)")->check(CLI::Range(-0.999999, 0.999999));
    app->add_option("--variant", f.variant, "Solver variant")->check(CLI::IsMember(kVariants));
    app->add_option("--iters", f.iters, "Iterations")->check(CLI::NonNegativeNumber);
    app->add_option("--beta", f.beta, "Scale of the center step")->check(CLI::PositiveNumber);
    app->add_option("--seed", f.seed, "Seed for all randomness");
    app->add_option("--early-stop", f.early_stop,
                    "Stop when the objective changes by less than this (relative) over 100 iterations; 0 disables")
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--no-normalize", f.no_normalize, "Do not rescale X to unit operator norm");
}

char delimiter_of(const std::string& s) {
    if (s == "\\t" || s == "tab") return '\t';
    if (s.size() != 1) throw InvalidArgument("--delimiter must be a single character");
    return s[0];
}

bool parse_index(const std::string& s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> read_header(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, delim)) {
            const auto a = cell.find_first_not_of(" \t\r\"");
            const auto b = cell.find_last_not_of(" \t\r\"");
            cols.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
        }
        return cols;
    }
    throw IoError(path + ": empty file");
}

CsvOptions csv_options(const DataFlags& f, const std::vector<std::string>& header) {
    CsvOptions o;
    o.delimiter = delimiter_of(f.delimiter);
    o.label_column = f.label_column;
    std::size_t idx = 0;
    if (std::find(header.begin(), header.end(), f.label_column) == header.end() &&
        parse_index(f.label_column, idx)) {
        o.label_index = idx;
    }
    return o;
}

// Labels that are exactly the integers 0..k-1 keep their numeric value, so a
// model trained on one file scores another file consistently.
void canonicalize_labels(Dataset& data) {
    const auto k = data.class_names.size();
    std::vector<int> value(k);
    std::vector<bool> seen(k, false);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t v = 0;
        if (!parse_index(data.class_names[c], v) || v >= k || seen[v]) return;
        seen[v] = true;
        value[c] = static_cast<int>(v);
    }
    for (auto& l : data.labels) l = value[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < k; ++c) data.class_names[c] = std::to_string(c);
}

Dataset load_labeled(const DataFlags& f) {
    const auto header = read_header(f.path, delimiter_of(f.delimiter));
    Dataset data = load_csv(f.path, csv_options(f, header));
    canonicalize_labels(data);
    if (data.num_classes() < 2) throw InvalidArgument(f.path + ": need at least two classes");
    return data;
}

FitSettings settings_of(const ModelFlags& f) {
    FitSettings s;
    s.problem.ball = BallSpec::make(parse_ball_kind(f.ball), f.eta);
    s.problem.loss = LossSpec::make(parse_loss_kind(f.loss), f.delta);
    s.problem.rho = f.rho;
    s.problem.alpha = f.alpha;
    s.variant = parse_variant(f.variant);
    s.gamma = f.gamma;
    s.max_iter = f.iters;
    s.beta = f.beta;
    s.normalize = !f.no_normalize;
    s.early_stop_tol = f.early_stop;
    return s;
}

// --- subcommands -------------------------------------------------------------

struct TrainFlags {
    DataFlags data;
    ModelFlags model;
    std::string model_out;
    std::string history_out;
    int record_every = 10;
    std::optional<double> tau;
    std::optional<double> tau_mu;
    std::optional<double> sigma;
};

int cmd_train(const TrainFlags& f, std::ostream& out) {
    const Dataset data = load_labeled(f.data);
    const int k = data.num_classes();
    FitSettings settings = settings_of(f.model);
    settings.record_every = f.record_every;

    if (f.tau || f.tau_mu || f.sigma) {
        const NormalizedFeatures nx = settings.normalize ? normalize_features(data.x)
                                                         : NormalizedFeatures{data.x, 1.0};
        const Problem problem(nx.x, one_hot(data.labels, k), settings.problem, nx.scale);
        StepSizes steps = default_steps(problem, settings.beta, settings.variant, settings.gamma);
        if (f.tau) steps.tau = *f.tau;
        if (f.tau_mu) steps.tau_mu = *f.tau_mu;
        if (f.sigma) steps.sigma = *f.sigma;
        settings.steps = steps;
    }

    const FitResult result = fit(data.x, data.labels, k, settings);
    save_model(f.model_out, result.model);
    if (!f.history_out.empty()) write_history_csv(f.history_out, result.history);

    const auto& last = result.history.entries.back();
    const EvalReport report = evaluate(data.x, data.labels, result.model);
    out << "trained: m=" << data.x.rows() << " d=" << data.x.cols() << " k=" << k << " ball=" << f.model.ball
        << " eta=" << fmt(f.model.eta) << " variant=" << f.model.variant << " iters=" << last.iter << '\n';
    out << "steps: tau=" << fmt(result.steps.tau) << " tau_mu=" << fmt(result.steps.tau_mu)
        << " sigma=" << fmt(result.steps.sigma) << " condition_slack=" << fmt(result.history.step_slack) << '\n';
    out << "objective: total=" << fmt(last.objective.total) << " data=" << fmt(last.objective.data_term)
        << " centers=" << fmt(last.objective.center_penalty) << " elastic=" << fmt(last.objective.elastic_term)
        << '\n';
    const double norm = ball_norm(result.model.w, result.model.ball.kind);
    out << "feasibility: ball_norm=" << fmt(norm) << " radius=" << fmt(result.model.ball.radius)
        << " violation=" << fmt(std::max(0.0, norm - result.model.ball.radius)) << '\n';
    out << "training accuracy: " << fmt(report.global_accuracy) << '\n';
    out << "selected features: " << report.n_selected_features << '\n';
    return 0;
}

struct PredictFlags {
    DataFlags data;
    std::string model_path;
    std::string out_path;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
    const TrainedModel model = load_model(f.model_path);
    const char delim = delimiter_of(f.data.delimiter);
    const auto header = read_header(f.data.path, delim);
    const CsvOptions opts = csv_options(f.data, header);
    const bool labeled = opts.label_index ||
                         std::find(header.begin(), header.end(), opts.label_column) != header.end();

    Matrix x;
    std::optional<Dataset> data;
    if (labeled) {
        data = load_csv(f.data.path, opts);
        canonicalize_labels(*data);
        x = data->x;
    } else {
        std::ifstream in(f.data.path);
        std::string skip;
        while (std::getline(in, skip) && skip.find_first_not_of(" \t\r") == std::string::npos) {
        }
        x = parse_matrix_csv(in, delim, f.data.path);
    }
    const auto predicted = predict_rows(x, model);

    if (!f.out_path.empty()) {
        std::ofstream file(f.out_path);
        if (!file) throw IoError("cannot open '" + f.out_path + "' for writing");
        file << "predicted\n";
        for (int p : predicted) file << p << '\n';
        if (!file) throw IoError("write failed: " + f.out_path);
    }
    out << "predicted " << predicted.size() << " rows\n";
    if (data) {
        bool in_range = true;
        for (int l : data->labels) in_range = in_range && l < model.num_classes();
        if (!in_range) throw InvalidArgument("predict: data has more classes than the model");
        const EvalReport r = evaluate(x, data->labels, model);
        out << "accuracy: " << fmt(r.global_accuracy) << '\n';
        for (std::size_t j = 0; j < r.per_class_accuracy.size(); ++j) {
            out << "  class " << j << ": " << fmt(r.per_class_accuracy[j]) << " (n=" << r.class_counts[j] << ")\n";
        }
    }
    return 0;
}

struct SweepFlags {
    DataFlags data;
    ModelFlags model;
    std::vector<double> etas;
    int folds = 4;
    int jobs = 1;
    std::string out_path;
};

int run_sweep(const SweepFlags& f, std::span<const double> etas, std::ostream& out, bool show_knee) {
    const Dataset data = load_labeled(f.data);
    const int k = data.num_classes();
    CvOptions cv;
    cv.folds = f.folds;
    cv.seed = f.model.seed;
    cv.jobs = f.jobs;
    const auto curve = eta_sweep(data.x, data.labels, k, etas, settings_of(f.model), cv);
    if (!f.out_path.empty()) write_curve_csv(f.out_path, curve, k);

    out << "eta  n_features  accuracy  std\n";
    for (const auto& p : curve) {
        out << fmt(p.eta) << "  " << p.n_features << "  " << fmt(p.accuracy) << "  " << fmt(p.accuracy_std) << '\n';
    }
    if (show_knee) {
        if (const auto knee = knee_index(curve)) {
            out << "knee (heuristic, rise-then-plateau fit): eta=" << fmt(curve[*knee].eta)
                << " n_features=" << curve[*knee].n_features << '\n';
        }
    }
    return 0;
}

struct GenFlags {
    SyntheticSpec spec;
    std::string out_path;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
    const Dataset data = generate_synthetic(f.spec);
    write_csv(f.out_path, data);
    out << "wrote " << data.x.rows() << " x " << data.x.cols() << " dataset with " << f.spec.k << " classes to "
        << f.out_path << '\n';
    return 0;
}

struct ProjectFlags {
    std::string in_path;
    std::string out_path;
    std::string ball = "l1";
    double radius = 1.0;
};

int cmd_project(const ProjectFlags& f, std::ostream& out, std::ostream& err) {
    const Matrix v = read_matrix_csv(f.in_path);
    const BallSpec ball = BallSpec::make(parse_ball_kind(f.ball), f.radius);
    const Matrix w = project(v, ball);
    const double norm = ball_norm(w, ball.kind);
    const std::string summary = "projected onto " + f.ball + " ball of radius " + fmt(f.radius) +
                                ": norm=" + fmt(norm) + " violation=" + fmt(std::max(0.0, norm - f.radius)) + '\n';
    if (f.out_path.empty()) {
        write_matrix_csv(out, w);
        err << summary;
    } else {
        write_matrix_csv(f.out_path, w);
        out << summary;
    }
    return 0;
}

struct BenchFlags {
    std::vector<Index> dims{1000, 2000, 4000, 8000};
    std::vector<Index> ks{10};
    std::vector<std::string> balls{"l1", "l21", "l12", "nuclear"};
    int reps = 11;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
    std::vector<BallKind> kinds;
    for (const auto& b : f.balls) kinds.push_back(parse_ball_kind(b));
    const auto rows = bench_projections(kinds, f.dims, f.ks, f.reps, f.seed);
    if (f.out_path.empty()) {
        write_timing_csv(out, rows);
    } else {
        std::ofstream file(f.out_path);
        if (!file) throw IoError("cannot open '" + f.out_path + "' for writing");
        write_timing_csv(file, rows);
        out << "wrote " << rows.size() << " timings to " << f.out_path << '\n';
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse supervised classification and feature selection with a primal-dual solver", "pdfs"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    GenFlags gen;
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic labeled dataset");
    gen_cmd->add_option("--out", gen.out_path, "Output CSV")->required();
    gen_cmd->add_option("--m", gen.spec.m, "Samples")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--d", gen.spec.d, "Features")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--k", gen.spec.k, "Classes")->check(CLI::Range(2, 1 << 20));
    gen_cmd->add_option("--s", gen.spec.s, "Informative features per class")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--separation", gen.spec.separation, "Class mean on informative features")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--noise", gen.spec.noise_sd, "Gaussian noise standard deviation")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--dropout", gen.spec.dropout_rate, "Probability of zeroing an entry")
        ->check(CLI::Range(0.0, 0.999999));
    gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");

    TrainFlags train;
    auto* train_cmd = app.add_subcommand("train", "Train a model and write it with its history");
    add_data_flags(train_cmd, train.data);
    add_model_flags(train_cmd, train.model);
    train_cmd->add_option("--model-out", train.model_out, "Model file to write")->required();
    train_cmd->add_option("--history-out", train.history_out, "History CSV to write");
    train_cmd->add_option("--record-every", train.record_every, "History sampling period")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--tau", train.tau, "Override the W step")->check(CLI::PositiveNumber);
    train_cmd->add_option("--tau-mu", train.tau_mu, "Override the center step")->check(CLI::PositiveNumber);
    train_cmd->add_option("--sigma", train.sigma, "Override the dual step")->check(CLI::PositiveNumber);

    PredictFlags pred;
    auto* pred_cmd = app.add_subcommand("predict", "Classify rows with a trained model");
    add_data_flags(pred_cmd, pred.data);
    pred_cmd->add_option("--model", pred.model_path, "Model file")->required();
    pred_cmd->add_option("--out", pred.out_path, "Predictions CSV to write");

    SweepFlags cv;
    auto* cv_cmd = app.add_subcommand("cv", "Stratified k-fold cross-validation at one radius");
    add_data_flags(cv_cmd, cv.data);
    add_model_flags(cv_cmd, cv.model);
    cv_cmd->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1 << 20));
    cv_cmd->add_option("--jobs", cv.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cv_cmd->add_option("--out", cv.out_path, "Curve CSV to write");

    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep-eta", "Cross-validated accuracy and signature size over radii");
    add_data_flags(sweep_cmd, sweep.data);
    add_model_flags(sweep_cmd, sweep.model);
    sweep_cmd->add_option("--etas", sweep.etas, "Comma-separated ascending radii")->required()->delimiter(',');
    sweep_cmd->add_option("--folds", sweep.folds, "Number of folds")->check(CLI::Range(2, 1 << 20));
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep.out_path, "Curve CSV to write");

    ProjectFlags proj;
    auto* proj_cmd = app.add_subcommand("project", "Project a matrix (headerless CSV) onto a ball");
    proj_cmd->add_option("--in", proj.in_path, "Input matrix CSV")->required();
    proj_cmd->add_option("--out", proj.out_path, "Output matrix CSV (stdout if omitted)");
    proj_cmd->add_option("--ball", proj.ball, "Ball")->check(CLI::IsMember(kBalls));
    proj_cmd->add_option("--radius", proj.radius, "Ball radius")->check(CLI::PositiveNumber);

    BenchFlags bench;
    auto* bench_cmd = app.add_subcommand("bench-proj", "Median projection times on Gaussian matrices");
    bench_cmd->add_option("--dims", bench.dims, "Comma-separated row counts d")->delimiter(',')
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--k", bench.ks, "Comma-separated column counts k")->delimiter(',')
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--balls", bench.balls, "Comma-separated balls")->delimiter(',')
        ->check(CLI::IsMember(kBalls));
    bench_cmd->add_option("--reps", bench.reps, "Timed repetitions (after one warm-up)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Seed of the input matrices");
    bench_cmd->add_option("--out", bench.out_path, "Timing CSV to write (stdout if omitted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "pdfs: error: " << e.what() << '\n';
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        if (sub == gen_cmd) return cmd_gen(gen, out);
        if (sub == train_cmd) return cmd_train(train, out);
        if (sub == pred_cmd) return cmd_predict(pred, out);
        if (sub == cv_cmd) {
            const double eta[] = {cv.model.eta};
            return run_sweep(cv, eta, out, false);
        }
        if (sub == sweep_cmd) return run_sweep(sweep, sweep.etas, out, true);
        if (sub == proj_cmd) return cmd_project(proj, out, err);
        if (sub == bench_cmd) return cmd_bench(bench, out);
    } catch (const InvalidArgument& e) {
        err << "pdfs " << sub->get_name() << ": error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "pdfs " << sub->get_name() << ": error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace pdfs::cli
