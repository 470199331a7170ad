#include "pdfs/classify.hpp"

#include "pdfs/error.hpp"
#include "pdfs/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

namespace pdfs {
namespace {

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written by index,
// so the outcome does not depend on scheduling. The first exception wins.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(rows[r]);
    return out;
}

std::vector<int> gather(std::span<const int> v, const std::vector<Index>& rows) {
    std::vector<int> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = v[static_cast<std::size_t>(rows[r])];
    return out;
}

void check_labels(std::span<const int> labels, int k, Index m, const char* who) {
    if (static_cast<Index>(labels.size()) != m) {
        throw InvalidArgument(std::string(who) + ": " + std::to_string(m) + " rows but " +
                              std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k) {
            throw InvalidArgument(std::string(who) + ": label " + std::to_string(labels[i]) +
                                  " at row " + std::to_string(i) + " is outside [0, " +
                                  std::to_string(k) + ")");
        }
    }
}

struct FoldTask {
    std::vector<Index> train;
    std::vector<Index> test;
};

std::vector<FoldTask> make_folds(std::span<const int> labels, int k, const CvOptions& options) {
    const auto assignment = stratified_folds(labels, k, options.folds, options.seed);
    std::vector<FoldTask> tasks(static_cast<std::size_t>(options.folds));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        for (int f = 0; f < options.folds; ++f) {
            auto& t = tasks[static_cast<std::size_t>(f)];
            (assignment[i] == f ? t.test : t.train).push_back(static_cast<Index>(i));
        }
    }
    return tasks;
}

CvReport aggregate(std::vector<EvalReport> reports, int k) {
    CvReport out;
    out.folds = std::move(reports);
    const double n = static_cast<double>(out.folds.size());
    for (const auto& r : out.folds) out.accuracies.push_back(r.global_accuracy);
    out.mean_accuracy = std::accumulate(out.accuracies.begin(), out.accuracies.end(), 0.0) / n;
    if (out.folds.size() > 1) {
        double ss = 0.0;
        for (double a : out.accuracies) ss += (a - out.mean_accuracy) * (a - out.mean_accuracy);
        out.std_accuracy = std::sqrt(ss / (n - 1.0));
    }
    out.mean_per_class.assign(static_cast<std::size_t>(k), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < k; ++j) {
        double sum = 0.0;
        int count = 0;
        for (const auto& r : out.folds) {
            const double a = r.per_class_accuracy[static_cast<std::size_t>(j)];
            if (!std::isnan(a)) {
                sum += a;
                ++count;
            }
        }
        if (count > 0) out.mean_per_class[static_cast<std::size_t>(j)] = sum / count;
    }
    return out;
}

} // namespace

int predict(const Vector& x, const TrainedModel& model) {
    if (x.size() != model.w.rows()) {
        throw InvalidArgument("predict: feature vector has " + std::to_string(x.size()) +
                              " entries, model expects " + std::to_string(model.w.rows()));
    }
    const Eigen::RowVectorXd projected = x.transpose() * model.w;
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < model.mu.rows(); ++j) {
        const double dist = (model.mu.row(j) - projected).cwiseAbs().sum();
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(j);
        }
    }
    return best;
}

std::vector<int> predict_rows(const Matrix& x_raw, const TrainedModel& model) {
    if (x_raw.cols() != model.w.rows()) {
        throw InvalidArgument("predict: data has " + std::to_string(x_raw.cols()) +
                              " features, model expects " + std::to_string(model.w.rows()));
    }
    const Matrix projected = (x_raw * model.w) / model.feature_scale;
    std::vector<int> out(static_cast<std::size_t>(x_raw.rows()));
    for (Index i = 0; i < projected.rows(); ++i) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < model.mu.rows(); ++j) {
            const double dist = (model.mu.row(j) - projected.row(i)).cwiseAbs().sum();
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(j);
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

std::vector<Index> Signature::union_features() const {
    std::vector<Index> all;
    for (const auto& s : per_class) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

double default_epsilon(const Matrix& w) noexcept {
    return w.size() == 0 ? 0.0 : 1e-6 * w.cwiseAbs().maxCoeff();
}

Signature signature(const TrainedModel& model, std::optional<double> epsilon) {
    Signature sig;
    if (epsilon) {
        if (!(*epsilon > 0.0)) throw InvalidArgument("signature: epsilon must be positive");
        sig.epsilon = *epsilon;
    } else {
        sig.epsilon = default_epsilon(model.w);
    }
    sig.per_class.resize(static_cast<std::size_t>(model.w.cols()));
    for (Index i = 0; i < model.w.rows(); ++i) {
        for (Index j = 0; j < model.w.cols(); ++j) {
            if (std::abs(model.w(i, j)) > sig.epsilon) sig.per_class[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    return sig;
}

EvalReport evaluate(const Matrix& x_raw, std::span<const int> labels, const TrainedModel& model) {
    if (x_raw.rows() == 0) throw InvalidArgument("evaluate: empty test set");
    const int k = static_cast<int>(model.mu.rows());
    check_labels(labels, k, x_raw.rows(), "evaluate");
    const auto predicted = predict_rows(x_raw, model);

    EvalReport r;
    r.confusion = Eigen::MatrixXi::Zero(k, k);
    r.class_counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++r.confusion(labels[i], predicted[i]);
        ++r.class_counts[static_cast<std::size_t>(labels[i])];
    }
    r.global_accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(labels.size());
    r.per_class_accuracy.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const auto n = r.class_counts[static_cast<std::size_t>(j)];
        r.per_class_accuracy[static_cast<std::size_t>(j)] =
            n == 0 ? std::numeric_limits<double>::quiet_NaN()
                   : static_cast<double>(r.confusion(j, j)) / static_cast<double>(n);
    }
    r.n_selected_features = signature(model).union_features().size();
    return r;
}

FitResult fit(const Matrix& x_raw, std::span<const int> labels, int k, const FitSettings& settings) {
    check_labels(labels, k, x_raw.rows(), "fit");
    Matrix x;
    double scale = 1.0;
    if (settings.normalize) {
        auto normalized = normalize_features(x_raw);
        x = std::move(normalized.x);
        scale = normalized.scale;
    } else {
        x = x_raw;
    }
    const Problem problem(std::move(x), one_hot(labels, k), settings.problem, scale);

    SolverParams params;
    params.variant = settings.variant;
    params.gamma = settings.gamma;
    params.max_iter = settings.max_iter;
    params.beta = settings.beta;
    params.early_stop_tol = settings.early_stop_tol;
    params.record_every = settings.record_every;
    params.steps = settings.steps ? *settings.steps
                                  : default_steps(problem, settings.beta, settings.variant, settings.gamma);
    auto result = solve(problem, params);
    return FitResult{std::move(result.model), std::move(result.history), params.steps};
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, int folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("stratified_folds: need at least 2 folds");
    if (static_cast<std::size_t>(folds) > labels.size()) {
        throw InvalidArgument("stratified_folds: " + std::to_string(folds) + " folds for " +
                              std::to_string(labels.size()) + " samples");
    }
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k) {
            throw InvalidArgument("stratified_folds: label out of range at row " + std::to_string(i));
        }
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    std::vector<int> out(labels.size(), -1);
    int dealer = 0;
    for (int c = 0; c < k; ++c) {
        auto& idx = members[static_cast<std::size_t>(c)];
        CounterRng rng(seed, static_cast<std::uint64_t>(c));
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.below(i))]);
        }
        for (std::size_t i : idx) {
            out[i] = dealer;
            dealer = (dealer + 1) % folds;
        }
    }
    return out;
}

CvReport cross_validate(const Matrix& x_raw, std::span<const int> labels, int k,
                        const FitSettings& settings, const CvOptions& options) {
    check_labels(labels, k, x_raw.rows(), "cross_validate");
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw InvalidArgument("cross_validate: class " + std::to_string(c) + " has no samples");
        }
    }
    const auto tasks = make_folds(labels, k, options);
    std::vector<EvalReport> reports(tasks.size());
    parallel_for(tasks.size(), options.jobs, [&](std::size_t f) {
        const auto& t = tasks[f];
        const auto trained = fit(gather_rows(x_raw, t.train), gather(labels, t.train), k, settings);
        reports[f] = evaluate(gather_rows(x_raw, t.test), gather(labels, t.test), trained.model);
    });
    return aggregate(std::move(reports), k);
}

std::vector<CurvePoint> eta_sweep(const Matrix& x_raw, std::span<const int> labels, int k,
                                  std::span<const double> etas, const FitSettings& settings,
                                  const CvOptions& options) {
    if (etas.empty()) throw InvalidArgument("eta_sweep: no radii given");
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (!(etas[i] > 0.0)) throw InvalidArgument("eta_sweep: radii must be positive");
        if (i > 0 && !(etas[i] > etas[i - 1])) {
            throw InvalidArgument("eta_sweep: radii must be strictly ascending");
        }
    }
    check_labels(labels, k, x_raw.rows(), "eta_sweep");
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw InvalidArgument("eta_sweep: class " + std::to_string(c) + " has no samples");
        }
    }

    // Flatten (radius, fold) pairs plus one full-data fit per radius into a
    // single task list so every worker stays busy.
    const auto folds = make_folds(labels, k, options);
    const std::size_t per_eta = folds.size() + 1;
    std::vector<EvalReport> reports(etas.size() * folds.size());
    std::vector<std::size_t> n_features(etas.size());
    parallel_for(etas.size() * per_eta, options.jobs, [&](std::size_t task) {
        const std::size_t e = task / per_eta;
        const std::size_t f = task % per_eta;
        FitSettings s = settings;
        s.problem.ball.radius = etas[e];
        if (f == folds.size()) {
            n_features[e] = signature(fit(x_raw, labels, k, s).model).union_features().size();
            return;
        }
        const auto& t = folds[f];
        const auto trained = fit(gather_rows(x_raw, t.train), gather(labels, t.train), k, s);
        reports[e * folds.size() + f] =
            evaluate(gather_rows(x_raw, t.test), gather(labels, t.test), trained.model);
    });

    std::vector<CurvePoint> curve;
    curve.reserve(etas.size());
    for (std::size_t e = 0; e < etas.size(); ++e) {
        std::vector<EvalReport> fold_reports(
            std::make_move_iterator(reports.begin() + static_cast<std::ptrdiff_t>(e * folds.size())),
            std::make_move_iterator(reports.begin() + static_cast<std::ptrdiff_t>((e + 1) * folds.size())));
        const CvReport cv = aggregate(std::move(fold_reports), k);
        curve.push_back(CurvePoint{etas[e], n_features[e], cv.mean_accuracy, cv.std_accuracy,
                                   cv.mean_per_class});
    }
    return curve;
}

std::optional<std::size_t> knee_index(std::span<const CurvePoint> curve) {
    if (curve.size() < 3) return std::nullopt;
    // Least-squares fit of acc ~ a + b min(log eta, log eta_i) for each interior
    // breakpoint i: a straight rise in log eta followed by a flat plateau.
    const std::size_t n = curve.size();
    std::optional<std::size_t> best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double cap = std::log(curve[i].eta);
        double su = 0.0, suu = 0.0, sy = 0.0, suy = 0.0;
        for (const auto& p : curve) {
            const double u = std::min(std::log(p.eta), cap);
            su += u;
            suu += u * u;
            sy += p.accuracy;
            suy += u * p.accuracy;
        }
        const double nn = static_cast<double>(n);
        const double det = nn * suu - su * su;
        if (!(det > 0.0)) continue;
        const double b = (nn * suy - su * sy) / det;
        const double a = (sy - b * su) / nn;
        double sse = 0.0;
        for (const auto& p : curve) {
            const double r = a + b * std::min(std::log(p.eta), cap) - p.accuracy;
            sse += r * r;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    return best;
}

} // namespace pdfs
