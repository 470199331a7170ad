#pragma once

#include "pdfs/matrix.hpp"
#include "pdfs/model.hpp"
#include "pdfs/problem.hpp"
#include "pdfs/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pdfs {

/// argmin_j ||mu_j - x W||_1 for a feature row already divided by
/// model.feature_scale. Ties go to the smallest class index.
int predict(const Vector& x, const TrainedModel& model);

/// Predicts every row of raw (unscaled) features.
std::vector<int> predict_rows(const Matrix& x_raw, const TrainedModel& model);

struct Signature {
    std::vector<std::vector<Index>> per_class; // ascending feature indices
    double epsilon = 0.0;

    /// Sorted union of the per-class sets.
    std::vector<Index> union_features() const;
};

/// 1e-6 * max |W|.
double default_epsilon(const Matrix& w) noexcept;

/// Features i with |W(i, j)| > epsilon, per class j. Without an explicit
/// epsilon the relative default is used; an explicit one must be positive.
Signature signature(const TrainedModel& model, std::optional<double> epsilon = std::nullopt);

struct EvalReport {
    double global_accuracy = 0.0;
    std::vector<double> per_class_accuracy; // NaN for classes absent from the test set
    Eigen::MatrixXi confusion;              // row = true class, column = predicted
    std::vector<std::size_t> class_counts;
    std::size_t n_selected_features = 0;
};

/// Scores raw features against labels in [0, k). Throws on an empty test set.
EvalReport evaluate(const Matrix& x_raw, std::span<const int> labels, const TrainedModel& model);

struct FitSettings {
    ProblemConfig problem;
    Variant variant = Variant::Base;
    double gamma = 0.0;
    int max_iter = 1000;
    double beta = 1.0;
    bool normalize = true; // divide X by its operator norm before training
    double early_stop_tol = 0.0;
    int record_every = 0;
    std::optional<StepSizes> steps; // overrides the default step sizes
};

struct FitResult {
    TrainedModel model;
    TrainingHistory history;
    StepSizes steps;
};

/// Normalizes (optionally), builds the problem, picks steps and solves.
FitResult fit(const Matrix& x_raw, std::span<const int> labels, int k, const FitSettings& settings);

struct CvOptions {
    int folds = 4;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Fold index per sample. Each class is shuffled with the seed and dealt
/// round-robin, the dealer continuing where the previous class stopped, so
/// classes smaller than the fold count land in distinct folds.
std::vector<int> stratified_folds(std::span<const int> labels, int k, int folds, std::uint64_t seed);

struct CvReport {
    std::vector<EvalReport> folds;
    std::vector<double> accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;          // sample standard deviation over folds
    std::vector<double> mean_per_class; // mean over folds where the class was present
};

/// Throws InvalidArgument if a class in [0, k) has no samples or folds is out of range.
CvReport cross_validate(const Matrix& x_raw, std::span<const int> labels, int k,
                        const FitSettings& settings, const CvOptions& options);

struct CurvePoint {
    double eta = 0.0;
    std::size_t n_features = 0; // signature size of a fit on all samples
    double accuracy = 0.0;      // mean cross-validated accuracy
    double accuracy_std = 0.0;
    std::vector<double> per_class;
};

/// One cross-validation per radius (ascending, positive); each fit uses
/// settings.problem with the ball radius replaced.
std::vector<CurvePoint> eta_sweep(const Matrix& x_raw, std::span<const int> labels, int k,
                                  std::span<const double> etas, const FitSettings& settings,
                                  const CvOptions& options);

/// Heuristic knee of the accuracy curve: the interior breakpoint of the best
/// least-squares "linear rise in log eta, then flat" fit. Empty for fewer than
/// three points.
std::optional<std::size_t> knee_index(std::span<const CurvePoint> curve);

} // namespace pdfs
