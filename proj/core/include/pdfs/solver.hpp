#pragma once

#include "pdfs/losses.hpp"
#include "pdfs/matrix.hpp"
#include "pdfs/model.hpp"
#include "pdfs/problem.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace pdfs {

// Base:         adaptive centers mu, primal extrapolation.
// FixedCenters: mu pinned to the identity.
// Accelerated:  dual extrapolation with the theta schedule of a strongly convex
//               conjugate (theta = 1 / sqrt(1 + delta sigma)).
// OverRelaxed:  base step followed by x += gamma (x - x_old) on W, mu and Z.
// ElasticNet:   W is shrunk by 1 / (1 + tau alpha) before the projection.
// The Frobenius-norm loss is selected through LossSpec and works with any variant.
enum class Variant { Base, FixedCenters, Accelerated, OverRelaxed, ElasticNet };

std::string_view to_string(Variant v) noexcept;
/// Accepts "base", "fixed-mu", "accelerated", "over-relaxed", "elastic".
Variant parse_variant(std::string_view name);

struct StepSizes {
    double tau = 0.0;    // W
    double tau_mu = 0.0; // mu
    double sigma = 0.0;  // Z
};

/// Relative margin by which default steps stay inside the convergence region.
inline constexpr double kStepMargin = 1e-3;

struct SolverParams {
    StepSizes steps;
    Variant variant = Variant::Base;
    double gamma = 0.0; // over-relaxation, in (-1, 1)
    int max_iter = 1000;
    int record_every = 0;        // 0 records the final iterate only
    bool record_ergodic = true;  // evaluate the ergodic objective at each record
    double early_stop_tol = 0.0; // relative change over 100 iterations; 0 disables
    double beta = 1.0;           // scale of the mu step; enters the gap bound
};

/// tau = eta / (sqrt(m k) ||X||), tau_mu = beta / (2 sqrt(m) ||Y|| - beta rho / 4),
/// sigma just inside sigma (tau_mu ||Y||^2 / (1 + tau_mu rho / 4) + tau ||X||^2) < 1.
/// Throws InvalidArgument if the tau_mu denominator is not positive.
StepSizes default_steps(double x_norm, double y_norm, Index m, Index k, double rho, double beta,
                        double eta);

/// Same tau and tau_mu; sigma is sized for the condition of `variant`.
StepSizes default_steps(const Problem& problem, double beta = 1.0, Variant variant = Variant::Base,
                        double gamma = 0.0);

struct StepCheck {
    bool ok = false;
    double slack = 0.0; // 1 - LHS; the condition holds iff slack > 0
};

/// Left-hand side of the variant's convergence condition (which requires LHS < 1).
double step_condition_lhs(const StepSizes& steps, double x_norm, double y_norm, double rho,
                          Variant variant, double gamma = 0.0);
StepCheck check_step_condition(const StepSizes& steps, double x_norm, double y_norm, double rho,
                               Variant variant, double gamma = 0.0);

struct SolverState {
    Matrix w;     // d x k
    Matrix mu;    // k x k
    Matrix z;     // m x k
    Matrix z_bar; // extrapolated dual (Accelerated only)
    int iter = 0;
    double theta = 1.0;
    StepSizes steps; // current steps; only Accelerated changes them

    // Running sums of the iterates for the ergodic averages.
    Matrix sum_w;
    Matrix sum_mu;
    Matrix sum_z;

    /// W = 0, mu = I, Z = 0.
    static SolverState initial(Index m, Index d, Index k);

    Matrix ergodic_w() const;
    Matrix ergodic_mu() const;
    Matrix ergodic_z() const;
};

struct HistoryEntry {
    int iter = 0;
    ObjectiveBreakdown objective;         // at the current iterate
    ObjectiveBreakdown ergodic_objective; // at the ergodic averages (if recorded)
    double gap_bound = 0.0;
    double wall_time = 0.0; // seconds since run() started
};

struct TrainingHistory {
    std::vector<HistoryEntry> entries;
    StepSizes initial_steps;
    double step_slack = 0.0;
    bool early_stopped = false;
};

struct GapBoundInputs {
    Index m = 0;
    Index k = 0;
    StepSizes steps;
    double rho = 0.0;
    double eta = 0.0;  // W* - W0 is bounded by the ball diameter 2 eta
    double beta = 1.0; // mu* - mu0 is estimated by beta sqrt(k)
    int n = 1;
    Variant variant = Variant::Base;
    double gamma = 0.0;
    LossKind loss = LossKind::Huber;
};

/// Computable upper bound on the ergodic primal-dual gap after n iterations:
/// (1/n) (4 m k / sigma + (3 rho / 8 + 1 / tau_mu) dmu^2 + dW^2 / tau).
/// The Frobenius loss replaces 4 m k by 4, FixedCenters drops the mu term, and
/// OverRelaxed uses (1 / ((1 + gamma) n)) (4 m k / sigma + dmu^2 / tau_mu + dW^2 / tau).
double ergodic_gap_bound(const GapBoundInputs& in);
double ergodic_gap_bound(const SolverState& state, const Problem& problem, const SolverParams& params);

/// Iterates the primal-dual scheme on a problem that must outlive the solver.
class PrimalDualSolver {
public:
    /// Throws StepConditionError if the steps violate the variant's condition
    /// and InvalidArgument for malformed parameters or initial state.
    PrimalDualSolver(const Problem& problem, SolverParams params,
                     std::optional<SolverState> initial = std::nullopt);

    /// One iteration. Throws NumericalError naming the iteration on non-finite
    /// iterates and StepConditionError if an accelerated rescaling breaks the condition.
    void step();

    /// Runs params.max_iter iterations (or until the early stop fires).
    TrainingHistory run();

    const SolverState& state() const noexcept { return state_; }
    const Problem& problem() const noexcept { return problem_; }
    const SolverParams& params() const noexcept { return params_; }
    double step_slack() const noexcept { return slack_; }

    ObjectiveBreakdown objective() const;
    ObjectiveBreakdown ergodic_objective() const;
    TrainedModel model() const;

private:
    HistoryEntry record(double wall_time) const;

    const Problem& problem_;
    SolverParams params_;
    SolverState state_;
    double slack_ = 0.0;
    Matrix xw_; // X * state_.w

    // Starting point of the next iteration when over-relaxing; the reported
    // state keeps the feasible, pre-relaxation iterates.
    bool relaxed_ = false;
    Matrix next_w_;
    Matrix next_mu_;
    Matrix next_z_;
    Matrix next_xw_;
};

struct SolveResult {
    TrainedModel model;
    TrainingHistory history;
    SolverState final_state;
};

/// Runs the solver and returns the final (not averaged) W and mu as the model.
SolveResult solve(const Problem& problem, const SolverParams& params,
                  std::optional<SolverState> initial = std::nullopt);

} // namespace pdfs
