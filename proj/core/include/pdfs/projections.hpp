#pragma once

#include "pdfs/matrix.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdfs {

enum class BallKind { L1, L21, L12, Nuclear };

std::string_view to_string(BallKind kind) noexcept;
/// Accepts "l1", "l21", "l12", "nuclear".
BallKind parse_ball_kind(std::string_view name);

/// Constraint set for W: {W : norm_kind(W) <= radius}.
struct BallSpec {
    BallKind kind = BallKind::L1;
    double radius = 1.0;

    /// Throws InvalidArgument unless radius is finite and positive.
    static BallSpec make(BallKind kind, double radius);
    friend bool operator==(const BallSpec&, const BallSpec&) = default;
};

/// The norm whose ball `kind` describes. For L12 this is sqrt(sum_i (sum_j |w_ij|)^2).
double ball_norm(const Matrix& w, BallKind kind);

// --- l1 ball -----------------------------------------------------------------

/// Threshold theta with sum_i (|v_i| - theta)^+ = eta, computed with Condat's
/// linear-time scan. Requires sum |v_i| > eta.
double l1_threshold_condat(std::span<const double> v, double eta);

/// Same threshold by sorting |v| in decreasing order and scanning prefix sums.
double l1_threshold_sort(std::span<const double> v, double eta);

/// In-place projection of the flattened values onto the l1 ball of radius eta.
void proj_l1_inplace(std::span<double> v, double eta);

Vector proj_l1(const Vector& v, double eta);
/// Sort-based reference path; identical contract to proj_l1.
Vector proj_l1_sorted(const Vector& v, double eta);
/// Entrywise l1 ball of the vectorized matrix.
Matrix proj_l1_matrix(const Matrix& v, double eta);

// --- other balls -------------------------------------------------------------

Matrix clip_box(const Matrix& z, double lo, double hi);
void clip_box_inplace(Matrix& z, double lo, double hi);

/// Group-LASSO ball: sum_i ||row_i||_2 <= eta. Rows keep their direction.
Matrix proj_l21(const Matrix& v, double eta);

/// Nuclear ball: thin SVD, l1-project the singular values, recompose.
/// Throws NumericalError if the SVD fails.
Matrix proj_nuclear(const Matrix& v, double eta);

Matrix proj_frobenius_unit(const Matrix& z);
void proj_frobenius_unit_inplace(Matrix& z);

// --- l1,2 (exclusive LASSO) ball ---------------------------------------------

struct L12Options {
    double rel_tol = 1e-10; // on |f(lambda) - eta^2| / eta^2
    int max_iter = 100;
};

/// Newton iteration on the multiplier lambda of the l1,2 ball constraint.
///
/// With each row's magnitudes sorted decreasingly and S_{i,p} the prefix sum of
/// the p largest, the constraint value at lambda is
///     f(lambda) = sum_i max_p (S_{i,p} / (1 + lambda p))^2,
/// convex and decreasing. Starting below the root, Newton steps increase
/// lambda monotonically towards f(lambda) = eta^2.
class L12NewtonState {
public:
    L12NewtonState(const Matrix& v, double eta);

    /// Lower bound on the optimal multiplier, floored at zero:
    /// max_p ((1/eta) sqrt(sum_i S_{i,p}^2) - 1) / p.
    double initial_lambda() const;

    /// Recompute each row's active count p_i = argmax_p S_{i,p} / (1 + lambda p).
    void refresh_active();
    /// Constraint value f(lambda) at the current active counts.
    double constraint_value() const;
    /// lambda += (f - eta^2) / (2 sum_i p_i S_{i,p_i}^2 / (1 + lambda p_i)^3).
    void newton_step();

    /// Per-row soft thresholds delta_i = lambda S_{i,p_i} / (1 + lambda p_i).
    std::vector<double> thresholds() const;
    /// Apply the thresholds to the unsorted input.
    Matrix apply(const Matrix& v) const;

    double lambda() const noexcept { return lambda_; }
    void set_lambda(double lambda) noexcept { lambda_ = lambda; }
    double eta() const noexcept { return eta_; }
    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    /// S_{i,p}, p in [1, cols].
    double prefix_sum(Index i, Index p) const { return prefix_(i, p - 1); }
    double sorted_abs(Index i, Index j) const { return sorted_(i, j); }
    int active_count(Index i) const { return active_[static_cast<std::size_t>(i)]; }
    /// Whether the input already lies in the ball.
    bool feasible_input() const noexcept { return feasible_; }

private:
    Index rows_;
    Index cols_;
    double eta_;
    Matrix sorted_; // per-row |v| in decreasing order
    Matrix prefix_; // prefix_(i, p-1) = S_{i,p}
    std::vector<int> active_;
    double lambda_ = 0.0;
    bool feasible_ = false;
};

struct L12Trace {
    double lambda0 = 0.0;
    std::vector<double> lambdas; // lambda0 followed by every Newton iterate
    int iterations = 0;
    double residual = 0.0;       // f(lambda) - eta^2 at exit
    bool early_exit = false;     // terminated before any Newton step
};

struct L12Projection {
    Matrix w;
    L12Trace trace;
};

/// Exclusive-LASSO ball: sum_i (sum_j |w_ij|)^2 <= eta^2.
/// Throws ConvergenceError (carrying the residual) if Newton does not reach
/// the tolerance within the iteration budget.
L12Projection proj_l12_traced(const Matrix& v, double eta, const L12Options& opts = {});
Matrix proj_l12(const Matrix& v, double eta, const L12Options& opts = {});

/// Dispatch on the ball kind.
Matrix project(const Matrix& v, const BallSpec& ball);

} // namespace pdfs
