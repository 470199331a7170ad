#pragma once

#include "pdfs/matrix.hpp"

#include <string_view>

namespace pdfs {

class Problem;

enum class LossKind { L1, Huber, Frobenius };

std::string_view to_string(LossKind kind) noexcept;
/// Accepts "l1", "huber", "frobenius".
LossKind parse_loss_kind(std::string_view name);

struct LossSpec {
    LossKind kind = LossKind::Huber;
    double delta = 1.0; // Huber knee; ignored by the other kinds

    /// Throws InvalidArgument for a negative or non-finite delta.
    static LossSpec make(LossKind kind, double delta = 1.0);

    /// The strong-convexity modulus of the conjugate: delta for Huber, else 0.
    double smoothing() const noexcept { return kind == LossKind::Huber ? delta : 0.0; }
    friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

/// h_delta(t): t^2 / (2 delta) for |t| <= delta, |t| - delta / 2 beyond.
/// delta = 0 gives |t|.
double huber_value(double t, double delta) noexcept;

/// L1: sum |r_ij|. Huber: sum h_delta(r_ij). Frobenius: ||R||_F, not squared.
double loss_matrix(const Matrix& r, const LossSpec& spec);

/// Prox of sigma h*: clip(zbar / (1 + sigma delta), -1, 1) for Huber and L1,
/// projection onto the unit Frobenius ball for Frobenius.
Matrix dual_prox(const Matrix& zbar, double sigma, const LossSpec& spec);
void dual_prox_inplace(Matrix& z, double sigma, const LossSpec& spec);

struct ObjectiveBreakdown {
    double data_term = 0.0;            // loss(Y mu - X W)
    double center_penalty = 0.0;       // (rho / 2) ||I - mu||_F^2
    double elastic_term = 0.0;         // (alpha / 2) ||W||_F^2 + lambda ||W||_1
    double total = 0.0;
    double constraint_violation = 0.0; // max(0, ||W||_ball - radius)
};

/// Evaluates the primal energy at (W, mu). `lagrangian_weight` adds an optional
/// lambda ||W||_1 penalty to the elastic term; no solver minimizes that form.
ObjectiveBreakdown primal_objective(const Matrix& w, const Matrix& mu, const Problem& problem,
                                    double lagrangian_weight = 0.0);

/// Same, reusing a precomputed X W. Skips the constraint check when
/// `with_violation` is false (the solver's iterates are feasible by construction).
ObjectiveBreakdown primal_objective_from_xw(const Matrix& xw, const Matrix& w, const Matrix& mu,
                                            const Problem& problem, bool with_violation = true,
                                            double lagrangian_weight = 0.0);

} // namespace pdfs
