#include "pdfs/losses.hpp"

#include "pdfs/error.hpp"
#include "pdfs/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdfs {

std::string_view to_string(LossKind kind) noexcept {
    switch (kind) {
    case LossKind::L1: return "l1";
    case LossKind::Huber: return "huber";
    case LossKind::Frobenius: return "frobenius";
    }
    return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "l1") return LossKind::L1;
    if (name == "huber") return LossKind::Huber;
    if (name == "frobenius") return LossKind::Frobenius;
    throw InvalidArgument("unknown loss '" + std::string(name) + "' (expected huber|l1|frobenius)");
}

LossSpec LossSpec::make(LossKind kind, double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("LossSpec: delta must be finite and nonnegative, got " +
                              std::to_string(delta));
    }
    return LossSpec{kind, delta};
}

double huber_value(double t, double delta) noexcept {
    const double a = std::abs(t);
    if (a <= delta) return delta > 0.0 ? t * t / (2.0 * delta) : 0.0;
    return a - 0.5 * delta;
}

double loss_matrix(const Matrix& r, const LossSpec& spec) {
    switch (spec.kind) {
    case LossKind::L1: return r.cwiseAbs().sum();
    case LossKind::Frobenius: return r.norm();
    case LossKind::Huber: {
        double s = 0.0;
        const double* p = r.data();
        for (Index i = 0; i < r.size(); ++i) s += huber_value(p[i], spec.delta);
        return s;
    }
    }
    return 0.0;
}

void dual_prox_inplace(Matrix& z, double sigma, const LossSpec& spec) {
    if (spec.kind == LossKind::Frobenius) {
        proj_frobenius_unit_inplace(z);
        return;
    }
    const double d = spec.smoothing();
    if (d > 0.0) z /= 1.0 + sigma * d;
    clip_box_inplace(z, -1.0, 1.0);
}

Matrix dual_prox(const Matrix& zbar, double sigma, const LossSpec& spec) {
    if (!(sigma > 0.0)) throw InvalidArgument("dual_prox: sigma must be positive");
    Matrix z = zbar;
    dual_prox_inplace(z, sigma, spec);
    return z;
}

ObjectiveBreakdown primal_objective_from_xw(const Matrix& xw, const Matrix& w, const Matrix& mu,
                                            const Problem& problem, bool with_violation,
                                            double lagrangian_weight) {
    const Index k = problem.k();
    require_shape(w, problem.d(), k, "primal_objective: W");
    require_shape(mu, k, k, "primal_objective: mu");
    require_shape(xw, problem.m(), k, "primal_objective: XW");

    ObjectiveBreakdown out;
    out.data_term = loss_matrix(problem.y() * mu - xw, problem.loss());
    out.center_penalty = 0.5 * problem.rho() * (Matrix::Identity(k, k) - mu).squaredNorm();
    out.elastic_term = 0.5 * problem.alpha() * w.squaredNorm();
    if (lagrangian_weight != 0.0) out.elastic_term += lagrangian_weight * w.cwiseAbs().sum();
    out.total = out.data_term + out.center_penalty + out.elastic_term;
    if (with_violation) {
        const BallSpec& ball = problem.ball();
        out.constraint_violation = std::max(0.0, ball_norm(w, ball.kind) - ball.radius);
    }
    return out;
}

ObjectiveBreakdown primal_objective(const Matrix& w, const Matrix& mu, const Problem& problem,
                                    double lagrangian_weight) {
    require_shape(w, problem.d(), problem.k(), "primal_objective: W");
    const Matrix xw = problem.x() * w;
    return primal_objective_from_xw(xw, w, mu, problem, true, lagrangian_weight);
}

} // namespace pdfs
