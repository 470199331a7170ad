#include "pdfs/solver.hpp"

#include "pdfs/error.hpp"
#include "pdfs/projections.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

namespace pdfs {
namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be finite and positive, got " +
                              std::to_string(v));
    }
}

// Effective mu-step denominator of the condition: 1 + tau_mu rho / 4, scaled
// by (1 - 2 gamma) / (1 - gamma) when over-relaxing with gamma < 1/2 and
// dropped entirely for gamma >= 1/2.
double mu_denominator(double tau_mu, double rho, Variant variant, double gamma) {
    if (variant != Variant::OverRelaxed) return 1.0 + 0.25 * tau_mu * rho;
    if (gamma >= 0.5) return 1.0;
    return 1.0 + 0.25 * tau_mu * rho * (1.0 - 2.0 * gamma) / (1.0 - gamma);
}

} // namespace

std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::Base: return "base";
    case Variant::FixedCenters: return "fixed-mu";
    case Variant::Accelerated: return "accelerated";
    case Variant::OverRelaxed: return "over-relaxed";
    case Variant::ElasticNet: return "elastic";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "base") return Variant::Base;
    if (name == "fixed-mu") return Variant::FixedCenters;
    if (name == "accelerated") return Variant::Accelerated;
    if (name == "over-relaxed") return Variant::OverRelaxed;
    if (name == "elastic") return Variant::ElasticNet;
    throw InvalidArgument("unknown variant '" + std::string(name) +
                          "' (expected base|fixed-mu|accelerated|over-relaxed|elastic)");
}

double step_condition_lhs(const StepSizes& s, double x_norm, double y_norm, double rho,
                          Variant variant, double gamma) {
    const double x2 = x_norm * x_norm;
    if (variant == Variant::FixedCenters) return s.tau * s.sigma * x2;
    const double y2 = y_norm * y_norm;
    return s.sigma * (s.tau_mu * y2 / mu_denominator(s.tau_mu, rho, variant, gamma) + s.tau * x2);
}

StepCheck check_step_condition(const StepSizes& s, double x_norm, double y_norm, double rho,
                               Variant variant, double gamma) {
    const double slack = 1.0 - step_condition_lhs(s, x_norm, y_norm, rho, variant, gamma);
    return {slack > 0.0, slack};
}

StepSizes default_steps(double x_norm, double y_norm, Index m, Index k, double rho, double beta,
                        double eta) {
    require_positive(x_norm, "default_steps: ||X||");
    require_positive(y_norm, "default_steps: ||Y||");
    require_positive(beta, "default_steps: beta");
    require_positive(eta, "default_steps: eta");
    if (m < 1 || k < 1) throw InvalidArgument("default_steps: m and k must be positive");
    if (!(rho >= 0.0)) throw InvalidArgument("default_steps: rho must be nonnegative");

    const double sqrt_m = std::sqrt(static_cast<double>(m));
    const double diameter = 2.0 * eta;
    const double denom = 2.0 * sqrt_m * y_norm - 0.25 * beta * rho;
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "default_steps: 2 sqrt(m) ||Y|| - beta rho / 4 = " << denom
           << " is not positive; use a smaller beta";
        throw InvalidArgument(os.str());
    }

    StepSizes s;
    s.tau = diameter / (2.0 * std::sqrt(static_cast<double>(m * k)) * x_norm);
    s.tau_mu = beta / denom;
    s.sigma = 1.0;
    s.sigma = (1.0 - kStepMargin) / step_condition_lhs(s, x_norm, y_norm, rho, Variant::Base);
    return s;
}

StepSizes default_steps(const Problem& problem, double beta, Variant variant, double gamma) {
    StepSizes s = default_steps(problem.x_norm(), problem.y_norm(), problem.m(), problem.k(),
                                problem.rho(), beta, problem.ball().radius);
    s.sigma = 1.0;
    s.sigma = (1.0 - kStepMargin) /
              step_condition_lhs(s, problem.x_norm(), problem.y_norm(), problem.rho(), variant, gamma);
    return s;
}

SolverState SolverState::initial(Index m, Index d, Index k) {
    SolverState s;
    s.w = Matrix::Zero(d, k);
    s.mu = Matrix::Identity(k, k);
    s.z = Matrix::Zero(m, k);
    s.sum_w = Matrix::Zero(d, k);
    s.sum_mu = Matrix::Zero(k, k);
    s.sum_z = Matrix::Zero(m, k);
    return s;
}

Matrix SolverState::ergodic_w() const {
    return iter > 0 ? Matrix(sum_w / static_cast<double>(iter)) : w;
}
Matrix SolverState::ergodic_mu() const {
    return iter > 0 ? Matrix(sum_mu / static_cast<double>(iter)) : mu;
}
Matrix SolverState::ergodic_z() const {
    return iter > 0 ? Matrix(sum_z / static_cast<double>(iter)) : z;
}

double ergodic_gap_bound(const GapBoundInputs& in) {
    if (in.n < 1) throw InvalidArgument("ergodic_gap_bound: need at least one iteration");
    const double n = static_cast<double>(in.n);
    const double dual = in.loss == LossKind::Frobenius
                            ? 4.0 / in.steps.sigma
                            : 4.0 * static_cast<double>(in.m * in.k) / in.steps.sigma;
    const double dw2 = 4.0 * in.eta * in.eta;
    const double dmu2 = in.beta * in.beta * static_cast<double>(in.k);
    const double primal = dw2 / in.steps.tau;

    switch (in.variant) {
    case Variant::FixedCenters: return (dual + primal) / n;
    case Variant::OverRelaxed:
        return (dual + dmu2 / in.steps.tau_mu + primal) / ((1.0 + in.gamma) * n);
    default: return (dual + (0.375 * in.rho + 1.0 / in.steps.tau_mu) * dmu2 + primal) / n;
    }
}

double ergodic_gap_bound(const SolverState& state, const Problem& problem, const SolverParams& params) {
    GapBoundInputs in;
    in.m = problem.m();
    in.k = problem.k();
    in.steps = params.steps;
    in.rho = problem.rho();
    in.eta = problem.ball().radius;
    in.beta = params.beta;
    in.n = state.iter;
    in.variant = params.variant;
    in.gamma = params.gamma;
    in.loss = problem.loss().kind;
    return ergodic_gap_bound(in);
}

PrimalDualSolver::PrimalDualSolver(const Problem& problem, SolverParams params,
                                   std::optional<SolverState> initial)
    : problem_(problem), params_(params) {
    const StepSizes& s = params_.steps;
    require_positive(s.tau, "solver: tau");
    require_positive(s.sigma, "solver: sigma");
    if (params_.variant != Variant::FixedCenters) require_positive(s.tau_mu, "solver: tau_mu");
    if (params_.max_iter < 0) throw InvalidArgument("solver: max_iter must be nonnegative");
    if (params_.record_every < 0) throw InvalidArgument("solver: record_every must be nonnegative");
    if (!(params_.gamma > -1.0 && params_.gamma < 1.0)) {
        throw InvalidArgument("solver: gamma must lie in (-1, 1)");
    }
    if (params_.variant != Variant::OverRelaxed && params_.gamma != 0.0) {
        throw InvalidArgument("solver: gamma is only used by the over-relaxed variant");
    }
    if (params_.variant != Variant::ElasticNet && problem_.alpha() != 0.0) {
        throw InvalidArgument("solver: alpha > 0 requires the elastic variant");
    }

    const StepCheck check = check_step_condition(s, problem_.x_norm(), problem_.y_norm(),
                                                 problem_.rho(), params_.variant, params_.gamma);
    slack_ = check.slack;
    if (!check.ok) {
        std::ostringstream os;
        os << "step sizes violate the " << to_string(params_.variant)
           << " convergence condition (slack " << check.slack << ")";
        throw StepConditionError(os.str(), check.slack);
    }

    const Index m = problem_.m();
    const Index d = problem_.d();
    const Index k = problem_.k();
    if (initial) {
        state_ = std::move(*initial);
        require_shape(state_.w, d, k, "solver: initial W");
        require_shape(state_.mu, k, k, "solver: initial mu");
        require_shape(state_.z, m, k, "solver: initial Z");
        if (state_.sum_w.size() == 0) state_.sum_w = Matrix::Zero(d, k);
        if (state_.sum_mu.size() == 0) state_.sum_mu = Matrix::Zero(k, k);
        if (state_.sum_z.size() == 0) state_.sum_z = Matrix::Zero(m, k);
    } else {
        state_ = SolverState::initial(m, d, k);
    }
    if (params_.variant == Variant::FixedCenters) state_.mu = Matrix::Identity(k, k);
    if (params_.variant == Variant::Accelerated) {
        if (state_.z_bar.size() == 0) state_.z_bar = state_.z;
        if (state_.steps.sigma == 0.0) state_.steps = s;
    } else {
        state_.steps = s;
    }
    xw_ = problem_.x() * state_.w;

    relaxed_ = params_.variant == Variant::OverRelaxed;
    if (relaxed_) {
        next_w_ = state_.w;
        next_mu_ = state_.mu;
        next_z_ = state_.z;
        next_xw_ = xw_;
    }
}

void PrimalDualSolver::step() {
    const Matrix& x = problem_.x();
    const Matrix& y = problem_.y();
    const Index k = problem_.k();
    const double rho = problem_.rho();
    const StepSizes s = state_.steps;
    const Variant variant = params_.variant;

    const Matrix& w0 = relaxed_ ? next_w_ : state_.w;
    const Matrix& mu0 = relaxed_ ? next_mu_ : state_.mu;
    const Matrix& z0 = relaxed_ ? next_z_ : state_.z;
    const Matrix& xw0 = relaxed_ ? next_xw_ : xw_;
    const Matrix& zd = variant == Variant::Accelerated ? state_.z_bar : z0;

    Matrix w = w0 + s.tau * (x.transpose() * zd);
    if (variant == Variant::ElasticNet) w /= 1.0 + s.tau * problem_.alpha();
    w = project(w, problem_.ball());

    Matrix mu;
    if (variant == Variant::FixedCenters) {
        mu = mu0;
    } else {
        mu = (mu0 + (rho * s.tau_mu) * Matrix::Identity(k, k) - s.tau_mu * (y.transpose() * zd)) /
             (1.0 + s.tau_mu * rho);
    }

    Matrix xw = x * w;
    Matrix z;
    if (variant == Variant::Accelerated) {
        z = z0 + s.sigma * (y * mu - xw);
    } else {
        z = z0 + s.sigma * (y * (2.0 * mu - mu0) - (2.0 * xw - xw0));
    }
    dual_prox_inplace(z, s.sigma, problem_.loss());

    const int n = state_.iter + 1;
    if (!w.allFinite() || !mu.allFinite() || !z.allFinite()) {
        throw NumericalError("solver: non-finite iterate at iteration " + std::to_string(n));
    }

    if (variant == Variant::Accelerated) {
        const double theta = 1.0 / std::sqrt(1.0 + problem_.loss().smoothing() * s.sigma);
        state_.z_bar = z + theta * (z - z0);
        state_.theta = theta;
        state_.steps.sigma = s.sigma * theta;
        state_.steps.tau = s.tau / theta;
        state_.steps.tau_mu = s.tau_mu / theta;
        const StepCheck check = check_step_condition(state_.steps, problem_.x_norm(),
                                                     problem_.y_norm(), rho, variant);
        if (!check.ok) {
            std::ostringstream os;
            os << "accelerated step rescaling violates the convergence condition at iteration " << n
               << " (slack " << check.slack << ")";
            throw StepConditionError(os.str(), check.slack);
        }
    }

    if (relaxed_) {
        const double g = params_.gamma;
        next_w_ = w + g * (w - w0);
        next_mu_ = mu + g * (mu - mu0);
        next_z_ = z + g * (z - z0);
        next_xw_ = xw + g * (xw - xw0);
    }

    state_.sum_w += w;
    state_.sum_mu += mu;
    state_.sum_z += z;
    state_.w = std::move(w);
    state_.mu = std::move(mu);
    state_.z = std::move(z);
    xw_ = std::move(xw);
    state_.iter = n;
}

ObjectiveBreakdown PrimalDualSolver::objective() const {
    return primal_objective_from_xw(xw_, state_.w, state_.mu, problem_);
}

ObjectiveBreakdown PrimalDualSolver::ergodic_objective() const {
    return primal_objective(state_.ergodic_w(), state_.ergodic_mu(), problem_);
}

TrainedModel PrimalDualSolver::model() const {
    return TrainedModel{state_.w, state_.mu, problem_.ball(), problem_.loss(),
                        problem_.feature_scale()};
}

HistoryEntry PrimalDualSolver::record(double wall_time) const {
    HistoryEntry e;
    e.iter = state_.iter;
    e.objective = objective();
    if (params_.record_ergodic && state_.iter > 0) e.ergodic_objective = ergodic_objective();
    if (state_.iter > 0) e.gap_bound = ergodic_gap_bound(state_, problem_, params_);
    e.wall_time = wall_time;
    return e;
}

TrainingHistory PrimalDualSolver::run() {
    using clock = std::chrono::steady_clock;
    constexpr int kWindow = 100;

    TrainingHistory h;
    h.initial_steps = params_.steps;
    h.step_slack = slack_;
    const auto start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    const bool early = params_.early_stop_tol > 0.0;
    double window_ref = early ? objective().total : 0.0;
    for (int i = 0; i < params_.max_iter; ++i) {
        step();
        if (params_.record_every > 0 && state_.iter % params_.record_every == 0) {
            h.entries.push_back(record(elapsed()));
        }
        if (early && (i + 1) % kWindow == 0) {
            const double f = objective().total;
            const double scale = std::max(std::abs(window_ref), 1e-300);
            if (std::abs(f - window_ref) <= params_.early_stop_tol * scale) {
                h.early_stopped = true;
                break;
            }
            window_ref = f;
        }
    }
    if (h.entries.empty() || h.entries.back().iter != state_.iter) {
        h.entries.push_back(record(elapsed()));
    }
    return h;
}

SolveResult solve(const Problem& problem, const SolverParams& params,
                  std::optional<SolverState> initial) {
    PrimalDualSolver solver(problem, params, std::move(initial));
    TrainingHistory history = solver.run();
    return SolveResult{solver.model(), std::move(history), solver.state()};
}

} // namespace pdfs
