#include "pdfs/error.hpp"
#include "pdfs/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

namespace pdfs {

L12NewtonState::L12NewtonState(const Matrix& v, double eta)
    : rows_(v.rows()), cols_(v.cols()), eta_(eta), sorted_(v.rows(), v.cols()),
      prefix_(v.rows(), v.cols()), active_(static_cast<std::size_t>(v.rows()), 1) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw InvalidArgument("proj_l12: radius must be finite and positive, got " +
                              std::to_string(eta));
    }
    double total = 0.0;
    for (Index i = 0; i < rows_; ++i) {
        auto row = sorted_.row(i);
        row = v.row(i).cwiseAbs();
        std::sort(row.begin(), row.end(), std::greater<>());
        double s = 0.0;
        for (Index p = 0; p < cols_; ++p) {
            s += row(p);
            prefix_(i, p) = s;
        }
        total += s * s;
    }
    feasible_ = cols_ == 0 || total <= eta_ * eta_;
}

double L12NewtonState::initial_lambda() const {
    double best = 0.0;
    for (Index p = 1; p <= cols_; ++p) {
        const double mass = std::sqrt(prefix_.col(p - 1).squaredNorm());
        best = std::max(best, (mass / eta_ - 1.0) / static_cast<double>(p));
    }
    return best;
}

void L12NewtonState::refresh_active() {
    for (Index i = 0; i < rows_; ++i) {
        // S_p / (1 + lambda p) is unimodal in p: scan until the first decrease.
        Index best_p = 1;
        double best = prefix_(i, 0) / (1.0 + lambda_);
        for (Index p = 2; p <= cols_; ++p) {
            const double g = prefix_(i, p - 1) / (1.0 + lambda_ * static_cast<double>(p));
            if (g <= best) break;
            best = g;
            best_p = p;
        }
        active_[static_cast<std::size_t>(i)] = static_cast<int>(best_p);
    }
}

double L12NewtonState::constraint_value() const {
    double f = 0.0;
    for (Index i = 0; i < rows_; ++i) {
        const int p = active_[static_cast<std::size_t>(i)];
        const double g = prefix_(i, p - 1) / (1.0 + lambda_ * p);
        f += g * g;
    }
    return f;
}

void L12NewtonState::newton_step() {
    double f = 0.0;
    double slope = 0.0; // -f'(lambda) / 2
    for (Index i = 0; i < rows_; ++i) {
        const int p = active_[static_cast<std::size_t>(i)];
        const double s = prefix_(i, p - 1);
        const double denom = 1.0 + lambda_ * p;
        f += (s / denom) * (s / denom);
        slope += p * s * s / (denom * denom * denom);
    }
    if (slope > 0.0) lambda_ += (f - eta_ * eta_) / (2.0 * slope);
}

std::vector<double> L12NewtonState::thresholds() const {
    std::vector<double> delta(static_cast<std::size_t>(rows_));
    for (Index i = 0; i < rows_; ++i) {
        const int p = active_[static_cast<std::size_t>(i)];
        delta[static_cast<std::size_t>(i)] = lambda_ * prefix_(i, p - 1) / (1.0 + lambda_ * p);
    }
    return delta;
}

Matrix L12NewtonState::apply(const Matrix& v) const {
    const auto delta = thresholds();
    Matrix out(v.rows(), v.cols());
    for (Index i = 0; i < v.rows(); ++i) {
        const double d = delta[static_cast<std::size_t>(i)];
        for (Index j = 0; j < v.cols(); ++j) {
            const double a = std::abs(v(i, j)) - d;
            out(i, j) = a > 0.0 ? std::copysign(a, v(i, j)) : 0.0;
        }
    }
    return out;
}

L12Projection proj_l12_traced(const Matrix& v, double eta, const L12Options& opts) {
    L12NewtonState state(v, eta);
    L12Projection result;
    if (state.feasible_input()) {
        result.w = v;
        result.trace.early_exit = true;
        return result;
    }

    const double target = eta * eta;
    state.set_lambda(state.initial_lambda());
    state.refresh_active();
    double f = state.constraint_value();
    result.trace.lambda0 = state.lambda();
    result.trace.lambdas.push_back(state.lambda());

    if (f <= target) {
        result.trace.early_exit = true;
    } else {
        bool converged = false;
        for (int it = 0; it < opts.max_iter; ++it) {
            if (std::abs(f - target) <= opts.rel_tol * target) {
                converged = true;
                break;
            }
            const double before = state.lambda();
            state.newton_step();
            state.refresh_active();
            f = state.constraint_value();
            result.trace.lambdas.push_back(state.lambda());
            ++result.trace.iterations;
            if (state.lambda() == before) {
                // No representable progress left; accept if we are at rounding level.
                converged = std::abs(f - target) <= 64.0 * 2.2e-16 * target * state.rows();
                break;
            }
        }
        if (!converged && std::abs(f - target) <= opts.rel_tol * target) converged = true;
        if (!converged) {
            std::ostringstream os;
            os << "proj_l12: Newton did not converge in " << opts.max_iter
               << " iterations (residual " << (f - target) << ")";
            throw ConvergenceError(os.str(), f - target);
        }
    }
    result.trace.residual = f - target;
    result.w = state.apply(v);
    return result;
}

Matrix proj_l12(const Matrix& v, double eta, const L12Options& opts) {
    return proj_l12_traced(v, eta, opts).w;
}

} // namespace pdfs
