#include "pdfs/problem.hpp"

#include "pdfs/error.hpp"

#include <cmath>
#include <string>

namespace pdfs {

Problem::Problem(Matrix x, OneHotLabels y, ProblemConfig config, double feature_scale)
    : x_(std::move(x)), y_(std::move(y)), config_(config), feature_scale_(feature_scale) {
    if (x_.rows() == 0 || x_.cols() == 0) throw InvalidArgument("Problem: empty feature matrix");
    if (static_cast<std::size_t>(x_.rows()) != y_.num_samples()) {
        throw InvalidArgument("Problem: " + std::to_string(x_.rows()) + " feature rows but " +
                              std::to_string(y_.num_samples()) + " labels");
    }
    require_shape(y_.matrix, x_.rows(), static_cast<Index>(y_.num_classes()), "Problem: Y");
    require_finite(x_, "Problem: X");
    if (!(config_.rho >= 0.0) || !std::isfinite(config_.rho)) {
        throw InvalidArgument("Problem: rho must be finite and nonnegative");
    }
    if (!(config_.alpha >= 0.0) || !std::isfinite(config_.alpha)) {
        throw InvalidArgument("Problem: alpha must be finite and nonnegative");
    }
    if (!(feature_scale_ > 0.0) || !std::isfinite(feature_scale_)) {
        throw InvalidArgument("Problem: feature scale must be finite and positive");
    }
    // Re-validate specs that may have been built by aggregate initialization.
    config_.ball = BallSpec::make(config_.ball.kind, config_.ball.radius);
    config_.loss = LossSpec::make(config_.loss.kind, config_.loss.delta);

    x_norm_ = spectral_norm(x_).value;
    y_norm_ = y_.operator_norm();
}

} // namespace pdfs
