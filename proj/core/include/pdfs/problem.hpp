#pragma once

#include "pdfs/losses.hpp"
#include "pdfs/matrix.hpp"
#include "pdfs/projections.hpp"

namespace pdfs {

struct ProblemConfig {
    LossSpec loss;
    BallSpec ball;
    double rho = 1.0;   // weight of (rho / 2) ||I - mu||^2
    double alpha = 0.0; // elastic weight (alpha / 2) ||W||^2
};

/// A training instance: features, labels and the model's regularization.
/// Validates shapes and finiteness once; the operator norms are computed here
/// and reused by step-size selection.
class Problem {
public:
    Problem(Matrix x, OneHotLabels y, ProblemConfig config, double feature_scale = 1.0);

    const Matrix& x() const noexcept { return x_; }
    const Matrix& y() const noexcept { return y_.matrix; }
    const OneHotLabels& labels() const noexcept { return y_; }
    const ProblemConfig& config() const noexcept { return config_; }
    const LossSpec& loss() const noexcept { return config_.loss; }
    const BallSpec& ball() const noexcept { return config_.ball; }
    double rho() const noexcept { return config_.rho; }
    double alpha() const noexcept { return config_.alpha; }

    Index m() const noexcept { return x_.rows(); }
    Index d() const noexcept { return x_.cols(); }
    Index k() const noexcept { return y_.matrix.cols(); }

    double x_norm() const noexcept { return x_norm_; }
    double y_norm() const noexcept { return y_norm_; }
    /// Factor the raw features were divided by before training.
    double feature_scale() const noexcept { return feature_scale_; }

private:
    Matrix x_;
    OneHotLabels y_;
    ProblemConfig config_;
    double feature_scale_;
    double x_norm_ = 0.0;
    double y_norm_ = 0.0;
};

} // namespace pdfs
