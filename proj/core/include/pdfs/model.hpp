#pragma once

#include "pdfs/losses.hpp"
#include "pdfs/matrix.hpp"
#include "pdfs/projections.hpp"

namespace pdfs {

/// Output of training: the projection W (d x k) and the class centers mu
/// (k x k, row j is the center of class j in the projected space).
struct TrainedModel {
    Matrix w;
    Matrix mu;
    BallSpec ball;
    LossSpec loss;
    double feature_scale = 1.0; // raw features are divided by this before predict

    Index num_features() const noexcept { return w.rows(); }
    Index num_classes() const noexcept { return w.cols(); }

    friend bool operator==(const TrainedModel& a, const TrainedModel& b) {
        return a.w.rows() == b.w.rows() && a.w.cols() == b.w.cols() &&
               a.mu.rows() == b.mu.rows() && a.mu.cols() == b.mu.cols() && a.w == b.w &&
               a.mu == b.mu && a.ball == b.ball && a.loss == b.loss &&
               a.feature_scale == b.feature_scale;
    }
};

} // namespace pdfs
