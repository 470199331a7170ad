#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace pdfs {

/// Dense real matrix, row-major. Holds X (m x d), Y (m x k), W (d x k),
/// mu (k x k) and the dual variable Z (m x k).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

Matrix matrix_from_rows(std::initializer_list<std::initializer_list<double>> rows);

bool all_finite(const Matrix& a) noexcept;

/// Throws InvalidArgument naming `what` and the first offending entry.
void require_finite(const Matrix& a, std::string_view what);

/// Throws InvalidArgument unless `a` is rows x cols.
void require_shape(const Matrix& a, Index rows, Index cols, std::string_view what);

/// Labels in [0, k) encoded as an m x k indicator matrix.
struct OneHotLabels {
    Matrix matrix;
    std::vector<int> labels;
    std::vector<std::size_t> class_counts;

    std::size_t num_samples() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_counts.size(); }

    /// Exact operator norm: Y^T Y = diag(class_counts), so ||Y|| = sqrt(max count).
    double operator_norm() const;
};

/// Throws InvalidArgument for k < 2 or a label outside [0, k).
OneHotLabels one_hot(std::span<const int> labels, int k);

struct OperatorNormEstimate {
    double value = 0.0;
    int iterations = 0;
    double tolerance = 0.0;
    /// Relative change of the last two Rayleigh quotients fell below tolerance.
    bool converged = false;
    /// The input was the zero matrix and value = 0 is exact.
    bool exact = false;
};

/// Largest singular value by power iteration on the smaller Gram matrix, with
/// a fixed-seed random unit start.
OperatorNormEstimate spectral_norm(const Matrix& a, double tol = 1e-9, int max_iter = 20000);

struct NormalizedFeatures {
    Matrix x;
    double scale = 1.0; // x = original / scale
};

/// Rescales X to unit operator norm. Scales within 1e-12 of one are treated as
/// already normalized and the input is returned unchanged.
NormalizedFeatures normalize_features(const Matrix& x);

} // namespace pdfs
