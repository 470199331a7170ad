#include "pdfs/matrix.hpp"

#include "pdfs/error.hpp"
#include "pdfs/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pdfs {

Matrix matrix_from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Index>(rows.size());
    const auto m = n == 0 ? Index{0} : static_cast<Index>(rows.begin()->size());
    Matrix out(n, m);
    Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != m) {
            throw InvalidArgument("matrix_from_rows: ragged row " + std::to_string(i));
        }
        Index j = 0;
        for (double x : row) out(i, j++) = x;
        ++i;
    }
    return out;
}

bool all_finite(const Matrix& a) noexcept {
    return a.allFinite();
}

void require_finite(const Matrix& a, std::string_view what) {
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (!std::isfinite(a(i, j))) {
                std::ostringstream os;
                os << what << ": non-finite entry at (" << i << ", " << j << ")";
                throw InvalidArgument(os.str());
            }
        }
    }
}

void require_shape(const Matrix& a, Index rows, Index cols, std::string_view what) {
    if (a.rows() != rows || a.cols() != cols) {
        std::ostringstream os;
        os << what << ": expected " << rows << "x" << cols << ", got " << a.rows() << "x"
           << a.cols();
        throw InvalidArgument(os.str());
    }
}

double OneHotLabels::operator_norm() const {
    if (class_counts.empty()) return 0.0;
    const auto largest = *std::max_element(class_counts.begin(), class_counts.end());
    return std::sqrt(static_cast<double>(largest));
}

OneHotLabels one_hot(std::span<const int> labels, int k) {
    if (k < 2) throw InvalidArgument("one_hot: need at least 2 classes, got " + std::to_string(k));
    OneHotLabels out;
    out.matrix = Matrix::Zero(static_cast<Index>(labels.size()), k);
    out.labels.assign(labels.begin(), labels.end());
    out.class_counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = labels[i];
        if (c < 0 || c >= k) {
            std::ostringstream os;
            os << "one_hot: label " << c << " at index " << i << " is outside [0, " << k << ")";
            throw InvalidArgument(os.str());
        }
        out.matrix(static_cast<Index>(i), c) = 1.0;
        ++out.class_counts[static_cast<std::size_t>(c)];
    }
    return out;
}

OperatorNormEstimate spectral_norm(const Matrix& a, double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("spectral_norm: tolerance must be positive");
    OperatorNormEstimate est;
    est.tolerance = tol;
    if (a.size() == 0 || a.isZero(0.0)) {
        est.exact = true;
        est.converged = true;
        return est;
    }

    // Iterate on the Gram matrix of the smaller side: A A^T (rows <= cols) or A^T A.
    const bool wide = a.rows() <= a.cols();
    const Index n = wide ? a.rows() : a.cols();
    CounterRng rng(0x5eedULL, static_cast<std::uint64_t>(n));
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = rng.normal();
    u.normalize();

    auto rayleigh = [&](const Vector& x) -> double {
        return wide ? (a.transpose() * x).squaredNorm() : (a * x).squaredNorm();
    };

    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector w = wide ? Vector(a * (a.transpose() * u)) : Vector(a.transpose() * (a * u));
        const double next = u.dot(w);
        const double wn = w.norm();
        est.iterations = it;
        if (wn == 0.0) {
            // Start vector landed in the null space; restart along a basis vector.
            u.setZero();
            u(it % n) = 1.0;
            continue;
        }
        u = w / wn;
        if (it > 1 && std::abs(next - lambda) <= tol * next) {
            lambda = next;
            est.converged = true;
            break;
        }
        lambda = next;
    }
    est.value = std::sqrt(std::max(rayleigh(u), lambda));
    return est;
}

NormalizedFeatures normalize_features(const Matrix& x) {
    const auto est = spectral_norm(x);
    if (est.value == 0.0) throw InvalidArgument("normalize_features: zero matrix cannot be normalized");
    if (std::abs(est.value - 1.0) <= 1e-12) return {x, 1.0};
    return {x / est.value, est.value};
}

} // namespace pdfs
