#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library's own algorithms (no sorting scans, no Newton, no Jacobi SVD) so
// agreement is evidence rather than tautology.

#include <pdfs/matrix.hpp>
#include <pdfs/problem.hpp>
#include <pdfs/random.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using pdfs::Index;
using pdfs::Matrix;
using pdfs::Vector;

inline Matrix random_matrix(Index rows, Index cols, pdfs::CounterRng& rng, double scale = 1.0) {
    Matrix a(rows, cols);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = scale * rng.normal();
    return a;
}

// Threshold theta with sum (|v| - theta)^+ = eta by plain bisection.
inline double l1_threshold_bisect(const double* v, Index n, double eta) {
    double hi = 0.0;
    for (Index i = 0; i < n; ++i) hi = std::max(hi, std::abs(v[i]));
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += std::max(std::abs(v[i]) - mid, 0.0);
        (s > eta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline Matrix soft(const Matrix& v, double theta) {
    Matrix w = v;
    for (Index i = 0; i < w.size(); ++i) {
        const double a = std::abs(v.data()[i]) - theta;
        w.data()[i] = a > 0.0 ? std::copysign(a, v.data()[i]) : 0.0;
    }
    return w;
}

inline Matrix proj_l1(const Matrix& v, double eta) {
    if (v.cwiseAbs().sum() <= eta) return v;
    return soft(v, l1_threshold_bisect(v.data(), v.size(), eta));
}

// Rows are scaled by t_i / ||v_i|| where t is the l1 projection of the row norms.
inline Matrix proj_l21(const Matrix& v, double eta) {
    Vector norms = v.rowwise().norm();
    if (norms.sum() <= eta) return v;
    const double theta = l1_threshold_bisect(norms.data(), norms.size(), eta);
    Matrix w = v;
    for (Index i = 0; i < v.rows(); ++i) {
        const double t = std::max(norms(i) - theta, 0.0);
        w.row(i) = norms(i) > 0.0 ? Matrix(v.row(i) * (t / norms(i))) : Matrix(v.row(i) * 0.0);
    }
    return w;
}

// Row threshold for a fixed multiplier: the root of
// delta = lambda * sum_j (|v_j| - delta)^+, found by bisection.
inline double l12_row_threshold(const Matrix& v, Index row, double lambda) {
    double hi = v.row(row).cwiseAbs().maxCoeff();
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (Index j = 0; j < v.cols(); ++j) s += std::max(std::abs(v(row, j)) - mid, 0.0);
        (mid < lambda * s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double l12_constraint(const Matrix& v, double lambda, std::vector<double>& delta) {
    double c = 0.0;
    delta.assign(static_cast<std::size_t>(v.rows()), 0.0);
    for (Index i = 0; i < v.rows(); ++i) {
        const double d = l12_row_threshold(v, i, lambda);
        delta[static_cast<std::size_t>(i)] = d;
        double s = 0.0;
        for (Index j = 0; j < v.cols(); ++j) s += std::max(std::abs(v(i, j)) - d, 0.0);
        c += s * s;
    }
    return c;
}

// Outer bisection on the multiplier: the constraint is decreasing in lambda.
inline Matrix proj_l12(const Matrix& v, double eta) {
    const double target = eta * eta;
    double total = 0.0;
    for (Index i = 0; i < v.rows(); ++i) total += std::pow(v.row(i).cwiseAbs().sum(), 2);
    if (total <= target) return v;
    std::vector<double> delta;
    double lo = 0.0;
    double hi = 1.0;
    while (l12_constraint(v, hi, delta) > target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (l12_constraint(v, mid, delta) > target ? lo : hi) = mid;
    }
    l12_constraint(v, hi, delta);
    Matrix w = v;
    for (Index i = 0; i < v.rows(); ++i) {
        for (Index j = 0; j < v.cols(); ++j) {
            const double a = std::abs(v(i, j)) - delta[static_cast<std::size_t>(i)];
            w(i, j) = a > 0.0 ? std::copysign(a, v(i, j)) : 0.0;
        }
    }
    return w;
}

// Divide-and-conquer SVD (a different algorithm from the library's Jacobi).
inline Matrix proj_nuclear(const Matrix& v, double eta) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(v), Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = svd.singularValues();
    if (s.sum() <= eta) return v;
    const double theta = l1_threshold_bisect(s.data(), s.size(), eta);
    for (Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - theta, 0.0);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

inline double nuclear_norm(const Matrix& v) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(v)};
    return svd.singularValues().sum();
}

inline double spectral_norm(const Matrix& v) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(v)};
    return svd.singularValues()(0);
}

inline double huber(double t, double delta) {
    const double a = std::abs(t);
    if (delta == 0.0) return a;
    return a <= delta ? t * t / (2.0 * delta) : a - delta / 2.0;
}

// Primal energy evaluated entry by entry with explicit loops.
inline double objective(const Matrix& w, const Matrix& mu, const pdfs::Problem& p) {
    const Matrix& x = p.x();
    const Matrix& y = p.y();
    const Index m = x.rows(), d = x.cols(), k = y.cols();
    double data = 0.0, sq = 0.0;
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < k; ++j) {
            double r = 0.0;
            for (Index l = 0; l < k; ++l) r += y(i, l) * mu(l, j);
            for (Index l = 0; l < d; ++l) r -= x(i, l) * w(l, j);
            switch (p.loss().kind) {
            case pdfs::LossKind::L1: data += std::abs(r); break;
            case pdfs::LossKind::Huber: data += huber(r, p.loss().delta); break;
            case pdfs::LossKind::Frobenius: sq += r * r; break;
            }
        }
    }
    if (p.loss().kind == pdfs::LossKind::Frobenius) data = std::sqrt(sq);
    double centers = 0.0;
    for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) {
            const double e = (a == b ? 1.0 : 0.0) - mu(a, b);
            centers += e * e;
        }
    }
    double elastic = 0.0;
    for (Index i = 0; i < w.size(); ++i) elastic += w.data()[i] * w.data()[i];
    return data + 0.5 * p.rho() * centers + 0.5 * p.alpha() * elastic;
}

} // namespace oracle
