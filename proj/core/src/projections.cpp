#include "pdfs/projections.hpp"

#include "pdfs/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace pdfs {
namespace {

void require_radius(double eta, const char* who) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw InvalidArgument(std::string(who) + ": radius must be finite and positive, got " +
                              std::to_string(eta));
    }
}

Vector singular_values(const Matrix& w) {
    if (w.size() == 0) return Vector();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    return svd.singularValues();
}

} // namespace

std::string_view to_string(BallKind kind) noexcept {
    switch (kind) {
    case BallKind::L1: return "l1";
    case BallKind::L21: return "l21";
    case BallKind::L12: return "l12";
    case BallKind::Nuclear: return "nuclear";
    }
    return "unknown";
}

BallKind parse_ball_kind(std::string_view name) {
    if (name == "l1") return BallKind::L1;
    if (name == "l21") return BallKind::L21;
    if (name == "l12") return BallKind::L12;
    if (name == "nuclear") return BallKind::Nuclear;
    throw InvalidArgument("unknown ball '" + std::string(name) + "' (expected l1|l21|l12|nuclear)");
}

BallSpec BallSpec::make(BallKind kind, double radius) {
    require_radius(radius, "BallSpec");
    return BallSpec{kind, radius};
}

double ball_norm(const Matrix& w, BallKind kind) {
    switch (kind) {
    case BallKind::L1: return w.cwiseAbs().sum();
    case BallKind::L21: return w.rowwise().norm().sum();
    case BallKind::L12: return std::sqrt(w.cwiseAbs().rowwise().sum().squaredNorm());
    case BallKind::Nuclear: return singular_values(w).sum();
    }
    return 0.0;
}

Matrix clip_box(const Matrix& z, double lo, double hi) {
    Matrix out = z;
    clip_box_inplace(out, lo, hi);
    return out;
}

void clip_box_inplace(Matrix& z, double lo, double hi) {
    if (!(lo <= hi)) throw InvalidArgument("clip_box: lower bound exceeds upper bound");
    z = z.cwiseMax(lo).cwiseMin(hi);
}

Matrix proj_l21(const Matrix& v, double eta) {
    require_radius(eta, "proj_l21");
    const Vector norms = v.rowwise().norm();
    if (norms.sum() <= eta) return v;
    const Vector t = proj_l1(norms, eta);
    Matrix out(v.rows(), v.cols());
    for (Index i = 0; i < v.rows(); ++i) {
        // t_i <= ||v_i||, so the scale is t_i / ||v_i||; zero rows stay zero.
        const double scale = norms(i) > 0.0 ? t(i) / std::max(t(i), norms(i)) : 0.0;
        out.row(i) = scale * v.row(i);
    }
    return out;
}

Matrix proj_nuclear(const Matrix& v, double eta) {
    require_radius(eta, "proj_nuclear");
    if (v.size() == 0) return v;
    if (v.cols() > v.rows()) return proj_nuclear(v.transpose(), eta).transpose();

    // Thin SVD: QR-preconditioned one-sided Jacobi, so the Jacobi sweeps run on
    // a k x k triangle and the cost is O(d k^2 + k^3).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("proj_nuclear: SVD failed");
    const Vector sigma = svd.singularValues();
    if (!sigma.allFinite()) throw NumericalError("proj_nuclear: non-finite singular values");
    if (sigma.sum() <= eta) return v;

    const Vector shrunk = proj_l1(sigma, eta);
    Matrix out = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
    return out;
}

Matrix proj_frobenius_unit(const Matrix& z) {
    Matrix out = z;
    proj_frobenius_unit_inplace(out);
    return out;
}

void proj_frobenius_unit_inplace(Matrix& z) {
    const double n = z.norm();
    if (n > 1.0) z /= n;
}

Matrix project(const Matrix& v, const BallSpec& ball) {
    switch (ball.kind) {
    case BallKind::L1: return proj_l1_matrix(v, ball.radius);
    case BallKind::L21: return proj_l21(v, ball.radius);
    case BallKind::L12: return proj_l12(v, ball.radius);
    case BallKind::Nuclear: return proj_nuclear(v, ball.radius);
    }
    throw InvalidArgument("project: unknown ball kind");
}

} // namespace pdfs
