#include <pdfs/error.hpp>
#include <pdfs/losses.hpp>
#include <pdfs/problem.hpp>
#include <pdfs/random.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pdfs;

namespace {

Problem small_problem(LossSpec loss, double rho, double alpha, std::uint64_t seed) {
    CounterRng rng(seed);
    const Matrix x = oracle::random_matrix(9, 5, rng);
    const std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1, 2};
    return Problem(x, one_hot(labels, 3), ProblemConfig{loss, BallSpec::make(BallKind::L1, 1.0), rho, alpha});
}

} // namespace

TEST(LossKind, Parsing) {
    EXPECT_EQ(parse_loss_kind("huber"), LossKind::Huber);
    EXPECT_EQ(parse_loss_kind("l1"), LossKind::L1);
    EXPECT_EQ(parse_loss_kind("frobenius"), LossKind::Frobenius);
    EXPECT_THROW(parse_loss_kind("l2"), InvalidArgument);
    EXPECT_EQ(to_string(LossKind::Frobenius), "frobenius");
    EXPECT_THROW(LossSpec::make(LossKind::Huber, -1.0), InvalidArgument);
    EXPECT_EQ(LossSpec::make(LossKind::L1, 1.0).smoothing(), 0.0);
    EXPECT_EQ(LossSpec::make(LossKind::Huber, 0.5).smoothing(), 0.5);
}

TEST(Huber, Examples) {
    EXPECT_DOUBLE_EQ(huber_value(0.5, 1.0), 0.125);
    EXPECT_DOUBLE_EQ(huber_value(2.0, 1.0), 1.5);
    EXPECT_DOUBLE_EQ(huber_value(-2.0, 1.0), 1.5);
    for (double delta : {0.1, 1.0, 3.0}) {
        EXPECT_DOUBLE_EQ(huber_value(delta, delta), delta / 2);
        EXPECT_DOUBLE_EQ(huber_value(-delta, delta), delta / 2);
    }
    EXPECT_EQ(huber_value(-3.0, 0.0), 3.0);
}

TEST(Huber, ApproximatesAbsAndIsConvex) {
    CounterRng rng(3);
    for (int t = 0; t < 2000; ++t) {
        const double delta = 2 * rng.uniform();
        const double a = 6 * rng.normal();
        const double b = 6 * rng.normal();
        const double l = rng.uniform();
        EXPECT_LE(std::abs(huber_value(a, delta) - std::abs(a)), delta / 2 + 1e-14 * (1 + std::abs(a)));
        const double mid = huber_value(l * a + (1 - l) * b, delta);
        EXPECT_LE(mid, l * huber_value(a, delta) + (1 - l) * huber_value(b, delta) + 1e-12);
        EXPECT_EQ(huber_value(a, delta), oracle::huber(a, delta));
    }
}

TEST(LossMatrix, Examples) {
    EXPECT_DOUBLE_EQ(loss_matrix(matrix_from_rows({{1, -1}}), LossSpec::make(LossKind::L1)), 2.0);
    EXPECT_DOUBLE_EQ(loss_matrix(matrix_from_rows({{3, 4}}), LossSpec::make(LossKind::Frobenius)), 5.0);
    EXPECT_DOUBLE_EQ(loss_matrix(matrix_from_rows({{0.5, 2}}), LossSpec::make(LossKind::Huber, 1.0)), 1.625);
}

TEST(DualProx, Examples) {
    const LossSpec huber = LossSpec::make(LossKind::Huber, 1.0);
    EXPECT_EQ(dual_prox(matrix_from_rows({{4}}), 1.0, huber)(0, 0), 1.0);
    EXPECT_EQ(dual_prox(matrix_from_rows({{1}}), 1.0, huber)(0, 0), 0.5);
    EXPECT_EQ(dual_prox(matrix_from_rows({{-3}}), 1.0, LossSpec::make(LossKind::Huber, 0.0))(0, 0), -1.0);
    EXPECT_EQ(dual_prox(matrix_from_rows({{-3}}), 1.0, LossSpec::make(LossKind::L1))(0, 0), -1.0);
    const Matrix inside = matrix_from_rows({{0.3, 0.4}});
    EXPECT_EQ(dual_prox(inside, 7.0, LossSpec::make(LossKind::Frobenius)), inside);
    const Matrix outside = matrix_from_rows({{3, 4}});
    EXPECT_TRUE(dual_prox(outside, 1.0, LossSpec::make(LossKind::Frobenius)).isApprox(outside / 5));
}

// The Huber conjugate is h*(z) = delta/2 z^2 + indicator(|z| <= 1), so the
// prox output p of sigma h* at zbar minimizes (p - zbar)^2 / (2 sigma) + delta/2 p^2
// over [-1, 1]. Brute force over a fine grid stands in as the oracle.
TEST(DualProx, MinimizesProxObjective) {
    CounterRng rng(5);
    for (int t = 0; t < 200; ++t) {
        const double delta = 2 * rng.uniform();
        const double sigma = 0.01 + 3 * rng.uniform();
        const double zbar = 4 * rng.normal();
        const double p = dual_prox(matrix_from_rows({{zbar}}), sigma, LossSpec::make(LossKind::Huber, delta))(0, 0);
        auto f = [&](double q) { return (q - zbar) * (q - zbar) / (2 * sigma) + 0.5 * delta * q * q; };
        double best = f(-1.0);
        for (int g = -20000; g <= 20000; ++g) best = std::min(best, f(g / 20000.0));
        EXPECT_LE(f(p), best + 1e-12);
        EXPECT_LE(std::abs(p), 1.0);
    }
}

TEST(DualProx, InplaceMatches) {
    CounterRng rng(6);
    for (LossKind kind : {LossKind::L1, LossKind::Huber, LossKind::Frobenius}) {
        const Matrix z = oracle::random_matrix(5, 3, rng, 2.0);
        Matrix w = z;
        dual_prox_inplace(w, 0.7, LossSpec::make(kind, 0.5));
        EXPECT_EQ(w, dual_prox(z, 0.7, LossSpec::make(kind, 0.5)));
    }
}

TEST(PrimalObjective, ZeroWeightsIdentityCenters) {
    const Problem p = small_problem(LossSpec::make(LossKind::Huber, 1.0), 1.0, 0.0, 1);
    const Matrix w = Matrix::Zero(5, 3);
    const Matrix eye = Matrix::Identity(3, 3);
    const ObjectiveBreakdown o = primal_objective(w, eye, p);
    // Y has one 1 per row: 9 entries at h_1(1) = 0.5.
    EXPECT_DOUBLE_EQ(o.data_term, 4.5);
    EXPECT_EQ(o.center_penalty, 0.0);
    EXPECT_EQ(o.constraint_violation, 0.0);
    EXPECT_DOUBLE_EQ(o.total, 4.5);
}

TEST(PrimalObjective, ZeroCentersPenalty) {
    for (double rho : {0.5, 1.0, 3.0}) {
        const Problem p = small_problem(LossSpec::make(LossKind::L1), rho, 0.0, 2);
        const ObjectiveBreakdown o = primal_objective(Matrix::Zero(5, 3), Matrix::Zero(3, 3), p);
        EXPECT_DOUBLE_EQ(o.center_penalty, rho / 2 * 3);
        EXPECT_DOUBLE_EQ(o.data_term, 0.0);
    }
}

TEST(PrimalObjective, MatchesLoopOracle) {
    CounterRng rng(11);
    for (LossKind kind : {LossKind::L1, LossKind::Huber, LossKind::Frobenius}) {
        for (int t = 0; t < 20; ++t) {
            const double alpha = t % 2 ? 0.3 : 0.0;
            const Problem p = small_problem(LossSpec::make(kind, 0.7), 0.5 + rng.uniform(), alpha, 100 + t);
            const Matrix w = oracle::random_matrix(5, 3, rng, 0.3);
            const Matrix mu = oracle::random_matrix(3, 3, rng);
            const ObjectiveBreakdown o = primal_objective(w, mu, p);
            EXPECT_NEAR(o.total, oracle::objective(w, mu, p), 1e-10 * (1 + std::abs(o.total)));
            const ObjectiveBreakdown o2 = primal_objective_from_xw(p.x() * w, w, mu, p);
            EXPECT_NEAR(o2.total, o.total, 1e-12 * (1 + std::abs(o.total)));
        }
    }
}

TEST(PrimalObjective, ReportsViolationAndLagrangianTerm) {
    const Problem p = small_problem(LossSpec::make(LossKind::Huber, 1.0), 1.0, 0.0, 3);
    Matrix w = Matrix::Zero(5, 3);
    w(0, 0) = 3.0;
    const ObjectiveBreakdown o = primal_objective(w, Matrix::Identity(3, 3), p, 0.5);
    EXPECT_DOUBLE_EQ(o.constraint_violation, 2.0);
    EXPECT_DOUBLE_EQ(o.elastic_term, 1.5);
    const ObjectiveBreakdown skip = primal_objective_from_xw(p.x() * w, w, Matrix::Identity(3, 3), p, false);
    EXPECT_EQ(skip.constraint_violation, 0.0);
}

TEST(PrimalObjective, ShapeMismatchThrows) {
    const Problem p = small_problem(LossSpec{}, 1.0, 0.0, 4);
    EXPECT_THROW(primal_objective(Matrix::Zero(4, 3), Matrix::Identity(3, 3), p), InvalidArgument);
    EXPECT_THROW(primal_objective(Matrix::Zero(5, 3), Matrix::Identity(2, 2), p), InvalidArgument);
}
