#include <pdfs/error.hpp>
#include <pdfs/projections.hpp>
#include <pdfs/random.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pdfs;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

const BallKind kAll[] = {BallKind::L1, BallKind::L21, BallKind::L12, BallKind::Nuclear};

Matrix oracle_project(const Matrix& v, BallKind kind, double eta) {
    switch (kind) {
    case BallKind::L1: return oracle::proj_l1(v, eta);
    case BallKind::L21: return oracle::proj_l21(v, eta);
    case BallKind::L12: return oracle::proj_l12(v, eta);
    case BallKind::Nuclear: return oracle::proj_nuclear(v, eta);
    }
    return v;
}

} // namespace

TEST(BallSpec, ParsingAndValidation) {
    EXPECT_EQ(parse_ball_kind("l12"), BallKind::L12);
    EXPECT_EQ(to_string(BallKind::Nuclear), "nuclear");
    EXPECT_THROW(parse_ball_kind("l3"), InvalidArgument);
    EXPECT_THROW(BallSpec::make(BallKind::L1, 0.0), InvalidArgument);
    EXPECT_THROW(BallSpec::make(BallKind::L1, -1.0), InvalidArgument);
    EXPECT_THROW(BallSpec::make(BallKind::L1, INFINITY), InvalidArgument);
    EXPECT_EQ(BallSpec::make(BallKind::L21, 2.0).radius, 2.0);
}

TEST(BallNorm, SmallCases) {
    const Matrix w = matrix_from_rows({{3, -4}, {1, 0}});
    EXPECT_DOUBLE_EQ(ball_norm(w, BallKind::L1), 8.0);
    EXPECT_DOUBLE_EQ(ball_norm(w, BallKind::L21), 6.0);
    EXPECT_DOUBLE_EQ(ball_norm(w, BallKind::L12), std::sqrt(49.0 + 1.0));
    EXPECT_NEAR(ball_norm(matrix_from_rows({{3, 0}, {0, 1}}), BallKind::Nuclear), 4.0, 1e-12);
}

TEST(ProjL1, Examples) {
    EXPECT_EQ(proj_l1(vec({0.5, -0.3}), 1.0), vec({0.5, -0.3}));
    EXPECT_TRUE(proj_l1(vec({3, 1}), 2.0).isApprox(vec({2, 0})));
    EXPECT_TRUE(proj_l1(vec({1, 1, 1}), 1.5).isApprox(vec({0.5, 0.5, 0.5})));
    EXPECT_TRUE(proj_l1(vec({-3, 1}), 2.0).isApprox(vec({-2, 0})));
}

TEST(ProjL1, MatrixExamples) {
    const Matrix eye = Matrix::Identity(2, 2);
    EXPECT_EQ(proj_l1_matrix(eye, 2.0), eye);
    EXPECT_TRUE(proj_l1_matrix(eye, 1.0).isApprox(0.5 * eye));
    EXPECT_EQ(proj_l1_matrix(Matrix::Zero(3, 2), 0.1), Matrix::Zero(3, 2));
}

TEST(ProjL1, CondatSortAndBisectionAgree) {
    CounterRng rng(101);
    for (int t = 0; t < 300; ++t) {
        const Index n = 1 + static_cast<Index>(rng.below(60));
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = rng.normal() * (1 + 3 * rng.uniform());
        const double eta = 0.05 + rng.uniform() * v.cwiseAbs().sum();
        const std::span<const double> s(v.data(), static_cast<std::size_t>(n));
        if (v.cwiseAbs().sum() > eta) {
            const double ref = oracle::l1_threshold_bisect(v.data(), n, eta);
            EXPECT_NEAR(l1_threshold_condat(s, eta), ref, 1e-10);
            EXPECT_NEAR(l1_threshold_sort(s, eta), ref, 1e-10);
        }
        EXPECT_LE((proj_l1(v, eta) - proj_l1_sorted(v, eta)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ProjL1, TiesAndZeros) {
    EXPECT_TRUE(proj_l1(vec({2, 2, 2, 2}), 4.0).isApprox(vec({1, 1, 1, 1})));
    EXPECT_TRUE(proj_l1(vec({0, 0, 5}), 1.0).isApprox(vec({0, 0, 1})));
    Vector empty;
    EXPECT_EQ(proj_l1(empty, 1.0).size(), 0);
}

TEST(ClipBox, Examples) {
    const Matrix z = matrix_from_rows({{-2, 0.5, 3}});
    const Matrix c = clip_box(z, -1, 1);
    EXPECT_EQ(c, matrix_from_rows({{-1, 0.5, 1}}));
    EXPECT_EQ(clip_box(c, -1, 1), c);
    EXPECT_THROW(clip_box(z, 1, -1), InvalidArgument);
}

TEST(ProjFrobenius, Examples) {
    const Matrix small = matrix_from_rows({{0.3, 0.4}});
    EXPECT_EQ(proj_frobenius_unit(small), small);
    const Matrix big = matrix_from_rows({{0, 4}});
    EXPECT_TRUE(proj_frobenius_unit(big).isApprox(big / 4));
    EXPECT_EQ(proj_frobenius_unit(Matrix::Zero(2, 2)), Matrix::Zero(2, 2));
}

TEST(ProjL21, Examples) {
    const Matrix v = matrix_from_rows({{3, 4}, {0, 0}});
    EXPECT_EQ(proj_l21(v, 5.0), v);
    EXPECT_TRUE(proj_l21(v, 2.5).isApprox(matrix_from_rows({{1.5, 2}, {0, 0}})));
}

TEST(ProjL21, SingleColumnIsL1) {
    CounterRng rng(4);
    for (int t = 0; t < 50; ++t) {
        const Matrix v = oracle::random_matrix(12, 1, rng);
        const double eta = 0.1 + rng.uniform() * 3;
        const Vector flat = Eigen::Map<const Vector>(v.data(), v.size());
        const Vector expect = proj_l1(flat, eta);
        EXPECT_LE((Eigen::Map<const Vector>(proj_l21(v, eta).data(), v.size()) - expect).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(ProjL21, RowsKeepDirection) {
    CounterRng rng(8);
    const Matrix v = oracle::random_matrix(10, 3, rng);
    const Matrix w = proj_l21(v, 1.0);
    for (Index i = 0; i < v.rows(); ++i) {
        const double c = w.row(i).norm() / v.row(i).norm();
        EXPECT_LE((w.row(i) - c * v.row(i)).norm(), 1e-12);
    }
}

TEST(ProjNuclear, Examples) {
    EXPECT_TRUE(proj_nuclear(matrix_from_rows({{3, 0}, {0, 1}}), 2.0)
                    .isApprox(matrix_from_rows({{2, 0}, {0, 0}}), 1e-12));
    const Matrix u = matrix_from_rows({{0.6}, {0.8}, {0}});
    const Matrix rank1 = 5.0 * u * matrix_from_rows({{1, 0}});
    EXPECT_LE(max_abs_diff(proj_nuclear(rank1, 2.0), rank1 * 0.4), 1e-12);
    const Matrix feasible = matrix_from_rows({{0.5, 0}, {0, 0.2}});
    EXPECT_EQ(proj_nuclear(feasible, 1.0), feasible);
}

TEST(ProjNuclear, WideInputIsTransposed) {
    CounterRng rng(21);
    const Matrix v = oracle::random_matrix(3, 9, rng);
    const Matrix w = proj_nuclear(v, 1.0);
    EXPECT_LE(max_abs_diff(w, oracle::proj_nuclear(v, 1.0)), 1e-10);
    EXPECT_LE(oracle::nuclear_norm(w), 1.0 + 1e-9);
}

TEST(ProjL12, Examples) {
    const Matrix feasible = matrix_from_rows({{0.1, 0.2}, {0.3, 0}});
    EXPECT_EQ(proj_l12(feasible, 1.0), feasible);
    EXPECT_TRUE(proj_l12(matrix_from_rows({{3, 1}}), 2.0).isApprox(matrix_from_rows({{2, 0}}), 1e-12));
    EXPECT_TRUE(proj_l12(matrix_from_rows({{3}, {4}}), 2.5).isApprox(matrix_from_rows({{1.5}, {2}}), 1e-12));
}

TEST(ProjL12, FeasibleInputIsEarlyExitAndBitIdentical) {
    CounterRng rng(9);
    const Matrix v = oracle::random_matrix(6, 4, rng, 0.01);
    const auto r = proj_l12_traced(v, 10.0);
    EXPECT_TRUE(r.trace.early_exit);
    EXPECT_EQ(r.trace.iterations, 0);
    EXPECT_EQ(r.w, v);
}

TEST(ProjL12, ReductionsToL1AndL2) {
    CounterRng rng(13);
    for (int t = 0; t < 50; ++t) {
        const Matrix row = oracle::random_matrix(1, 9, rng);
        const double eta = 0.1 + rng.uniform();
        EXPECT_LE(max_abs_diff(proj_l12(row, eta), proj_l1_matrix(row, eta)), 1e-10);
        const Matrix col = oracle::random_matrix(9, 1, rng);
        const double n = col.norm();
        const Matrix expect = n > eta ? Matrix(col * (eta / n)) : col;
        EXPECT_LE(max_abs_diff(proj_l12(col, eta), expect), 1e-10);
    }
}

TEST(ProjL12, NewtonStateInternals) {
    const Matrix v = matrix_from_rows({{-1, 3, 2}, {0.5, 0, -4}});
    L12NewtonState st(v, 1.0);
    EXPECT_FALSE(st.feasible_input());
    EXPECT_EQ(st.sorted_abs(0, 0), 3.0);
    EXPECT_EQ(st.sorted_abs(0, 2), 1.0);
    EXPECT_EQ(st.prefix_sum(0, 2), 5.0);
    EXPECT_EQ(st.prefix_sum(1, 3), 4.5);
    // lambda0 = max_p (sqrt(sum_i S_{i,p}^2) - 1) / p
    const double l1 = std::sqrt(9.0 + 16.0) - 1.0;
    const double l2 = (std::sqrt(25.0 + 4.5 * 4.5) - 1.0) / 2.0;
    const double l3 = (std::sqrt(36.0 + 4.5 * 4.5) - 1.0) / 3.0;
    EXPECT_DOUBLE_EQ(st.initial_lambda(), std::max({l1, l2, l3}));
    st.set_lambda(0.0);
    st.refresh_active();
    EXPECT_EQ(st.active_count(0), 3);
    st.set_lambda(1e6);
    st.refresh_active();
    EXPECT_EQ(st.active_count(1), 1);
}

TEST(ProjL12, LambdaMonotoneAndResidualSmall) {
    CounterRng rng(17);
    for (int t = 0; t < 500; ++t) {
        const Index r = 1 + static_cast<Index>(rng.below(12));
        const Index c = 1 + static_cast<Index>(rng.below(8));
        const Matrix v = oracle::random_matrix(r, c, rng, 1 + 4 * rng.uniform());
        const double eta = 0.05 + rng.uniform() * 2;
        const auto res = proj_l12_traced(v, eta);
        for (std::size_t i = 1; i < res.trace.lambdas.size(); ++i) {
            ASSERT_GE(res.trace.lambdas[i], res.trace.lambdas[i - 1]);
        }
        EXPECT_LE(std::abs(res.trace.residual), 1e-8 * eta * eta);
        EXPECT_LE(ball_norm(res.w, BallKind::L12), eta * (1 + 1e-9));
    }
}

TEST(ProjL12, ConvergenceFailureCarriesResidual) {
    CounterRng rng(19);
    const Matrix v = oracle::random_matrix(20, 8, rng, 5.0);
    L12Options opts;
    opts.max_iter = 1;
    opts.rel_tol = 1e-15;
    try {
        proj_l12(v, 0.5, opts);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_NE(e.residual(), 0.0);
    }
}

TEST(Projections, MatchOracles) {
    CounterRng rng(23);
    for (BallKind kind : kAll) {
        for (int t = 0; t < 40; ++t) {
            const Index r = 1 + static_cast<Index>(rng.below(20));
            const Index c = 1 + static_cast<Index>(rng.below(6));
            const Matrix v = oracle::random_matrix(r, c, rng);
            const double eta = 0.1 + 2 * rng.uniform();
            EXPECT_LE(max_abs_diff(project(v, {kind, eta}), oracle_project(v, kind, eta)), 1e-7)
                << to_string(kind) << " " << r << "x" << c;
        }
    }
}

TEST(Projections, FeasibleIdempotentNonexpansiveVariational) {
    CounterRng rng(29);
    for (BallKind kind : kAll) {
        for (int t = 0; t < 60; ++t) {
            const Index r = 1 + static_cast<Index>(rng.below(15));
            const Index c = 1 + static_cast<Index>(rng.below(5));
            const double eta = 0.2 + rng.uniform();
            const BallSpec ball{kind, eta};
            const Matrix u = oracle::random_matrix(r, c, rng);
            const Matrix v = oracle::random_matrix(r, c, rng);
            const Matrix pu = project(u, ball);
            const Matrix pv = project(v, ball);
            EXPECT_LE(ball_norm(pu, kind), eta * (1 + 1e-9));
            EXPECT_LE(max_abs_diff(project(pu, ball), pu), 1e-10);
            EXPECT_LE((pu - pv).norm(), (u - v).norm() * (1 + 1e-9));
            for (int s = 0; s < 10; ++s) {
                Matrix w = oracle::random_matrix(r, c, rng);
                const double wn = ball_norm(w, kind);
                if (wn > 0) w *= eta * rng.uniform() / wn;
                const double ip = ((u - pu).array() * (w - pu).array()).sum();
                EXPECT_LE(ip, 1e-8 * u.squaredNorm());
            }
        }
    }
}

TEST(Projections, FeasibleInputsAreFixedPoints) {
    CounterRng rng(31);
    for (BallKind kind : kAll) {
        Matrix v = oracle::random_matrix(7, 3, rng);
        v *= 0.5 / ball_norm(v, kind);
        const Matrix w = project(v, {kind, 1.0});
        if (kind == BallKind::Nuclear) {
            EXPECT_LE(max_abs_diff(w, v), 1e-12);
        } else {
            EXPECT_EQ(w, v);
        }
    }
}

TEST(Projections, RejectBadRadius) {
    const Matrix v = Matrix::Ones(2, 2);
    EXPECT_THROW(proj_l21(v, 0.0), InvalidArgument);
    EXPECT_THROW(proj_l12(v, -1.0), InvalidArgument);
    EXPECT_THROW(proj_nuclear(v, NAN), InvalidArgument);
    EXPECT_THROW(proj_l1_matrix(v, 0.0), InvalidArgument);
}
