#include "volgeo/diagnostics.hpp"
#include "volgeo/manufactured.hpp"
#include "volgeo/solver.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace volgeo;
using std::numbers::pi;

namespace {

Field t_squared_minus_t(const SpaceTimeGrid& g)
{
    return Field::sample(g, [](double, double, double t) { return -t * (1 - t); });
}

ProblemData flat_problem(const SpaceTimeGrid& g, double eps)
{
    return manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(eps));
}

}  // namespace

TEST(SupNorms, TimeOnlyPath)
{
    const SpaceTimeGrid g(2, 8, 9, 1.0);
    const SupNorms n = sup_norms(t_squared_minus_t(g), flat_problem(g, 2.0));
    EXPECT_NEAR(n.u_tt, 2.0, 1e-12);
    EXPECT_EQ(n.grad_u, 0.0);
    EXPECT_EQ(n.hess_u, 0.0);
    EXPECT_NEAR(n.u_t, 1.0, 1e-12);
}

TEST(SupNorms, StaticSineLaplacian)
{
    const SpaceTimeGrid g(1, 256, 5, 1.0);
    const Field u = Field::sample(g, [](double x, double, double) { return 0.02 * std::sin(2 * pi * x); });
    EXPECT_NEAR(sup_norms(u, flat_problem(g, 1.0)).lap_u, 0.08 * pi * pi, 1e-4);
}

TEST(SupNorms, ManufacturedMatchesClosedForm)
{
    const manufactured::SineSolution ms;
    const SpaceTimeGrid g(1, 128, 129, 1.0);
    const SupNorms n = sup_norms(ms.sample_u(g), ms.problem(g));
    const double c = ms.amplitude;
    EXPECT_NEAR(n.grad_u, 2 * pi * c, 1e-3 * 2 * pi * c);
    EXPECT_NEAR(n.lap_u, 4 * pi * pi * c, 1e-3 * 4 * pi * pi * c);
    EXPECT_NEAR(n.u_tt, 1 + pi * pi * c, 1e-3);
    EXPECT_NEAR(n.grad_u_t, 2 * pi * pi * c, 1e-3 * 2 * pi * pi * c);
}

TEST(Lambda1, DiagonalHessian)
{
    // u = x² - y²/2 has Hessian diag(2, -1); skip nodes next to the seam.
    const SpaceTimeGrid g(2, 16, 5, 1.0);
    const Field u = Field::sample(g, [](double x, double y, double) { return x * x - 0.5 * y * y; });
    const Field l = lambda1(u, Metric(g.space));
    for (Index iy = 1; iy < 15; ++iy) {
        for (Index ix = 1; ix < 15; ++ix) {
            EXPECT_NEAR(l(g.space.node(ix, iy), 2), 2.0, 1e-9);
        }
    }
}

TEST(Lambda1, MatchesBruteForceEigensolve)
{
    const SpaceTimeGrid g(2, 16, 7, 1.0);
    const Metric m(g.space, manufactured::cos_bump_phi(g.space, 0.15, 2));
    const Field u = manufactured::smooth_test_field(g);
    const Field l = lambda1(u, m);
    const SymmetricField h = covariant_hessian(u, m);
    const Index ns = g.spatial_size();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
    for (Index i = 0; i < u.values.size(); ++i) {
        Eigen::Matrix2d a;
        a << h.xx.values[i], h.xy.values[i], h.xy.values[i], h.yy.values[i];
        eig.compute(m.inverse_scale(i % ns) * a, Eigen::EigenvaluesOnly);
        EXPECT_NEAR(l.values[i], eig.eigenvalues().maxCoeff(), 1e-12 * (1 + std::abs(l.values[i])));
    }
}

TEST(Lambda1, SymmetricForRadialBump)
{
    const SpaceTimeGrid g(2, 16, 5, 1.0);
    const Field u = Field::sample(g, [](double x, double y, double) {
        return std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.02);
    });
    const Field l = lambda1(u, Metric(g.space));
    for (Index iy = 0; iy < 16; ++iy) {
        for (Index ix = 0; ix < 16; ++ix) {
            const double v = l(g.space.node(ix, iy), 2);
            EXPECT_NEAR(v, l(g.space.node(iy, ix), 2), 1e-12);
            EXPECT_NEAR(v, l(g.space.node(16 - ix, iy), 2), 1e-12);
        }
    }
}

TEST(Lambda1, HessianNormControlledByLaplacianAndLambda1)
{
    const SpaceTimeGrid g(2, 24, 7, 1.0);
    const Metric m(g.space, manufactured::cos_bump_phi(g.space, 0.1));
    const Field u = manufactured::smooth_test_field(g);
    const Field norm = hessian_norm_g(covariant_hessian(u, m), m);
    const Field trace = hessian_trace_g(covariant_hessian(u, m), m);
    const Field l = lambda1(u, m);
    for (Index i = 0; i < u.values.size(); ++i) {
        EXPECT_LE(norm.values[i], 2.0 * (std::abs(trace.values[i]) + std::max(l.values[i], 0.0)) + 1e-10);
    }
}

TEST(HQuantity, TimeOnlyPath)
{
    const SpaceTimeGrid g(1, 8, 11, 1.0);
    const Field u = t_squared_minus_t(g);
    const ProblemData p = flat_problem(g, 2.0);
    EXPECT_EQ(h_quantity(u, p, 0.0).max_abs(), 0.0);
    const Field h1 = h_quantity(u, p, 1.0);
    for (int k = 0; k < g.nt; ++k) {
        EXPECT_NEAR(h1(3, k), g.t(k) * g.t(k), 1e-14);
    }
}

TEST(HQuantity, DirectionScanNeverExceedsClosedForm)
{
    const SpaceTimeGrid g(2, 12, 5, 1.0);
    const Metric m(g.space, manufactured::cos_bump_phi(g.space, 0.1));
    const ProblemData p = manufactured::plain_problem(g, m, 1.0, 0.0, Target::constant(1.0));
    const Field u = manufactured::smooth_test_field(g);
    const double A = 0.7;
    const Field h = h_quantity(u, p, A);
    const SymmetricField hess = covariant_hessian(u, m);
    const Field grad2 = grad_norm2(u, m);
    const Index ns = g.spatial_size();
    double worst = -1.0;
    double best_gap = 1.0;
    for (Index i = 0; i < u.values.size(); ++i) {
        const double t = g.t(int(i / ns));
        const double scale = m.inverse_scale(i % ns);
        double best = -1e300;
        for (int d = 0; d < 360; ++d) {
            const double c = std::cos(d * pi / 180);
            const double s = std::sin(d * pi / 180);
            // g-unit direction: coordinate components e^{-φ}(c, s).
            const double uxx = scale * (c * c * hess.xx.values[i] + 2 * c * s * hess.xy.values[i]
                                        + s * s * hess.yy.values[i]);
            best = std::max(best, uxx + grad2.values[i] + A * t * t);
        }
        worst = std::max(worst, best - h.values[i]);
        best_gap = std::min(best_gap, h.values[i] - best);
    }
    EXPECT_LE(worst, 1e-10);
    EXPECT_LT(best_gap, 1e-2);
}

TEST(HQuantity, ArgmaxInvariantUnderConstantShift)
{
    const SpaceTimeGrid g(2, 12, 7, 1.0);
    const ProblemData p = manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(1.0));
    const Field u = manufactured::smooth_test_field(g);
    const Field v(g, u.values.array() + 5.0);
    Index a = 0;
    Index b = 0;
    h_quantity(u, p, 1.0).values.maxCoeff(&a);
    h_quantity(v, p, 1.0).values.maxCoeff(&b);
    EXPECT_EQ(a, b);
}

TEST(Energy, LinearPath)
{
    const SpaceTimeGrid g(1, 16, 9, 1.0);
    const Field u = Field::sample(g, [](double, double, double t) { return t; });
    const EnergyReport e = energy_and_speed(u, flat_problem(g, 0.0));
    EXPECT_NEAR(e.energy, 1.0, 1e-12);
    for (double s : e.speed2) {
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_LT(e.drift, 1e-12);
    EXPECT_FALSE(e.formal);
}

TEST(Energy, QuadraticPathDriftIdentity)
{
    const SpaceTimeGrid g(1, 16, 21, 1.0);
    const EnergyReport e = energy_and_speed(t_squared_minus_t(g), flat_problem(g, 2.0));
    for (int k = 0; k < g.nt; ++k) {
        EXPECT_NEAR(e.speed2[std::size_t(k)], std::pow(2 * g.t(k) - 1, 2), 1e-12);
    }
    EXPECT_LT(e.drift, 1e-12);
}

TEST(Energy, DriftConvergesAtSecondOrder)
{
    std::vector<double> drift;
    for (const int n : {32, 64}) {
        const SpaceTimeGrid g(1, n, n / 2 + 1, 1.0);
        ProblemData p = flat_problem(g, 0.1);
        p.u1 = SpatialField::sample(g.space, [](double x, double) { return 0.02 * std::sin(2 * pi * x); });
        const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
        ASSERT_TRUE(r.converged);
        drift.push_back(energy_and_speed(r.u, p).drift);
    }
    EXPECT_GT(drift[0] / drift[1], 3.0);
    EXPECT_LT(drift[0] / drift[1], 5.5);
}

TEST(Energy, FormalWhenBIsPositive)
{
    const SpaceTimeGrid g(1, 16, 9, 1.0);
    ProblemData p = flat_problem(g, 1.0);
    p.b = 0.3;
    EXPECT_TRUE(energy_and_speed(t_squared_minus_t(g), p).formal);
}

TEST(ThirdDerivative, Examples)
{
    const SpaceTimeGrid g(1, 16, 9, 1.0);
    const Field poly = Field::sample(g, [](double, double, double t) { return t * t + 3 * t - 1; });
    EXPECT_LT(third_derivative_proxy(poly, Metric(g.space)), 1e-9);

    const SpaceTimeGrid fine(1, 256, 5, 1.0);
    const Field s = Field::sample(fine, [](double x, double, double) { return std::sin(2 * pi * x); });
    EXPECT_NEAR(third_derivative_proxy(s, Metric(fine.space)), 8 * pi * pi * pi, 8 * pi * pi * pi * 1e-3);
}

TEST(FillDiagnostics, ConvergedRowIsFiniteWithPositiveMargins)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    ProblemData p = flat_problem(g, 0.1);
    p.u1 = SpatialField::sample(g.space, [](double x, double) { return 0.02 * std::sin(2 * pi * x); });
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
    ASSERT_TRUE(r.converged);
    LadderRow row;
    fill_diagnostics(row, r.u, p);
    for (double v : {row.sup_u, row.sup_u_t, row.sup_grad_u, row.sup_u_tt, row.sup_grad_u_t,
                     row.sup_lap_u, row.sup_hess_u, row.max_lambda1, row.max_h, row.energy,
                     row.drift, row.third_derivative_proxy}) {
        EXPECT_TRUE(std::isfinite(v));
    }
    EXPECT_GT(row.min_u_tt, 0.0);
    EXPECT_GT(row.min_b_u, 0.0);
    EXPECT_GT(row.min_q, 0.0);
    EXPECT_GT(row.min_margin, 0.0);
    EXPECT_GE(row.max_margin, row.min_margin);
}
