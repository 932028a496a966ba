#include "volgeo/manufactured.hpp"
#include "volgeo/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace volgeo;
using std::numbers::pi;

namespace {

ProblemData sine_endpoint_problem(const SpaceTimeGrid& g, double eps, bool symmetric = false)
{
    ProblemData p = manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(eps));
    p.u1 = SpatialField::sample(g.space, [](double x, double) { return 0.02 * std::sin(2 * pi * x); });
    if (symmetric) {
        p.u0 = p.u1;
    }
    return p;
}

}  // namespace

TEST(SolverConfig, ValidationAndLevels)
{
    SolverConfig cfg;
    const auto levels = cfg.ladder_levels();
    ASSERT_EQ(levels.size(), 4u);
    EXPECT_DOUBLE_EQ(levels.front(), 0.1);
    EXPECT_NEAR(levels.back(), 1e-4, 1e-18);

    cfg.ratio = 1.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.newton_tol = -1;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(InitialPath, TrivialEndpoints)
{
    const SpaceTimeGrid g(1, 16, 9, 1.0);
    const ProblemData p = manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(2.0));
    const Field u = initial_path(p, 1.0);
    for (const Jet<double>& r : jets(u, p)) {
        EXPECT_NEAR(r[0], 2.0, 1e-12);
        EXPECT_NEAR(r[1], 1.0, 1e-12);
        EXPECT_NEAR(q_value(r), 2.0, 1e-12);
    }
}

TEST(InitialPath, SineEndpointIsAdmissible)
{
    const SpaceTimeGrid g(1, 128, 65, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.1);
    const SpatialField b1 = b_u(p.u1, p.metric, p.a, p.b);
    EXPECT_NEAR(b1.values.minCoeff(), 1 - 0.08 * pi * pi, 1e-3);
    EXPECT_GT(margins(initial_path(p, 1.0), p).min(), 0.0);
}

TEST(InitialPath, PositiveBDominatesEndpointCombination)
{
    const SpaceTimeGrid g(1, 32, 9, 1.0);
    ProblemData p = sine_endpoint_problem(g, 0.1);
    p.b = 0.7;
    p.u0 = SpatialField::sample(g.space, [](double x, double) { return 0.01 * std::cos(2 * pi * x); });
    const Field u = initial_path(p, 1.0);
    const Field bu = b_u(u, p);
    const SpatialField b0 = b_u(p.u0, p.metric, p.a, p.b);
    const SpatialField b1 = b_u(p.u1, p.metric, p.a, p.b);
    for (int k = 0; k < g.nt; ++k) {
        const double t = g.t(k);
        for (Index s = 0; s < g.spatial_size(); ++s) {
            EXPECT_GE(bu(s, k), (1 - t) * b0.values[s] + t * b1.values[s] - 1e-12);
        }
    }
}

TEST(Newton, ExactStartNeedsNoSteps)
{
    const SpaceTimeGrid g(2, 8, 9, 1.0);
    const ProblemData p = manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(2.0));
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_LT(r.residual, 1e-12);
}

TEST(Newton, ManufacturedSolutionRecovery)
{
    const manufactured::SineSolution ms;
    std::vector<double> err;
    for (const int n : {32, 64}) {
        const SpaceTimeGrid g(1, n, n + 1, 1.0);
        const ProblemData p = ms.problem(g);
        EXPECT_GT(ms.sample_f(g).values.minCoeff(), 0.5);
        const SolveResult r = newton_solve(p, initial_path(p, default_bulge(p, {})), SolverConfig{});
        ASSERT_TRUE(r.converged) << r.message;
        EXPECT_LE(r.iterations, 10);
        EXPECT_LE(r.residual, 1e-10);
        err.push_back((r.u.values - ms.sample_u(g).values).cwiseAbs().maxCoeff());
    }
    EXPECT_GT(err[0] / err[1], 3.0);
    EXPECT_LT(err[0] / err[1], 5.5);
}

TEST(Newton, QuadraticTail)
{
    const SpaceTimeGrid g(1, 64, 33, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.01);
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
    ASSERT_TRUE(r.converged);
    const auto& h = r.residual_history;
    int checked = 0;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
        if (h[k] < 1e-3 && h[k + 1] > 1e-13) {
            EXPECT_LE(h[k + 1], 100.0 * h[k] * h[k]) << "step " << k;
            ++checked;
        }
    }
    EXPECT_GE(checked, 1);
}

TEST(Newton, MonotoneResidualAndConePreserved)
{
    const SpaceTimeGrid g(2, 16, 9, 1.0);
    const Metric m(g.space, manufactured::cos_bump_phi(g.space, 0.1));
    ProblemData p = manufactured::plain_problem(g, m, 1.0, 0.5, Target::constant(0.05));
    p.u1 = SpatialField::sample(g.space, [](double x, double y) {
        return 0.01 * std::sin(2 * pi * x) * std::cos(2 * pi * y);
    });
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
    ASSERT_TRUE(r.converged) << r.message;
    for (std::size_t k = 0; k + 1 < r.residual_history.size(); ++k) {
        EXPECT_LE(r.residual_history[k + 1], r.residual_history[k]);
    }
    EXPECT_GT(r.margins.min(), kDefaultAdmissibilityFloor);
}

TEST(Newton, BoundaryLayersAreExact)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.01);
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), SolverConfig{});
    ASSERT_TRUE(r.converged);
    EXPECT_TRUE(r.u.layer(0) == p.u0.values);
    EXPECT_TRUE(r.u.layer(g.nt - 1) == p.u1.values);
}

TEST(Newton, TimeReflectionSymmetry)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.05, true);
    SolverConfig cfg;
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), cfg);
    ASSERT_TRUE(r.converged);
    double asym = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        asym = std::max(asym, (r.u.layer(k) - r.u.layer(g.nt - 1 - k)).cwiseAbs().maxCoeff());
    }
    EXPECT_LE(asym, 10 * cfg.newton_tol);
}

TEST(Newton, RejectsMismatchedStart)
{
    const SpaceTimeGrid g(1, 16, 9, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.1);
    Field u = initial_path(p, 1.0);
    u(0, 0) += 1e-3;
    EXPECT_THROW(newton_solve(p, u, SolverConfig{}), InvalidProblem);
}

TEST(Newton, IterationCapReportsStatus)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.01);
    SolverConfig cfg;
    cfg.max_newton_iters = 1;
    const SolveResult r = newton_solve(p, initial_path(p, 1.0), cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.status, SolveStatus::MaxIterations);
}

TEST(Ladder, TrivialEndpointsReproduceClosedForm)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    const ProblemData p = manufactured::plain_problem(g, Metric(g.space), 1.0, 0.0, Target::constant(0.1));
    const LadderRun run = epsilon_ladder(p, SolverConfig{});
    ASSERT_TRUE(run.complete);
    ASSERT_EQ(run.rungs.size(), 4u);
    for (const LadderRung& rung : run.rungs) {
        const double eps = rung.row.level;
        const Field exact = Field::sample(g, [&](double, double, double t) { return 0.5 * eps * t * (t - 1); });
        EXPECT_LE((rung.result.u.values - exact.values).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(rung.row.sup_hess_u, 1e-10);
    }
}

TEST(Ladder, WarmStartsStayAdmissible)
{
    const SpaceTimeGrid g(1, 64, 33, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.1);
    const LadderRun run = epsilon_ladder(p, SolverConfig{});
    ASSERT_TRUE(run.complete) << run.message;
    EXPECT_EQ(run.report.level_name, "epsilon");
    for (std::size_t k = 1; k < run.rungs.size(); ++k) {
        const auto& h = run.rungs[k].result.residual_history;
        ASSERT_FALSE(h.empty());
        const double jump = run.rungs[k - 1].row.level - run.rungs[k].row.level;
        EXPECT_NEAR(h.front(), jump, 1e-8);
        EXPECT_GT(run.rungs[k].row.min_margin, 0.0);
    }
}

TEST(Ladder, DegenerateTargetUsesDeltaShift)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    ProblemData p = sine_endpoint_problem(g, 0.1);
    const Field f = Field::sample(g, [](double x, double, double) {
        const double c = 1 - std::cos(2 * pi * x);
        return 0.01 * c * c;
    });
    p.target = Target::field(f, 0.1);
    SolverConfig cfg;
    cfg.epsilon_min = 1e-3;
    const LadderRun run = epsilon_ladder(p, cfg);
    EXPECT_EQ(run.report.level_name, "delta");
    ASSERT_TRUE(run.complete) << run.message;
    const ProblemData last = [&] {
        ProblemData q = p;
        q.target = p.target.with_level(run.rungs.back().row.level);
        return q;
    }();
    EXPECT_LE(residual(run.rungs.back().result.u, last).max_abs(), cfg.newton_tol);
}

TEST(Ladder, FirstRungFailureIsConfigurationError)
{
    const SpaceTimeGrid g(1, 32, 17, 1.0);
    const ProblemData p = sine_endpoint_problem(g, 0.1);
    SolverConfig cfg;
    cfg.max_newton_iters = 0;
    EXPECT_THROW(epsilon_ladder(p, cfg), ConfigurationError);
}
