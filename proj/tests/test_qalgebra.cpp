#include "volgeo/qalgebra.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace volgeo;

namespace {

Jet<double> jet(std::initializer_list<double> v)
{
    Jet<double> r(Index(v.size()));
    Index i = 0;
    for (double x : v) {
        r[i++] = x;
    }
    return r;
}

Jet<double> random_admissible(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    Jet<double> r(n + 2);
    r[0] = pos(rng);
    r[1] = pos(rng);
    Eigen::VectorXd dir(n);
    for (int i = 0; i < n; ++i) {
        dir[i] = normal(rng);
    }
    const double radius = std::sqrt(0.99 * r[0] * r[1]) * std::pow(unit(rng), 1.0 / n);
    r.tail(n) = radius * dir.normalized();
    return r;
}

}  // namespace

TEST(Q, Examples)
{
    EXPECT_DOUBLE_EQ(q_value(jet({2, 3, 1})), 5.0);
    EXPECT_DOUBLE_EQ(q_value(jet({1, 1, 0, 0})), 1.0);
    EXPECT_DOUBLE_EQ(q_value(jet({1, 1, 1})), 0.0);
    const Jet<double> g = q_grad(jet({2, 3, 1}));
    EXPECT_DOUBLE_EQ(g[0], 3.0);
    EXPECT_DOUBLE_EQ(g[1], 2.0);
    EXPECT_DOUBLE_EQ(g[2], -2.0);
}

TEST(Q, HessianIsConstant)
{
    const JetMatrix<double> h = q_hess(4);
    EXPECT_EQ(h(0, 1), 1.0);
    EXPECT_EQ(h(1, 0), 1.0);
    EXPECT_EQ(h(2, 2), -2.0);
    EXPECT_EQ(h(3, 3), -2.0);
    EXPECT_EQ(h(0, 0), 0.0);
}

TEST(G, ExampleAtUnitJet)
{
    const Jet<double> r = jet({1, 1, 0});
    EXPECT_DOUBLE_EQ(g_value(r), 0.0);
    EXPECT_TRUE(g_grad(r).isApprox(jet({1, 1, 0})));
    Eigen::SelfAdjointEigenSolver<JetMatrix<double>> eig(g_hess(r));
    Eigen::VectorXd ev = eig.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    EXPECT_NEAR(ev[0], -2.0, 1e-14);
    EXPECT_NEAR(ev[1], -1.0, 1e-14);
    EXPECT_NEAR(ev[2], -1.0, 1e-14);
}

TEST(G, ThrowsOutsideCone)
{
    EXPECT_THROW(g_value(jet({1, 1, 1})), InadmissibleJet);
    EXPECT_THROW(g_grad(jet({1, 1, 2})), InadmissibleJet);
}

TEST(G, ScalingLaw)
{
    const Jet<double> r = jet({2, 0.7, 0.3, -0.5});
    for (double lambda : {0.1, 3.0, 17.0}) {
        EXPECT_NEAR(g_value(Jet<double>(lambda * r)), g_value(r) + 2 * std::log(lambda), 1e-13);
    }
}

TEST(Q, EulerRelation)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Jet<double> r = random_admissible(rng, 2);
        EXPECT_NEAR(r.dot(q_grad(r)), 2 * q_value(r), 1e-12 * (1 + r.squaredNorm()));
    }
}

TEST(G, GradientMatchesCentralDifferences)
{
    const Jet<double> r = jet({1.3, 0.8, 0.2, -0.4});
    std::vector<double> err;
    for (double h : {1e-2, 5e-3}) {
        Jet<double> fd(r.size());
        for (Index i = 0; i < r.size(); ++i) {
            Jet<double> rp = r;
            Jet<double> rm = r;
            rp[i] += h;
            rm[i] -= h;
            fd[i] = (g_value(rp) - g_value(rm)) / (2 * h);
        }
        err.push_back((fd - g_grad(r)).cwiseAbs().maxCoeff());
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
}

TEST(G, HessianMatchesFiniteDifferenceOfGradient)
{
    const Jet<double> r = jet({0.9, 2.1, 0.5});
    const double h = 1e-5;
    JetMatrix<double> fd(3, 3);
    for (Index i = 0; i < 3; ++i) {
        Jet<double> rp = r;
        Jet<double> rm = r;
        rp[i] += h;
        rm[i] -= h;
        fd.col(i) = (g_grad(rp) - g_grad(rm)) / (2 * h);
    }
    EXPECT_LT((fd - g_hess(r)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(G, ConcaveOnRandomJets)
{
    std::mt19937_64 rng(20180723);
    Eigen::SelfAdjointEigenSolver<JetMatrix<double>> eig;
    for (int n : {1, 2, 3}) {
        for (int i = 0; i < 2000; ++i) {
            const JetMatrix<double> h = g_hess(random_admissible(rng, n));
            eig.compute(h, Eigen::EigenvaluesOnly);
            EXPECT_LE(eig.eigenvalues().maxCoeff(), 1e-10 * (1 + h.norm()));
        }
    }
}

TEST(Admissibility, Examples)
{
    const Admissibility ok = is_admissible(jet({1, 1, 0}));
    EXPECT_TRUE(ok.admissible);
    EXPECT_DOUBLE_EQ(ok.margin, 1.0);
    EXPECT_FALSE(is_admissible(jet({-1, 1, 0})).admissible);
    EXPECT_FALSE(is_admissible(jet({1, 1, 1})).admissible);
    EXPECT_FALSE(is_admissible(jet({1, 1e-13, 0})).admissible);
    EXPECT_TRUE(is_admissible(jet({1, 1e-13, 0}), 1e-14).admissible);
}

TEST(Q, FloatInstantiation)
{
    Jet<float> r(3);
    r << 2.0f, 3.0f, 1.0f;
    EXPECT_FLOAT_EQ(q_value(r), 5.0f);
    EXPECT_FLOAT_EQ(g_value(r), std::log(5.0f));
}
