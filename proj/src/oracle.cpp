#include "volgeo/oracle.hpp"

#include "volgeo/qalgebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace volgeo {

namespace {

double interior_sup(const Field& f)
{
    const SpaceTimeGrid& g = f.grid;
    double sup = 0.0;
    for (int k = 1; k + 1 < g.nt; ++k) {
        sup = std::max(sup, f.layer(k).cwiseAbs().maxCoeff());
    }
    return sup;
}

Field product(const Field& a, const Field& b)
{
    Field out = a;
    out.values = a.values.cwiseProduct(b.values);
    return out;
}

// Spatial field broadcast to every time layer.
Field broadcast(const SpaceTimeGrid& g, const SpatialField& s)
{
    Field out(g);
    for (int k = 0; k < g.nt; ++k) {
        out.layer(k) = s.values;
    }
    return out;
}

Field grad_t_norm2(const TimeDerivatives& d, const Metric& m)
{
    return inner_g(d.grad_u_t, d.grad_u_t, m);
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double n = double(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

LinearizationReport check_linearization(const Field& u, const Field& psi, const ProblemData& p,
                                        const std::vector<double>& h_ladder)
{
    const SpaceTimeGrid& g = u.grid;
    if (!psi.layer(0).isZero(0.0) || !psi.layer(g.nt - 1).isZero(0.0)) {
        throw Error("linearization direction must vanish on the boundary layers");
    }
    const Field q0 = q_of(u, p);
    const Field dq = apply_dq(u, psi, p);

    LinearizationReport r;
    for (const double h : h_ladder) {
        Field plus = u;
        plus.values += h * psi.values;
        Field minus = u;
        minus.values -= h * psi.values;
        if (!(margins(plus, p).min() > kDefaultAdmissibilityFloor)
            || !(margins(minus, p).min() > kDefaultAdmissibilityFloor)) {
            continue;
        }
        const Field qp = q_of(plus, p);
        const Field qm = q_of(minus, p);
        Field taylor = qp;
        taylor.values -= q0.values + h * dq.values;
        Field central = qp;
        central.values = (qp.values - qm.values) / (2.0 * h) - dq.values;
        r.h.push_back(h);
        r.taylor_remainder.push_back(interior_sup(taylor));
        r.central_error.push_back(interior_sup(central));
    }
    r.slope = loglog_slope(r.h, r.taylor_remainder);
    return r;
}

double check_gradient_identity(const Field& u, const ProblemData& p)
{
    const Metric& m = p.metric;
    const SpaceTimeGrid& g = u.grid;
    const TimeDerivatives d = time_derivatives(u);
    const Field f = q_of(u, p);
    const Field bu = b_u(u, p);
    const VectorField du = partial_gradient(u);

    auto pair = [&](const Field& s) { return inner_g(du, partial_gradient(s), m); };

    const Field du_f = pair(f);
    const Field du_a = pair(broadcast(g, p.a));
    const Field du_lap = pair(laplace_beltrami(u, m));
    const Field du_grad2 = pair(grad_norm2(u, m));
    const Field du_utt = pair(d.u_tt);
    const Field du_gradt2 = pair(grad_t_norm2(d, m));

    Field defect(g);
    defect.values = 2.0 * du_f.values - 2.0 * d.u_tt.values.cwiseProduct(du_a.values)
                    - (2.0 * d.u_tt.values.cwiseProduct(du_lap.values)
                       - 2.0 * p.b * d.u_tt.values.cwiseProduct(du_grad2.values)
                       + 2.0 * bu.values.cwiseProduct(du_utt.values) - 2.0 * du_gradt2.values);
    return interior_sup(defect);
}

double check_bochner_identity(const Field& u, const ProblemData& p)
{
    const Metric& m = p.metric;
    const SpaceTimeGrid& g = u.grid;
    const Index ns = g.spatial_size();
    const TimeDerivatives d = time_derivatives(u);
    const Field f = q_of(u, p);
    const Field bu = b_u(u, p);
    const VectorField du = partial_gradient(u);
    const Field grad2 = grad_norm2(u, m);

    const Field lhs = apply_dq(u, grad2, p);

    const Field ric = product(broadcast(g, m.curvature()), grad2);
    const Field du_a = inner_g(du, partial_gradient(broadcast(g, p.a)), m);
    const Field du_f = inner_g(du, partial_gradient(f), m);
    const SymmetricField hess = covariant_hessian(u, m);
    const Field hess2 = [&] {
        Field n = hessian_norm_g(hess, m);
        n.values = n.values.cwiseAbs2();
        return n;
    }();
    const Field gradt2 = grad_t_norm2(d, m);

    // Σ u_ti u_tj u_ij with both indices raised: e^{-4φ} Σ ∂_i u_t ∂_j u_t (∇²u)_ij.
    Field cross(g);
    for (Index i = 0; i < cross.values.size(); ++i) {
        const double w = m.inverse_scale(i % ns);
        double acc = d.grad_u_t[0].values[i] * d.grad_u_t[0].values[i] * hess.xx.values[i];
        if (hess.dim == 2) {
            const double ax = d.grad_u_t[0].values[i];
            const double ay = d.grad_u_t[1].values[i];
            acc += 2.0 * ax * ay * hess.xy.values[i] + ay * ay * hess.yy.values[i];
        }
        cross.values[i] = w * w * acc;
    }

    Field defect(g);
    defect.values = lhs.values
                    - (2.0 * d.u_tt.values.cwiseProduct(ric.values - du_a.values)
                       + 2.0 * du_f.values + 2.0 * d.u_tt.values.cwiseProduct(hess2.values)
                       + 2.0 * bu.values.cwiseProduct(gradt2.values) - 4.0 * cross.values);
    return interior_sup(defect);
}

ConcavityReport check_concavity(Index samples, std::uint64_t seed, int n)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    ConcavityReport r;
    r.samples = samples;
    r.max_normalized_eigenvalue = -std::numeric_limits<double>::infinity();
    r.max_eigenvalue = -std::numeric_limits<double>::infinity();
    r.min_normalized_form = std::numeric_limits<double>::infinity();

    Jet<double> jet(n + 2);
    Jet<double> dir(n);
    Jet<double> v(n + 2);
    Eigen::SelfAdjointEigenSolver<JetMatrix<double>> eig;
    for (Index s = 0; s < samples; ++s) {
        // (0, 10]: 1 - U lies in (0, 1].
        jet[0] = 10.0 * (1.0 - unit(rng));
        jet[1] = 10.0 * (1.0 - unit(rng));
        for (int i = 0; i < n; ++i) {
            dir[i] = normal(rng);
        }
        const double radius = std::sqrt(0.99 * jet[0] * jet[1]) * std::pow(unit(rng), 1.0 / n);
        jet.tail(n) = radius * dir.normalized();

        const JetMatrix<double> h = g_hess(jet);
        eig.compute(h, Eigen::EigenvaluesOnly);
        const double lmax = eig.eigenvalues().maxCoeff();
        const double scale = 1.0 + eig.eigenvalues().cwiseAbs().maxCoeff();
        r.max_eigenvalue = std::max(r.max_eigenvalue, lmax);
        r.max_normalized_eigenvalue = std::max(r.max_normalized_eigenvalue, lmax / scale);

        for (Index i = 0; i < v.size(); ++i) {
            v[i] = normal(rng);
        }
        const double form = -v.dot(h * v) / (v.squaredNorm() * scale);
        r.min_normalized_form = std::min(r.min_normalized_form, form);
    }
    return r;
}

RayScan concavity_ray_scan(int n, int steps)
{
    RayScan scan;
    Eigen::SelfAdjointEigenSolver<JetMatrix<double>> eig;
    for (int k = 1; k <= steps; ++k) {
        // s -> 1 geometrically: Q = 1 - s² = 2^{-k}(2 - 2^{-k}).
        const double gap = std::ldexp(1.0, -k);
        Jet<double> r = Jet<double>::Zero(n + 2);
        r[0] = 1.0;
        r[1] = 1.0;
        r[2] = 1.0 - gap;
        eig.compute(g_hess(r), Eigen::EigenvaluesOnly);
        scan.q.push_back(q_value(r));
        scan.min_eigenvalue.push_back(eig.eigenvalues().minCoeff());
        scan.max_eigenvalue.push_back(eig.eigenvalues().maxCoeff());
        scan.max_normalized_eigenvalue.push_back(
            eig.eigenvalues().maxCoeff() / (1.0 + eig.eigenvalues().cwiseAbs().maxCoeff()));
    }
    return scan;
}

double check_flat_commutation(const Field& u, const Metric& m)
{
    if (!m.is_flat()) {
        throw Error("stencil commutation is only an identity on flat metrics");
    }
    const SymmetricField h = flat_hessian(u);
    const SymmetricField h_lap = flat_hessian(flat_laplacian(u));
    double sup = 0.0;
    auto compare = [&](const Field& entry, const Field& entry_of_lap) {
        const Field lap_entry = flat_laplacian(entry);
        sup = std::max(sup, (lap_entry.values - entry_of_lap.values).cwiseAbs().maxCoeff());
    };
    compare(h.xx, h_lap.xx);
    if (h.dim == 2) {
        compare(h.xy, h_lap.xy);
        compare(h.yy, h_lap.yy);
    }
    return sup;
}

double cauchy_schwarz_slack(const Field& u, const ProblemData& p)
{
    const TimeDerivatives d = time_derivatives(u);
    const Field bu = b_u(u, p);
    const Field gradt2 = grad_t_norm2(d, p.metric);
    const SpaceTimeGrid& g = u.grid;
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 1; k + 1 < g.nt; ++k) {
        for (Index s = 0; s < g.spatial_size(); ++s) {
            const double prod = d.u_tt(s, k) * bu(s, k);
            const double bound = prod > 0.0 ? std::sqrt(prod) : -std::sqrt(-prod);
            slack = std::min(slack, bound - std::sqrt(gradt2(s, k)));
        }
    }
    return slack;
}

RefinementStudy refinement_study(const std::vector<int>& nx,
                                 const std::function<double(int nx)>& error_at)
{
    RefinementStudy study;
    study.nx = nx;
    for (const int n : nx) {
        study.error.push_back(error_at(n));
    }
    for (std::size_t i = 0; i + 1 < study.error.size(); ++i) {
        study.ratios.push_back(study.error[i] / study.error[i + 1]);
    }
    return study;
}

}  // namespace volgeo
