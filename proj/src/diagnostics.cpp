#include "volgeo/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace volgeo {

namespace {

double sym2_max_eigenvalue(double a, double b, double c)
{
    const double mean = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    return mean + std::hypot(half_diff, b);
}

}  // namespace

Field lambda1(const Field& u, const Metric& m)
{
    const SymmetricField hess = covariant_hessian(u, m);
    Field out(u.grid);
    const Index ns = u.grid.spatial_size();
    for (Index i = 0; i < out.values.size(); ++i) {
        const double w = m.inverse_scale(i % ns);
        if (hess.dim == 1) {
            out.values[i] = hess.xx.values[i];
        }
        else {
            out.values[i] = w * sym2_max_eigenvalue(hess.xx.values[i], hess.xy.values[i],
                                                    hess.yy.values[i]);
        }
    }
    return out;
}

Field h_quantity(const Field& u, const ProblemData& p, double A)
{
    Field out = lambda1(u, p.metric);
    out.values += grad_norm2(u, p.metric).values;
    for (int k = 0; k < u.grid.nt; ++k) {
        const double t = u.grid.t(k);
        out.layer(k).array() += A * t * t;
    }
    return out;
}

SupNorms sup_norms(const Field& u, const ProblemData& p)
{
    const Metric& m = p.metric;
    const TimeDerivatives d = time_derivatives(u);
    Field grad_t2(u.grid);
    for (int i = 0; i < d.grad_u_t.dim(); ++i) {
        grad_t2.values += d.grad_u_t[i].values.cwiseAbs2();
    }
    const Index ns = u.grid.spatial_size();
    for (Index i = 0; i < grad_t2.values.size(); ++i) {
        grad_t2.values[i] *= m.inverse_scale(i % ns);
    }

    SupNorms n;
    n.u = u.max_abs();
    n.u_t = d.u_t.max_abs();
    n.grad_u = std::sqrt(grad_norm2(u, m).values.maxCoeff());
    n.u_tt = d.u_tt.max_abs();
    n.grad_u_t = std::sqrt(grad_t2.values.maxCoeff());
    n.lap_u = laplace_beltrami(u, m).max_abs();
    n.hess_u = hessian_norm_g(covariant_hessian(u, m), m).max_abs();
    n.max_lambda1 = lambda1(u, m).values.maxCoeff();
    return n;
}

EnergyReport energy_and_speed(const Field& u, const ProblemData& p)
{
    const SpaceTimeGrid& g = u.grid;
    const TimeDerivatives d = time_derivatives(u);
    const Field bu = b_u(u, p);
    const Field f = p.target.sampled(g);

    Field weighted(g);
    weighted.values = d.u_t.values.cwiseAbs2().cwiseProduct(bu.values);
    Field source(g);
    source.values = d.u_t.values.cwiseProduct(f.values);

    EnergyReport r;
    r.formal = p.b != 0.0;
    r.speed2.resize(std::size_t(g.nt));
    std::vector<double> flux(std::size_t(g.nt));
    for (int k = 0; k < g.nt; ++k) {
        r.speed2[std::size_t(k)] = integrate_layer(weighted, k, p.metric);
        flux[std::size_t(k)] = integrate_layer(source, k, p.metric);
    }
    r.energy = integrate(weighted, p.metric);

    const double ht = g.ht();
    double accumulated = 0.0;
    for (int k = 1; k < g.nt; ++k) {
        accumulated += 0.5 * ht * (flux[std::size_t(k - 1)] + flux[std::size_t(k)]);
        const double defect = r.speed2[std::size_t(k)] - r.speed2[0] - 2.0 * accumulated;
        r.drift = std::max(r.drift, std::abs(defect));
    }
    return r;
}

double third_derivative_proxy(const Field& u, const Metric& m)
{
    const SymmetricField hess = covariant_hessian(u, m);
    double sup = 0.0;
    auto scan = [&](const Field& entry) {
        const VectorField d = partial_gradient(entry);
        for (int i = 0; i < d.dim(); ++i) {
            sup = std::max(sup, d[i].max_abs());
        }
    };
    scan(hess.xx);
    if (hess.dim == 2) {
        scan(hess.xy);
        scan(hess.yy);
    }
    return sup;
}

void fill_diagnostics(LadderRow& row, const Field& u, const ProblemData& p,
                      const DiagnosticsOptions& opts)
{
    const SupNorms n = sup_norms(u, p);
    row.sup_u = n.u;
    row.sup_u_t = n.u_t;
    row.sup_grad_u = n.grad_u;
    row.sup_u_tt = n.u_tt;
    row.sup_grad_u_t = n.grad_u_t;
    row.sup_lap_u = n.lap_u;
    row.sup_hess_u = n.hess_u;
    row.max_lambda1 = n.max_lambda1;
    row.max_h = h_quantity(u, p, opts.A).values.maxCoeff();

    const Margins mg = margins(u, p);
    row.min_u_tt = mg.min_u_tt;
    row.min_b_u = mg.min_b_u;
    row.min_q = mg.min_q;
    row.min_margin = mg.min();
    row.max_margin = mg.max_node_margin;

    const EnergyReport e = energy_and_speed(u, p);
    row.energy = e.energy;
    row.drift = e.drift;
    row.energy_formal = e.formal;
    row.third_derivative_proxy = third_derivative_proxy(u, p.metric);
}

}  // namespace volgeo
