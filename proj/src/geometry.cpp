#include "volgeo/geometry.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace volgeo {

SpatialGrid::SpatialGrid(int dim_, int nx_, double length_)
    : dim(dim_)
    , nx(nx_)
    , length(length_)
{
    if (dim != 1 && dim != 2) {
        throw Error("spatial dimension must be 1 or 2");
    }
    if (nx < 8) {
        throw Error("need at least 8 nodes per spatial dimension");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw Error("torus length must be positive");
    }
}

Index SpatialGrid::node(Index ix, Index iy) const
{
    const Index n = nx;
    ix = ((ix % n) + n) % n;
    if (dim == 1) {
        return ix;
    }
    iy = ((iy % n) + n) % n;
    return iy * n + ix;
}

Index SpatialGrid::shift(Index s, int axis, Index offset) const
{
    const Index ix = coord(s, 0);
    const Index iy = dim == 2 ? coord(s, 1) : 0;
    return axis == 0 ? node(ix + offset, iy) : node(ix, iy + offset);
}

SpaceTimeGrid::SpaceTimeGrid(SpatialGrid space_, int nt_)
    : space(std::move(space_))
    , nt(nt_)
{
    if (nt < 5) {
        throw Error("need at least 5 time layers");
    }
}

SpatialField::SpatialField(const SpatialGrid& g, Eigen::VectorXd v)
    : grid(g)
    , values(std::move(v))
{
    if (values.size() != g.size()) {
        throw Error("spatial field size does not match grid");
    }
}

Field::Field(const SpaceTimeGrid& g, Eigen::VectorXd v)
    : grid(g)
    , values(std::move(v))
{
    if (values.size() != g.size()) {
        throw Error("field size does not match grid");
    }
}

namespace {

const SpatialGrid& space_of(const SpatialField& f) { return f.grid; }
const SpatialGrid& space_of(const Field& f) { return f.grid.space; }
Index layers_of(const SpatialField&) { return 1; }
Index layers_of(const Field& f) { return f.grid.nt; }

template <typename F>
F zeros_like(const F& u)
{
    F out = u;
    out.values.setZero();
    return out;
}

// Applies a spatial stencil layer by layer; fn(values, layer offset, node) -> value.
template <typename F, typename Fn>
F map_nodes(const F& u, Fn&& fn)
{
    F out = zeros_like(u);
    const SpatialGrid& g = space_of(u);
    const Index ns = g.size();
    for (Index k = 0; k < layers_of(u); ++k) {
        const Index off = k * ns;
        for (Index s = 0; s < ns; ++s) {
            out.values[off + s] = fn(off, s);
        }
    }
    return out;
}

template <typename F>
F laplacian_impl(const F& u)
{
    const SpatialGrid& g = space_of(u);
    const double inv_h2 = 1.0 / (g.hx() * g.hx());
    const auto& v = u.values;
    return map_nodes(u, [&](Index off, Index s) {
        double acc = 0.0;
        for (int axis = 0; axis < g.dim; ++axis) {
            acc += v[off + g.shift(s, axis, 1)] - 2.0 * v[off + s] + v[off + g.shift(s, axis, -1)];
        }
        return acc * inv_h2;
    });
}

template <typename F>
F scale_by_inverse_metric(F u, const Metric& m)
{
    if (m.is_flat()) {
        return u;
    }
    const Index ns = m.grid().size();
    for (Index i = 0; i < u.values.size(); ++i) {
        u.values[i] *= m.inverse_scale(i % ns);
    }
    return u;
}

template <typename F>
VectorOf<F> gradient_impl(const F& u)
{
    const SpatialGrid& g = space_of(u);
    const double inv_2h = 0.5 / g.hx();
    const auto& v = u.values;
    VectorOf<F> out;
    for (int axis = 0; axis < g.dim; ++axis) {
        out.components.push_back(map_nodes(u, [&](Index off, Index s) {
            return (v[off + g.shift(s, axis, 1)] - v[off + g.shift(s, axis, -1)]) * inv_2h;
        }));
    }
    return out;
}

template <typename F>
F inner_impl(const VectorOf<F>& du, const VectorOf<F>& dv, const Metric& m)
{
    F out = zeros_like(du[0]);
    for (int i = 0; i < du.dim(); ++i) {
        out.values += du[i].values.cwiseProduct(dv[i].values);
    }
    return scale_by_inverse_metric(std::move(out), m);
}

template <typename F>
SymmetricOf<F> flat_hessian_impl(const F& u)
{
    const SpatialGrid& g = space_of(u);
    const double h = g.hx();
    const auto& v = u.values;
    SymmetricOf<F> out;
    out.dim = g.dim;
    auto second = [&](int axis) {
        return map_nodes(u, [&, axis](Index off, Index s) {
            return (v[off + g.shift(s, axis, 1)] - 2.0 * v[off + s] + v[off + g.shift(s, axis, -1)])
                   / (h * h);
        });
    };
    out.xx = second(0);
    if (g.dim == 2) {
        out.yy = second(1);
        out.xy = map_nodes(u, [&](Index off, Index s) {
            const Index e = g.shift(s, 0, 1);
            const Index w = g.shift(s, 0, -1);
            return (v[off + g.shift(e, 1, 1)] - v[off + g.shift(w, 1, 1)] - v[off + g.shift(e, 1, -1)]
                    + v[off + g.shift(w, 1, -1)])
                   / (4.0 * h * h);
        });
    }
    else {
        out.xy = zeros_like(u);
        out.yy = zeros_like(u);
    }
    return out;
}

template <typename F>
SymmetricOf<F> covariant_hessian_impl(const F& u, const Metric& m)
{
    SymmetricOf<F> hess = flat_hessian_impl(u);
    if (m.is_flat()) {
        return hess;
    }
    const SpatialVectorField dphi = gradient_impl(m.phi());
    const VectorOf<F> du = gradient_impl(u);
    const Index ns = m.grid().size();
    for (Index i = 0; i < u.values.size(); ++i) {
        const Index s = i % ns;
        const double px = dphi[0][s];
        const double py = dphi[1][s];
        const double ux = du[0].values[i];
        const double uy = du[1].values[i];
        hess.xx.values[i] += -px * ux + py * uy;
        hess.yy.values[i] += px * ux - py * uy;
        hess.xy.values[i] += -py * ux - px * uy;
    }
    return hess;
}

}  // namespace

Metric::Metric(const SpatialGrid& grid)
    : Metric(grid, SpatialField(grid, 0.0))
{}

Metric::Metric(const SpatialGrid& grid, SpatialField phi)
    : grid_(grid)
    , phi_(std::move(phi))
{
    if (!(phi_.grid == grid_)) {
        throw Error("conformal exponent lives on a different grid");
    }
    if (!phi_.values.allFinite()) {
        throw Error("conformal exponent must be finite");
    }
    flat_ = phi_.values.isZero(0.0);
    if (grid_.dim == 1 && !flat_) {
        throw Error("one-dimensional metrics are flat; encode the geometry in the length");
    }
    inverse_scale_ = (-2.0 * phi_.values.array()).exp().matrix();
    volume_weight_ = (double(grid_.dim) * phi_.values.array()).exp().matrix();
    curvature_ = laplacian_impl(phi_);
    curvature_.values = -inverse_scale_.cwiseProduct(curvature_.values);
    if (grid_.dim == 1) {
        curvature_.values.setZero();
    }
}

SpatialField flat_laplacian(const SpatialField& u) { return laplacian_impl(u); }
Field flat_laplacian(const Field& u) { return laplacian_impl(u); }

SpatialField laplace_beltrami(const SpatialField& u, const Metric& m)
{
    return scale_by_inverse_metric(laplacian_impl(u), m);
}

Field laplace_beltrami(const Field& u, const Metric& m)
{
    return scale_by_inverse_metric(laplacian_impl(u), m);
}

SpatialVectorField partial_gradient(const SpatialField& u) { return gradient_impl(u); }
VectorField partial_gradient(const Field& u) { return gradient_impl(u); }

SpatialVectorField gradient_g(const SpatialField& u, const Metric& m)
{
    auto du = gradient_impl(u);
    for (auto& c : du.components) {
        c = scale_by_inverse_metric(std::move(c), m);
    }
    return du;
}

VectorField gradient_g(const Field& u, const Metric& m)
{
    auto du = gradient_impl(u);
    for (auto& c : du.components) {
        c = scale_by_inverse_metric(std::move(c), m);
    }
    return du;
}

Field inner_g(const VectorField& du, const VectorField& dv, const Metric& m)
{
    return inner_impl(du, dv, m);
}

SpatialField inner_g(const SpatialVectorField& du, const SpatialVectorField& dv, const Metric& m)
{
    return inner_impl(du, dv, m);
}

Field grad_norm2(const Field& u, const Metric& m)
{
    const auto du = gradient_impl(u);
    return inner_impl(du, du, m);
}

SpatialField grad_norm2(const SpatialField& u, const Metric& m)
{
    const auto du = gradient_impl(u);
    return inner_impl(du, du, m);
}

SpatialSymmetricField flat_hessian(const SpatialField& u) { return flat_hessian_impl(u); }
SymmetricField flat_hessian(const Field& u) { return flat_hessian_impl(u); }

SpatialSymmetricField covariant_hessian(const SpatialField& u, const Metric& m)
{
    return covariant_hessian_impl(u, m);
}

SymmetricField covariant_hessian(const Field& u, const Metric& m)
{
    return covariant_hessian_impl(u, m);
}

Field hessian_trace_g(const SymmetricField& hess, const Metric& m)
{
    Field tr = hess.xx;
    if (hess.dim == 2) {
        tr.values += hess.yy.values;
    }
    return scale_by_inverse_metric(std::move(tr), m);
}

Field hessian_norm_g(const SymmetricField& hess, const Metric& m)
{
    Field out = hess.xx;
    out.values = hess.xx.values.cwiseAbs2();
    if (hess.dim == 2) {
        out.values += hess.yy.values.cwiseAbs2() + 2.0 * hess.xy.values.cwiseAbs2();
    }
    // e^{-4φ} under the square root is e^{-2φ} outside it.
    out.values = out.values.cwiseSqrt();
    return scale_by_inverse_metric(std::move(out), m);
}

TimeDerivatives time_derivatives(const Field& u)
{
    const SpaceTimeGrid& g = u.grid;
    const double ht = g.ht();
    const int last = g.nt - 1;
    TimeDerivatives d{Field(g), Field(g), {}};
    for (Index s = 0; s < g.spatial_size(); ++s) {
        for (int k = 1; k < last; ++k) {
            d.u_t(s, k) = (u(s, k + 1) - u(s, k - 1)) / (2.0 * ht);
            d.u_tt(s, k) = (u(s, k + 1) - 2.0 * u(s, k) + u(s, k - 1)) / (ht * ht);
        }
        // One-sided stencils written in differences so constants give exact zeros.
        const auto first = [](double a, double b, double c) { return 3.0 * (b - a) - (c - b); };
        const auto second = [](double a, double b, double c, double e) {
            return 2.0 * (a - b) - 3.0 * (b - c) + (c - e);
        };
        d.u_t(s, 0) = first(u(s, 0), u(s, 1), u(s, 2)) / (2.0 * ht);
        d.u_t(s, last) = -first(u(s, last), u(s, last - 1), u(s, last - 2)) / (2.0 * ht);
        d.u_tt(s, 0) = second(u(s, 0), u(s, 1), u(s, 2), u(s, 3)) / (ht * ht);
        d.u_tt(s, last) =
            second(u(s, last), u(s, last - 1), u(s, last - 2), u(s, last - 3)) / (ht * ht);
    }
    // On interior layers this is the centered 4-point mixed stencil.
    d.grad_u_t = gradient_impl(d.u_t);
    return d;
}

double integrate(const SpatialField& s, const Metric& m)
{
    const SpatialGrid& g = s.grid;
    const double cell = std::pow(g.hx(), g.dim);
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        acc += s.values[i] * m.volume_weight(i);
    }
    return acc * cell;
}

double integrate_layer(const Field& s, int k, const Metric& m)
{
    const SpatialGrid& g = s.grid.space;
    const double cell = std::pow(g.hx(), g.dim);
    const auto layer = s.layer(k);
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        acc += layer[i] * m.volume_weight(i);
    }
    return acc * cell;
}

double integrate(const Field& s, const Metric& m)
{
    const int last = s.grid.nt - 1;
    double acc = 0.5 * (integrate_layer(s, 0, m) + integrate_layer(s, last, m));
    for (int k = 1; k < last; ++k) {
        acc += integrate_layer(s, k, m);
    }
    return acc * s.grid.ht();
}

}  // namespace volgeo
