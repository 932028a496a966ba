#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace volgeo {

using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Periodic spatial lattice on the circle (dim 1) or square torus (dim 2) of side `length`.
struct SpatialGrid
{
    int dim = 1;
    int nx = 8;
    double length = 1.0;

    SpatialGrid() = default;
    SpatialGrid(int dim_, int nx_, double length_);

    double hx() const { return length / nx; }
    Index size() const { return dim == 1 ? Index(nx) : Index(nx) * nx; }

    /// Node index from lattice coordinates (iy ignored in dim 1), wrapped modulo nx.
    Index node(Index ix, Index iy = 0) const;
    Index coord(Index s, int axis) const { return axis == 0 ? s % nx : s / nx; }
    /// Periodic neighbour of node `s` shifted by `offset` along `axis`.
    Index shift(Index s, int axis, Index offset) const;
    double x(Index s, int axis) const { return hx() * double(coord(s, axis)); }

    bool operator==(const SpatialGrid&) const = default;
};

/// Spatial torus times the time interval [0,1]; layers 0 and nt-1 carry the boundary data.
struct SpaceTimeGrid
{
    SpatialGrid space;
    int nt = 5;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(SpatialGrid space_, int nt_);
    SpaceTimeGrid(int dim, int nx, int nt_, double length)
        : SpaceTimeGrid(SpatialGrid(dim, nx, length), nt_)
    {}

    int dim() const { return space.dim; }
    double hx() const { return space.hx(); }
    double ht() const { return 1.0 / (nt - 1); }
    double t(int k) const { return k * ht(); }
    Index spatial_size() const { return space.size(); }
    Index size() const { return space.size() * nt; }
    Index index(Index s, int k) const { return Index(k) * space.size() + s; }

    Index interior_layers() const { return nt - 2; }
    Index interior_size() const { return space.size() * interior_layers(); }
    /// Row of the interior unknown vector for node (s, k), 1 <= k <= nt-2.
    Index interior_index(Index s, int k) const { return Index(k - 1) * space.size() + s; }

    bool operator==(const SpaceTimeGrid&) const = default;
};

/// Scalar values on the spatial grid only (a(x), boundary data, conformal exponent).
struct SpatialField
{
    SpatialGrid grid;
    Eigen::VectorXd values;

    SpatialField() = default;
    explicit SpatialField(const SpatialGrid& g, double fill = 0.0)
        : grid(g)
        , values(Eigen::VectorXd::Constant(g.size(), fill))
    {}
    SpatialField(const SpatialGrid& g, Eigen::VectorXd v);

    double operator[](Index s) const { return values[s]; }
    double& operator[](Index s) { return values[s]; }

    template <typename Fn>
    static SpatialField sample(const SpatialGrid& g, Fn&& fn)
    {
        SpatialField out(g);
        for (Index s = 0; s < g.size(); ++s) {
            out.values[s] = fn(g.x(s, 0), g.dim == 2 ? g.x(s, 1) : 0.0);
        }
        return out;
    }
};

/// Scalar values on the space-time grid, time-outer and space-inner.
struct Field
{
    SpaceTimeGrid grid;
    Eigen::VectorXd values;

    Field() = default;
    explicit Field(const SpaceTimeGrid& g, double fill = 0.0)
        : grid(g)
        , values(Eigen::VectorXd::Constant(g.size(), fill))
    {}
    Field(const SpaceTimeGrid& g, Eigen::VectorXd v);

    double operator()(Index s, int k) const { return values[grid.index(s, k)]; }
    double& operator()(Index s, int k) { return values[grid.index(s, k)]; }

    auto layer(int k) { return values.segment(grid.index(0, k), grid.spatial_size()); }
    auto layer(int k) const { return values.segment(grid.index(0, k), grid.spatial_size()); }

    SpatialField layer_field(int k) const { return SpatialField(grid.space, layer(k)); }

    /// fn(x, y, t); y is 0 in dim 1.
    template <typename Fn>
    static Field sample(const SpaceTimeGrid& g, Fn&& fn)
    {
        Field out(g);
        for (int k = 0; k < g.nt; ++k) {
            for (Index s = 0; s < g.spatial_size(); ++s) {
                out(s, k) = fn(g.space.x(s, 0), g.dim() == 2 ? g.space.x(s, 1) : 0.0, g.t(k));
            }
        }
        return out;
    }

    double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

/// Per-node spatial vector; one component per spatial direction.
template <typename F>
struct VectorOf
{
    std::vector<F> components;

    const F& operator[](int i) const { return components[std::size_t(i)]; }
    F& operator[](int i) { return components[std::size_t(i)]; }
    int dim() const { return int(components.size()); }
};

/// Per-node symmetric matrix, entries (0,0), (0,1), (1,1); only xx is used in dim 1.
template <typename F>
struct SymmetricOf
{
    int dim = 1;
    F xx, xy, yy;

    const F& entry(int i, int j) const
    {
        if (i == 0 && j == 0) {
            return xx;
        }
        return (i == 1 && j == 1) ? yy : xy;
    }
};

using VectorField = VectorOf<Field>;
using SymmetricField = SymmetricOf<Field>;
using SpatialVectorField = VectorOf<SpatialField>;
using SpatialSymmetricField = SymmetricOf<SpatialField>;

/// Model metric: flat circle of length L, or the torus T²_L with g = e^{2φ}δ.
class Metric
{
public:
    /// Flat metric on the given spatial grid.
    explicit Metric(const SpatialGrid& grid);
    /// Conformal metric e^{2φ}δ; dim 1 requires φ ≡ 0.
    Metric(const SpatialGrid& grid, SpatialField phi);

    const SpatialGrid& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    bool is_flat() const { return flat_; }

    const SpatialField& phi() const { return phi_; }
    /// Gauss curvature K = -e^{-2φ}Δ₀φ (zero in dim 1).
    const SpatialField& curvature() const { return curvature_; }
    /// e^{-2φ} at node s, the inverse metric factor g^{ii}.
    double inverse_scale(Index s) const { return inverse_scale_[s]; }
    /// e^{dim·φ} at node s.
    double volume_weight(Index s) const { return volume_weight_[s]; }

private:
    SpatialGrid grid_;
    SpatialField phi_;
    SpatialField curvature_;
    Eigen::VectorXd inverse_scale_;
    Eigen::VectorXd volume_weight_;
    bool flat_ = true;
};

/// Flat Laplacian Δ₀ with the 3-point (dim 1) or 5-point (dim 2) stencil.
SpatialField flat_laplacian(const SpatialField& u);
Field flat_laplacian(const Field& u);

/// Δ_g u = e^{-2φ}Δ₀u.
SpatialField laplace_beltrami(const SpatialField& u, const Metric& m);
Field laplace_beltrami(const Field& u, const Metric& m);

/// Centered coordinate partials ∂_i u.
SpatialVectorField partial_gradient(const SpatialField& u);
VectorField partial_gradient(const Field& u);

/// Gradient with the index raised, e^{-2φ}∂_i u.
SpatialVectorField gradient_g(const SpatialField& u, const Metric& m);
VectorField gradient_g(const Field& u, const Metric& m);

/// g(∇u, ∇v) = e^{-2φ} Σ ∂_i u ∂_i v from coordinate partials.
Field inner_g(const VectorField& du, const VectorField& dv, const Metric& m);
SpatialField inner_g(const SpatialVectorField& du, const SpatialVectorField& dv, const Metric& m);
/// |∇u|²_g.
Field grad_norm2(const Field& u, const Metric& m);
SpatialField grad_norm2(const SpatialField& u, const Metric& m);

/// Coordinate second partials ∂_i∂_j u (3-point diagonal, 4-point mixed).
SpatialSymmetricField flat_hessian(const SpatialField& u);
SymmetricField flat_hessian(const Field& u);

/// (∇²u)_{ij} = ∂_i∂_j u - Γ^k_{ij}∂_k u with Γ^k_{ij} = δ_{ik}φ_j + δ_{jk}φ_i - δ_{ij}φ_k.
SpatialSymmetricField covariant_hessian(const SpatialField& u, const Metric& m);
SymmetricField covariant_hessian(const Field& u, const Metric& m);

/// g^{ij}(∇²u)_{ij}.
Field hessian_trace_g(const SymmetricField& hess, const Metric& m);

/// |∇²u|_g = (e^{-4φ} Σ (∇²u)_{ij}²)^{1/2}.
Field hessian_norm_g(const SymmetricField& hess, const Metric& m);

struct TimeDerivatives
{
    Field u_t;
    Field u_tt;
    /// Coordinate partials ∂_i u_t.
    VectorField grad_u_t;
};

/// Centered second-order stencils on interior layers, one-sided second-order on the two
/// boundary layers.
TimeDerivatives time_derivatives(const Field& u);

/// Σ s(x) e^{dim·φ} hx^dim.
double integrate(const SpatialField& s, const Metric& m);
/// Spatial rectangle rule per layer, trapezoidal rule in t.
double integrate(const Field& s, const Metric& m);
/// Spatial integral of one time layer.
double integrate_layer(const Field& s, int k, const Metric& m);

}  // namespace volgeo
