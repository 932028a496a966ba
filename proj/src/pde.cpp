#include "volgeo/pde.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace volgeo {

namespace {

std::string node_location(const SpatialGrid& g, Index s)
{
    std::ostringstream os;
    os << "node " << s << " (x=" << g.x(s, 0);
    if (g.dim == 2) {
        os << ", y=" << g.x(s, 1);
    }
    os << ")";
    return os.str();
}

std::string ellipticity_message(Index node, int layer, double margin)
{
    std::ostringstream os;
    os << "ellipticity lost at node " << node << ", layer " << layer << " (margin " << margin << ")";
    return os.str();
}

// Everything the residual and its Jacobian need at one interior node.
struct NodeJet
{
    double u_tt = 0.0;
    double b_u = 0.0;
    double q = 0.0;
    double w = 1.0;
    std::array<double, 2> du{0.0, 0.0};
    std::array<double, 2> du_t{0.0, 0.0};
};

NodeJet eval_node(const Field& u, const ProblemData& p, Index s, int k)
{
    const SpatialGrid& g = p.grid.space;
    const double hx = g.hx();
    const double ht = p.grid.ht();
    NodeJet j;
    j.w = p.metric.inverse_scale(s);
    j.u_tt = (u(s, k + 1) - 2.0 * u(s, k) + u(s, k - 1)) / (ht * ht);
    double lap = 0.0;
    double grad2 = 0.0;
    double grad_t2 = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
        const Index e = g.shift(s, axis, 1);
        const Index w = g.shift(s, axis, -1);
        lap += (u(e, k) - 2.0 * u(s, k) + u(w, k)) / (hx * hx);
        j.du[axis] = (u(e, k) - u(w, k)) / (2.0 * hx);
        j.du_t[axis] = (u(e, k + 1) - u(w, k + 1) - u(e, k - 1) + u(w, k - 1)) / (4.0 * hx * ht);
        grad2 += j.du[axis] * j.du[axis];
        grad_t2 += j.du_t[axis] * j.du_t[axis];
    }
    j.b_u = j.w * lap - p.b * j.w * grad2 + p.a[s];
    j.q = j.u_tt * j.b_u - j.w * grad_t2;
    return j;
}

template <typename Fn>
void for_interior(const SpaceTimeGrid& g, Fn&& fn)
{
    for (int k = 1; k + 1 < g.nt; ++k) {
        for (Index s = 0; s < g.spatial_size(); ++s) {
            fn(s, k);
        }
    }
}

}  // namespace

EllipticityLoss::EllipticityLoss(Index node_, int layer_, double margin_)
    : Error(ellipticity_message(node_, layer_, margin_))
    , node(node_)
    , layer(layer_)
    , margin(margin_)
{}

Target Target::constant(double level)
{
    Target t;
    t.level_ = level;
    return t;
}

Target Target::field(Field f, double shift)
{
    Target t;
    t.level_ = shift;
    t.f_ = std::move(f);
    return t;
}

Target Target::with_level(double level) const
{
    Target t = *this;
    t.level_ = level;
    return t;
}

Field Target::sampled(const SpaceTimeGrid& g) const
{
    if (f_) {
        Field out = *f_;
        out.values.array() += level_;
        return out;
    }
    return Field(g, level_);
}

double Target::min_value() const
{
    return f_ ? f_->values.minCoeff() + level_ : level_;
}

ProblemData::ProblemData(SpaceTimeGrid grid_, Metric metric_, SpatialField a_, double b_,
                         Target target_, SpatialField u0_, SpatialField u1_)
    : grid(std::move(grid_))
    , metric(std::move(metric_))
    , a(std::move(a_))
    , b(b_)
    , target(std::move(target_))
    , u0(std::move(u0_))
    , u1(std::move(u1_))
{}

void ProblemData::validate() const
{
    const SpatialGrid& g = grid.space;
    if (!(metric.grid() == g) || !(a.grid == g) || !(u0.grid == g) || !(u1.grid == g)) {
        throw InvalidProblem("metric, coefficient and boundary data must share the spatial grid");
    }
    if (!(b >= 0.0) || !std::isfinite(b)) {
        throw InvalidProblem("b must be a nonnegative constant");
    }
    for (Index s = 0; s < g.size(); ++s) {
        if (!(a[s] > 0.0) || !std::isfinite(a[s])) {
            throw InvalidProblem("a must be positive; violated at " + node_location(g, s));
        }
    }
    if (!u0.values.allFinite() || !u1.values.allFinite()) {
        throw InvalidProblem("boundary data must be finite");
    }
    if (target.is_constant()) {
        if (!(target.level() > 0.0)) {
            throw InvalidProblem("constant target must be positive");
        }
    }
    else {
        const Field& f = *target.base_field();
        if (!(f.grid == grid)) {
            throw InvalidProblem("target field lives on a different grid");
        }
        if (!(target.level() >= 0.0)) {
            throw InvalidProblem("target shift must be nonnegative");
        }
        for (Index i = 0; i < f.values.size(); ++i) {
            if (!(f.values[i] >= 0.0) || !std::isfinite(f.values[i])) {
                std::ostringstream os;
                os << "target field must be nonnegative; violated at "
                   << node_location(g, i % g.size()) << ", layer " << i / g.size();
                throw InvalidProblem(os.str());
            }
        }
    }
    const std::array<std::pair<const char*, const SpatialField*>, 2> ends{
        std::pair{"u0", &u0}, std::pair{"u1", &u1}};
    for (const auto& [name, u] : ends) {
        const SpatialField bu = b_u(*u, metric, a, b);
        for (Index s = 0; s < g.size(); ++s) {
            if (!(bu[s] > 0.0)) {
                std::ostringstream os;
                os << name << " is not admissible at " << node_location(g, s) << ": B = " << bu[s];
                throw InvalidProblem(os.str());
            }
        }
    }
}

Field b_u(const Field& u, const ProblemData& p)
{
    Field out = laplace_beltrami(u, p.metric);
    out.values -= p.b * grad_norm2(u, p.metric).values;
    const Index ns = p.grid.spatial_size();
    for (int k = 0; k < u.grid.nt; ++k) {
        out.layer(k) += p.a.values.head(ns);
    }
    return out;
}

SpatialField b_u(const SpatialField& u, const Metric& m, const SpatialField& a, double b)
{
    SpatialField out = laplace_beltrami(u, m);
    out.values += a.values - b * grad_norm2(u, m).values;
    return out;
}

Field q_of(const Field& u, const ProblemData& p)
{
    Field out(u.grid);
    for_interior(u.grid, [&](Index s, int k) { out(s, k) = eval_node(u, p, s, k).q; });
    return out;
}

Field residual(const Field& u, const ProblemData& p)
{
    Field out(u.grid);
    for_interior(u.grid,
                 [&](Index s, int k) { out(s, k) = eval_node(u, p, s, k).q - p.target.at(s, k); });
    return out;
}

std::vector<Jet<double>> jets(const Field& u, const ProblemData& p)
{
    const int n = p.grid.dim();
    std::vector<Jet<double>> out;
    out.reserve(std::size_t(p.grid.interior_size()));
    for_interior(u.grid, [&](Index s, int k) {
        const NodeJet j = eval_node(u, p, s, k);
        Jet<double> r(n + 2);
        r[0] = j.u_tt;
        r[1] = j.b_u;
        // Orthonormal-frame components: e^{-φ}∂_i u_t.
        for (int i = 0; i < n; ++i) {
            r[2 + i] = std::sqrt(j.w) * j.du_t[i];
        }
        out.push_back(std::move(r));
    });
    return out;
}

double Margins::min() const { return std::min({min_u_tt, min_b_u, min_q}); }

Margins margins(const Field& u, const ProblemData& p)
{
    Margins m;
    m.min_u_tt = m.min_b_u = m.min_q = std::numeric_limits<double>::infinity();
    m.max_node_margin = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for_interior(u.grid, [&](Index s, int k) {
        const NodeJet j = eval_node(u, p, s, k);
        m.min_u_tt = std::min(m.min_u_tt, j.u_tt);
        m.min_b_u = std::min(m.min_b_u, j.b_u);
        m.min_q = std::min(m.min_q, j.q);
        const double node_margin = std::min({j.u_tt, j.b_u, j.q});
        m.max_node_margin = std::max(m.max_node_margin, node_margin);
        if (node_margin < worst) {
            worst = node_margin;
            m.worst_node = s;
            m.worst_layer = k;
        }
    });
    return m;
}

Field apply_dq(const Field& u, const Field& psi, const ProblemData& p)
{
    const SpatialGrid& g = p.grid.space;
    const double hx = g.hx();
    const double ht = p.grid.ht();
    Field out(u.grid);
    for_interior(u.grid, [&](Index s, int k) {
        const NodeJet j = eval_node(u, p, s, k);
        const double psi_tt = (psi(s, k + 1) - 2.0 * psi(s, k) + psi(s, k - 1)) / (ht * ht);
        double lap = 0.0;
        double dot = 0.0;
        double dot_t = 0.0;
        for (int axis = 0; axis < g.dim; ++axis) {
            const Index e = g.shift(s, axis, 1);
            const Index w = g.shift(s, axis, -1);
            lap += (psi(e, k) - 2.0 * psi(s, k) + psi(w, k)) / (hx * hx);
            dot += j.du[axis] * (psi(e, k) - psi(w, k)) / (2.0 * hx);
            dot_t += j.du_t[axis]
                     * (psi(e, k + 1) - psi(w, k + 1) - psi(e, k - 1) + psi(w, k - 1))
                     / (4.0 * hx * ht);
        }
        out(s, k) =
            j.u_tt * (j.w * lap - 2.0 * p.b * j.w * dot) + j.b_u * psi_tt - 2.0 * j.w * dot_t;
    });
    return out;
}

SparseSystem assemble_dq(const Field& u, const ProblemData& p, double floor)
{
    const SpaceTimeGrid& grid = p.grid;
    const SpatialGrid& g = grid.space;
    const double hx = g.hx();
    const double ht = grid.ht();
    const int last = grid.nt - 1;
    const Index n = grid.interior_size();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(std::size_t(n) * (g.dim == 1 ? 9 : 13));
    SparseSystem sys;
    sys.rhs.resize(n);

    auto add = [&](Index row, Index s, int k, double value) {
        if (k == 0 || k == last) {
            return;
        }
        triplets.emplace_back(row, grid.interior_index(s, k), value);
    };

    for_interior(grid, [&](Index s, int k) {
        const NodeJet j = eval_node(u, p, s, k);
        const double node_margin = std::min({j.u_tt, j.b_u, j.q});
        if (!(node_margin > floor)) {
            throw EllipticityLoss(s, k, node_margin);
        }
        const Index row = grid.interior_index(s, k);
        sys.rhs[row] = p.target.at(s, k) - j.q;

        // B_u ψ_tt
        add(row, s, k + 1, j.b_u / (ht * ht));
        add(row, s, k - 1, j.b_u / (ht * ht));
        double centre = -2.0 * j.b_u / (ht * ht);
        for (int axis = 0; axis < g.dim; ++axis) {
            const Index e = g.shift(s, axis, 1);
            const Index w = g.shift(s, axis, -1);
            // u_tt e^{-2φ}(Δ₀ψ - 2b ∂u·∂ψ)
            const double lap = j.u_tt * j.w / (hx * hx);
            const double adv = j.u_tt * j.w * 2.0 * p.b * j.du[axis] / (2.0 * hx);
            add(row, e, k, lap - adv);
            add(row, w, k, lap + adv);
            centre -= 2.0 * lap;
            // -2 e^{-2φ} ∂u_t·∂ψ_t
            const double mixed = -2.0 * j.w * j.du_t[axis] / (4.0 * hx * ht);
            add(row, e, k + 1, mixed);
            add(row, w, k + 1, -mixed);
            add(row, e, k - 1, -mixed);
            add(row, w, k - 1, mixed);
        }
        add(row, s, k, centre);
    });

    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

Eigen::VectorXd solve_linear(const SparseSystem& s, double tol, LinearSolverKind kind)
{
    const double rhs_norm = s.rhs.norm();
    if (rhs_norm == 0.0) {
        return Eigen::VectorXd::Zero(s.rhs.size());
    }
    // Below roughly eps·‖|A||x|‖ the residual cannot be resolved in floating point; accept a
    // solve that reaches that floor even when tol·‖rhs‖ lies beneath it.
    const Eigen::SparseMatrix<double> abs_matrix = s.matrix.cwiseAbs();
    auto residual_ok = [&](const Eigen::VectorXd& x) {
        const double floor = 100.0 * std::numeric_limits<double>::epsilon()
                             * (abs_matrix * x.cwiseAbs()).norm();
        return (s.matrix * x - s.rhs).norm() <= std::max(tol * rhs_norm, floor);
    };

    if (kind == LinearSolverKind::SparseLU) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(s.matrix);
        if (lu.info() != Eigen::Success) {
            throw LinearSolveError("sparse LU factorization failed: " + lu.lastErrorMessage());
        }
        Eigen::VectorXd x = lu.solve(s.rhs);
        // A few rounds of iterative refinement absorb pivoting noise on stiff systems.
        for (int round = 0; round < 3 && !residual_ok(x); ++round) {
            const Eigen::VectorXd r = s.rhs - s.matrix * x;
            x += lu.solve(r);
        }
        if (!x.allFinite() || !residual_ok(x)) {
            throw LinearSolveError("sparse LU solve missed the residual tolerance");
        }
        return x;
    }

    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-6);
    it.preconditioner().setFillfactor(20);
    it.setTolerance(tol);
    it.setMaxIterations(std::max<Index>(1000, 4 * s.rhs.size()));
    it.compute(s.matrix);
    if (it.info() != Eigen::Success) {
        throw LinearSolveError("incomplete LU preconditioner failed");
    }
    Eigen::VectorXd x = it.solve(s.rhs);
    if (!x.allFinite() || !residual_ok(x)) {
        throw LinearSolveError("BiCGSTAB did not reach the residual tolerance in "
                               + std::to_string(it.iterations()) + " iterations");
    }
    return x;
}

Eigen::VectorXd interior_values(const Field& f)
{
    const SpaceTimeGrid& g = f.grid;
    return f.values.segment(g.spatial_size(), g.interior_size());
}

Field from_interior(const SpaceTimeGrid& g, const Eigen::VectorXd& interior)
{
    if (interior.size() != g.interior_size()) {
        throw Error("interior vector size does not match grid");
    }
    Field out(g);
    out.values.segment(g.spatial_size(), g.interior_size()) = interior;
    return out;
}

}  // namespace volgeo
