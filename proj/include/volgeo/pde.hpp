#pragma once

#include "volgeo/geometry.hpp"
#include "volgeo/qalgebra.hpp"

#include <Eigen/SparseCore>

#include <optional>
#include <string>
#include <vector>

namespace volgeo {

class InvalidProblem : public Error
{
public:
    using Error::Error;
};

/// Some interior jet left the cone, so dQ is no longer elliptic there.
class EllipticityLoss : public Error
{
public:
    EllipticityLoss(Index node, int layer, double margin);
    Index node;
    int layer;
    double margin;
};

class LinearSolveError : public Error
{
public:
    using Error::Error;
};

/// Right-hand side: a constant level ε, or a field f shifted by δ.
class Target
{
public:
    static Target constant(double level);
    static Target field(Field f, double shift = 0.0);

    bool is_constant() const { return !f_.has_value(); }
    /// ε for a constant target, δ for a field target.
    double level() const { return level_; }
    const std::optional<Field>& base_field() const { return f_; }

    /// Same kind of target with the additive level replaced.
    Target with_level(double level) const;

    double at(Index s, int k) const { return f_ ? (*f_)(s, k) + level_ : level_; }
    /// Target sampled on every node of the grid.
    Field sampled(const SpaceTimeGrid& g) const;
    double min_value() const;

private:
    double level_ = 0.0;
    std::optional<Field> f_;
};

struct ProblemData
{
    SpaceTimeGrid grid;
    Metric metric;
    SpatialField a;
    double b = 0.0;
    Target target = Target::constant(1.0);
    SpatialField u0;
    SpatialField u1;

    ProblemData(SpaceTimeGrid grid_, Metric metric_, SpatialField a_, double b_, Target target_,
                SpatialField u0_, SpatialField u1_);

    /// Throws InvalidProblem naming the first offending node.
    void validate() const;
};

/// Δ_g u - b|∇u|²_g + a.
Field b_u(const Field& u, const ProblemData& p);
SpatialField b_u(const SpatialField& u, const Metric& m, const SpatialField& a, double b);

/// Q(u) on interior layers (boundary layers are zero).
Field q_of(const Field& u, const ProblemData& p);

/// Q(u) - target on interior layers (boundary layers are zero).
Field residual(const Field& u, const ProblemData& p);

/// Jets (u_tt, B_u, ∂_i u_t) of every interior node, ordered like the interior unknowns.
std::vector<Jet<double>> jets(const Field& u, const ProblemData& p);

struct Margins
{
    double min_u_tt = 0.0;
    double min_b_u = 0.0;
    double min_q = 0.0;
    /// max over nodes of min(u_tt, B_u, Q).
    double max_node_margin = 0.0;
    Index worst_node = 0;
    int worst_layer = 0;

    double min() const;
};

/// Admissibility margins over interior nodes.
Margins margins(const Field& u, const ProblemData& p);

struct SparseSystem
{
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
};

/// dQ(ψ) = u_tt(Δψ - 2b(∇u,∇ψ)) + B_u ψ_tt - 2(∇u_t, ∇ψ_t) on interior layers, using ψ on
/// the full grid (boundary layers included).
Field apply_dq(const Field& u, const Field& psi, const ProblemData& p);

/// Newton system over interior unknowns with ψ = 0 on the boundary layers; rhs = target - Q(u).
/// Throws EllipticityLoss if an interior jet is not admissible.
SparseSystem assemble_dq(const Field& u, const ProblemData& p,
                         double floor = kDefaultAdmissibilityFloor);

enum class LinearSolverKind
{
    SparseLU,
    BiCGSTAB,
};

/// Returns ψ with ‖Aψ - rhs‖₂ <= max(tol ‖rhs‖₂, 100 eps ‖|A||ψ|‖₂); throws LinearSolveError
/// otherwise.
Eigen::VectorXd solve_linear(const SparseSystem& s, double tol,
                             LinearSolverKind kind = LinearSolverKind::SparseLU);

/// Interior vector <-> field with zero (or given) boundary layers.
Eigen::VectorXd interior_values(const Field& f);
Field from_interior(const SpaceTimeGrid& g, const Eigen::VectorXd& interior);

}  // namespace volgeo
