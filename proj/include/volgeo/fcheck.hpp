#pragma once

// Admissibility of a nonnegative right-hand side f, and the square-root gradient bound
// |D√ψ| <= (1 + sup λ_max(D²ψ)) / 2 on a closed torus.
//
// All derivatives use the flat stencils of the geometry module. Nodes with value at most
// rel_threshold * sup are treated as the zero set and skipped.

#include "volgeo/geometry.hpp"

namespace volgeo {

/// A negative value was passed where a nonnegative function is required.
class DomainError : public Error
{
public:
    using Error::Error;
};

inline constexpr double kDefaultZeroThreshold = 1e-10;

struct FAdmissibility
{
    double sup_f = 0.0;
    double sup_sqrt_f_t = 0.0;
    double sup_grad_sqrt_f = 0.0;
    double sup_f_tt = 0.0;
    double sup_hess_sqrt_f = 0.0;

    /// Largest entry of the bundle.
    double max() const;
};

FAdmissibility f_admissibility(const Field& f, double rel_threshold = kDefaultZeroThreshold);

struct BlockiReport
{
    /// sup λ_max(D²ψ).
    double sup_lambda_max = 0.0;
    /// (1 + sup λ_max(D²ψ)) / 2.
    double bound = 0.0;
    double sup_grad_sqrt = 0.0;
    double min_margin = 0.0;
    Index argmin = -1;
    Index checked_nodes = 0;

    bool holds() const { return checked_nodes == 0 || min_margin >= 0.0; }
};

BlockiReport blocki_bound_check(const SpatialField& psi,
                                double rel_threshold = kDefaultZeroThreshold);

struct GrowthReport
{
    /// Smallest C with |∇f|² <= C f^{3/2} on the nodes outside the zero set.
    double constant = 0.0;
    bool unbounded = false;
    Index argmax_node = -1;
    int argmax_layer = -1;
};

/// |∇f| is formed as 2√f |∇√f| so that the stencil acts on the smooth square root.
GrowthReport gradient_growth_check(const Field& f, double rel_threshold = kDefaultZeroThreshold);

}  // namespace volgeo
