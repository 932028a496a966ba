#pragma once

// Numerical checks of the exact calculus behind the C^{1,1} estimate: linearization of Q,
// the differentiated equation, the Bochner-type formula for dQ(|∇u|²), concavity of log Q
// and stencil commutation. Identity checks define f := Q(u) on the grid, so u need not
// solve anything.

#include "volgeo/geometry.hpp"
#include "volgeo/pde.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace volgeo {

/// Least-squares slope of log(y) against log(x); NaN with fewer than two positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct LinearizationReport
{
    /// Perturbation sizes that kept u ± hψ admissible.
    std::vector<double> h;
    /// ‖Q(u+hψ) - Q(u) - h dQ(ψ)‖∞, second order in h.
    std::vector<double> taylor_remainder;
    /// ‖(Q(u+hψ) - Q(u-hψ))/(2h) - dQ(ψ)‖∞; exact up to rounding when b = 0.
    std::vector<double> central_error;
    double slope = 0.0;
};

/// ψ must vanish on the boundary layers. Sizes whose perturbation leaves the cone are dropped.
LinearizationReport check_linearization(const Field& u, const Field& psi, const ProblemData& p,
                                        const std::vector<double>& h_ladder = {1e-1, 1e-2, 1e-3,
                                                                               1e-4});

/// sup over interior nodes of the defect in the spatial gradient of Q(r) = f, paired with ∇u:
/// 2(∇u,∇f) - 2u_tt(∇u,∇a) = 2u_tt(∇u,∇Δu) - 2b u_tt(∇u,∇|∇u|²) + 2B_u(∇u,∇u_tt)
///                           - 2(∇u,∇|∇u_t|²).
double check_gradient_identity(const Field& u, const ProblemData& p);

/// sup over interior nodes of the defect in
/// dQ(|∇u|²) = 2u_tt(Ric(∇u,∇u) - (∇u,∇a)) + 2(∇f,∇u) + 2u_tt|∇²u|² + 2B_u|∇u_t|²
///             - 4 Σ u_ti u_tj u_ij.
double check_bochner_identity(const Field& u, const ProblemData& p);

struct ConcavityReport
{
    Index samples = 0;
    /// max over samples of λ_max(G_hess) / (1 + ‖G_hess‖).
    double max_normalized_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    /// min over samples of -vᵀ G_hess v / (|v|² (1 + ‖G_hess‖)) for random v.
    double min_normalized_form = 0.0;

    bool holds(double tol = 1e-10) const
    {
        return max_normalized_eigenvalue <= tol && min_normalized_form >= -tol;
    }
};

/// Random admissible jets of size n+2: r0, r1 uniform in (0, 10], (r2..r_{n+1}) uniform in the
/// ball Σ r_i² < 0.99 r0 r1.
ConcavityReport check_concavity(Index samples, std::uint64_t seed, int n);

struct RayScan
{
    std::vector<double> q;
    std::vector<double> min_eigenvalue;
    std::vector<double> max_eigenvalue;
    /// max eigenvalue / (1 + spectral norm).
    std::vector<double> max_normalized_eigenvalue;
};

/// Jets (1, 1, s, 0, ...) with Q = 1 - s² -> 0⁺.
RayScan concavity_ray_scan(int n, int steps);

/// sup |Δ₀(∂_i∂_j u) - ∂_i∂_j(Δ₀u)| over nodes and entries. Throws unless the metric is flat.
double check_flat_commutation(const Field& u, const Metric& m);

/// min over interior nodes of √(u_tt B_u) - |∇u_t|_g.
double cauchy_schwarz_slack(const Field& u, const ProblemData& p);

struct RefinementStudy
{
    std::vector<int> nx;
    std::vector<double> error;
    /// error[i] / error[i+1].
    std::vector<double> ratios;
};

/// Runs `error_at(level)` for each level and collects consecutive ratios.
RefinementStudy refinement_study(const std::vector<int>& nx,
                                 const std::function<double(int nx)>& error_at);

}  // namespace volgeo
