#pragma once

#include "volgeo/diagnostics.hpp"
#include "volgeo/geometry.hpp"
#include "volgeo/pde.hpp"

#include <optional>
#include <string>
#include <vector>

namespace volgeo {

struct SolverConfig
{
    double newton_tol = 1e-10;
    int max_newton_iters = 50;
    double backtrack_factor = 0.5;
    int max_halvings = 30;
    double admissibility_floor = kDefaultAdmissibilityFloor;
    double linear_tol = 1e-12;
    LinearSolverKind linear_solver = LinearSolverKind::SparseLU;

    double epsilon0 = 1e-1;
    double ratio = 0.1;
    double epsilon_min = 1e-4;
    /// Bulge of the initial path; unset means max(1, ‖u1 - u0‖∞).
    std::optional<double> bulge;

    /// Throws Error if a field is out of range.
    void validate() const;
    /// ε₀ σ^k for k = 0, 1, ... while >= ε_min (with a relative slack of 1e-9).
    std::vector<double> ladder_levels() const;
};

enum class SolveStatus
{
    Converged,
    MaxIterations,
    LineSearchStall,
    EllipticityLoss,
    LinearSolveFailure,
};

std::string to_string(SolveStatus s);

struct SolveResult
{
    Field u;
    int iterations = 0;
    double residual = 0.0;
    Margins margins;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
    /// ‖residual‖∞ before each step and after the last one.
    std::vector<double> residual_history;
};

/// The first rung of a ladder did not converge.
class ConfigurationError : public Error
{
public:
    using Error::Error;
};

/// u(x,t) = (1-t)u0 + t u1 - λ t(1-t); throws InvalidProblem if an endpoint is inadmissible.
Field initial_path(const ProblemData& p, double bulge);
/// The configured bulge, or max(1, ‖u1 - u0‖∞).
double default_bulge(const ProblemData& p, const SolverConfig& cfg);

/// Damped Newton iteration that keeps every accepted iterate inside the cone.
SolveResult newton_solve(const ProblemData& p, const Field& u_init, const SolverConfig& cfg);

struct LadderRung
{
    LadderRow row;
    SolveResult result;
};

struct LadderRun
{
    LadderReport report;
    std::vector<LadderRung> rungs;
    /// All requested levels were solved.
    bool complete = false;
    std::string message;
};

/// Continuation in the additive target level: constant ε for a constant target, shift δ on
/// f for a field target. Warm-starts each rung from the previous solution.
LadderRun epsilon_ladder(const ProblemData& p, const SolverConfig& cfg,
                         const DiagnosticsOptions& diag = {});

}  // namespace volgeo
