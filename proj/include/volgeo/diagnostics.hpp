#pragma once

#include "volgeo/geometry.hpp"
#include "volgeo/pde.hpp"

#include <string>
#include <vector>

namespace volgeo {

/// Sup norms of a solution over the whole space-time grid. Time derivatives on the two
/// boundary layers come from one-sided stencils.
struct SupNorms
{
    double u = 0.0;
    double u_t = 0.0;
    double grad_u = 0.0;
    double u_tt = 0.0;
    double grad_u_t = 0.0;
    double lap_u = 0.0;
    double hess_u = 0.0;
    double max_lambda1 = 0.0;
};

SupNorms sup_norms(const Field& u, const ProblemData& p);

/// Largest eigenvalue of g^{-1}∇²u at every node.
Field lambda1(const Field& u, const Metric& m);

/// max over g-unit ξ of u_ξξ + |∇u|²_g + A t².
Field h_quantity(const Field& u, const ProblemData& p, double A);

struct EnergyReport
{
    double energy = 0.0;
    /// ∫_M u_t² B_u dV on each time layer.
    std::vector<double> speed2;
    /// max_t |speed²(t) - speed²(0) - 2∫₀ᵗ∫_M u_t f dV ds|.
    double drift = 0.0;
    /// Set when b != 0: the weight B_u has no metric meaning there.
    bool formal = false;
};

EnergyReport energy_and_speed(const Field& u, const ProblemData& p);

/// sup over nodes and directions of centered spatial differences of the Hessian entries.
double third_derivative_proxy(const Field& u, const Metric& m);

struct DiagnosticsOptions
{
    /// Weight of the t² term in H.
    double A = 0.0;
};

/// One row per ladder rung.
struct LadderRow
{
    double level = 0.0;
    double sup_u = 0.0;
    double sup_u_t = 0.0;
    double sup_grad_u = 0.0;
    double sup_u_tt = 0.0;
    double sup_grad_u_t = 0.0;
    double sup_lap_u = 0.0;
    double sup_hess_u = 0.0;
    double max_lambda1 = 0.0;
    double max_h = 0.0;
    double min_u_tt = 0.0;
    double min_b_u = 0.0;
    double min_q = 0.0;
    double min_margin = 0.0;
    double max_margin = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
    double energy = 0.0;
    double drift = 0.0;
    double third_derivative_proxy = 0.0;
    bool energy_formal = false;
    bool converged = false;
};

struct LadderReport
{
    /// "epsilon" for a constant target, "delta" for a shifted field target.
    std::string level_name = "epsilon";
    /// Rows ordered by decreasing level.
    std::vector<LadderRow> rows;
};

/// Fills every diagnostic column of a row from a solved field; solver columns are left as-is.
void fill_diagnostics(LadderRow& row, const Field& u, const ProblemData& p,
                      const DiagnosticsOptions& opts = {});

}  // namespace volgeo
