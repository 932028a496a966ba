#include "volgeo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace volgeo {

void SolverConfig::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(std::string("solver.") + name + " must be positive");
        }
    };
    positive(newton_tol, "newton_tol");
    positive(admissibility_floor, "admissibility_floor");
    positive(linear_tol, "linear_tol");
    positive(epsilon0, "epsilon0");
    positive(epsilon_min, "epsilon_min");
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error("solver.ratio must lie in (0, 1)");
    }
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw Error("solver.backtrack_factor must lie in (0, 1)");
    }
    if (max_newton_iters < 0 || max_halvings < 0) {
        throw Error("iteration limits must be nonnegative");
    }
    if (bulge) {
        positive(*bulge, "bulge");
    }
}

std::vector<double> SolverConfig::ladder_levels() const
{
    std::vector<double> levels;
    for (int k = 0;; ++k) {
        const double level = epsilon0 * std::pow(ratio, k);
        if (level < epsilon_min * (1.0 - 1e-9)) {
            break;
        }
        levels.push_back(level);
    }
    return levels;
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged:
        return "converged";
    case SolveStatus::MaxIterations:
        return "max-iterations";
    case SolveStatus::LineSearchStall:
        return "line-search-stall";
    case SolveStatus::EllipticityLoss:
        return "ellipticity-loss";
    case SolveStatus::LinearSolveFailure:
        return "linear-solve-failure";
    }
    return "unknown";
}

double default_bulge(const ProblemData& p, const SolverConfig& cfg)
{
    if (cfg.bulge) {
        return *cfg.bulge;
    }
    return std::max(1.0, (p.u1.values - p.u0.values).cwiseAbs().maxCoeff());
}

Field initial_path(const ProblemData& p, double bulge)
{
    if (!(bulge > 0.0)) {
        throw InvalidProblem("initial bulge must be positive");
    }
    p.validate();
    const SpaceTimeGrid& g = p.grid;
    Field u(g);
    for (int k = 0; k < g.nt; ++k) {
        const double t = g.t(k);
        u.layer(k) = (1.0 - t) * p.u0.values + t * p.u1.values;
        u.layer(k).array() -= bulge * t * (1.0 - t);
    }
    // Exact endpoints, not the rounded interpolation.
    u.layer(0) = p.u0.values;
    u.layer(g.nt - 1) = p.u1.values;
    return u;
}

SolveResult newton_solve(const ProblemData& p, const Field& u_init, const SolverConfig& cfg)
{
    const SpaceTimeGrid& g = p.grid;
    if (!(u_init.grid == g)) {
        throw InvalidProblem("initial field lives on a different grid");
    }
    if (u_init.layer(0) != p.u0.values || u_init.layer(g.nt - 1) != p.u1.values) {
        throw InvalidProblem("initial field does not match the boundary data");
    }

    SolveResult out;
    out.u = u_init;
    out.residual = residual(out.u, p).max_abs();
    out.margins = margins(out.u, p);
    out.residual_history.push_back(out.residual);

    auto finish = [&](SolveStatus status, std::string message) {
        out.status = status;
        out.converged = status == SolveStatus::Converged;
        out.message = std::move(message);
        return out;
    };

    if (!(out.margins.min() > cfg.admissibility_floor)) {
        std::ostringstream os;
        os << "initial field is not admissible at node " << out.margins.worst_node << ", layer "
           << out.margins.worst_layer << " (margin " << out.margins.min() << ")";
        return finish(SolveStatus::EllipticityLoss, os.str());
    }

    for (;;) {
        if (out.residual <= cfg.newton_tol) {
            return finish(SolveStatus::Converged, "converged");
        }
        if (out.iterations >= cfg.max_newton_iters) {
            return finish(SolveStatus::MaxIterations, "Newton iteration limit reached");
        }

        Eigen::VectorXd step;
        try {
            const SparseSystem sys = assemble_dq(out.u, p, cfg.admissibility_floor);
            step = solve_linear(sys, cfg.linear_tol, cfg.linear_solver);
        }
        catch (const EllipticityLoss& e) {
            return finish(SolveStatus::EllipticityLoss, e.what());
        }
        catch (const LinearSolveError& e) {
            return finish(SolveStatus::LinearSolveFailure, e.what());
        }

        // Largest s = factor^j keeping every jet admissible and lowering ‖residual‖∞.
        const Index offset = g.spatial_size();
        const Index count = g.interior_size();
        double s = 1.0;
        bool accepted = false;
        for (int j = 0; j <= cfg.max_halvings; ++j, s *= cfg.backtrack_factor) {
            Field trial = out.u;
            trial.values.segment(offset, count) += s * step;
            const Margins mt = margins(trial, p);
            if (!(mt.min() > cfg.admissibility_floor)) {
                continue;
            }
            const double rt = residual(trial, p).max_abs();
            if (rt < out.residual) {
                out.u = std::move(trial);
                out.residual = rt;
                out.margins = mt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return finish(SolveStatus::LineSearchStall,
                          "line search found no admissible step reducing the residual");
        }
        ++out.iterations;
        out.residual_history.push_back(out.residual);
    }
}

LadderRun epsilon_ladder(const ProblemData& p, const SolverConfig& cfg,
                         const DiagnosticsOptions& diag)
{
    cfg.validate();
    p.validate();

    LadderRun run;
    run.report.level_name = p.target.is_constant() ? "epsilon" : "delta";
    const std::vector<double> levels = cfg.ladder_levels();
    if (levels.empty()) {
        throw Error("empty ladder: epsilon0 is below epsilon_min");
    }

    Field u = initial_path(p, default_bulge(p, cfg));
    for (std::size_t k = 0; k < levels.size(); ++k) {
        ProblemData rung = p;
        rung.target = p.target.with_level(levels[k]);
        SolveResult result = newton_solve(rung, u, cfg);
        if (!result.converged && k == 0) {
            std::ostringstream os;
            os << "first rung (" << run.report.level_name << " = " << levels[k]
               << ") did not converge: " << result.message
               << "; try a larger epsilon0 or initial bulge";
            throw ConfigurationError(os.str());
        }

        LadderRow row;
        row.level = levels[k];
        row.newton_iterations = result.iterations;
        row.residual = result.residual;
        row.converged = result.converged;
        fill_diagnostics(row, result.u, rung, diag);
        run.report.rows.push_back(row);

        if (!result.converged) {
            std::ostringstream os;
            os << "rung " << k << " (" << run.report.level_name << " = " << levels[k]
               << ") stopped: " << result.message;
            run.message = os.str();
            run.rungs.push_back({row, std::move(result)});
            return run;
        }
        u = result.u;
        run.rungs.push_back({row, std::move(result)});
    }
    run.complete = true;
    run.message = "all rungs converged";
    return run;
}

}  // namespace volgeo
