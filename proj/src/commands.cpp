#include "volgeo/commands.hpp"

#include "volgeo/fcheck.hpp"
#include "volgeo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace volgeo {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void prepare_output(const RunConfig& cfg)
{
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw IoError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
    }
}

void write_json(const fs::path& path, const json& doc)
{
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
    os << doc.dump(2) << '\n';
}

void write_csv(const fs::path& path, const LadderReport& report)
{
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
    write_ladder_csv(os, report);
}

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
}

std::string rung_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "rung_%02zu.field", k);
    return buf;
}

double first_level(const RunConfig& cfg)
{
    return cfg.mode == ProblemMode::FixedF ? 0.0 : cfg.solver.epsilon0;
}

LadderRung solve_once(const ProblemData& p, const RunConfig& cfg)
{
    SolveResult result = newton_solve(p, initial_path(p, default_bulge(p, cfg.solver)), cfg.solver);
    LadderRow row;
    row.level = first_level(cfg);
    row.newton_iterations = result.iterations;
    row.residual = result.residual;
    row.converged = result.converged;
    fill_diagnostics(row, result.u, p, cfg.diagnostics);
    return {row, std::move(result)};
}

json status_json(const SolveResult& r)
{
    json history = json::array();
    for (double v : r.residual_history) {
        history.push_back(number(v));
    }
    return {{"status", to_string(r.status)},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"residual", number(r.residual)},
            {"message", r.message},
            {"residual_history", history}};
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    }
    catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const ConfigurationError& e) {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const InvalidProblem& e) {
        err << "invalid problem: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const DomainError& e) {
        err << "invalid data: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
}

}  // namespace

json row_to_json(const LadderRow& row)
{
    json j;
    j["level"] = number(row.level);
    for (const auto& [name, value] : ladder_row_values(row)) {
        j[name] = number(value);
    }
    j["newton_iterations"] = row.newton_iterations;
    j["converged"] = row.converged;
    j["energy_formal"] = row.energy_formal;
    return j;
}

json verify_to_json(const VerifyResult& r)
{
    json checks = json::array();
    for (const CheckOutcome& c : r.checks) {
        json metrics = json::object();
        for (const auto& [name, value] : c.metrics) {
            metrics[name] = number(value);
        }
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"metrics", metrics}});
    }
    return {{"passed", r.passed()}, {"checks", checks}};
}

int cmd_solve(const RunConfig& cfg, std::ostream& err)
{
    return guarded(err, [&] {
        const ProblemData p = build_problem(cfg);
        prepare_output(cfg);
        const LadderRung rung = solve_once(p, cfg);

        LadderReport report;
        report.level_name = p.target.is_constant() ? "epsilon" : "delta";
        report.rows.push_back(rung.row);
        if (cfg.wants("field")) {
            write_field(cfg.output_dir / "solution.field", rung.result.u);
        }
        if (cfg.wants("csv")) {
            write_csv(cfg.output_dir / "report.csv", report);
        }
        if (cfg.wants("json")) {
            write_json(cfg.output_dir / "report.json",
                       {{"level_name", report.level_name},
                        {"row", row_to_json(rung.row)},
                        {"solve", status_json(rung.result)},
                        {"config", cfg.document}});
        }
        if (!rung.result.converged) {
            err << "solve did not converge: " << rung.result.message << '\n';
            return int(kExitNonConvergence);
        }
        return int(kExitOk);
    });
}

int cmd_ladder(const RunConfig& cfg, std::ostream& err)
{
    return guarded(err, [&] {
        const ProblemData p = build_problem(cfg);
        prepare_output(cfg);

        LadderRun run;
        if (cfg.mode == ProblemMode::FixedF) {
            LadderRung rung = solve_once(p, cfg);
            if (!rung.result.converged) {
                throw ConfigurationError("fixed-f solve did not converge: " + rung.result.message);
            }
            run.report.level_name = "delta";
            run.report.rows.push_back(rung.row);
            run.rungs.push_back(std::move(rung));
            run.complete = true;
            run.message = "all rungs converged";
        }
        else {
            run = epsilon_ladder(p, cfg.solver, cfg.diagnostics);
        }

        if (cfg.wants("field")) {
            for (std::size_t k = 0; k < run.rungs.size(); ++k) {
                write_field(cfg.output_dir / rung_name(k), run.rungs[k].result.u);
            }
        }
        if (cfg.wants("csv")) {
            write_csv(cfg.output_dir / "ladder.csv", run.report);
        }
        if (cfg.wants("json")) {
            json rungs = json::array();
            for (const LadderRung& r : run.rungs) {
                rungs.push_back({{"row", row_to_json(r.row)}, {"solve", status_json(r.result)}});
            }
            write_json(cfg.output_dir / "ladder.json",
                       {{"level_name", run.report.level_name},
                        {"complete", run.complete},
                        {"message", run.message},
                        {"rungs", rungs},
                        {"config", cfg.document}});
        }
        if (!run.complete) {
            err << "partial ladder: " << run.message << '\n';
            return int(kExitNonConvergence);
        }
        return int(kExitOk);
    });
}

int cmd_verify(const RunConfig& cfg, std::ostream& err)
{
    return guarded(err, [&] {
        prepare_output(cfg);
        const VerifyResult r = run_verification_suite(cfg.verify);
        write_json(cfg.output_dir / "verify.json", verify_to_json(r));
        for (const CheckOutcome& c : r.checks) {
            if (!c.passed) {
                err << "check failed: " << c.name << '\n';
            }
        }
        return int(r.passed() ? kExitOk : kExitVerificationFailed);
    });
}

int cmd_checkf(const RunConfig& cfg, std::ostream& err)
{
    return guarded(err, [&] {
        const Field f = build_f(cfg);
        prepare_output(cfg);
        const FAdmissibility adm = f_admissibility(f);
        const GrowthReport growth = gradient_growth_check(f);

        json layers = json::array();
        bool blocki_ok = true;
        for (int k = 0; k < f.grid.nt; ++k) {
            const BlockiReport b = blocki_bound_check(f.layer_field(k));
            blocki_ok = blocki_ok && b.holds();
            layers.push_back({{"layer", k},
                              {"sup_lambda_max", number(b.sup_lambda_max)},
                              {"bound", number(b.bound)},
                              {"sup_grad_sqrt", number(b.sup_grad_sqrt)},
                              {"min_margin", number(b.min_margin)},
                              {"argmin", b.argmin},
                              {"checked_nodes", b.checked_nodes},
                              {"holds", b.holds()}});
        }

        write_json(cfg.output_dir / "checkf.json",
                   {{"admissibility",
                     {{"sup_f", number(adm.sup_f)},
                      {"sup_sqrt_f_t", number(adm.sup_sqrt_f_t)},
                      {"sup_grad_sqrt_f", number(adm.sup_grad_sqrt_f)},
                      {"sup_f_tt", number(adm.sup_f_tt)},
                      {"sup_hess_sqrt_f", number(adm.sup_hess_sqrt_f)},
                      {"max", number(adm.max())}}},
                    {"growth",
                     {{"constant", number(growth.constant)},
                      {"unbounded", growth.unbounded},
                      {"argmax_node", growth.argmax_node},
                      {"argmax_layer", growth.argmax_layer}}},
                    {"blocki", {{"holds", blocki_ok}, {"layers", layers}}}});
        if (growth.unbounded || !blocki_ok) {
            err << "f fails the gradient checks\n";
            return int(kExitVerificationFailed);
        }
        return int(kExitOk);
    });
}

int cmd_report(const std::vector<fs::path>& inputs, const fs::path& output, std::ostream& err)
{
    return guarded(err, [&] {
        if (inputs.empty()) {
            throw ConfigError("report needs at least one ladder CSV");
        }
        std::vector<std::pair<std::string, LadderReport>> reports;
        for (const fs::path& in : inputs) {
            std::ifstream is(in);
            if (!is) {
                throw IoError("cannot open " + in.string());
            }
            std::string source = in.parent_path().filename().string();
            if (source.empty()) {
                source = in.stem().string();
            }
            reports.emplace_back(source, read_ladder_csv(is));
        }
        if (output.has_parent_path()) {
            fs::create_directories(output.parent_path());
        }
        std::ofstream os(output);
        if (!os) {
            throw IoError("cannot write " + output.string());
        }
        write_long_format(os, reports);
        return int(kExitOk);
    });
}

}  // namespace volgeo
