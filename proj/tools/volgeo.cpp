#include "volgeo/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace volgeo;

    CLI::App app{"volgeo: finite-difference solver and checks for the perturbed geodesic equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    const auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", overrides, "override a dotted key, e.g. solver.newton_tol=1e-8");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve at the first level");
    CLI::App* ladder = app.add_subcommand("ladder", "run the continuation ladder");
    CLI::App* verify = app.add_subcommand("verify", "run the oracle suite");
    CLI::App* checkf = app.add_subcommand("checkf", "admissibility checks on the configured f");
    CLI::App* show = app.add_subcommand("config", "print the merged configuration");
    for (CLI::App* sub : {solve, ladder, verify, checkf, show}) {
        add_config(sub);
    }

    CLI::App* report = app.add_subcommand("report", "merge ladder CSVs into a long-format table");
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path output = "report_long.csv";
    report->add_option("inputs", inputs, "ladder CSV files")->required()->check(CLI::ExistingFile);
    report->add_option("-o,--output", output, "output CSV");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidConfig;
    }

    if (report->parsed()) {
        return cmd_report(inputs, output, std::cerr);
    }

    RunConfig cfg;
    try {
        cfg = config_path.empty() ? parse_run_config(nullptr, overrides)
                                  : load_run_config(config_path, overrides);
    }
    catch (const Error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    }

    if (show->parsed()) {
        std::cout << cfg.document.dump(2) << '\n';
        return kExitOk;
    }
    if (solve->parsed()) {
        return cmd_solve(cfg, std::cerr);
    }
    if (ladder->parsed()) {
        return cmd_ladder(cfg, std::cerr);
    }
    if (verify->parsed()) {
        return cmd_verify(cfg, std::cerr);
    }
    return cmd_checkf(cfg, std::cerr);
}
