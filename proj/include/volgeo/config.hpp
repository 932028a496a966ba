#pragma once

#include "volgeo/diagnostics.hpp"
#include "volgeo/pde.hpp"
#include "volgeo/solver.hpp"
#include "volgeo/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace volgeo {

class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Problem modes: constant ε ladder, a fixed positive f, or f >= 0 shifted by a δ ladder.
enum class ProblemMode
{
    EpsilonLadder,
    FixedF,
    DegenerateF,
};

struct RunConfig
{
    /// Defaults merged with the user document and the command-line overrides.
    nlohmann::json document;

    SpaceTimeGrid grid;
    ProblemMode mode = ProblemMode::EpsilonLadder;
    SolverConfig solver;
    DiagnosticsOptions diagnostics;
    VerifyOptions verify;
    std::filesystem::path output_dir = "out";
    std::vector<std::string> formats{"csv", "json", "field"};

    bool wants(const std::string& format) const;
};

nlohmann::json default_config();

/// Sets a dotted path ("solver.newton_tol=1e-8"); the value is parsed as JSON when possible and
/// kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Merges `user` and `overrides` over the defaults and validates every block.
RunConfig parse_run_config(const nlohmann::json& user,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

Metric build_metric(const RunConfig& cfg);
SpatialField build_spatial(const nlohmann::json& family, const SpatialGrid& g, const char* what);
Field build_f(const RunConfig& cfg);

/// Problem at the first ladder level (ε₀, or δ₀ for degenerate f, or 0 for fixed f).
/// Throws ConfigError naming the node when the data are not admissible.
ProblemData build_problem(const RunConfig& cfg);

}  // namespace volgeo
