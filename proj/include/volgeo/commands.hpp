#pragma once

#include "volgeo/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace volgeo {

enum ExitCode : int
{
    kExitOk = 0,
    kExitNonConvergence = 2,
    kExitInvalidConfig = 3,
    kExitVerificationFailed = 4,
};

/// One solve at the first level; writes solution.field, report.csv and report.json.
int cmd_solve(const RunConfig& cfg, std::ostream& err);
/// Full ladder; writes ladder.csv, ladder.json and rung_XX.field for every completed rung.
int cmd_ladder(const RunConfig& cfg, std::ostream& err);
/// Oracle suite; writes verify.json.
int cmd_verify(const RunConfig& cfg, std::ostream& err);
/// Admissibility of the configured f; writes checkf.json.
int cmd_checkf(const RunConfig& cfg, std::ostream& err);
/// Merges ladder CSVs into one long-format table.
int cmd_report(const std::vector<std::filesystem::path>& inputs,
               const std::filesystem::path& output, std::ostream& err);

nlohmann::json row_to_json(const LadderRow& row);
nlohmann::json verify_to_json(const VerifyResult& r);

}  // namespace volgeo
