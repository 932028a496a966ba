#pragma once

// Serialized outputs: ladder CSVs, long-format comparison tables and raw field dumps.
//
// Field dump layout: one JSON header line, then little-endian float64 values, time-outer and
// space-inner (x fastest in dim 2).

#include "volgeo/diagnostics.hpp"
#include "volgeo/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace volgeo {

class IoError : public Error
{
public:
    using Error::Error;
};

/// %.17g.
std::string format_double(double v);

/// Header names in output order; the first column is the level name ("epsilon" or "delta").
std::vector<std::string> ladder_csv_columns(const std::string& level_name);

/// Every numeric column of a row except the level, in CSV order.
std::vector<std::pair<std::string, double>> ladder_row_values(const LadderRow& row);

void write_ladder_csv(std::ostream& os, const LadderReport& report);
LadderReport read_ladder_csv(std::istream& is);

/// Long format: source,rung,level_name,level,quantity,value with one line per numeric column.
void write_long_format(std::ostream& os,
                       const std::vector<std::pair<std::string, LadderReport>>& reports);

void write_field(const std::filesystem::path& path, const Field& f);
void write_field(const std::filesystem::path& path, const SpatialField& f);
Field read_field(const std::filesystem::path& path);
SpatialField read_spatial_field(const std::filesystem::path& path);

}  // namespace volgeo
