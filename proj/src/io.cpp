#include "volgeo/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace volgeo {

namespace {

using nlohmann::json;

struct Column
{
    std::string name;
    std::function<double(const LadderRow&)> get;
    std::function<void(LadderRow&, double)> set;
};

template <typename T>
Column column(std::string name, T LadderRow::*member)
{
    return {std::move(name), [member](const LadderRow& r) { return double(r.*member); },
            [member](LadderRow& r, double v) {
                if constexpr (std::is_same_v<T, bool>) {
                    r.*member = v != 0.0;
                }
                else {
                    r.*member = static_cast<T>(v);
                }
            }};
}

const std::vector<Column>& value_columns()
{
    static const std::vector<Column> cols{
        column("sup_u", &LadderRow::sup_u),
        column("sup_u_t", &LadderRow::sup_u_t),
        column("sup_grad_u", &LadderRow::sup_grad_u),
        column("sup_u_tt", &LadderRow::sup_u_tt),
        column("sup_grad_u_t", &LadderRow::sup_grad_u_t),
        column("sup_lap_u", &LadderRow::sup_lap_u),
        column("sup_hess_u", &LadderRow::sup_hess_u),
        column("max_lambda1", &LadderRow::max_lambda1),
        column("max_h", &LadderRow::max_h),
        column("min_u_tt", &LadderRow::min_u_tt),
        column("min_b_u", &LadderRow::min_b_u),
        column("min_q", &LadderRow::min_q),
        column("min_margin", &LadderRow::min_margin),
        column("max_margin", &LadderRow::max_margin),
        column("newton_iterations", &LadderRow::newton_iterations),
        column("residual", &LadderRow::residual),
        column("energy", &LadderRow::energy),
        column("drift", &LadderRow::drift),
        column("third_derivative_proxy", &LadderRow::third_derivative_proxy),
        column("energy_formal", &LadderRow::energy_formal),
        column("converged", &LadderRow::converged),
    };
    return cols;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, sep)) {
        if (!item.empty() && item.back() == '\r') {
            item.pop_back();
        }
        out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    }
    catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw IoError("not a number in CSV: '" + s + "'");
    }
    return v;
}

void write_doubles(std::ostream& os, const Eigen::VectorXd& v)
{
    for (Index i = 0; i < v.size(); ++i) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v[i]);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        os.write(bytes, 8);
    }
}

Eigen::VectorXd read_doubles(std::istream& is, Index count)
{
    Eigen::VectorXd v(count);
    for (Index i = 0; i < count; ++i) {
        char bytes[8];
        if (!is.read(bytes, 8)) {
            throw IoError("field dump is truncated");
        }
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes, 8);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        v[i] = std::bit_cast<double>(bits);
    }
    return v;
}

void write_dump(const std::filesystem::path& path, const json& header, const Eigen::VectorXd& v)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
    os << header.dump() << '\n';
    write_doubles(os, v);
    if (!os) {
        throw IoError("failed writing " + path.string());
    }
}

std::pair<json, Eigen::VectorXd> read_dump(const std::filesystem::path& path, bool spatial)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::getline(is, line);
    json header;
    try {
        header = json::parse(line);
        const SpatialGrid g(header.at("dim").get<int>(), header.at("nx").get<int>(),
                            header.at("length").get<double>());
        const bool is_spatial = header.value("kind", std::string("spacetime")) == "spatial";
        if (is_spatial != spatial) {
            throw IoError(path.string() + " holds a " + (is_spatial ? "spatial" : "space-time")
                          + " field");
        }
        const Index count = spatial ? g.size() : g.size() * header.at("nt").get<int>();
        return {header, read_doubles(is, count)};
    }
    catch (const json::exception& e) {
        throw IoError("bad field header in " + path.string() + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> ladder_csv_columns(const std::string& level_name)
{
    std::vector<std::string> names{level_name};
    for (const auto& c : value_columns()) {
        names.push_back(c.name);
    }
    return names;
}

std::vector<std::pair<std::string, double>> ladder_row_values(const LadderRow& row)
{
    std::vector<std::pair<std::string, double>> out;
    for (const auto& c : value_columns()) {
        out.emplace_back(c.name, c.get(row));
    }
    return out;
}

void write_ladder_csv(std::ostream& os, const LadderReport& report)
{
    const auto names = ladder_csv_columns(report.level_name);
    for (std::size_t i = 0; i < names.size(); ++i) {
        os << (i ? "," : "") << names[i];
    }
    os << '\n';
    for (const LadderRow& row : report.rows) {
        os << format_double(row.level);
        for (const auto& c : value_columns()) {
            os << ',' << format_double(c.get(row));
        }
        os << '\n';
    }
}

LadderReport read_ladder_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw IoError("empty ladder CSV");
    }
    const auto header = split(line, ',');
    if (header.empty() || (header[0] != "epsilon" && header[0] != "delta")) {
        throw IoError("ladder CSV must start with an epsilon or delta column");
    }
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) {
        position[header[i]] = i;
    }
    for (const auto& c : value_columns()) {
        if (!position.count(c.name)) {
            throw IoError("ladder CSV lacks column " + c.name);
        }
    }

    LadderReport report;
    report.level_name = header[0];
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw IoError("ragged ladder CSV row: " + line);
        }
        LadderRow row;
        row.level = parse_double(cells[0]);
        for (const auto& c : value_columns()) {
            c.set(row, parse_double(cells[position[c.name]]));
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_long_format(std::ostream& os,
                       const std::vector<std::pair<std::string, LadderReport>>& reports)
{
    os << "source,rung,level_name,level,quantity,value\n";
    for (const auto& [source, report] : reports) {
        for (std::size_t k = 0; k < report.rows.size(); ++k) {
            const LadderRow& row = report.rows[k];
            for (const auto& c : value_columns()) {
                os << source << ',' << k << ',' << report.level_name << ','
                   << format_double(row.level) << ',' << c.name << ',' << format_double(c.get(row))
                   << '\n';
            }
        }
    }
}

void write_field(const std::filesystem::path& path, const Field& f)
{
    const json header{{"kind", "spacetime"},
                      {"dim", f.grid.dim()},
                      {"nx", f.grid.space.nx},
                      {"nt", f.grid.nt},
                      {"length", f.grid.space.length},
                      {"dtype", "float64-le"},
                      {"layout", "time-outer,space-inner"}};
    write_dump(path, header, f.values);
}

void write_field(const std::filesystem::path& path, const SpatialField& f)
{
    const json header{{"kind", "spatial"},
                      {"dim", f.grid.dim},
                      {"nx", f.grid.nx},
                      {"length", f.grid.length},
                      {"dtype", "float64-le"},
                      {"layout", "space"}};
    write_dump(path, header, f.values);
}

Field read_field(const std::filesystem::path& path)
{
    auto [header, values] = read_dump(path, false);
    const SpaceTimeGrid g(header.at("dim").get<int>(), header.at("nx").get<int>(),
                          header.at("nt").get<int>(), header.at("length").get<double>());
    return Field(g, std::move(values));
}

SpatialField read_spatial_field(const std::filesystem::path& path)
{
    auto [header, values] = read_dump(path, true);
    const SpatialGrid g(header.at("dim").get<int>(), header.at("nx").get<int>(),
                        header.at("length").get<double>());
    return SpatialField(g, std::move(values));
}

}  // namespace volgeo
