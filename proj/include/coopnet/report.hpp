#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "error.hpp"

namespace coopnet {

inline constexpr const char* kVersion = "0.1.0";

/*!
 * One result table. Cells are JSON scalars; null marks a value that is not
 * defined for the row (e.g. psi_hat when no outage was observed).
 */
struct Report
{
    std::string command;
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

/// Shortest decimal string that parses back to exactly v.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string csv_cell(const nlohmann::json& v)
{
    switch (v.type())
    {
    case nlohmann::json::value_t::null: return {};
    case nlohmann::json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case nlohmann::json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
    case nlohmann::json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
    case nlohmann::json::value_t::number_float: return format_double(v.get<double>());
    case nlohmann::json::value_t::string:
    {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s)
        {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + '"';
    }
    default: return v.dump();
    }
}

} // namespace detail

/// Header-only data rows (no metadata); what determinism checks compare.
inline std::string rows_to_csv(const Report& r)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << detail::csv_cell(row[i]);
        os << '\n';
    }
    return os.str();
}

/// Metadata as "# key: value" comment lines, then the table.
inline std::string to_csv(const Report& r)
{
    std::ostringstream os;
    os << "# command: " << r.command << '\n';
    for (const auto& [key, value] : r.metadata.items())
        os << "# " << key << ": " << value.dump() << '\n';
    os << rows_to_csv(r);
    return os.str();
}

inline nlohmann::json to_json(const Report& r)
{
    nlohmann::json j;
    j["command"] = r.command;
    j["metadata"] = r.metadata;
    j["columns"] = r.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows)
    {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i)
            obj[r.columns[i]] = row[i];
        j["rows"].push_back(std::move(obj));
    }
    return j;
}

inline Report report_from_json(const nlohmann::json& j)
{
    Report r;
    r.command = j.at("command").get<std::string>();
    r.metadata = j.at("metadata");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& obj : j.at("rows"))
    {
        std::vector<nlohmann::json> row;
        for (const auto& c : r.columns)
            row.push_back(obj.at(c));
        r.rows.push_back(std::move(row));
    }
    return r;
}

inline std::string render(const Report& r, OutputFormat format)
{
    return format == OutputFormat::csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

/// Write the report to `path`, or to stdout when the path is empty.
inline void emit(const Report& r, OutputFormat format, const std::string& path)
{
    const std::string text = render(r, format);
    if (path.empty())
    {
        std::cout << text << std::flush;
        if (!std::cout)
            throw IoError("failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

} // namespace coopnet
