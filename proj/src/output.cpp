//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file output.cpp
//---------------------------------------------------------------------------//
#include "brwlab/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "brwlab/errors.hpp"

namespace brwlab
{
using nlohmann::json;

//---------------------------------------------------------------------------//
void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size())
    {
        throw std::logic_error(fmt::format(
            "table '{}' row has {} cells for {} columns",
            name,
            row.size(),
            columns.size()));
    }
    rows.push_back(std::move(row));
}

Table& ExperimentResult::table(std::string name,
                               std::vector<std::string> columns)
{
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
}

Table const* ExperimentResult::find(std::string const& name) const
{
    for (auto const& t : tables)
    {
        if (t.name == name)
            return &t;
    }
    return nullptr;
}

//---------------------------------------------------------------------------//
std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

namespace
{
std::string csv_cell(Cell const& c)
{
    return std::visit(
        [](auto const& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_number(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>)
            {
                if (v.find_first_of(",\"\n") == std::string::npos)
                    return v;
                std::string q = "\"";
                for (char ch : v)
                {
                    if (ch == '"')
                        q += '"';
                    q += ch;
                }
                return q + "\"";
            }
            else
                return std::to_string(v);
        },
        c);
}

json json_cell(Cell const& c)
{
    return std::visit(
        [](auto const& v) -> json {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
            {
                if (std::isnan(v))
                    return nullptr;
                if (std::isinf(v))
                    return format_number(v);
            }
            return v;
        },
        c);
}
}  // namespace

void write_csv(Table const& t, std::string const& hash, std::ostream& out)
{
    out << "# schema=" << schema_version << " table=" << t.name
        << " config=" << hash << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (auto const& row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

json to_json(ExperimentResult const& r, ExperimentConfig const& cfg)
{
    json doc;
    doc["schema"] = schema_version;
    doc["experiment"] = r.experiment;
    doc["config_hash"] = config_hash(cfg);
    doc["config"] = cfg.source;
    doc["summary"] = r.summary;
    doc["warnings"] = r.warnings;
    json tables = json::object();
    for (auto const& t : r.tables)
    {
        json rows = json::array();
        for (auto const& row : t.rows)
        {
            json o = json::object();
            for (std::size_t i = 0; i < row.size(); ++i)
                o[t.columns[i]] = json_cell(row[i]);
            rows.push_back(std::move(o));
        }
        tables[t.name] = std::move(rows);
    }
    doc["tables"] = std::move(tables);
    return doc;
}

void emit(ExperimentResult const& r,
          ExperimentConfig const& cfg,
          std::ostream& out)
{
    std::string const hash = config_hash(cfg);
    if (cfg.out_dir.empty())
    {
        if (cfg.format == OutputFormat::json)
        {
            out << to_json(r, cfg).dump(2) << '\n';
            return;
        }
        for (std::size_t i = 0; i < r.tables.size(); ++i)
        {
            if (i)
                out << '\n';
            write_csv(r.tables[i], hash, out);
        }
        return;
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec)
    {
        throw ConfigError(fmt::format(
            "cannot create output directory '{}': {}", cfg.out_dir, ec.message()));
    }
    auto open = [&](std::string const& name) {
        fs::path p = fs::path(cfg.out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw ConfigError(fmt::format("cannot write '{}'", p.string()));
        return f;
    };
    if (cfg.format == OutputFormat::json)
    {
        auto f = open(r.experiment + ".json");
        f << to_json(r, cfg).dump(2) << '\n';
        return;
    }
    for (auto const& t : r.tables)
    {
        auto f = open(r.experiment + "_" + t.name + ".csv");
        write_csv(t, hash, f);
    }
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
