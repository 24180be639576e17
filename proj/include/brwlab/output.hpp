//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/output.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
using Cell = std::variant<double, std::int64_t, std::string, bool>;

//! Rectangular result table; one CSV file or one JSON array of objects
struct Table
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct ExperimentResult
{
    std::string experiment;
    std::deque<Table> tables;  //!< references stay valid as tables are added
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> warnings;

    Table& table(std::string name, std::vector<std::string> columns);
    Table const* find(std::string const& name) const;
};

//! Schema tag written to every CSV header and JSON document
inline constexpr char const* schema_version = "brwlab-1";

// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values
std::string format_number(double v);

void write_csv(Table const& t, std::string const& hash, std::ostream& out);
nlohmann::json to_json(ExperimentResult const& r, ExperimentConfig const& cfg);

/*!
 * Write to cfg.out_dir (one JSON document, or one CSV per table named
 * <experiment>_<table>.csv), or to \c out when no directory is set.
 */
void emit(ExperimentResult const& r,
          ExperimentConfig const& cfg,
          std::ostream& out);

//---------------------------------------------------------------------------//
}  // namespace brwlab
