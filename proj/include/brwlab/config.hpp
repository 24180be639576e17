//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/config.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw.hpp"
#include "model.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
enum class Experiment
{
    check,
    normalize,
    exponents,
    simulate,
    lines,
    cascade,
    deviation,
    lower_deviation,
    lil,
    many_to_one,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(std::string const& s);
std::vector<std::string> experiment_names();

enum class Conditioning
{
    automatic,  //!< survival for Schroder models, none otherwise
    survival,
    none,
};

std::string to_string(Conditioning c);

enum class OutputFormat
{
    json,
    csv,
};

//---------------------------------------------------------------------------//
/*!
 * \brief Parsed experiment configuration.
 *
 * \c source keeps the effective JSON document (after command-line
 * overrides) and is what the config hash is computed from.
 */
struct ExperimentConfig
{
    Experiment experiment{Experiment::check};
    PointProcessModel model;
    PointProcessModel raw_model;  //!< as declared, before normalization
    bool normalize{false};
    std::uint64_t seed{0};
    std::uint64_t replicas{1000};

    std::vector<std::size_t> n;
    std::vector<double> lambda;
    std::vector<double> t;
    std::vector<double> eps;
    std::vector<double> a;
    std::vector<double> x;

    PruningPolicy pruning;
    Conditioning conditioning{Conditioning::automatic};
    std::string out_dir;
    OutputFormat format{OutputFormat::json};

    nlohmann::json options = nlohmann::json::object();
    nlohmann::json source;

    //! Experiment-specific option with a default
    template<class T>
    T option(char const* key, T fallback) const
    {
        auto it = options.find(key);
        return it == options.end() ? fallback : it->template get<T>();
    }
};

struct CliOverrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replicas;
    std::optional<std::string> out_dir;
    std::optional<OutputFormat> format;
};

// Model from {"reference": name} | {"atoms": [...]} | {"offspring", "law"}
PointProcessModel parse_model(nlohmann::json const& j);

// Numeric grid from an array, {"from", "to", "step"}, or
// {"geometric": [lo, hi, count]}
std::vector<double> parse_grid(nlohmann::json const& j, char const* name);

ExperimentConfig parse_config(nlohmann::json doc,
                              Experiment experiment,
                              CliOverrides const& overrides = {});

ExperimentConfig load_config(std::string const& path,
                             Experiment experiment,
                             CliOverrides const& overrides = {});

// FNV-1a over the canonical dump of the effective configuration
std::string config_hash(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
}  // namespace brwlab
