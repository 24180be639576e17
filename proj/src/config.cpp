//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file config.cpp
//---------------------------------------------------------------------------//
#include "brwlab/config.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "brwlab/errors.hpp"
#include "brwlab/reference.hpp"

namespace brwlab
{
using nlohmann::json;

namespace
{
constexpr char const* experiment_table[] = {
    "check",
    "normalize",
    "exponents",
    "simulate",
    "lines",
    "cascade",
    "deviation",
    "lower-deviation",
    "lil",
    "many-to-one",
};

double number(json const& j, char const* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw ConfigError(fmt::format("missing numeric field '{}'", key));
    return it->get<double>();
}

DisplacementLaw parse_law(json const& j)
{
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("displacement law needs a 'kind'");
    auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian")
        return DisplacementLaw::gaussian(number(j, "mean"), number(j, "sd"));
    if (kind == "uniform")
        return DisplacementLaw::uniform(number(j, "lo"), number(j, "hi"));
    if (kind == "truncated_exponential")
        return DisplacementLaw::truncated_exponential(
            number(j, "lo"), number(j, "hi"), number(j, "exponent"));
    if (kind == "two_point")
        return DisplacementLaw::two_point(
            number(j, "x1"), number(j, "x2"), number(j, "p1"));
    if (kind == "shifted_exponential")
        return DisplacementLaw::shifted_exponential(number(j, "shift"),
                                                    number(j, "rate"));
    throw ConfigError(fmt::format("unknown displacement law '{}'", kind));
}

template<class T>
std::vector<T> as_vector(json const& j, char const* name)
{
    if (!j.is_array())
        throw ConfigError(fmt::format("'{}' must be an array", name));
    try
    {
        return j.get<std::vector<T>>();
    }
    catch (json::exception const& e)
    {
        throw ConfigError(fmt::format("bad entries in '{}': {}", name, e.what()));
    }
}
}  // namespace

//---------------------------------------------------------------------------//
std::string to_string(Experiment e)
{
    return experiment_table[static_cast<int>(e)];
}

Experiment experiment_from_string(std::string const& s)
{
    for (std::size_t i = 0; i < std::size(experiment_table); ++i)
    {
        if (s == experiment_table[i])
            return static_cast<Experiment>(i);
    }
    throw ConfigError(fmt::format("unknown experiment '{}'", s));
}

std::vector<std::string> experiment_names()
{
    return {std::begin(experiment_table), std::end(experiment_table)};
}

std::string to_string(Conditioning c)
{
    switch (c)
    {
        case Conditioning::automatic:
            return "auto";
        case Conditioning::survival:
            return "survival";
        case Conditioning::none:
            return "none";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
PointProcessModel parse_model(json const& j)
{
    if (!j.is_object())
        throw ConfigError("'model' must be an object");
    std::string label = j.value("label", std::string{});
    bool lattice = j.value("lattice", false);
    try
    {
        if (j.contains("reference"))
        {
            auto name = j.at("reference").get<std::string>();
            if (name == "pd_family")
                return reference::pd_family(number(j, "p"), number(j, "d"));
            return reference::by_name(name);
        }
        if (j.contains("atoms"))
        {
            std::vector<DisplacementAtom> atoms;
            for (auto const& a : j.at("atoms"))
            {
                DisplacementAtom atom;
                atom.weight = number(a, "prob");
                atom.displacements
                    = as_vector<double>(a.at("displacements"), "displacements");
                atoms.push_back(std::move(atom));
            }
            return PointProcessModel::finite_support(
                std::move(atoms), label, lattice);
        }
        if (j.contains("offspring"))
        {
            if (!j.contains("law"))
                throw ConfigError("parametric model needs a 'law'");
            return PointProcessModel::parametric(
                as_vector<double>(j.at("offspring"), "offspring"),
                parse_law(j.at("law")),
                label,
                lattice,
                j.value("truncation", std::size_t(0)));
        }
    }
    catch (DomainError const& e)
    {
        throw ConfigError(fmt::format("invalid model: {}", e.what()));
    }
    catch (json::exception const& e)
    {
        throw ConfigError(fmt::format("invalid model: {}", e.what()));
    }
    throw ConfigError("model needs 'reference', 'atoms' or 'offspring'");
}

std::vector<double> parse_grid(json const& j, char const* name)
{
    std::vector<double> out;
    if (j.is_array())
    {
        out = as_vector<double>(j, name);
    }
    else if (j.is_object() && j.contains("geometric"))
    {
        auto g = as_vector<double>(j.at("geometric"), name);
        if (g.size() != 3 || !(g[0] > 0) || !(g[1] >= g[0]) || g[2] < 1)
            throw ConfigError(
                fmt::format("'{}' geometric grid needs [lo > 0, hi, count]", name));
        auto count = std::size_t(g[2]);
        for (std::size_t i = 0; i < count; ++i)
        {
            double f = count > 1 ? double(i) / double(count - 1) : 0.0;
            out.push_back(g[0] * std::pow(g[1] / g[0], f));
        }
    }
    else if (j.is_object())
    {
        double from = number(j, "from"), to = number(j, "to"),
               step = number(j, "step");
        if (!(step > 0) || to < from)
            throw ConfigError(
                fmt::format("'{}' range needs step > 0 and to >= from", name));
        auto count = std::size_t(std::floor((to - from) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(from + double(i) * step);
    }
    else
    {
        throw ConfigError(fmt::format("'{}' must be an array or a range", name));
    }
    if (out.empty())
        throw ConfigError(fmt::format("grid '{}' is empty", name));
    for (double v : out)
    {
        if (!std::isfinite(v))
            throw ConfigError(fmt::format("grid '{}' has a non-finite entry", name));
    }
    return out;
}

//---------------------------------------------------------------------------//
ExperimentConfig parse_config(json doc,
                              Experiment experiment,
                              CliOverrides const& overrides)
{
    if (!doc.is_object())
        throw ConfigError("configuration must be a JSON object");
    if (doc.contains("experiment")
        && experiment_from_string(doc.at("experiment").get<std::string>())
               != experiment)
    {
        throw ConfigError(fmt::format(
            "configuration is for '{}', not '{}'",
            doc.at("experiment").get<std::string>(),
            to_string(experiment)));
    }
    doc["experiment"] = to_string(experiment);
    if (overrides.seed)
        doc["seed"] = *overrides.seed;
    if (overrides.replicas)
        doc["replicas"] = *overrides.replicas;

    ExperimentConfig cfg;
    cfg.experiment = experiment;
    try
    {
        auto nonneg_int = [](json const& v) {
            return v.is_number_unsigned()
                   || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        };
        if (!doc.contains("seed") || !nonneg_int(doc.at("seed")))
            throw ConfigError("a non-negative integer 'seed' is required");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("replicas"))
        {
            if (!nonneg_int(doc.at("replicas")))
                throw ConfigError("'replicas' must be a positive integer");
            cfg.replicas = doc.at("replicas").get<std::uint64_t>();
        }
        if (cfg.replicas < 1)
            throw ConfigError("'replicas' must be at least 1");

        if (!doc.contains("model"))
            throw ConfigError("a 'model' section is required");
        auto const& mj = doc.at("model");
        cfg.raw_model = parse_model(mj);
        cfg.normalize = mj.value("normalize", false);
        cfg.model = cfg.normalize ? normalize_to_boundary(cfg.raw_model)
                                  : cfg.raw_model;

        if (doc.contains("grids"))
        {
            auto const& g = doc.at("grids");
            if (!g.is_object())
                throw ConfigError("'grids' must be an object");
            if (g.contains("n"))
            {
                for (double v : parse_grid(g.at("n"), "n"))
                {
                    if (v < 0 || v != std::floor(v))
                        throw ConfigError("grid 'n' needs non-negative integers");
                    cfg.n.push_back(std::size_t(v));
                }
            }
            if (g.contains("lambda"))
                cfg.lambda = parse_grid(g.at("lambda"), "lambda");
            if (g.contains("t"))
                cfg.t = parse_grid(g.at("t"), "t");
            if (g.contains("eps"))
                cfg.eps = parse_grid(g.at("eps"), "eps");
            if (g.contains("a"))
                cfg.a = parse_grid(g.at("a"), "a");
            if (g.contains("x"))
                cfg.x = parse_grid(g.at("x"), "x");
        }

        if (doc.contains("pruning"))
        {
            auto const& p = doc.at("pruning");
            auto kind = p.value("kind", std::string("none"));
            if (kind == "none")
                cfg.pruning.kind = PruningKind::none;
            else if (kind == "upper_barrier")
                cfg.pruning.kind = PruningKind::upper_barrier;
            else if (kind == "branch_and_bound_safe")
                cfg.pruning.kind = PruningKind::branch_and_bound_safe;
            else
                throw ConfigError(fmt::format("unknown pruning kind '{}'", kind));
            cfg.pruning.barrier_offset
                = p.value("offset", cfg.pruning.barrier_offset);
        }

        auto cond = doc.value("conditioning", std::string("auto"));
        if (cond == "auto")
            cfg.conditioning = Conditioning::automatic;
        else if (cond == "survival")
            cfg.conditioning = Conditioning::survival;
        else if (cond == "none")
            cfg.conditioning = Conditioning::none;
        else
            throw ConfigError(fmt::format("unknown conditioning '{}'", cond));

        if (doc.contains("output"))
        {
            auto const& o = doc.at("output");
            cfg.out_dir = o.value("dir", std::string{});
            auto fmt_name = o.value("format", std::string("json"));
            if (fmt_name == "json")
                cfg.format = OutputFormat::json;
            else if (fmt_name == "csv")
                cfg.format = OutputFormat::csv;
            else
                throw ConfigError(
                    fmt::format("unknown output format '{}'", fmt_name));
        }
        if (doc.contains("options"))
        {
            if (!doc.at("options").is_object())
                throw ConfigError("'options' must be an object");
            cfg.options = doc.at("options");
        }
    }
    catch (json::exception const& e)
    {
        throw ConfigError(fmt::format("malformed configuration: {}", e.what()));
    }
    catch (DomainError const& e)
    {
        throw ConfigError(fmt::format("invalid configuration: {}", e.what()));
    }
    if (overrides.out_dir)
        cfg.out_dir = *overrides.out_dir;
    if (overrides.format)
        cfg.format = *overrides.format;

    // Output location and format do not change results
    doc.erase("output");
    cfg.source = std::move(doc);
    return cfg;
}

ExperimentConfig load_config(std::string const& path,
                             Experiment experiment,
                             CliOverrides const& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open configuration '{}'", path));
    json doc;
    try
    {
        doc = json::parse(in, nullptr, true, true);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError(fmt::format("cannot parse '{}': {}", path, e.what()));
    }
    return parse_config(std::move(doc), experiment, overrides);
}

std::string config_hash(ExperimentConfig const& cfg)
{
    std::string text = cfg.source.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return fmt::format("{:016x}", h);
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
