//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file cli.cpp
//---------------------------------------------------------------------------//
#include "brwlab/cli.hpp"

#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "brwlab/config.hpp"
#include "brwlab/errors.hpp"
#include "brwlab/experiments.hpp"
#include "brwlab/output.hpp"
#include "brwlab/parallel.hpp"

namespace brwlab
{
namespace
{
struct Flags
{
    std::string config;
    std::uint64_t seed{0};
    std::uint64_t replicas{0};
    unsigned threads{0};
    std::string out;
    std::string format;
};

char const* const descriptions[] = {
    "report boundary conditions and moment checks",
    "reduce a model to the boundary case and print the result",
    "exponents gamma or beta, extinction probability, ladder constants",
    "simulate trees: martingale means, tightness, trajectories, minima",
    "first-passage lines: identities, Nerman ratios, line-count laws",
    "sample the cascade fixed point and its tail diagnostics",
    "upper moderate deviations of the minimum",
    "lower deviations with direct and spinal estimators",
    "trajectories of the centered minimum along n = 2^j",
    "many-to-one identity: tree enumeration against walk Monte Carlo",
};

void add_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "override the configuration seed");
    sub->add_option("--replicas", f.replicas, "override the replica count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", f.threads, "worker threads (results do not "
                                            "depend on this)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "output directory (default: stdout)");
    sub->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void print_check_line(ExperimentResult const& r, std::ostream& err)
{
    if (!r.summary.contains("m2"))
        return;
    err << fmt::format("m1 = {}, m2 = {}, boundary {}\n",
                       format_number(r.summary["m1"]["value"].get<double>()),
                       format_number(r.summary["m2"]["value"].get<double>()),
                       r.summary["boundary"].get<std::string>());
}
}  // namespace

int run_cli(std::vector<std::string> const& args,
            std::ostream& out,
            std::ostream& err)
{
    CLI::App app{"Branching random walk experiments", "brwlab"};
    app.require_subcommand(1, 1);
    Flags flags;
    auto names = experiment_names();
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < names.size(); ++i)
    {
        auto* sub = app.add_subcommand(names[i], descriptions[i]);
        add_flags(sub, flags);
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return exit_code::ok;
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_code::config_error;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed())
        ++which;
    auto experiment = static_cast<Experiment>(which);
    auto* sub = subs[which];

    CliOverrides ov;
    if (sub->count("--seed"))
        ov.seed = flags.seed;
    if (sub->count("--replicas"))
        ov.replicas = flags.replicas;
    if (sub->count("--out"))
        ov.out_dir = flags.out;
    if (sub->count("--format"))
        ov.format = flags.format == "csv" ? OutputFormat::csv
                                          : OutputFormat::json;
    unsigned threads = flags.threads;
    if (!sub->count("--threads"))
        threads = std::max(1u, std::thread::hardware_concurrency());
    set_worker_count(threads);

    try
    {
        auto cfg = load_config(flags.config, experiment, ov);
        auto result = run_experiment(cfg);
        emit(result, cfg, out);
        if (experiment == Experiment::check
            || experiment == Experiment::normalize)
            print_check_line(result, err);
        for (auto const& w : result.warnings)
            err << "warning: " << w << '\n';
        return exit_code::ok;
    }
    catch (BudgetError const& e)
    {
        err << "budget exceeded: " << e.what() << '\n';
        return exit_code::budget_error;
    }
    catch (ConfigError const& e)
    {
        err << "configuration error: " << e.what() << '\n';
        return exit_code::config_error;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    }
}

int run_cli(int argc, char const* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
