//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file acceptance.cpp
//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
//---------------------------------------------------------------------------//
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "brwlab/brw.hpp"
#include "brwlab/cli.hpp"
#include "brwlab/config.hpp"
#include "brwlab/experiments.hpp"
#include "brwlab/exponents.hpp"
#include "brwlab/lines.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/walk.hpp"

using namespace brwlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
struct Outcome
{
    bool pass{true};
    std::string detail;

    void require(bool ok, std::string const& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what;
        if (!ok)
        {
            pass = false;
            detail += " [fail]";
        }
    }
};

int failures = 0;
std::vector<int> selected;

void criterion(int id, char const* name, std::function<Outcome()> const& body)
{
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end())
        return;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (std::exception const& e)
    {
        o.pass = false;
        o.detail = fmt::format("exception: {}", e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    failures += !o.pass;
    std::cout << fmt::format("criterion {:2d} {} {}: {} ({:.1f} s)\n", id,
                             o.pass ? "PASS" : "FAIL", name, o.detail, secs)
              << std::flush;
}

ExperimentResult run(json doc, Experiment e)
{
    return run_experiment(parse_config(std::move(doc), e));
}

double cell(Table const& t, std::size_t row, std::string const& col)
{
    auto it = std::find(t.columns.begin(), t.columns.end(), col);
    auto const& c = t.rows.at(row).at(std::size_t(it - t.columns.begin()));
    if (auto const* d = std::get_if<double>(&c))
        return *d;
    return double(std::get<std::int64_t>(c));
}

std::string text(Table const& t, std::size_t row, std::string const& col)
{
    auto it = std::find(t.columns.begin(), t.columns.end(), col);
    return std::get<std::string>(t.rows.at(row).at(std::size_t(it - t.columns.begin())));
}

bool within_rel(double value, double target, double rel)
{
    return std::fabs(value - target) <= rel * std::fabs(target);
}

struct CliRun
{
    int code;
    std::string out;
};

CliRun cli(std::vector<std::string> const& args)
{
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str()};
}

fs::path write_config(std::string const& name, json const& doc)
{
    auto dir = fs::temp_directory_path() / "brwlab_acceptance";
    fs::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

// First b > 0 where sum_i e^{-b x_i} drops below 1 for one atom, inf if never
double atom_root(std::vector<double> const& xs)
{
    auto f = [&](double b) {
        double s = 0;
        for (double x : xs)
            s += std::exp(-b * x);
        return s - 1;
    };
    double lo = 0, hi = INFINITY;
    for (double b = 1e-3; b <= 20; b += 1e-3)
    {
        if (f(b) < 0)
        {
            hi = b;
            break;
        }
        lo = b;
    }
    if (std::isinf(hi))
        return hi;
    for (int i = 0; i < 200; ++i)
    {
        double mid = 0.5 * (lo + hi);
        (f(mid) >= 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t brute_ladder_count(std::vector<double> const& path, double x)
{
    std::uint64_t count = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
    {
        bool record = true;
        for (std::size_t j = 0; j < k && record; ++j)
            record = path[k] < path[j];
        if (record && path[k] >= -x)
            ++count;
    }
    return count;
}

json model_ref(char const* name)
{
    return {{"reference", name}};
}
}  // namespace

int main(int argc, char** argv)
{
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));
    auto gs_gamma = reference::schroder_gaussian_gamma();
    auto b_beta = beta(reference::bottcher_two_atom()).beta;

    criterion(1, "exact identities", [] {
        Outcome o;
        std::uint64_t fails = 0;
        for (char const* name :
             {"schroder_gaussian", "quadratic_boundary", "bottcher_two_atom"})
        {
            auto r = run({{"experiment", "lines"},
                          {"seed", 101},
                          {"replicas", 2000},
                          {"model", model_ref(name)},
                          {"grids", {{"lambda", {0.5, 1, 2, 4, 6}}, {"a", {1.0, 2.0}}}},
                          {"options", {{"mode", "identity"}}}},
                         Experiment::lines);
            fails += r.summary["exact_identity_failures"].get<std::uint64_t>();
        }
        o.require(fails == 0,
                  fmt::format("tree identity and strict overshoot failures {}", fails));

        bool origin = true;
        SimulateOptions so;
        so.n_max = 4;
        for (auto const& m : {reference::schroder_gaussian(), reference::bottcher_two_atom()})
        {
            for (std::uint64_t r = 0; r < 100; ++r)
            {
                auto t = simulate(m, so, 102, r);
                origin = origin && t.generations[0].W == 1.0 && t.generations[0].D == 0.0;
            }
        }
        o.require(origin, "W_0 = 1 and D_0 = 0");

        std::uint64_t mismatches = 0, trees = 0;
        for (auto const& m : {reference::bottcher_two_atom(), reference::quadratic_boundary()})
        {
            for (std::uint64_t r = 0; r < 100; ++r)
            {
                std::size_t n = 1 + r % 8;
                mismatches += minimum_exact(m, n, 103, r) != minimum_enumerate(m, n, 103, r);
                ++trees;
            }
        }
        o.require(mismatches == 0,
                  fmt::format("branch and bound vs enumeration mismatches {}/{}",
                              mismatches, trees));
        return o;
    });

    criterion(2, "martingale means", [] {
        Outcome o;
        for (auto const& [name, m] :
             {std::pair{"schroder_gaussian", reference::schroder_gaussian()},
              std::pair{"bottcher_two_atom", reference::bottcher_two_atom()}})
        {
            auto mm = martingale_means(m, 12, 100000, 201);
            double wz = 0, dz = 0;
            for (std::size_t n = 1; n <= 12; ++n)
            {
                wz = std::max(wz, std::fabs(mm.W[n].value - 1) / mm.W[n].se);
                dz = std::max(dz, std::fabs(mm.D[n].value) / mm.D[n].se);
            }
            o.require(wz <= 4 && dz <= 4,
                      fmt::format("{}: max |W - 1|/SE {:.2f}, max |D|/SE {:.2f}", name, wz, dz));
        }
        return o;
    });

    criterion(3, "many-to-one oracle", [] {
        Outcome o;
        auto fs_ = registered_functionals();
        for (std::size_t n : {3u, 6u})
        {
            auto rows = many_to_one_check(reference::bottcher_two_atom(), n, fs_,
                                          1000000, 10000, 301);
            double worst = 0;
            for (auto const& r : rows)
                worst = std::max(worst, r.discrepancy);
            o.require(rows.size() == 5 && worst <= 3,
                      fmt::format("n={}: {} functionals, max discrepancy {:.2f} SE", n,
                                  rows.size(), worst));
        }
        return o;
    });

    criterion(4, "exponent closed forms", [b_beta] {
        Outcome o;
        double worst = 0;
        for (auto [p, d] : {std::pair{0.5, 1.0}, std::pair{0.3, 1.2}, std::pair{0.8, 0.4}})
        {
            auto g = gamma(reference::pd_family(p, d), 0.0).gamma;
            worst = std::max(worst, std::fabs(g - std::log(1 / p) / d));
        }
        o.require(worst <= 1e-8, fmt::format("gamma vs ln(1/p)/d max error {:.2e}", worst));

        double oracle = INFINITY;
        auto const bottcher = reference::bottcher_two_atom();
        for (auto const& a : bottcher.atoms())
            oracle = std::min(oracle, atom_root(a.displacements));
        o.require(std::fabs(b_beta - oracle) <= 1e-8,
                  fmt::format("beta {:.10f} vs atom oracle {:.10f}", b_beta, oracle));

        double q = extinction_probability(reference::quadratic_pgf());
        o.require(std::fabs(q - 1.0 / 3) <= 1e-10, fmt::format("q = {:.12f}", q));
        return o;
    });

    criterion(5, "cascade self-consistency", [] {
        Outcome o;
        auto r = run({{"experiment", "cascade"},
                      {"seed", 501},
                      {"replicas", 1000000},
                      {"model", model_ref("schroder_gaussian")},
                      {"options", {{"mode", "line_closure"}, {"self_consistency", true}}}},
                     Experiment::cascade);
        auto const& sc = r.summary["self_consistency"];
        o.require(sc["n"].get<std::uint64_t>() >= 900000,
                  fmt::format("{} samples", sc["n"].get<std::uint64_t>()));
        o.require(sc["pass"].get<bool>(),
                  fmt::format("KS {:.5f} vs 1% critical {:.5f}", sc["ks"].get<double>(),
                              sc["critical"].get<double>()));
        return o;
    });

    criterion(6, "Schroder small deviations", [gs_gamma] {
        Outcome o;
        auto r = run({{"experiment", "cascade"},
                      {"seed", 601},
                      {"replicas", 10000000},
                      {"model", model_ref("schroder_gaussian")},
                      {"grids",
                       {{"t", {{"geometric", {10, 100000, 9}}}},
                        {"eps", {{"geometric", {1e-5, 1e-2, 7}}}}}},
                      {"options", {{"mode", "line_closure"}, {"self_consistency", false}}}},
                     Experiment::cascade);
        double sd = r.summary["small_dev_fit"]["slope"].get<double>();
        double lap = r.summary["laplace_fit"]["slope"].get<double>();
        o.require(within_rel(sd, gs_gamma, 0.2),
                  fmt::format("small-deviation slope {:.3f} vs gamma {:.3f}", sd, gs_gamma));
        o.require(within_rel(lap, -gs_gamma, 0.2),
                  fmt::format("Laplace slope {:.3f} vs -gamma", lap));
        return o;
    });

    criterion(7, "Bottcher tails", [b_beta] {
        Outcome o;
        auto r = run({{"experiment", "cascade"},
                      {"seed", 701},
                      {"replicas", 200000},
                      {"model", model_ref("bottcher_two_atom")},
                      {"grids", {{"t", {{"geometric", {10, 1000, 9}}}}}},
                      {"options",
                       {{"mode", "line_closure"},
                        {"self_consistency", false},
                        {"r", {2, 4, 8, 16, 32, 64, 128}},
                        {"K", 2.0}}}},
                     Experiment::cascade);
        double lap = r.summary["laplace_fit"]["slope"].get<double>();
        o.require(within_rel(lap, b_beta, 0.3),
                  fmt::format("log(-log Laplace) slope {:.3f} vs beta {:.3f}", lap, b_beta));
        o.require(r.summary["envelope_holds"].get<bool>(), "lower-bound envelope at every r");
        return o;
    });

    criterion(8, "moderate deviations", [gs_gamma, b_beta] {
        Outcome o;
        auto gs = run({{"experiment", "deviation"},
                       {"seed", 801},
                       {"replicas", 1000000},
                       {"model", model_ref("schroder_gaussian")},
                       {"grids", {{"n", {1024}}, {"lambda", {{"from", 2}, {"to", 8}, {"step", 1}}}}},
                       {"options", {{"variant", "both"}}}},
                      Experiment::deviation);
        auto const* f = gs.find("fit");
        for (std::size_t i = 0; i < f->rows.size(); ++i)
        {
            double s = cell(*f, i, "slope");
            o.require(within_rel(s, -gs_gamma, 0.25),
                      fmt::format("Schroder {} slope {:.3f} vs -gamma {:.3f}",
                                  text(*f, i, "variant"), s, -gs_gamma));
        }
        o.require(f->rows.size() == 2, "Schroder fits for both variants");

        auto b = run({{"experiment", "deviation"},
                      {"seed", 802},
                      {"replicas", 1000000},
                      {"model", model_ref("bottcher_two_atom")},
                      {"grids", {{"n", {1024}}, {"lambda", {{"from", 1}, {"to", 4}, {"step", 0.5}}}}},
                      {"options", {{"variant", "both"}}}},
                     Experiment::deviation);
        auto const* fb = b.find("fit");
        for (std::size_t i = 0; i < fb->rows.size(); ++i)
        {
            double s = cell(*fb, i, "slope");
            o.require(within_rel(s, b_beta, 0.3),
                      fmt::format("Bottcher {} log(-log) slope {:.3f} vs beta {:.3f}",
                                  text(*fb, i, "variant"), s, b_beta));
        }
        o.require(fb->rows.size() == 2, "Bottcher fits for both variants");
        return o;
    });

    criterion(9, "left tail envelope", [] {
        Outcome o;
        auto r = run({{"experiment", "lower-deviation"},
                      {"seed", 901},
                      {"replicas", 100000},
                      {"model", model_ref("schroder_gaussian")},
                      {"grids", {{"n", {256, 1024}}, {"lambda", {1, 2, 3, 4, 5, 6}}}},
                      {"options", {{"spinal_replicas", 100000}}}},
                     Experiment::lower_deviation);
        double spread = r.summary["envelope_spread"].get<double>();
        o.require(spread <= 4,
                  fmt::format("envelope ratio in [{:.3f}, {:.3f}], max/min {:.2f} (bound 4)",
                              r.summary["envelope_ratio_min"].get<double>(),
                              r.summary["envelope_ratio_max"].get<double>(), spread));
        auto const* t = r.find("curve");
        double worst = 0;
        int compared = 0;
        for (std::size_t i = 0; i < t->rows.size(); ++i)
        {
            if (cell(*t, i, "direct") > 0 && cell(*t, i, "spinal_se") > 0)
            {
                worst = std::max(worst, cell(*t, i, "discrepancy"));
                ++compared;
            }
        }
        o.require(compared > 0 && worst <= 3,
                  fmt::format("spinal vs direct on {} cells, max {:.2f} SE", compared, worst));
        return o;
    });

    criterion(10, "Nerman ratio", [] {
        Outcome o;
        auto r = run({{"experiment", "lines"},
                      {"seed", 1001},
                      {"replicas", 4000},
                      {"model", model_ref("schroder_gaussian")},
                      {"grids", {{"lambda", {10}}, {"a", {1.0}}}},
                      {"options", {{"mode", "nerman"}, {"ladder_samples", 200000}}}},
                     Experiment::lines);
        auto const* t = r.find("nerman");
        double re = cell(*t, 0, "ratio_rel_err"), ee = cell(*t, 0, "eta_rel_err");
        o.require(std::fabs(re) <= 0.15,
                  fmt::format("ratio {:.4f} vs c7 {:.4f} ({:+.1f}%)", cell(*t, 0, "ratio"),
                              cell(*t, 0, "c7"), 100 * re));
        o.require(std::fabs(ee) <= 0.15,
                  fmt::format("eta ratio {:.4f} vs c8 {:.4f} ({:+.1f}%)",
                              cell(*t, 0, "eta_ratio"), cell(*t, 0, "c8"), 100 * ee));
        return o;
    });

    criterion(11, "random-walk facts", [] {
        Outcome o;
        // Gaussian steps: exponential moments at every a, so a = 1 is certified
        double const a = 1;
        OvershootOptions oo;
        oo.replicas = 100000;
        oo.seed = 1101;
        auto over = first_passage_overshoot(reference::schroder_gaussian(), {0, 5, 20}, oo);
        for (auto const& r : over)
        {
            o.require(r.tail.slope <= -a + 0.2,
                      fmt::format("b={} overshoot semilog slope {:.3f}", r.b, r.tail.slope));
        }

        RenewalOptions ro;
        ro.replicas = 4000;
        ro.seed = 1102;
        ro.plateau_lo = 10;
        ro.plateau_hi = 50;
        std::vector<double> xs{0, 10, 15, 20, 25, 30, 35, 40, 45, 50};
        auto ren = renewal_function(reference::bottcher_two_atom(), xs, ro);
        o.require(ren.plateau_spread < 0.1,
                  fmt::format("R(x)/x on [10, 50]: c1 {:.4f}, spread {:.1f}% ({} truncated)",
                              ren.c1, 100 * ren.plateau_spread, ren.truncated));

        auto law = spine_step_law(reference::bottcher_two_atom());
        std::uint64_t mismatches = 0;
        for (int i = 0; i < 1000; ++i)
        {
            Stream rng = Stream::root(1103, i, tag::walk);
            std::vector<double> path{0.0};
            std::size_t len = 1 + rng.below(400);
            for (std::size_t k = 0; k < len; ++k)
                path.push_back(path.back() + law.sample(rng));
            for (double x : {0.0, 1.0, 5.0, 20.0})
                mismatches += count_ladder_points(path, x) != brute_ladder_count(path, x);
        }
        o.require(mismatches == 0,
                  fmt::format("ladder counting vs brute force mismatches {} on 1000 paths",
                              mismatches));
        return o;
    });

    criterion(12, "lil trajectory output only", [] {
        Outcome o;
        json doc{{"experiment", "lil"},
                 {"seed", 1201},
                 {"replicas", 4},
                 {"model", model_ref("schroder_gaussian")},
                 {"options", {{"j_max", 8}, {"window", 4.0}}}};
        auto p = write_config("lil.json", doc);
        auto a = cli({"lil", "--config", p.string()});
        auto b = cli({"lil", "--config", p.string()});
        o.require(a.code == 0 && a.out == b.out, "deterministic at fixed seed");
        auto j = json::parse(a.out);
        bool schema = j["schema"] == "brwlab-1" && j["tables"].contains("trajectory")
                      && j["summary"]["certified"] == false;
        for (auto const& row : j["tables"]["trajectory"])
        {
            for (auto const* key : {"replica", "j", "n", "centered", "lower", "envelope", "status"})
                schema = schema && row.contains(key);
        }
        o.require(schema, "trajectory schema, uncertified");
        return o;
    });

    criterion(13, "thread-count reproducibility", [] {
        Outcome o;
        std::vector<std::pair<std::string, json>> cases{
            {"check", {{"seed", 1}, {"model", model_ref("bottcher_two_atom")}}},
            {"normalize",
             {{"seed", 1},
              {"model",
               {{"offspring", {0.0, 0.0, 1.0}},
                {"law", {{"kind", "gaussian"}, {"mean", 0.0}, {"sd", 1.0}}}}}}},
            {"exponents",
             {{"seed", 2}, {"replicas", 20000}, {"model", model_ref("bottcher_two_atom")},
              {"grids", {{"x", {0.5, 1.0}}, {"a", {1.0}}}}}},
            {"simulate",
             {{"seed", 3}, {"replicas", 2000}, {"model", model_ref("schroder_gaussian")},
              {"grids", {{"n", {10}}}}, {"options", {{"mode", "martingale"}}}}},
            {"lines",
             {{"seed", 4}, {"replicas", 500}, {"model", model_ref("schroder_gaussian")},
              {"grids", {{"lambda", {1, 3}}, {"a", {1.0}}}}, {"options", {{"mode", "identity"}}}}},
            {"cascade",
             {{"seed", 5}, {"replicas", 5000}, {"model", model_ref("schroder_gaussian")},
              {"grids", {{"t", {1, 10, 100}}, {"eps", {0.01, 0.1}}}},
              {"options", {{"mode", "line_closure"}, {"pool", 5000}}}}},
            {"deviation",
             {{"seed", 6}, {"replicas", 2000}, {"model", model_ref("schroder_gaussian")},
              {"grids", {{"n", {64}}, {"lambda", {1, 2}}}}, {"options", {{"variant", "both"}}}}},
            {"lower-deviation",
             {{"seed", 7}, {"replicas", 2000}, {"model", model_ref("schroder_gaussian")},
              {"grids", {{"n", {64}}, {"lambda", {1, 2}}}},
              {"options", {{"spinal_replicas", 2000}}}}},
            {"lil",
             {{"seed", 8}, {"replicas", 3}, {"model", model_ref("schroder_gaussian")},
              {"options", {{"j_max", 6}, {"window", 3.0}}}}},
            {"many-to-one",
             {{"seed", 9}, {"replicas", 20000}, {"model", model_ref("bottcher_two_atom")},
              {"grids", {{"n", {3}}}}, {"options", {{"tree_replicas", 200}}}}},
        };
        int identical = 0, total = 0;
        std::vector<std::string> differing;
        for (auto& [sub, doc] : cases)
        {
            doc["experiment"] = sub;
            auto p = write_config(sub + ".json", doc);
            for (char const* format : {"json", "csv"})
            {
                ++total;
                auto one = cli({sub, "--config", p.string(), "--format", format, "--threads", "1"});
                auto many
                    = cli({sub, "--config", p.string(), "--format", format, "--threads", "8"});
                if (one.code == 0 && one.out == many.out && !one.out.empty())
                    ++identical;
                else
                    differing.push_back(sub + "/" + format);
            }
        }
        std::string list;
        for (auto const& d : differing)
            list += " " + d;
        o.require(identical == total,
                  fmt::format("{}/{} subcommand outputs byte-identical{}", identical, total,
                              list.empty() ? "" : ", differing:" + list));
        return o;
    });

    std::cout << fmt::format("{} of {} criteria failed\n", failures,
                             selected.empty() ? 13 : selected.size());
    return failures ? 1 : 0;
}
