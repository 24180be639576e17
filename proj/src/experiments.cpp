//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file experiments.cpp
//---------------------------------------------------------------------------//
#include "brwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "brwlab/cascade.hpp"
#include "brwlab/errors.hpp"
#include "brwlab/exponents.hpp"
#include "brwlab/law.hpp"
#include "brwlab/lines.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/walk.hpp"

namespace brwlab
{
using nlohmann::json;

namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t sub_seed(ExperimentConfig const& cfg, std::uint64_t k)
{
    return derive_key(cfg.seed, k);
}

json to_json(Estimate const& e)
{
    return {{"value", e.value}, {"se", e.se}};
}

json to_json(TailFit const& f)
{
    return {{"transform", to_string(f.transform)},
            {"x_lo", f.x_lo},
            {"x_hi", f.x_hi},
            {"slope", f.slope},
            {"slope_se", f.slope_se},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"points", f.points}};
}

json law_json(DisplacementLaw const& law)
{
    switch (law.kind())
    {
        case LawKind::gaussian:
            return {{"kind", "gaussian"}, {"mean", law.a()}, {"sd", law.b()}};
        case LawKind::truncated_exponential:
            if (law.p() == 0)
                return {{"kind", "uniform"}, {"lo", law.a()}, {"hi", law.b()}};
            return {{"kind", "truncated_exponential"},
                    {"lo", law.a()},
                    {"hi", law.b()},
                    {"exponent", law.p()}};
        case LawKind::two_point:
            return {{"kind", "two_point"},
                    {"x1", law.a()},
                    {"x2", law.b()},
                    {"p1", law.p()}};
        case LawKind::shifted_exponential:
            return {{"kind", "shifted_exponential"},
                    {"shift", law.a()},
                    {"rate", law.b()}};
    }
    return {};
}

//! Model in configuration syntax
json model_json(PointProcessModel const& m)
{
    json j;
    if (!m.label().empty())
        j["label"] = m.label();
    j["lattice"] = m.lattice();
    if (m.is_finite_support())
    {
        json atoms = json::array();
        for (auto const& a : m.atoms())
            atoms.push_back({{"prob", a.weight}, {"displacements", a.displacements}});
        j["atoms"] = std::move(atoms);
    }
    else
    {
        auto const& s = m.parametric_spec();
        j["offspring"] = s.offspring;
        j["law"] = law_json(s.law);
        if (s.truncation)
            j["truncation"] = s.truncation;
    }
    return j;
}

CaseTag classify(PointProcessModel const& model, ExponentReport* out = nullptr)
{
    auto rep = exponent_report(model, {});
    if (out)
        *out = rep;
    return rep.case_tag;
}

void require_boundary(ExperimentConfig const& cfg)
{
    BoundaryOptions bo;
    bo.tol = cfg.option("boundary_tol", 1e-8);
    bo.seed = cfg.seed;
    auto rep = check_boundary(cfg.model, bo);
    if (!rep.passes.boundary)
    {
        throw ConfigError(fmt::format(
            "model is not in the boundary case (m1 = {}, m2 = {}); set "
            "model.normalize",
            rep.m1.value,
            rep.m2.value));
    }
}

void require(bool ok, char const* what)
{
    if (!ok)
        throw ConfigError(what);
}

std::vector<double> wilson_cells(Estimate const& e, double trials)
{
    auto w = wilson_from_estimate(e, trials);
    return {w.lo, w.hi};
}

std::optional<TailFit> try_fit(std::vector<FitPoint> const& pts,
                               FitTransform tr,
                               std::vector<std::string>& warnings,
                               std::string const& what)
{
    try
    {
        return fit_log_slope(pts, tr);
    }
    catch (std::invalid_argument const& e)
    {
        warnings.push_back(fmt::format("{}: {}", what, e.what()));
        return std::nullopt;
    }
}

//---------------------------------------------------------------------------//
// CHECK AND NORMALIZE
//---------------------------------------------------------------------------//
void boundary_tables(ExperimentResult& r,
                     PointProcessModel const& model,
                     ExperimentConfig const& cfg)
{
    BoundaryOptions bo;
    bo.tol = cfg.option("tol", 1e-10);
    bo.mc_budget = cfg.option("mc_budget", std::uint64_t(200000));
    bo.seed = cfg.seed;
    bo.exp_a = cfg.a;
    bo.force_monte_carlo = cfg.option("monte_carlo", false);
    auto rep = check_boundary(model, bo);

    auto& t = r.table("boundary", {"quantity", "value", "se"});
    auto row = [&](std::string name, Estimate const& e) {
        t.add({std::move(name), e.value, e.se});
    };
    row("m1", rep.m1);
    row("m2", rep.m2);
    row("sigma2", rep.sigma2);
    row("third_plus", rep.third_plus);
    row("zeta_log2", rep.zeta_log2);
    row("zeta_tilde_log", rep.zeta_tilde_log);
    for (auto const& [a, e] : rep.exp_moment)
        row(fmt::format("exp_moment({})", format_number(a)), e);

    auto verdict = [](std::optional<bool> b) -> std::string {
        return b ? (*b ? "PASS" : "FAIL") : "UNSTABLE";
    };
    auto& p = r.table("passes", {"check", "result"});
    p.add({std::string("boundary"), verdict(rep.passes.boundary)});
    p.add({std::string("sigma2_finite"), verdict(rep.passes.sigma2_finite)});
    p.add({std::string("integrability"), verdict(rep.passes.integrability)});
    p.add({std::string("third_moment"), verdict(rep.passes.third_moment)});

    r.summary["mode"] = rep.mode == EvaluationMode::exact ? "exact"
                                                          : "monte_carlo";
    r.summary["tol"] = rep.tol;
    r.summary["boundary"] = verdict(rep.passes.boundary);
    r.summary["m1"] = to_json(rep.m1);
    r.summary["m2"] = to_json(rep.m2);
    r.summary["extinction_q"] = extinction_probability(model);
    r.summary["mean_offspring"] = model.mean_offspring();
}

void run_check(ExperimentResult& r, ExperimentConfig const& cfg)
{
    boundary_tables(r, cfg.model, cfg);
    r.summary["normalized"] = cfg.normalize;
}

void run_normalize(ExperimentResult& r, ExperimentConfig const& cfg)
{
    auto norm = normalize_to_boundary(cfg.raw_model);
    auto const& n = norm.normalization();
    auto& t = r.table("normalization", {"theta_star", "shift"});
    t.add({n ? n->theta_star : 1.0, n ? n->shift : 0.0});
    boundary_tables(r, norm, cfg);
    r.summary["model"] = model_json(norm);
}

//---------------------------------------------------------------------------//
// EXPONENTS
//---------------------------------------------------------------------------//
void run_exponents(ExperimentResult& r, ExperimentConfig const& cfg)
{
    ExponentOptions eo;
    eo.psi_x = cfg.x;
    eo.nerman_a = cfg.a;
    eo.ladder.samples = cfg.replicas;
    eo.ladder.seed = cfg.seed;
    eo.ladder.step_cap = cfg.option("step_cap", eo.ladder.step_cap);
    auto rep = exponent_report(cfg.model, eo);

    auto& t = r.table("exponents", {"quantity", "value"});
    t.add({std::string("q"), rep.q});
    if (rep.gamma)
    {
        t.add({std::string("gamma"), rep.gamma->gamma});
        t.add({std::string("verifying_a"), rep.gamma->verifying_a});
        t.add({std::string("certified_all_a"),
               rep.gamma->certified_all_a ? 1.0 : 0.0});
    }
    if (rep.beta)
    {
        t.add({std::string("beta"), rep.beta->beta});
        t.add({std::string("essinf_at_beta"), rep.beta->essinf_at_beta});
        auto& iv = r.table("beta_intervals", {"a_lo", "a_hi"});
        for (auto const& [lo, hi] : rep.beta->intervals)
            iv.add({lo, hi});
    }
    if (!rep.psi_values.empty())
    {
        auto& ps = r.table("psi", {"x", "psi", "se"});
        for (auto const& [x, e] : rep.psi_values)
            ps.add({x, e.value, e.se});
    }
    if (!rep.c7.empty())
    {
        auto& nt = r.table("nerman",
                           {"a", "c7", "c7_se", "c8", "c8_se", "mean_height",
                            "samples", "truncated"});
        for (auto const& c : rep.c7)
        {
            nt.add({c.a, c.c7.value, c.c7.se, c.c8.value, c.c8.se,
                    c.mean_height.value, std::int64_t(c.samples),
                    std::int64_t(c.truncated)});
        }
        auto chosen = choose_nerman_a(rep.c7);
        r.summary["nerman_a"] = chosen.a;
    }
    r.summary["case"] = to_string(rep.case_tag);
    r.summary["q"] = rep.q;
    if (rep.gamma)
        r.summary["gamma"] = rep.gamma->gamma;
    if (rep.beta)
        r.summary["beta"] = rep.beta->beta;
    r.summary["diagnostics"] = rep.diagnostics;
}

//---------------------------------------------------------------------------//
// SIMULATE
//---------------------------------------------------------------------------//
void run_simulate(ExperimentResult& r, ExperimentConfig const& cfg)
{
    require(!cfg.n.empty(), "simulate needs grids.n");
    auto mode = cfg.option("mode", std::string("martingale"));
    std::size_t const n_max = *std::max_element(cfg.n.begin(), cfg.n.end());
    r.summary["mode"] = mode;

    if (mode == "martingale")
    {
        auto mm = martingale_means(cfg.model, n_max, cfg.replicas, cfg.seed);
        auto& t = r.table("martingale",
                          {"n", "W", "W_se", "W_z", "D", "D_se", "D_z",
                           "survival", "survival_se", "survival_lo",
                           "survival_hi"});
        double worst = 0;
        for (std::size_t k = 0; k <= n_max; ++k)
        {
            auto const& W = mm.W[k];
            auto const& D = mm.D[k];
            double wz = W.se > 0 ? (W.value - 1) / W.se : 0.0;
            double dz = D.se > 0 ? D.value / D.se : 0.0;
            if (k > 0)
                worst = std::max({worst, std::fabs(wz), std::fabs(dz)});
            auto w = wilson_cells(mm.survival[k], double(cfg.replicas));
            t.add({std::int64_t(k), W.value, W.se, wz, D.value, D.se, dz,
                   mm.survival[k].value, mm.survival[k].se, w[0], w[1]});
        }
        r.summary["max_abs_z"] = worst;
        r.summary["replicas"] = mm.replicas;
        return;
    }
    if (mode == "tightness")
    {
        TightnessOptions to;
        to.probs = cfg.option("probs", to.probs);
        to.replicas = cfg.replicas;
        to.seed = cfg.seed;
        to.grid.h = cfg.option("h", to.grid.h);
        to.running_max_limit = cfg.option("running_max_limit", to.running_max_limit);
        to.running_max_replicas
            = cfg.option("running_max_replicas", to.running_max_replicas);
        to.window = cfg.option("window", to.window);
        auto rows = tightness_scan(cfg.model, cfg.n, to);
        std::vector<std::string> cols{"n", "survival", "survival_se",
                                      "survival_lo", "survival_hi",
                                      "survival_exact", "median_ratio"};
        for (double p : to.probs)
            cols.push_back(fmt::format("q{}", format_number(p)));
        for (double p : to.probs)
            cols.push_back(fmt::format("rmax_q{}", format_number(p)));
        auto& t = r.table("tightness", cols);
        for (auto const& row : rows)
        {
            auto w = wilson_cells(row.survival, double(to.replicas));
            std::vector<Cell> cells{std::int64_t(row.n), row.survival.value,
                                    row.survival.se, w[0], w[1],
                                    row.survival_exact, row.median_ratio};
            for (double q : row.quantiles)
                cells.push_back(q);
            for (std::size_t i = 0; i < to.probs.size(); ++i)
            {
                cells.push_back(i < row.running_max_quantiles.size()
                                    ? row.running_max_quantiles[i]
                                    : nan);
            }
            t.add(std::move(cells));
        }
        return;
    }
    if (mode == "path_max")
    {
        auto rows = min_path_max(cfg.model, cfg.n, cfg.replicas, cfg.seed);
        auto& t = r.table("path_max",
                          {"n", "median", "ratio", "p_negative", "p_negative_se",
                           "p_negative_lo", "p_negative_hi"});
        for (auto const& row : rows)
        {
            auto w = wilson_cells(row.p_negative, double(cfg.replicas));
            t.add({std::int64_t(row.n), row.median, row.ratio,
                   row.p_negative.value, row.p_negative.se, w[0], w[1]});
        }
        return;
    }
    if (mode == "trajectory")
    {
        SimulateOptions so;
        so.n_max = n_max;
        so.policy = cfg.pruning;
        so.particle_cap = cfg.option("particle_cap", so.particle_cap);
        auto trajs = map_indices<Trajectory>(
            cfg.replicas,
            [&](std::size_t i) { return simulate(cfg.model, so, cfg.seed, i); },
            16);
        auto& t = r.table("trajectory",
                          {"replica", "n", "population", "M", "W", "D",
                           "min_path_max", "pruned"});
        auto& c = r.table("certification",
                          {"replica", "pruned_total", "certified_min",
                           "lost_bound"});
        for (std::size_t i = 0; i < trajs.size(); ++i)
        {
            for (auto const& g : trajs[i].generations)
            {
                t.add({std::int64_t(i), std::int64_t(g.n),
                       std::int64_t(g.population), g.M, g.W, g.D,
                       g.min_path_max, std::int64_t(g.pruned)});
            }
            c.add({std::int64_t(i), std::int64_t(trajs[i].pruned_total),
                   trajs[i].certified_min, trajs[i].lost_bound});
        }
        return;
    }
    if (mode == "minimum")
    {
        bool verify = cfg.option("verify", false);
        struct Row
        {
            double exact, enumerated;
        };
        auto& t = r.table("minimum", {"replica", "n", "minimum", "enumerated",
                                      "agree"});
        for (std::size_t n : cfg.n)
        {
            auto rows = map_indices<Row>(
                cfg.replicas,
                [&](std::size_t i) {
                    double ex = minimum_exact(cfg.model, n, cfg.seed, i);
                    double en = verify
                                    ? minimum_enumerate(cfg.model, n, cfg.seed, i)
                                    : nan;
                    return Row{ex, en};
                },
                16);
            for (std::size_t i = 0; i < rows.size(); ++i)
            {
                t.add({std::int64_t(i), std::int64_t(n), rows[i].exact,
                       rows[i].enumerated,
                       !verify || rows[i].exact == rows[i].enumerated});
            }
        }
        return;
    }
    throw ConfigError(fmt::format("unknown simulate mode '{}'", mode));
}

//---------------------------------------------------------------------------//
// LINES
//---------------------------------------------------------------------------//
struct IdentityAccum
{
    std::vector<MeanAccumulator> count, W, D;
    std::vector<std::uint64_t> identity_fail, strict_fail, incomplete, extinct;

    explicit IdentityAccum(std::size_t k = 0)
        : count(k), W(k), D(k), identity_fail(k), strict_fail(k),
          incomplete(k), extinct(k)
    {
    }
    void merge(IdentityAccum const& o)
    {
        if (count.empty())
            *this = IdentityAccum(o.count.size());
        for (std::size_t i = 0; i < o.count.size(); ++i)
        {
            count[i].merge(o.count[i]);
            W[i].merge(o.W[i]);
            D[i].merge(o.D[i]);
            identity_fail[i] += o.identity_fail[i];
            strict_fail[i] += o.strict_fail[i];
            incomplete[i] += o.incomplete[i];
            extinct[i] += o.extinct[i];
        }
    }
};

void run_lines(ExperimentResult& r, ExperimentConfig const& cfg)
{
    require(!cfg.lambda.empty(), "lines needs grids.lambda");
    auto lambdas = cfg.lambda;
    std::sort(lambdas.begin(), lambdas.end());
    auto mode = cfg.option("mode", std::string("identity"));
    auto gen_cap = cfg.option("gen_cap", std::size_t(0));
    r.summary["mode"] = mode;

    if (mode == "identity")
    {
        LineOptions lo;
        lo.a = cfg.a;
        lo.gen_cap = gen_cap;
        std::size_t const k = lambdas.size();
        auto acc = reduce_chunks<IdentityAccum>(
            cfg.replicas, [&](std::size_t b, std::size_t e) {
                IdentityAccum a(k);
                for (std::size_t rep = b; rep < e; ++rep)
                {
                    auto samples = first_passage_lines(
                        cfg.model, lambdas, cfg.seed, rep, lo);
                    for (std::size_t i = 0; i < k; ++i)
                    {
                        auto const& s = samples[i];
                        if (!s.line.complete)
                        {
                            ++a.incomplete[i];
                            continue;
                        }
                        a.extinct[i] += s.line.extinct_before_crossing;
                        a.count[i].add(double(s.f.count));
                        a.W[i].add(s.f.W);
                        a.D[i].add(s.f.D);
                        if (std::int64_t(s.f.count)
                            != 1 + s.line.branching_excess)
                            ++a.identity_fail[i];
                        if (!s.f.strict_overshoot)
                            ++a.strict_fail[i];
                    }
                }
                return a;
            });
        auto& t = r.table("identity",
                          {"lambda", "count_mean", "count_se", "W_mean", "W_se",
                           "D_mean", "D_se", "identity_failures",
                           "strict_failures", "incomplete", "extinct"});
        std::uint64_t fails = 0;
        for (std::size_t i = 0; i < k; ++i)
        {
            fails += acc.identity_fail[i] + acc.strict_fail[i];
            t.add({lambdas[i], acc.count[i].mean(), acc.count[i].se(),
                   acc.W[i].mean(), acc.W[i].se(), acc.D[i].mean(),
                   acc.D[i].se(), std::int64_t(acc.identity_fail[i]),
                   std::int64_t(acc.strict_fail[i]),
                   std::int64_t(acc.incomplete[i]),
                   std::int64_t(acc.extinct[i])});
        }
        r.summary["exact_identity_failures"] = fails;
        return;
    }
    if (mode == "nerman")
    {
        require(!cfg.a.empty(), "lines nerman mode needs grids.a");
        double a = cfg.a.front();
        auto rows = nerman_scan(cfg.model, a, lambdas, cfg.replicas, cfg.seed,
                                gen_cap);
        LadderOptions lo;
        lo.samples = cfg.option("ladder_samples", lo.samples);
        lo.seed = sub_seed(cfg, 1);
        auto oracle = nerman_constant(cfg.model, a, lo);
        auto& t = r.table("nerman",
                          {"lambda", "ratio", "ratio_se", "eta_ratio",
                           "eta_ratio_se", "d_ratio", "d_ratio_se", "mean_W",
                           "used", "incomplete", "c7", "c8", "ratio_rel_err",
                           "eta_rel_err"});
        for (auto const& row : rows)
        {
            t.add({row.lambda, row.ratio.value, row.ratio.se,
                   row.eta_ratio.value, row.eta_ratio.se, row.d_ratio.value,
                   row.d_ratio.se, row.mean_W.value, std::int64_t(row.used),
                   std::int64_t(row.incomplete), oracle.c7.value,
                   oracle.c8.value, row.ratio.value / oracle.c7.value - 1,
                   row.eta_ratio.value / oracle.c8.value - 1});
        }
        r.summary["a"] = a;
        r.summary["c7"] = to_json(oracle.c7);
        r.summary["c8"] = to_json(oracle.c8);
        return;
    }
    if (mode == "laplace")
    {
        require(!cfg.a.empty(), "lines laplace mode needs grids.a");
        auto rows = line_count_laplace(cfg.model, cfg.a, lambdas, cfg.replicas,
                                       cfg.seed, gen_cap);
        auto& t = r.table("laplace",
                          {"lambda", "a", "value", "se", "upper_bound",
                           "schroder_diag", "bottcher_diag"});
        for (auto const& row : rows)
        {
            t.add({row.lambda, row.a, row.value.value, row.value.se,
                   row.upper_bound, row.schroder_diag, row.bottcher_diag});
        }
        return;
    }
    if (mode == "small")
    {
        auto m = cfg.option("m", std::vector<std::size_t>{1, 2, 4});
        auto rep = small_line_probability(cfg.model, m, lambdas, cfg.replicas,
                                          cfg.seed, gen_cap);
        auto& t = r.table("small_lines",
                          {"lambda", "m", "p", "se", "wilson_lo", "wilson_hi",
                           "upper_bound", "incomplete"});
        auto& x = r.table("extinct_after", {"lambda", "p", "se"});
        for (auto const& row : rep.rows)
        {
            for (std::size_t i = 0; i < row.m.size(); ++i)
            {
                auto w = wilson_cells(row.p[i], double(cfg.replicas));
                t.add({row.lambda, std::int64_t(row.m[i]), row.p[i].value,
                       row.p[i].se, w[0], w[1],
                       row.p[i].value > 0 ? 0.0
                                          : rule_of_three(double(cfg.replicas)),
                       std::int64_t(row.incomplete)});
            }
            x.add({row.lambda, row.extinct_after.value, row.extinct_after.se});
        }
        r.summary["slopes"] = rep.slopes;
        r.summary["extinct_after_slope"] = rep.extinct_after_slope;
        return;
    }
    if (mode == "overshoot")
    {
        require(!cfg.x.empty(), "lines overshoot mode needs grids.x as edges");
        double b = lambdas.front();
        auto mass = weighted_overshoot(cfg.model, b, cfg.x, cfg.replicas,
                                       cfg.seed);
        auto& t = r.table("weighted_overshoot", {"lo", "hi", "mass", "se"});
        for (std::size_t i = 0; i < mass.size(); ++i)
            t.add({cfg.x[i], cfg.x[i + 1], mass[i].value, mass[i].se});
        r.summary["b"] = b;
        return;
    }
    throw ConfigError(fmt::format("unknown lines mode '{}'", mode));
}

//---------------------------------------------------------------------------//
// CASCADE
//---------------------------------------------------------------------------//
CascadeMode cascade_mode(std::string const& s)
{
    if (s == "derivative_martingale")
        return CascadeMode::derivative_martingale;
    if (s == "line_closure")
        return CascadeMode::line_closure;
    if (s == "smoothing_iteration")
        return CascadeMode::smoothing_iteration;
    throw ConfigError(fmt::format("unknown cascade mode '{}'", s));
}

void run_cascade(ExperimentResult& r, ExperimentConfig const& cfg)
{
    CascadeOptions co;
    co.mode = cascade_mode(cfg.option("mode", std::string("line_closure")));
    co.samples = cfg.replicas;
    co.seed = cfg.seed;
    co.n = cfg.option("n", co.n);
    co.depth = cfg.option("depth", co.depth);
    co.chi = cfg.option("chi", co.chi);
    co.base_lambda = cfg.option("base_lambda", co.base_lambda);
    co.lambda = cfg.option("line_lambda", co.lambda);
    co.compositions = cfg.option("compositions", co.compositions);
    co.pool = cfg.option("pool", co.pool);
    co.particle_cap = cfg.option("particle_cap", co.particle_cap);
    auto set = sample_fixed_point(cfg.model, co);

    ExponentReport er;
    auto tag = classify(cfg.model, &er);

    r.summary["mode"] = to_string(set.mode);
    r.summary["samples"] = set.samples.size();
    r.summary["zero_fraction"] = set.zero_fraction;
    r.summary["extinction_q"] = er.q;
    r.summary["negative_fraction"] = set.negative_fraction;
    r.summary["closure_shift"] = set.closure_shift;
    r.summary["depth_ks"] = set.depth_ks;
    r.summary["n_used"] = set.n_used;
    r.summary["case"] = to_string(tag);
    r.summary["diagnostics"] = set.diagnostics;

    if (!cfg.t.empty())
    {
        auto lap = laplace_grid(set.samples, cfg.t);
        auto& t = r.table("laplace",
                          {"t", "value", "se", "positive", "positive_se"});
        for (auto const& l : lap)
        {
            t.add({l.t, l.all.value, l.all.se, l.positive.value,
                   l.positive.se});
        }
    }
    if (tag == CaseTag::schroder && !cfg.eps.empty())
    {
        auto sd = schroder_small_dev(set.samples, cfg.eps);
        auto& t = r.table("small_deviation",
                          {"eps", "p", "se", "wilson_lo", "wilson_hi",
                           "conditioned", "conditioned_se"});
        for (auto const& row : sd.rows)
        {
            t.add({row.eps, row.p.value, row.p.se, row.wilson.lo,
                   row.wilson.hi, row.conditioned.value, row.conditioned.se});
        }
        r.summary["small_dev_fit"] = to_json(sd.fit);
        r.summary["sparse"] = sd.sparse;
        r.summary["gamma"] = er.gamma->gamma;
        if (!cfg.t.empty())
        {
            auto lap = laplace_grid(set.samples, cfg.t);
            std::vector<FitPoint> pts;
            for (auto const& l : lap)
                pts.push_back({l.t, l.positive.value, l.positive.se});
            if (auto f = try_fit(pts, FitTransform::loglog, r.warnings,
                                 "laplace fit"))
                r.summary["laplace_fit"] = to_json(*f);
        }
    }
    if (tag == CaseTag::bottcher && !cfg.t.empty())
    {
        auto rgrid = cfg.option("r", std::vector<double>{2, 4, 8, 16, 32, 64});
        double K = cfg.option("K", 2.0);
        auto bt = bottcher_tail(set.samples, cfg.t, cfg.eps, rgrid,
                                er.beta->beta, K);
        auto& t = r.table("envelope", {"r", "h", "envelope", "slack"});
        for (std::size_t i = 0; i < bt.r.size(); ++i)
            t.add({bt.r[i], bt.h[i], bt.envelope[i], bt.slack[i]});
        r.summary["laplace_fit"] = to_json(bt.laplace_fit);
        if (!cfg.eps.empty())
            r.summary["small_dev_fit"] = to_json(bt.smalldev_fit);
        r.summary["envelope_holds"] = bt.envelope_holds;
        r.summary["depth_warning"] = bt.depth_warning;
        r.summary["h0"] = bt.h0;
        r.summary["beta"] = er.beta->beta;
    }
    if (cfg.option("self_consistency", true))
    {
        auto sc = self_consistency(cfg.model, set.samples, sub_seed(cfg, 1),
                                   cfg.option("alpha", 0.01));
        r.summary["self_consistency"] = {{"ks", sc.ks},
                                         {"critical", sc.critical},
                                         {"pass", sc.pass},
                                         {"n", sc.n}};
    }
    if (cfg.option("dump_samples", false))
    {
        auto& t = r.table("samples", {"z"});
        for (double z : set.samples)
            t.add({z});
    }
}

//---------------------------------------------------------------------------//
// DEVIATION TABLES
//---------------------------------------------------------------------------//
void deviation_tables(ExperimentResult& r, std::vector<DeviationCurve> const& cs)
{
    auto& t = r.table("curve",
                      {"variant", "n", "lambda", "x", "p", "se", "wilson_lo",
                       "wilson_hi", "upper_bound", "law", "diagnostic",
                       "conditioning", "replicas"});
    auto& f = r.table("fit",
                      {"variant", "n", "transform", "slope", "slope_se",
                       "x_lo", "x_hi", "points", "survival", "survival_se",
                       "survival_exact", "certified_fraction",
                       "kept_per_replica"});
    for (auto const& c : cs)
    {
        for (auto const& p : c.points)
        {
            t.add({to_string(c.variant), std::int64_t(c.n), p.lambda, p.x,
                   p.p.value, p.p.se, p.wilson.lo, p.wilson.hi, p.upper_bound,
                   p.law, p.diagnostic, to_string(c.conditioning),
                   std::int64_t(c.replicas)});
        }
        if (c.fit)
        {
            json fj = to_json(*c.fit);
            fj["variant"] = to_string(c.variant);
            fj["n"] = c.n;
            r.summary["fits"].push_back(std::move(fj));
            f.add({to_string(c.variant), std::int64_t(c.n),
                   to_string(c.fit->transform), c.fit->slope, c.fit->slope_se,
                   c.fit->x_lo, c.fit->x_hi, std::int64_t(c.fit->points),
                   c.survival.value, c.survival.se, c.survival_exact,
                   c.certified_fraction, c.kept_per_replica});
        }
        for (auto const& w : c.warnings)
            r.warnings.push_back(w);
    }
}

void lower_deviation_tables(ExperimentResult& r,
                            std::vector<LowerDeviationCurve> const& cs)
{
    auto& t = r.table("curve",
                      {"n", "lambda", "direct", "direct_se", "wilson_lo",
                       "wilson_hi", "upper_bound", "spinal", "spinal_se",
                       "ess_fraction", "law", "envelope_ratio",
                       "aidekon_ratio", "discrepancy"});
    double lo = INFINITY, hi = 0;
    for (auto const& c : cs)
    {
        for (auto const& p : c.points)
        {
            t.add({std::int64_t(c.n), p.lambda, p.direct.value, p.direct.se,
                   p.wilson.lo, p.wilson.hi, p.upper_bound, p.spinal.value,
                   p.spinal.se, p.ess_fraction, p.law, p.envelope_ratio,
                   p.aidekon_ratio, p.discrepancy});
            if (p.lambda >= 1 && p.lambda <= 6 && p.envelope_ratio > 0)
            {
                lo = std::min(lo, p.envelope_ratio);
                hi = std::max(hi, p.envelope_ratio);
            }
        }
    }
    if (hi > 0)
    {
        r.summary["envelope_ratio_min"] = lo;
        r.summary["envelope_ratio_max"] = hi;
        r.summary["envelope_spread"] = hi / lo;
    }
}
}  // namespace

//---------------------------------------------------------------------------//
std::vector<DeviationCurve> run_moderate_deviation(ExperimentConfig const& cfg)
{
    require(!cfg.n.empty(), "deviation needs grids.n");
    require(!cfg.lambda.empty(), "deviation needs grids.lambda");
    require_boundary(cfg);
    ExponentReport er;
    auto tag = classify(cfg.model, &er);

    Conditioning cond = cfg.conditioning;
    if (cond == Conditioning::automatic)
        cond = tag == CaseTag::schroder ? Conditioning::survival
                                        : Conditioning::none;
    auto variant = cfg.option("variant", std::string("M_n"));
    std::vector<TailSide> sides;
    if (variant == "M_n" || variant == "both")
        sides.push_back(TailSide::upper);
    if (variant == "running_max" || variant == "both")
        sides.push_back(TailSide::running_max);
    if (sides.empty())
        throw ConfigError(fmt::format("unknown deviation variant '{}'", variant));
    FitTransform tr = tag == CaseTag::bottcher ? FitTransform::neg_log_linear
                                               : FitTransform::semilog;
    GridSpec grid;
    grid.h = cfg.option("h", grid.h);

    std::vector<DeviationCurve> out;
    for (std::size_t ni = 0; ni < cfg.n.size(); ++ni)
    {
        std::size_t const n = cfg.n[ni];
        require(n >= 2, "deviation needs n >= 2");
        double const c = 1.5 * std::log(double(n));
        bool any_rmax = std::count(sides.begin(), sides.end(),
                                   TailSide::running_max);
        auto law = FrontLaw::minimum(cfg.model, any_rmax ? 2 * n : n, grid);
        for (std::size_t si = 0; si < sides.size(); ++si)
        {
            DeviationCurve curve;
            curve.variant = sides[si];
            curve.n = n;
            curve.conditioning = cond;
            curve.replicas = cfg.replicas;
            double lam_max
                = *std::max_element(cfg.lambda.begin(), cfg.lambda.end());
            if (lam_max > 0.5 * std::log(double(n)))
            {
                curve.warnings.push_back(fmt::format(
                    "n={}: lambda up to {} exceeds 0.5 log n = {}",
                    n,
                    format_number(lam_max),
                    format_number(0.5 * std::log(double(n)))));
            }
            std::vector<double> xs;
            for (double l : cfg.lambda)
                xs.push_back(c + l);

            ConditionalTailOptions co;
            co.side = sides[si];
            co.replicas = cfg.replicas;
            co.seed = sub_seed(cfg, 2 * ni + si);
            co.lookahead = cfg.option("lookahead", co.lookahead);
            co.targets = cfg.option("targets", co.targets);
            co.particle_cap = cfg.option("particle_cap", co.particle_cap);
            auto res = conditional_tail(cfg.model, law, n, xs, co);

            curve.survival = res.survival;
            curve.survival_exact = 1 - res.extinct;
            curve.certified_fraction = res.certified_fraction;
            curve.kept_per_replica = res.kept_per_replica;
            if (res.survival.se > 0
                && std::fabs(res.survival.value - curve.survival_exact)
                       > 4 * res.survival.se)
            {
                curve.warnings.push_back(fmt::format(
                    "n={}: simulated survival {} differs from 1 - q_n = {}",
                    n,
                    format_number(res.survival.value),
                    format_number(curve.survival_exact)));
            }
            std::vector<FitPoint> pts;
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                DeviationPoint p;
                p.lambda = cfg.lambda[i];
                p.x = xs[i];
                p.p = cond == Conditioning::survival ? res.p_star[i] : res.p[i];
                p.wilson = wilson_from_estimate(p.p, double(cfg.replicas));
                if (p.p.value <= 0)
                    p.upper_bound = rule_of_three(double(cfg.replicas));
                if (sides[si] == TailSide::upper)
                {
                    p.law = cond == Conditioning::survival
                                ? law.conditioned_tail(n, xs[i])
                                : law.tail(n, xs[i]);
                }
                else
                {
                    p.law = nan;
                }
                if (tr == FitTransform::semilog)
                    p.diagnostic = p.p.value > 0 && p.lambda > 0
                                       ? -std::log(p.p.value) / p.lambda
                                       : nan;
                else
                    p.diagnostic = p.p.value > 0 && p.p.value < 1
                                       ? std::log(-std::log(p.p.value))
                                       : nan;
                pts.push_back({p.lambda, p.p.value, p.p.se});
                curve.points.push_back(p);
            }
            curve.fit = try_fit(pts, tr, curve.warnings,
                                fmt::format("n={} fit", n));
            out.push_back(std::move(curve));
        }
    }
    return out;
}

std::vector<LowerDeviationCurve> run_lower_deviation(ExperimentConfig const& cfg)
{
    require(!cfg.n.empty(), "lower-deviation needs grids.n");
    require(!cfg.lambda.empty(), "lower-deviation needs grids.lambda");
    require_boundary(cfg);
    GridSpec grid;
    grid.h = cfg.option("h", grid.h);
    auto spinal_replicas = cfg.option("spinal_replicas", cfg.replicas);
    auto spinal_batch = cfg.option<std::uint64_t>(
        "spinal_batch", std::clamp<std::uint64_t>(spinal_replicas / 20, 2, 1000));

    std::vector<LowerDeviationCurve> out;
    for (std::size_t ni = 0; ni < cfg.n.size(); ++ni)
    {
        std::size_t const n = cfg.n[ni];
        require(n >= 2, "lower-deviation needs n >= 2");
        double const c = 1.5 * std::log(double(n));
        auto law = FrontLaw::minimum(cfg.model, n, grid);
        std::vector<double> xs;
        for (double l : cfg.lambda)
            xs.push_back(c - l);

        ConditionalTailOptions co;
        co.side = TailSide::lower;
        co.replicas = cfg.replicas;
        co.seed = sub_seed(cfg, 2 * ni);
        co.lookahead = cfg.option("lookahead", co.lookahead);
        co.particle_cap = cfg.option("particle_cap", co.particle_cap);
        auto direct = conditional_tail(cfg.model, law, n, xs, co);
        auto spinal = spinal_left_tail(cfg.model, law, n, cfg.lambda,
                                       spinal_replicas, sub_seed(cfg, 2 * ni + 1),
                                       spinal_batch);

        LowerDeviationCurve curve;
        curve.n = n;
        curve.replicas = cfg.replicas;
        curve.certified_fraction = direct.certified_fraction;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            LowerDeviationPoint p;
            p.lambda = cfg.lambda[i];
            p.direct = direct.p[i];
            p.wilson = wilson_from_estimate(p.direct, double(cfg.replicas));
            if (p.direct.value <= 0)
                p.upper_bound = rule_of_three(double(cfg.replicas));
            p.spinal = spinal.p[i];
            p.ess_fraction = spinal.ess_fraction[i];
            p.law = law.lower(n, xs[i]);
            p.envelope_ratio
                = p.direct.value / ((1 + p.lambda) * std::exp(-p.lambda));
            p.aidekon_ratio = p.lambda > 0
                                  ? p.direct.value / (p.lambda * std::exp(-p.lambda))
                                  : nan;
            double se = std::hypot(p.direct.se, p.spinal.se);
            p.discrepancy = se > 0 ? std::fabs(p.direct.value - p.spinal.value) / se
                                   : 0.0;
            curve.points.push_back(p);
        }
        out.push_back(std::move(curve));
    }
    return out;
}

std::vector<LilTrajectory> run_lil_trajectory(ExperimentConfig const& cfg)
{
    auto j_max = cfg.option("j_max", std::size_t(12));
    require(j_max >= 1 && j_max <= 40, "lil needs 1 <= j_max <= 40");
    double lookahead = cfg.option("window", 8.0);
    double C = cfg.option("C", 1.0);
    auto cap = cfg.option("particle_cap", std::uint64_t(10000000));
    double h = cfg.option("law_h", 0.05);
    std::size_t const n_max = std::size_t(1) << j_max;
    auto law = FrontLaw::minimum(cfg.model, n_max,
                                 {h, std::numeric_limits<double>::quiet_NaN(), 45});
    std::vector<std::size_t> targets;
    for (std::size_t j = 1; j <= j_max; ++j)
        targets.push_back(std::size_t(1) << j);

    return map_indices<LilTrajectory>(
        cfg.replicas,
        [&](std::size_t rep) {
            auto w = sampled_trajectory(cfg.model, law, targets, lookahead,
                                        cfg.seed, rep, cap);
            LilTrajectory t;
            t.replica = rep;
            t.extinct = w.extinct;
            t.extinct_at = w.extinct_at;
            for (std::size_t j = 1; j <= j_max; ++j)
            {
                std::size_t n = targets[j - 1];
                if (!std::isfinite(w.M[j - 1]))
                    break;
                double ln = std::log(double(n));
                LilPoint p;
                p.j = j;
                p.n = n;
                p.centered = w.M[j - 1] - 1.5 * ln;
                p.lower = (w.M[j - 1] - 0.5 * ln) / std::log(ln);
                double lll = std::log(std::log(ln));
                p.envelope = std::isfinite(lll) ? C * lll : nan;
                t.points.push_back(p);
            }
            return t;
        },
        1);
}

//---------------------------------------------------------------------------//
ExperimentResult run_experiment(ExperimentConfig const& cfg)
{
    ExperimentResult r;
    r.experiment = to_string(cfg.experiment);
    switch (cfg.experiment)
    {
        case Experiment::check:
            run_check(r, cfg);
            break;
        case Experiment::normalize:
            run_normalize(r, cfg);
            break;
        case Experiment::exponents:
            run_exponents(r, cfg);
            break;
        case Experiment::simulate:
            run_simulate(r, cfg);
            break;
        case Experiment::lines:
            run_lines(r, cfg);
            break;
        case Experiment::cascade:
            run_cascade(r, cfg);
            break;
        case Experiment::deviation:
            deviation_tables(r, run_moderate_deviation(cfg));
            break;
        case Experiment::lower_deviation:
            lower_deviation_tables(r, run_lower_deviation(cfg));
            break;
        case Experiment::lil: {
            auto trajs = run_lil_trajectory(cfg);
            auto& t = r.table("trajectory",
                              {"replica", "j", "n", "centered", "lower",
                               "envelope", "status"});
            std::uint64_t extinct = 0;
            for (auto const& tr : trajs)
            {
                for (auto const& p : tr.points)
                {
                    t.add({std::int64_t(tr.replica), std::int64_t(p.j),
                           std::int64_t(p.n), p.centered, p.lower, p.envelope,
                           std::string("alive")});
                }
                if (tr.extinct)
                {
                    ++extinct;
                    t.add({std::int64_t(tr.replica), std::int64_t(-1),
                           std::int64_t(tr.extinct_at), nan, nan, nan,
                           std::string("extinct")});
                }
            }
            r.summary["extinct_replicas"] = extinct;
            r.summary["certified"] = false;
            r.summary["window"] = cfg.option("window", 8.0);
            break;
        }
        case Experiment::many_to_one: {
            require(!cfg.n.empty(), "many-to-one needs grids.n");
            auto tree_reps = cfg.option("tree_replicas",
                                        std::max<std::uint64_t>(cfg.replicas / 100, 1));
            auto& t = r.table("many_to_one",
                              {"n", "functional", "tree", "tree_se", "walk",
                               "walk_se", "discrepancy", "agree"});
            double worst = 0;
            for (std::size_t ni = 0; ni < cfg.n.size(); ++ni)
            {
                auto rows = many_to_one_check(cfg.model, cfg.n[ni],
                                              registered_functionals(),
                                              cfg.replicas, tree_reps,
                                              sub_seed(cfg, ni));
                for (auto const& row : rows)
                {
                    worst = std::max(worst, row.discrepancy);
                    t.add({std::int64_t(row.n), to_string(row.functional),
                           row.tree.value, row.tree.se, row.walk.value,
                           row.walk.se, row.discrepancy, row.discrepancy <= 3});
                }
            }
            r.summary["max_discrepancy"] = worst;
            break;
        }
    }
    return r;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
