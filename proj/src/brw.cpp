//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brw.cpp
//---------------------------------------------------------------------------//
#include "brwlab/brw.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "brwlab/errors.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/tree.hpp"

namespace brwlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

struct Particle
{
    std::uint64_t key;
    double v;
    double vbar;
};

void check_cap(std::size_t size, std::uint64_t cap, std::size_t gen)
{
    if (size > cap)
        throw BudgetError(fmt::format(
            "frontier of {} particles exceeds the cap of {} at generation {}",
            size,
            cap,
            gen));
}
}  // namespace

//---------------------------------------------------------------------------//
std::string to_string(PruningKind k)
{
    switch (k)
    {
        case PruningKind::none:
            return "none";
        case PruningKind::upper_barrier:
            return "upper_barrier";
        case PruningKind::branch_and_bound_safe:
            return "branch_and_bound_safe";
    }
    return "unknown";
}

double PruningPolicy::barrier(std::size_t n) const
{
    return 1.5 * std::log(double(std::max<std::size_t>(n, 1)))
           + barrier_offset;
}

double displacement_floor(PointProcessModel const& model)
{
    double d = model.min_displacement();
    if (!std::isfinite(d))
        throw DomainError("displacements are not bounded below");
    return d;
}

//---------------------------------------------------------------------------//
namespace
{
// Depth-first search for a good generation-n position, visiting children in
// increasing position order and giving up after \c budget nodes
double dive(PointProcessModel const& model,
            std::uint64_t key,
            double v,
            std::size_t depth,
            std::size_t n,
            double floor,
            double best,
            std::uint64_t& budget)
{
    if (depth == n)
        return std::min(best, v);
    if (budget == 0)
        return best;
    --budget;
    std::vector<double> xs;
    reproduce(model, key, xs);
    std::vector<std::size_t> order(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
        order[j] = j;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return xs[a] < xs[b];
    });
    for (std::size_t j : order)
    {
        double c = v + xs[j];
        if (c + double(n - depth - 1) * floor >= best)
            continue;
        best = dive(model, child_key(key, j), c, depth + 1, n, floor, best,
                    budget);
    }
    return best;
}
}  // namespace

Trajectory simulate(PointProcessModel const& model,
                    SimulateOptions const& opts,
                    std::uint64_t seed,
                    std::uint64_t replica)
{
    std::size_t const n = opts.n_max;
    auto const kind = opts.policy.kind;
    double floor = model.min_displacement();
    double const barrier = opts.policy.barrier(n);
    std::uint64_t root = tree_root_key(seed, replica);

    double incumbent = inf;
    if (kind == PruningKind::branch_and_bound_safe)
    {
        floor = displacement_floor(model);
        std::uint64_t budget = 64 * (n + 1);
        incumbent = dive(model, root, 0.0, 0, n, floor, inf, budget);
    }

    Trajectory t;
    t.lost_bound = inf;
    t.generations.push_back({0, 1, 0.0, 1.0, 0.0, 0.0, 0});
    std::vector<Particle> cur{{root, 0.0, -inf}}, next;
    std::vector<double> xs;
    for (std::size_t k = 1; k <= n; ++k)
    {
        next.clear();
        std::uint64_t pruned = 0;
        for (auto const& p : cur)
        {
            reproduce(model, p.key, xs);
            for (std::size_t j = 0; j < xs.size(); ++j)
            {
                double v = p.v + xs[j];
                bool drop = false;
                if (kind == PruningKind::upper_barrier)
                    drop = v > barrier;
                else if (kind == PruningKind::branch_and_bound_safe)
                    drop = v + double(n - k) * floor > incumbent;
                if (drop)
                {
                    ++pruned;
                    t.lost_bound
                        = std::min(t.lost_bound, v + double(n - k) * floor);
                    continue;
                }
                next.push_back({child_key(p.key, j), v, std::max(p.vbar, v)});
            }
        }
        check_cap(next.size(), opts.particle_cap, k);
        std::swap(cur, next);

        TrajectoryStats s;
        s.n = k;
        s.population = cur.size();
        s.M = inf;
        s.min_path_max = inf;
        s.pruned = pruned;
        CompensatedSum w, d;
        for (auto const& p : cur)
        {
            s.M = std::min(s.M, p.v);
            s.min_path_max = std::min(s.min_path_max, p.vbar);
            double e = std::exp(-p.v);
            w.add(e);
            d.add(p.v * e);
        }
        s.W = w.value();
        s.D = d.value();
        t.pruned_total += pruned;
        t.generations.push_back(s);
    }
    if (t.pruned_total > 0 && kind != PruningKind::branch_and_bound_safe)
    {
        double m = t.generations.back().M;
        // NaN lost_bound (unbounded floor) is never certified
        t.certified_min = t.lost_bound >= m;
    }
    return t;
}

//---------------------------------------------------------------------------//
namespace
{
struct MartingaleSums
{
    std::vector<MeanAccumulator> w, d, s;
    void merge(MartingaleSums const& o)
    {
        if (w.empty())
        {
            w.resize(o.w.size());
            d.resize(o.d.size());
            s.resize(o.s.size());
        }
        for (std::size_t i = 0; i < o.w.size(); ++i)
        {
            w[i].merge(o.w[i]);
            d[i].merge(o.d[i]);
            s[i].merge(o.s[i]);
        }
    }
};
}  // namespace

MartingaleMeans martingale_means(PointProcessModel const& model,
                                 std::size_t n_max,
                                 std::uint64_t replicas,
                                 std::uint64_t seed)
{
    SimulateOptions opts;
    opts.n_max = n_max;
    auto sums = reduce_chunks<MartingaleSums>(
        replicas, [&](std::size_t b, std::size_t e) {
            MartingaleSums m;
            m.w.resize(n_max + 1);
            m.d.resize(n_max + 1);
            m.s.resize(n_max + 1);
            for (std::size_t r = b; r < e; ++r)
            {
                auto t = simulate(model, opts, seed, r);
                for (std::size_t k = 0; k <= n_max; ++k)
                {
                    auto const& g = t.generations[k];
                    m.w[k].add(g.W);
                    m.d[k].add(g.D);
                    m.s[k].add(g.population > 0 ? 1.0 : 0.0);
                }
            }
            return m;
        });
    MartingaleMeans out;
    out.replicas = replicas;
    for (std::size_t k = 0; k <= n_max; ++k)
    {
        out.W.push_back(sums.w[k].estimate());
        out.D.push_back(sums.d[k].estimate());
        out.survival.push_back(sums.s[k].estimate());
    }
    return out;
}

//---------------------------------------------------------------------------//
namespace
{
struct Search
{
    PointProcessModel const& model;
    std::size_t n;
    double floor;
    bool prune;
    std::uint64_t cap;
    std::uint64_t visited{0};
    double best{inf};

    void visit(std::uint64_t key, double v, std::size_t depth)
    {
        if (++visited > cap)
            throw BudgetError("tree search exceeded the node budget");
        std::vector<double> xs;
        reproduce(model, key, xs);
        for (std::size_t j = 0; j < xs.size(); ++j)
        {
            double c = v + xs[j];
            if (depth + 1 == n)
            {
                if (c < best)
                    best = c;
                continue;
            }
            if (prune)
            {
                double rem = double(n - depth - 1) * floor;
                // sequential sums may round below c + rem
                double slack = 1e-12 * (1 + std::fabs(c) + std::fabs(rem));
                if (c + rem - slack >= best)
                    continue;
            }
            this->visit(child_key(key, j), c, depth + 1);
        }
    }
};
}  // namespace

double minimum_exact(PointProcessModel const& model,
                     std::size_t n,
                     std::uint64_t seed,
                     std::uint64_t replica,
                     std::uint64_t node_cap)
{
    if (n == 0)
        return 0.0;
    Search s{model, n, displacement_floor(model), true, node_cap};
    s.visit(tree_root_key(seed, replica), 0.0, 0);
    return s.best;
}

double minimum_enumerate(PointProcessModel const& model,
                         std::size_t n,
                         std::uint64_t seed,
                         std::uint64_t replica,
                         std::uint64_t node_cap)
{
    if (n == 0)
        return 0.0;
    Search s{model, n, 0.0, false, node_cap};
    s.visit(tree_root_key(seed, replica), 0.0, 0);
    return s.best;
}

//---------------------------------------------------------------------------//
std::string to_string(TailSide s)
{
    switch (s)
    {
        case TailSide::upper:
            return "upper";
        case TailSide::lower:
            return "lower";
        case TailSide::running_max:
            return "running_max";
    }
    return "unknown";
}

namespace
{
struct TailAccum
{
    std::vector<MeanAccumulator> p;
    MeanAccumulator kept, pruned, certified, survival;
    void merge(TailAccum const& o)
    {
        if (p.empty())
            p.resize(o.p.size());
        for (std::size_t i = 0; i < o.p.size(); ++i)
            p[i].merge(o.p[i]);
        kept.merge(o.kept);
        pruned.merge(o.pruned);
        certified.merge(o.certified);
        survival.merge(o.survival);
    }
};
}  // namespace

ConditionalTailResult conditional_tail(PointProcessModel const& model,
                                       FrontLaw const& law,
                                       std::size_t n,
                                       std::vector<double> const& x,
                                       ConditionalTailOptions const& opts)
{
    if (x.empty())
        throw ConfigError("conditional tail needs at least one level");
    TailSide const side = opts.side;
    bool const rmax = side == TailSide::running_max;
    std::size_t const horizon = rmax ? 2 * n : n;
    if (law.generations() + 1 < horizon || law.generations() < n)
        throw ConfigError("front law is shorter than the simulation horizon");

    double const x_lo = *std::min_element(x.begin(), x.end());
    double const x_hi = *std::max_element(x.begin(), x.end());
    double const x_ref = side == TailSide::lower ? x_hi : x_lo;
    double const floor = model.min_displacement();
    std::size_t const nx = x.size();

    // Target times: n alone, or n + t n / targets for the running maximum
    std::vector<std::size_t> targets{n};
    if (rmax)
    {
        std::size_t nt = std::max<std::size_t>(opts.targets, 1);
        targets.clear();
        for (std::size_t t = 0; t <= nt; ++t)
            targets.push_back(n + (t * n) / nt);
        targets.erase(std::unique(targets.begin(), targets.end()),
                      targets.end());
    }
    std::size_t const nt = targets.size();
    // barrier[k] for generation k = 1..horizon
    std::vector<double> barrier(horizon + 1);
    {
        std::size_t ti = 0;
        for (std::size_t k = 1; k <= horizon; ++k)
        {
            while (targets[ti] < k)
                ++ti;
            barrier[k] = x_ref + opts.lookahead
                         - 1.5 * std::log(double(targets[ti] - k + 1));
        }
    }

    auto acc = reduce_chunks<TailAccum>(
        opts.replicas, [&](std::size_t b, std::size_t e) {
            TailAccum a;
            a.p.resize(nx);
            std::vector<Particle> cur, next;
            std::vector<double> xs;
            // log-products per (target, level)
            std::vector<double> lg(nt * nx);
            std::vector<double> kept_min(nt);
            for (std::size_t r = b; r < e; ++r)
            {
                std::fill(lg.begin(), lg.end(), 0.0);
                std::fill(kept_min.begin(), kept_min.end(), inf);
                cur.assign(1, {tree_root_key(opts.seed, r), 0.0, 0.0});
                double lost = inf;
                double log_ext = 0;
                std::uint64_t kept = 0, pruned = 0;
                std::size_t ti = 0;
                for (std::size_t k = 1; k <= horizon && !cur.empty(); ++k)
                {
                    next.clear();
                    while (targets[ti] < k)
                        ++ti;
                    for (auto const& p : cur)
                    {
                        reproduce(model, p.key, xs);
                        for (std::size_t j = 0; j < xs.size(); ++j)
                        {
                            double v = p.v + xs[j];
                            if (v <= barrier[k])
                            {
                                next.push_back({child_key(p.key, j), v, v});
                                continue;
                            }
                            ++pruned;
                            lost = std::min(
                                lost, v + double(horizon - k) * floor);
                            log_ext += std::log(law.extinct(horizon - k));
                            for (std::size_t t = ti; t < nt; ++t)
                            {
                                std::size_t rem = targets[t] - k;
                                double* row = lg.data() + t * nx;
                                for (std::size_t i = 0; i < nx; ++i)
                                {
                                    double z = x[i] - v;
                                    if (side == TailSide::lower)
                                        row[i] += std::log1p(
                                            -law.lower(rem, z));
                                    else
                                        row[i] += std::log(law.tail(rem, z));
                                }
                            }
                        }
                    }
                    check_cap(next.size(), opts.particle_cap, k);
                    std::swap(cur, next);
                    kept += cur.size();
                    for (std::size_t t = ti; t < nt; ++t)
                    {
                        if (targets[t] != k)
                            continue;
                        for (auto const& p : cur)
                            kept_min[t] = std::min(kept_min[t], p.v);
                    }
                }
                for (std::size_t i = 0; i < nx; ++i)
                {
                    double c = 0;
                    if (side == TailSide::lower)
                    {
                        c = kept_min[0] < x[i] ? 1.0 : -std::expm1(lg[i]);
                    }
                    else
                    {
                        for (std::size_t t = 0; t < nt; ++t)
                        {
                            if (kept_min[t] > x[i])
                                c = std::max(c, std::exp(lg[t * nx + i]));
                        }
                    }
                    a.p[i].add(c);
                }
                a.kept.add(double(kept));
                a.pruned.add(double(pruned));
                a.survival.add(cur.empty() ? -std::expm1(log_ext) : 1.0);
                bool cert = side == TailSide::lower
                                ? !(lost < x_hi) || pruned == 0
                                : !(lost <= x_hi) || pruned == 0;
                a.certified.add(cert ? 1.0 : 0.0);
            }
            return a;
        });

    ConditionalTailResult res;
    res.side = side;
    res.n = n;
    res.x = x;
    res.replicas = opts.replicas;
    res.extinct = law.extinct(std::min(horizon, law.generations()));
    double q = res.extinct;
    for (std::size_t i = 0; i < nx; ++i)
    {
        Estimate p = acc.p[i].estimate();
        res.p.push_back(p);
        if (side == TailSide::lower)
            res.p_star.push_back({p.value / (1 - q), p.se / (1 - q)});
        else
            res.p_star.push_back(
                {std::max(0.0, p.value - q) / (1 - q), p.se / (1 - q)});
    }
    res.kept_per_replica = acc.kept.mean();
    res.pruned_per_replica = acc.pruned.mean();
    res.certified_fraction = acc.certified.mean();
    res.survival = acc.survival.estimate();
    return res;
}

//---------------------------------------------------------------------------//
WindowTrajectory window_trajectory(PointProcessModel const& model,
                                   std::size_t n_max,
                                   double window,
                                   std::uint64_t seed,
                                   std::uint64_t replica,
                                   std::uint64_t particle_cap)
{
    WindowTrajectory t;
    t.M.assign(n_max + 1, inf);
    t.M[0] = 0;
    std::vector<Particle> cur{{tree_root_key(seed, replica), 0.0, 0.0}}, next;
    std::vector<double> xs;
    t.max_population = 1;
    for (std::size_t k = 1; k <= n_max; ++k)
    {
        next.clear();
        double mn = inf;
        for (auto const& p : cur)
        {
            reproduce(model, p.key, xs);
            for (std::size_t j = 0; j < xs.size(); ++j)
            {
                double v = p.v + xs[j];
                next.push_back({child_key(p.key, j), v, v});
                mn = std::min(mn, v);
            }
        }
        if (next.empty())
        {
            t.extinct = true;
            t.extinct_at = k;
            return t;
        }
        cur.clear();
        for (auto const& p : next)
            if (p.v <= mn + window)
                cur.push_back(p);
        check_cap(cur.size(), particle_cap, k);
        t.max_population = std::max<std::uint64_t>(t.max_population, cur.size());
        t.M[k] = mn;
    }
    return t;
}

//---------------------------------------------------------------------------//
SampledTrajectory sampled_trajectory(PointProcessModel const& model,
                                     FrontLaw const& law,
                                     std::vector<std::size_t> const& targets,
                                     double lookahead,
                                     std::uint64_t seed,
                                     std::uint64_t replica,
                                     std::uint64_t particle_cap)
{
    if (targets.empty() || !std::is_sorted(targets.begin(), targets.end())
        || targets.front() == 0)
        throw ConfigError("trajectory targets must be positive and ascending");
    std::size_t const horizon = targets.back();
    if (law.generations() < horizon)
        throw ConfigError(fmt::format(
            "front law covers {} generations, trajectory needs {}",
            law.generations(), horizon));

    struct Removed
    {
        std::size_t k;
        double v;
        double u;
    };
    constexpr std::uint64_t subtree_draw = std::uint64_t(1) << 40;

    SampledTrajectory t;
    t.targets = targets;
    t.M.assign(targets.size(), inf);
    std::vector<Removed> removed;
    std::vector<Particle> cur{{tree_root_key(seed, replica), 0.0, 0.0}}, next;
    std::vector<double> xs;
    std::size_t ti = 0;
    std::size_t died_at = 0;
    for (std::size_t k = 1; k <= horizon && !cur.empty(); ++k)
    {
        double barrier = -inf;
        for (std::size_t j = ti; j < targets.size(); ++j)
        {
            double nj = double(targets[j]);
            barrier = std::max(barrier,
                               1.5 * std::log(nj / (nj - double(k) + 1)) + lookahead);
        }
        next.clear();
        for (auto const& p : cur)
        {
            reproduce(model, p.key, xs);
            for (std::size_t c = 0; c < xs.size(); ++c)
            {
                double v = p.v + xs[c];
                std::uint64_t key = child_key(p.key, c);
                if (v > barrier && k < horizon)
                {
                    Stream rng(derive_key(key, subtree_draw));
                    removed.push_back({k, v, rng.uniform_pos()});
                    continue;
                }
                next.push_back({key, v, v});
            }
        }
        std::swap(cur, next);
        check_cap(cur.size(), particle_cap, k);
        t.kept_total += cur.size();
        if (cur.empty())
            died_at = k;
        while (ti < targets.size() && targets[ti] == k)
        {
            for (auto const& p : cur)
                t.M[ti] = std::min(t.M[ti], p.v);
            ++ti;
        }
    }
    t.pruned_total = removed.size();

    for (std::size_t j = 0; j < targets.size(); ++j)
    {
        bool replaced = false;
        for (auto const& r : removed)
        {
            if (r.k >= targets[j])
                continue;
            std::size_t gens = targets[j] - r.k;
            double u_max = std::isfinite(t.M[j]) ? law.lower(gens, t.M[j] - r.v)
                                                 : 1 - law.extinct(gens);
            if (r.u > u_max)
                continue;
            double m = r.v + law.lower_inverse(gens, r.u);
            if (m < t.M[j])
            {
                t.M[j] = m;
                replaced = true;
            }
        }
        t.replaced += replaced;
    }

    for (std::size_t j = 0; j < targets.size(); ++j)
    {
        if (!std::isfinite(t.M[j]))
        {
            t.extinct = true;
            t.extinct_at = removed.empty() ? died_at : targets[j];
            break;
        }
    }
    return t;
}

//---------------------------------------------------------------------------//
namespace
{
double empirical_quantile(std::vector<double> v, double p)
{
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    double pos = p * double(v.size() - 1);
    std::size_t i = std::size_t(std::floor(pos));
    double f = pos - double(i);
    if (i + 1 >= v.size())
        return v.back();
    return v[i] * (1 - f) + v[i + 1] * f;
}

// Survival to generation n, simulating generation sizes only; a population
// large enough that q^size < 1e-18 is counted as surviving
Estimate simulate_survival(PointProcessModel const& model,
                           std::size_t n,
                           std::uint64_t replicas,
                           std::uint64_t seed)
{
    double q = extinction_probability(model);
    double safe = q > 0 ? std::ceil(std::log(1e-18) / std::log(q)) : 1;
    auto acc = reduce_chunks<MeanAccumulator>(
        replicas, [&](std::size_t b, std::size_t e) {
            MeanAccumulator m;
            std::vector<double> xs;
            for (std::size_t r = b; r < e; ++r)
            {
                Stream rng = Stream::root(seed, r, tag::survival);
                std::uint64_t z = 1;
                for (std::size_t k = 0; k < n && z > 0 && double(z) < safe;
                     ++k)
                {
                    std::uint64_t nz = 0;
                    for (std::uint64_t i = 0; i < z; ++i)
                    {
                        model.sample(rng, xs);
                        nz += xs.size();
                    }
                    z = nz;
                }
                m.add(z > 0 ? 1.0 : 0.0);
            }
            return m;
        });
    return acc.estimate();
}
}  // namespace

std::vector<TightnessRow> tightness_scan(PointProcessModel const& model,
                                         std::vector<std::size_t> const& n_list,
                                         TightnessOptions const& opts)
{
    if (n_list.empty())
        throw ConfigError("tightness scan needs a nonempty n grid");
    std::size_t nmax = *std::max_element(n_list.begin(), n_list.end());
    FrontLaw law = FrontLaw::minimum(model, nmax, opts.grid);
    std::size_t rm_max = 0;
    for (std::size_t n : n_list)
        if (n <= opts.running_max_limit)
            rm_max = std::max(rm_max, 2 * n);
    std::optional<FrontLaw> rm_law;
    if (rm_max > 0)
        rm_law.emplace(FrontLaw::minimum(model, rm_max, opts.grid));
    std::vector<TightnessRow> rows;
    for (std::size_t n : n_list)
    {
        TightnessRow row;
        row.n = n;
        row.probs = opts.probs;
        double c = 1.5 * std::log(double(n));
        for (double p : opts.probs)
            row.quantiles.push_back(law.quantile(n, p) - c);
        row.median_ratio = law.quantile(n, 0.5) / std::log(double(n));
        row.survival = simulate_survival(model, n, opts.replicas, opts.seed);
        row.survival_exact = 1 - law.extinct(n);
        if (n <= opts.running_max_limit)
        {
            auto maxima = map_chunks<std::vector<double>>(
                opts.running_max_replicas,
                [&](std::size_t b, std::size_t e) {
                    std::vector<double> out;
                    std::vector<std::size_t> targets;
                    for (std::size_t k = n; k <= 2 * n; ++k)
                        targets.push_back(k);
                    for (std::size_t r = b; r < e; ++r)
                    {
                        auto t = sampled_trajectory(model, *rm_law, targets,
                                                    opts.window, opts.seed, r);
                        if (t.extinct)
                            continue;
                        double mx = *std::max_element(t.M.begin(), t.M.end());
                        out.push_back(mx - c);
                    }
                    return out;
                },
                16);
            std::vector<double> all;
            for (auto const& v : maxima)
                all.insert(all.end(), v.begin(), v.end());
            for (double p : opts.probs)
                row.running_max_quantiles.push_back(empirical_quantile(all, p));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<PathMaxRow> min_path_max(PointProcessModel const& model,
                                     std::vector<std::size_t> const& n_list,
                                     std::uint64_t replicas,
                                     std::uint64_t seed,
                                     GridSpec grid)
{
    if (n_list.empty())
        throw ConfigError("path-max scan needs a nonempty n grid");
    std::size_t nmax = *std::max_element(n_list.begin(), n_list.end());
    FrontLaw law = FrontLaw::path_max(model, nmax, grid);
    std::vector<PathMaxRow> rows;
    for (std::size_t n : n_list)
    {
        PathMaxRow row;
        row.n = n;
        row.median = law.quantile(n, 0.5);
        row.ratio = row.median / std::cbrt(double(n));
        if (n <= 12)
        {
            SimulateOptions so;
            so.n_max = n;
            auto acc = reduce_chunks<MeanAccumulator>(
                replicas, [&](std::size_t b, std::size_t e) {
                    MeanAccumulator m;
                    for (std::size_t r = b; r < e; ++r)
                    {
                        auto t = simulate(model, so, seed, r);
                        auto const& g = t.generations.back();
                        if (g.population > 0)
                            m.add(g.min_path_max < 0 ? 1.0 : 0.0);
                    }
                    return m;
                });
            row.p_negative = acc.estimate();
        }
        else
        {
            row.p_negative = {law.lower(n, -grid.h) / (1 - law.extinct(n)), 0};
        }
        rows.push_back(row);
    }
    return rows;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
