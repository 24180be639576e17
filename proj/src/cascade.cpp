//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file cascade.cpp
//---------------------------------------------------------------------------//
#include "brwlab/cascade.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "brwlab/brw.hpp"
#include "brwlab/errors.hpp"
#include "brwlab/lines.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/tree.hpp"

namespace brwlab
{
std::string to_string(CascadeMode m)
{
    switch (m)
    {
        case CascadeMode::derivative_martingale:
            return "derivative_martingale";
        case CascadeMode::line_closure:
            return "line_closure";
        case CascadeMode::smoothing_iteration:
            return "smoothing_iteration";
    }
    return "unknown";
}

double stable1(Stream& rng)
{
    constexpr double hp = M_PI / 2;
    double u = M_PI * (rng.uniform_pos() - 0.5);
    double w = -std::log(rng.uniform_pos());
    double x = (2 / M_PI)
               * ((hp + u) * std::tan(u) - std::log((hp * w * std::cos(u)) / (hp + u)));
    return hp * x + std::log(hp);
}

namespace
{
// Per-sample stream purposes below the cascade tag
constexpr std::uint64_t pool_draw = 11;
constexpr std::uint64_t closure_draw = 12;

struct DW
{
    double d{0};
    double w{0};
};

struct LineScratch
{
    struct Node
    {
        std::uint64_t key;
        double v;
        std::size_t gen;
    };
    std::vector<Node> stack;
    std::vector<double> xs;
};

// (D, W) over the first-passage line at lambda; members are replaced by pool
// draws when a pool is given
DW line_pair(PointProcessModel const& model,
             double lambda,
             std::uint64_t key,
             std::vector<DW> const* pool,
             std::size_t cap,
             LineScratch& s,
             std::uint64_t& incomplete)
{
    Stream draw(derive_key(key, pool_draw));
    CompensatedSum d, w;
    s.stack.assign(1, {key, 0.0, 0});
    while (!s.stack.empty())
    {
        auto u = s.stack.back();
        s.stack.pop_back();
        if (u.gen >= cap)
        {
            ++incomplete;
            continue;
        }
        reproduce(model, u.key, s.xs);
        for (std::size_t j = s.xs.size(); j-- > 0;)
        {
            double y = u.v + s.xs[j];
            if (y > lambda)
            {
                double e = std::exp(-y);
                if (pool)
                {
                    DW const& p = (*pool)[draw.below(pool->size())];
                    d.add(e * (p.d + y * p.w));
                    w.add(e * p.w);
                }
                else
                {
                    d.add(e * y);
                    w.add(e);
                }
                continue;
            }
            s.stack.push_back({child_key(u.key, j), y, u.gen + 1});
        }
    }
    return {d.value(), w.value()};
}

struct PoolResult
{
    std::vector<DW> pairs;
    std::uint64_t incomplete{0};
};

PoolResult make_pool(PointProcessModel const& model,
                     double lambda,
                     std::vector<DW> const* pool,
                     std::uint64_t count,
                     std::uint64_t seed,
                     std::uint64_t purpose)
{
    std::size_t cap = default_gen_cap(lambda);
    auto parts = map_chunks<PoolResult>(
        count, [&](std::size_t b, std::size_t e) {
            PoolResult r;
            LineScratch s;
            for (std::size_t i = b; i < e; ++i)
                r.pairs.push_back(line_pair(model,
                                            lambda,
                                            tree_root_key(seed, i, purpose),
                                            pool,
                                            cap,
                                            s,
                                            r.incomplete));
            return r;
        });
    PoolResult out;
    out.pairs.reserve(count);
    for (auto& p : parts)
    {
        out.pairs.insert(out.pairs.end(), p.pairs.begin(), p.pairs.end());
        out.incomplete += p.incomplete;
    }
    return out;
}

double close_pair(DW const& p, double s, double b)
{
    if (p.w == 0)
        return 0;
    return p.d + p.w * (s + std::log(p.w) + b);
}

std::vector<double> stable_draws(std::uint64_t count,
                                 std::uint64_t seed,
                                 std::uint64_t purpose)
{
    std::vector<double> s(count);
    for (std::uint64_t i = 0; i < count; ++i)
    {
        Stream rng(derive_key(tree_root_key(seed, i, purpose), closure_draw));
        s[i] = stable1(rng);
    }
    return s;
}

double mean_laplace1(std::vector<DW> const& p,
                     std::vector<double> const& s,
                     double b)
{
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc.add(std::exp(-close_pair(p[i], s[i], b)));
    return acc.value() / double(p.size());
}

void finish(CascadeSampleSet& set, std::vector<double> const& raw)
{
    std::uint64_t neg = 0, zero = 0;
    set.samples.clear();
    set.samples.reserve(raw.size());
    for (double z : raw)
    {
        if (z < 0)
        {
            ++neg;
            continue;
        }
        if (z == 0)
            ++zero;
        set.samples.push_back(z);
    }
    set.negative_fraction = raw.empty() ? 0 : double(neg) / double(raw.size());
    set.zero_fraction
        = set.samples.empty() ? 0 : double(zero) / double(set.samples.size());
}

void require_boundary(PointProcessModel const& model, CascadeMode mode)
{
    BoundaryOptions bo;
    bo.tol = 1e-8;
    auto rep = check_boundary(model, bo);
    if (!rep.passes.boundary)
        throw AdmissibilityError(fmt::format(
            "{} mode needs a boundary-case model (m1 = {}, m2 = {})",
            to_string(mode),
            rep.m1.value,
            rep.m2.value));
}

CascadeSampleSet line_closure(PointProcessModel const& model,
                              CascadeOptions const& opts)
{
    CascadeSampleSet set;
    set.mode = CascadeMode::line_closure;
    std::uint64_t pool_n
        = opts.pool ? opts.pool : std::min<std::uint64_t>(opts.samples, 1000000);
    if (opts.compositions < 1)
        throw ConfigError("line closure needs at least one composition");

    // Purposes: 100 + depth for pools, 200 for calibration, 300 for output
    std::uint64_t incomplete = 0;
    auto base = make_pool(model, opts.base_lambda, nullptr, pool_n, opts.seed,
                          100);
    incomplete += base.incomplete;
    std::vector<DW> prev = std::move(base.pairs);
    for (std::size_t c = 1; c < opts.compositions; ++c)
    {
        auto next = make_pool(model, opts.lambda, &prev, pool_n, opts.seed,
                              100 + c);
        incomplete += next.incomplete;
        prev = std::move(next.pairs);
    }
    // Calibration pairs one level deeper than prev
    auto cal = make_pool(model, opts.lambda, &prev, pool_n, opts.seed, 200);
    incomplete += cal.incomplete;
    auto s_prev = stable_draws(pool_n, opts.seed, 201);
    auto s_cal = stable_draws(pool_n, opts.seed, 202);

    auto g = [&](double b) {
        return mean_laplace1(cal.pairs, s_cal, b)
               - mean_laplace1(prev, s_prev, b);
    };
    double lo = -4, hi = 2;
    while ((g(lo) > 0) == (g(hi) > 0) && hi - lo < 80)
    {
        lo -= 4;
        hi += 4;
    }
    if ((g(lo) > 0) == (g(hi) > 0))
        throw NoRootError("closure shift calibration found no sign change");
    double glo = g(lo);
    for (int it = 0; it < 60; ++it)
    {
        double m = 0.5 * (lo + hi);
        double gm = g(m);
        if ((gm > 0) == (glo > 0))
        {
            lo = m;
            glo = gm;
        }
        else
        {
            hi = m;
        }
    }
    double b = 0.5 * (lo + hi);
    set.closure_shift = b;

    std::vector<double> zprev(pool_n), zcal(pool_n);
    for (std::size_t i = 0; i < pool_n; ++i)
    {
        zprev[i] = close_pair(prev[i], s_prev[i], b);
        zcal[i] = close_pair(cal.pairs[i], s_cal[i], b);
    }
    set.depth_ks = ks_statistic(zprev, zcal);

    std::vector<double> raw;
    if (opts.samples == pool_n)
    {
        raw = std::move(zcal);
    }
    else
    {
        auto out = make_pool(model, opts.lambda, &prev, opts.samples,
                             opts.seed, 300);
        incomplete += out.incomplete;
        auto s_out = stable_draws(opts.samples, opts.seed, 301);
        raw.resize(opts.samples);
        for (std::size_t i = 0; i < opts.samples; ++i)
            raw[i] = close_pair(out.pairs[i], s_out[i], b);
    }
    finish(set, raw);
    set.n_used = opts.compositions + 1;
    set.diagnostics.push_back(fmt::format(
        "line closure: base level {}, {} compositions at level {}, pool {}, "
        "shift {:.6f}, depth KS {:.5f}, cut lineages {}",
        opts.base_lambda,
        opts.compositions,
        opts.lambda,
        pool_n,
        b,
        set.depth_ks,
        incomplete));
    return set;
}

std::vector<double> derivative_samples(PointProcessModel const& model,
                                       std::size_t n,
                                       std::uint64_t count,
                                       std::uint64_t seed,
                                       std::uint64_t cap)
{
    SimulateOptions so;
    so.n_max = n;
    so.particle_cap = cap;
    auto parts = map_chunks<std::vector<double>>(
        count, [&](std::size_t b, std::size_t e) {
            std::vector<double> out;
            for (std::size_t r = b; r < e; ++r)
                out.push_back(simulate(model, so, seed, r).generations.back().D);
            return out;
        });
    std::vector<double> all;
    for (auto& p : parts)
        all.insert(all.end(), p.begin(), p.end());
    return all;
}

CascadeSampleSet derivative_martingale(PointProcessModel const& model,
                                       CascadeOptions const& opts)
{
    CascadeSampleSet set;
    set.mode = CascadeMode::derivative_martingale;
    std::size_t n = opts.n;
    std::vector<double> raw;
    if (n > 0)
    {
        raw = derivative_samples(model, n, opts.samples, opts.seed,
                                 opts.particle_cap);
    }
    else
    {
        n = 4;
        raw = derivative_samples(model, n, opts.samples, opts.seed,
                                 opts.particle_cap);
        for (;;)
        {
            std::vector<double> twice;
            try
            {
                twice = derivative_samples(model, 2 * n, opts.samples,
                                           opts.seed + 1, opts.particle_cap);
            }
            catch (BudgetError const&)
            {
                set.diagnostics.push_back(fmt::format(
                    "doubling stopped at n = {}: particle cap reached", n));
                break;
            }
            set.depth_ks = ks_statistic(raw, twice);
            n *= 2;
            raw = std::move(twice);
            if (set.depth_ks < 0.01)
                break;
        }
    }
    set.n_used = n;
    finish(set, raw);
    return set;
}

CascadeSampleSet smoothing_iteration(PointProcessModel const& model,
                                     CascadeOptions const& opts)
{
    if (!(opts.chi < 1 && opts.chi > 0))
        throw AdmissibilityError("smoothing iteration needs 0 < chi < 1");
    auto lm = log_moment(model, 1.0);
    if (std::fabs(lm.value) > 1e-8)
        throw AdmissibilityError(
            "smoothing iteration from Z = 1 needs E[sum e^{-V}] = 1");
    double margin = -log_moment(model, opts.chi).value;
    if (margin < 0)
        throw AdmissibilityError(fmt::format(
            "E[sum e^{{-chi V}}] > 1 at chi = {}: not contractive", opts.chi));

    CascadeSampleSet set;
    set.mode = CascadeMode::smoothing_iteration;
    set.chi = opts.chi;
    std::uint64_t n = opts.samples;
    std::vector<double> cur(n, 1.0), next(n);
    std::vector<double> last;
    for (std::size_t it = 0; it < opts.depth; ++it)
    {
        map_chunks<char>(n, [&](std::size_t b, std::size_t e) {
            std::vector<double> xs;
            for (std::size_t i = b; i < e; ++i)
            {
                Stream rng(derive_key(
                    Stream::root(opts.seed, i, tag::cascade).key(), it));
                model.sample(rng, xs);
                CompensatedSum s;
                for (double x : xs)
                    s.add(std::exp(-x) * cur[rng.below(n)]);
                next[i] = s.value();
            }
            return char(0);
        });
        if (it + 1 == opts.depth)
            last = cur;
        std::swap(cur, next);
    }
    if (!last.empty())
        set.depth_ks = ks_statistic(last, cur);
    set.n_used = opts.depth;
    finish(set, cur);
    set.diagnostics.push_back(
        fmt::format("contraction margin -log E[sum e^{{-chi V}}] = {:.6g}",
                    margin));
    if (lm.d1 > 0)
        set.diagnostics.push_back(fmt::format(
            "E[sum V e^{{-V}}] = {:.6g} < 0: iterates have mean 1 but tend to 0 "
            "as the depth grows",
            -lm.d1));
    return set;
}
}  // namespace

CascadeSampleSet
sample_fixed_point(PointProcessModel const& model, CascadeOptions const& opts)
{
    if (opts.samples == 0)
        throw ConfigError("cascade sampling needs at least one sample");
    switch (opts.mode)
    {
        case CascadeMode::derivative_martingale:
            require_boundary(model, opts.mode);
            return derivative_martingale(model, opts);
        case CascadeMode::line_closure:
            require_boundary(model, opts.mode);
            return line_closure(model, opts);
        case CascadeMode::smoothing_iteration:
            return smoothing_iteration(model, opts);
    }
    throw ConfigError("unknown cascade mode");
}

//---------------------------------------------------------------------------//
namespace
{
struct LaplacePair
{
    MeanAccumulator all, positive;
    void merge(LaplacePair const& o)
    {
        all.merge(o.all);
        positive.merge(o.positive);
    }
};
}  // namespace

std::vector<LaplaceEstimate>
laplace_grid(std::vector<double> const& samples, std::vector<double> const& t)
{
    std::vector<LaplaceEstimate> out;
    for (double tt : t)
    {
        if (tt < 0)
            throw ConfigError("Laplace grid needs t >= 0");
        auto acc = reduce_chunks<LaplacePair>(
            samples.size(),
            [&](std::size_t b, std::size_t e) {
                LaplacePair m;
                for (std::size_t i = b; i < e; ++i)
                {
                    double z = samples[i];
                    double v = tt == 0 ? 1.0 : std::exp(-tt * z);
                    m.all.add(v);
                    m.positive.add(z > 0 ? v : 0.0);
                }
                return m;
            },
            4096);
        out.push_back({tt, acc.all.estimate(), acc.positive.estimate()});
    }
    return out;
}

SmallDevReport schroder_small_dev(std::vector<double> const& samples,
                                  std::vector<double> const& eps)
{
    std::vector<double> pos;
    for (double z : samples)
        if (z > 0)
            pos.push_back(z);
    std::sort(pos.begin(), pos.end());
    double n = double(samples.size());
    double np = double(pos.size());

    SmallDevReport rep;
    std::vector<FitPoint> pts;
    double emax = 0;
    for (double e : eps)
    {
        emax = std::max(emax, e);
        double c = double(std::lower_bound(pos.begin(), pos.end(), e)
                          - pos.begin());
        SmallDevRow row;
        row.eps = e;
        double p = c / n;
        row.p = {p, std::sqrt(p * (1 - p) / n)};
        row.wilson = wilson_interval(c, n);
        double pc = np > 0 ? c / np : 0;
        row.conditioned = {pc, np > 0 ? std::sqrt(pc * (1 - pc) / np) : 0};
        rep.rows.push_back(row);
        if (c > 0)
            pts.push_back({e, p, row.p.se});
    }
    rep.below_max = std::uint64_t(std::lower_bound(pos.begin(), pos.end(), emax)
                                  - pos.begin());
    rep.sparse = rep.below_max < 50;
    if (pts.size() >= 6)
        rep.fit = fit_log_slope(pts, FitTransform::loglog);
    return rep;
}

BottcherReport bottcher_tail(std::vector<double> const& samples,
                             std::vector<double> const& t,
                             std::vector<double> const& eps,
                             std::vector<double> const& r,
                             double beta,
                             double K)
{
    BottcherReport rep;
    auto lap = laplace_grid(samples, t);
    std::vector<FitPoint> lp;
    for (auto const& l : lap)
        lp.push_back({l.t, l.all.value, l.all.se});
    rep.laplace_fit = fit_log_slope(lp, FitTransform::log_neg_log);

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double n = double(sorted.size());
    std::vector<FitPoint> sp;
    for (double e : eps)
    {
        double c = double(std::lower_bound(sorted.begin(), sorted.end(), e)
                          - sorted.begin());
        double p = c / n;
        if (c > 0)
            sp.push_back({1 / e, p, std::sqrt(p * (1 - p) / n)});
    }
    if (sp.size() >= 6)
    {
        rep.smalldev_fit = fit_log_slope(sp, FitTransform::log_neg_log);
        double b = rep.laplace_fit.slope;
        double predicted = b / (1 - b);
        rep.depth_warning
            = std::fabs(predicted - rep.smalldev_fit.slope)
              > 0.5 * std::fabs(rep.smalldev_fit.slope);
    }
    else
    {
        rep.depth_warning = true;
    }

    std::vector<double> grid{std::exp(-K)};
    grid.insert(grid.end(), r.begin(), r.end());
    auto hl = laplace_grid(samples, grid);
    auto h_of = [](LaplaceEstimate const& l) {
        return std::pair{-std::log(l.all.value), l.all.se / l.all.value};
    };
    auto [h0, h0se] = h_of(hl[0]);
    rep.h0 = h0;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        auto [h, hse] = h_of(hl[i + 1]);
        double rb = std::pow(r[i], beta);
        double env = h0 * rb;
        double se = std::hypot(hse, rb * h0se);
        double slack = se > 0 ? (h - env) / se : (h >= env ? 0 : -INFINITY);
        rep.r.push_back(r[i]);
        rep.h.push_back(h);
        rep.envelope.push_back(env);
        rep.slack.push_back(slack);
        if (slack < -3)
            rep.envelope_holds = false;
    }
    return rep;
}

//---------------------------------------------------------------------------//
SelfConsistency self_consistency(PointProcessModel const& model,
                                 std::vector<double> const& samples,
                                 std::uint64_t seed,
                                 double alpha)
{
    std::size_t n = samples.size();
    if (n == 0)
        throw ConfigError("self-consistency needs samples");
    std::vector<double> step(n);
    map_chunks<char>(n, [&](std::size_t b, std::size_t e) {
        std::vector<double> xs;
        for (std::size_t i = b; i < e; ++i)
        {
            Stream rng = Stream::root(seed, i, tag::resample);
            model.sample(rng, xs);
            CompensatedSum s;
            for (double x : xs)
                s.add(std::exp(-x) * samples[rng.below(n)]);
            step[i] = s.value();
        }
        return char(0);
    });
    SelfConsistency sc;
    sc.n = n;
    sc.ks = ks_statistic(samples, step);
    sc.critical = ks_critical(n, n, alpha);
    sc.pass = sc.ks <= sc.critical;
    return sc;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
