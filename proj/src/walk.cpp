//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file walk.cpp
//---------------------------------------------------------------------------//
#include "brwlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "brwlab/errors.hpp"
#include "brwlab/law.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/tree.hpp"

namespace brwlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

std::size_t pick(std::vector<double> const& cdf, double u)
{
    std::size_t i = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    return std::min(i, cdf.size() - 1);
}
}  // namespace

//---------------------------------------------------------------------------//
double SpineStepLaw::sample(Stream& rng) const
{
    if (exact)
        return values[pick(cumulative, rng.uniform())];
    return tilted->sample(rng);
}

SpineStepLaw spine_step_law(PointProcessModel const& model, double tol)
{
    SpineStepLaw law;
    if (model.is_finite_support())
    {
        std::map<double, double> mass;
        for (auto const& a : model.atoms())
            for (double x : a.displacements)
                mass[x] += a.weight * std::exp(-x);
        CompensatedSum total;
        for (auto const& [x, p] : mass)
            total.add(p);
        if (std::fabs(total.value() - 1) > tol)
            throw DomainError(fmt::format(
                "many-to-one step law has mass {} (model is not at the "
                "boundary)",
                total.value()));
        law.exact = true;
        CompensatedSum acc, m1, m2;
        for (auto const& [x, p] : mass)
        {
            law.values.push_back(x);
            law.probs.push_back(p / total.value());
            acc.add(p / total.value());
            law.cumulative.push_back(acc.value());
            m1.add(x * p);
            m2.add(x * x * p);
        }
        law.cumulative.back() = 1.0;
        law.mean = m1.value();
        law.variance = m2.value() - law.mean * law.mean;
        return law;
    }
    auto const& spec = model.parametric_spec();
    double mass = model.mean_offspring() * std::exp(spec.law.cumulant(-1).k);
    if (std::fabs(mass - 1) > tol)
        throw DomainError(fmt::format(
            "many-to-one step law has mass {} (model is not at the boundary)",
            mass));
    law.tilted = spec.law.tilted(1);
    law.mean = law.tilted->mean();
    law.variance = law.tilted->variance();
    return law;
}

//---------------------------------------------------------------------------//
SpineSampler::SpineSampler(PointProcessModel const& model) : model_(&model)
{
    if (model.is_finite_support())
    {
        double acc = 0;
        for (auto const& a : model.atoms())
        {
            double s = 0;
            for (double x : a.displacements)
                s += std::exp(-x);
            acc += a.weight * s;
            atom_cdf_.push_back(acc);
        }
        for (double& c : atom_cdf_)
            c /= acc;
        return;
    }
    auto const& p = model.offspring_law();
    double acc = 0;
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        acc += k * p[k];
        size_cdf_.push_back(acc);
    }
    for (double& c : size_cdf_)
        c /= acc;
    tilted_ = model.parametric_spec().law.tilted(1);
}

double SpineSampler::next(Stream& rng,
                          std::vector<double>& before,
                          std::vector<double>* after) const
{
    before.clear();
    if (after)
        after->clear();
    if (model_->is_finite_support())
    {
        auto const& a = model_->atoms()[pick(atom_cdf_, rng.uniform())];
        double s = 0;
        for (double x : a.displacements)
            s += std::exp(-x);
        double u = rng.uniform() * s, c = 0;
        std::size_t spine = a.displacements.size() - 1;
        for (std::size_t j = 0; j < a.displacements.size(); ++j)
        {
            c += std::exp(-a.displacements[j]);
            if (u < c)
            {
                spine = j;
                break;
            }
        }
        for (std::size_t j = 0; j < a.displacements.size(); ++j)
        {
            if (j < spine)
                before.push_back(a.displacements[j]);
            else if (j > spine && after)
                after->push_back(a.displacements[j]);
        }
        return a.displacements[spine];
    }
    std::size_t k = pick(size_cdf_, rng.uniform());
    std::size_t spine = rng.below(k);
    auto const& law = model_->parametric_spec().law;
    double v = tilted_->sample(rng);
    for (std::size_t j = 0; j < k; ++j)
    {
        if (j == spine)
            continue;
        double x = law.sample(rng);
        if (j < spine)
            before.push_back(x);
        else if (after)
            after->push_back(x);
    }
    return v;
}

//---------------------------------------------------------------------------//
LadderSample
sample_ladder(SpineStepLaw const& law, Stream& rng, std::uint64_t step_cap)
{
    LadderSample r;
    double s = 0;
    for (std::uint64_t k = 1; k <= step_cap; ++k)
    {
        s += law.sample(rng);
        if (s > 0)
        {
            r.tau0 = k;
            r.height = s;
            return r;
        }
    }
    r.tau0 = step_cap;
    r.truncated = true;
    return r;
}

//---------------------------------------------------------------------------//
std::string to_string(PathFunctional f)
{
    switch (f)
    {
        case PathFunctional::one:
            return "one";
        case PathFunctional::min_nonnegative:
            return "min_nonnegative";
        case PathFunctional::box_end:
            return "box_end";
        case PathFunctional::max_below_one:
            return "max_below_one";
        case PathFunctional::poly_exp:
            return "poly_exp";
    }
    return "unknown";
}

std::vector<PathFunctional> registered_functionals()
{
    return {PathFunctional::one,
            PathFunctional::min_nonnegative,
            PathFunctional::box_end,
            PathFunctional::max_below_one,
            PathFunctional::poly_exp};
}

double evaluate(PathFunctional f, std::vector<double> const& path)
{
    double mn = inf, mx = -inf;
    for (double s : path)
    {
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    double end = path.empty() ? 0.0 : path.back();
    switch (f)
    {
        case PathFunctional::one:
            return 1;
        case PathFunctional::min_nonnegative:
            return mn >= 0 ? 1 : 0;
        case PathFunctional::box_end:
            return (mn >= 0 && end <= 1) ? 1 : 0;
        case PathFunctional::max_below_one:
            return mx <= 1 ? 1 : 0;
        case PathFunctional::poly_exp:
            return end * end * std::exp(-std::fabs(end));
    }
    return 0;
}

namespace
{
struct FunctionalSums
{
    std::vector<MeanAccumulator> acc;
    void merge(FunctionalSums const& o)
    {
        if (acc.empty())
            acc.resize(o.acc.size());
        for (std::size_t i = 0; i < o.acc.size(); ++i)
            acc[i].merge(o.acc[i]);
    }
};

constexpr std::uint64_t enumeration_cap = 10000000;

// Sum over |u| = n of e^{-V(u)} f(V(u_1..u_n)) on one sampled tree
void enumerate_paths(PointProcessModel const& model,
                     std::uint64_t key,
                     std::size_t n,
                     std::vector<double>& path,
                     std::vector<PathFunctional> const& fs,
                     std::vector<double>& sums,
                     std::uint64_t& visited)
{
    if (++visited > enumeration_cap)
        throw BudgetError("tree enumeration exceeded the node budget");
    if (path.size() == n)
    {
        double w = std::exp(-path.back());
        for (std::size_t i = 0; i < fs.size(); ++i)
            sums[i] += w * evaluate(fs[i], path);
        return;
    }
    std::vector<double> xs;
    reproduce(model, key, xs);
    double v = path.empty() ? 0.0 : path.back();
    for (std::size_t j = 0; j < xs.size(); ++j)
    {
        path.push_back(v + xs[j]);
        enumerate_paths(
            model, child_key(key, j), n, path, fs, sums, visited);
        path.pop_back();
    }
}
}  // namespace

std::vector<ManyToOneResult>
many_to_one_check(PointProcessModel const& model,
                  std::size_t n,
                  std::vector<PathFunctional> const& functionals,
                  std::uint64_t walk_replicas,
                  std::uint64_t tree_replicas,
                  std::uint64_t seed)
{
    if (n == 0)
        throw ConfigError("many-to-one check needs n >= 1");
    SpineStepLaw law = spine_step_law(model);
    std::size_t nf = functionals.size();

    auto walk = reduce_chunks<FunctionalSums>(
        walk_replicas, [&](std::size_t b, std::size_t e) {
            FunctionalSums s;
            s.acc.resize(nf);
            std::vector<double> path(n);
            for (std::size_t r = b; r < e; ++r)
            {
                Stream rng = Stream::root(seed, r, tag::walk);
                double x = 0;
                for (std::size_t k = 0; k < n; ++k)
                    path[k] = x += law.sample(rng);
                for (std::size_t i = 0; i < nf; ++i)
                    s.acc[i].add(evaluate(functionals[i], path));
            }
            return s;
        });
    auto tree = reduce_chunks<FunctionalSums>(
        tree_replicas, [&](std::size_t b, std::size_t e) {
            FunctionalSums s;
            s.acc.resize(nf);
            std::vector<double> path, sums(nf);
            for (std::size_t r = b; r < e; ++r)
            {
                std::fill(sums.begin(), sums.end(), 0.0);
                std::uint64_t visited = 0;
                path.clear();
                enumerate_paths(model,
                                tree_root_key(seed, r),
                                n,
                                path,
                                functionals,
                                sums,
                                visited);
                for (std::size_t i = 0; i < nf; ++i)
                    s.acc[i].add(sums[i]);
            }
            return s;
        });

    std::vector<ManyToOneResult> out;
    for (std::size_t i = 0; i < nf; ++i)
    {
        ManyToOneResult r;
        r.functional = functionals[i];
        r.n = n;
        r.tree = tree.acc[i].estimate();
        r.walk = walk.acc[i].estimate();
        double se = std::hypot(r.tree.se, r.walk.se);
        double diff = std::fabs(r.tree.value - r.walk.value);
        r.discrepancy = se > 0 ? diff / se : (diff == 0 ? 0 : inf);
        out.push_back(r);
    }
    return out;
}

//---------------------------------------------------------------------------//
namespace
{
struct OvershootSamples
{
    std::vector<double> values;
    std::uint64_t truncated{0};
    void merge(OvershootSamples const& o)
    {
        values.insert(values.end(), o.values.begin(), o.values.end());
        truncated += o.truncated;
    }
};
}  // namespace

std::vector<OvershootResult>
first_passage_overshoot(PointProcessModel const& model,
                        std::vector<double> const& b_grid,
                        OvershootOptions const& opts)
{
    SpineStepLaw law = spine_step_law(model);
    std::vector<OvershootResult> out;
    for (std::size_t bi = 0; bi < b_grid.size(); ++bi)
    {
        double b = b_grid[bi];
        auto s = reduce_chunks<OvershootSamples>(
            opts.replicas, [&](std::size_t lo, std::size_t hi) {
                OvershootSamples o;
                for (std::size_t r = lo; r < hi; ++r)
                {
                    Stream rng(derive_key(
                        Stream::root(opts.seed, r, tag::walk).key(), bi));
                    double x = 0;
                    std::uint64_t k = 0;
                    while (!(x > b) && k < opts.step_cap)
                    {
                        x += law.sample(rng);
                        ++k;
                    }
                    if (x > b)
                        o.values.push_back(x - b);
                    else
                        ++o.truncated;
                }
                return o;
            });
        OvershootResult r;
        r.b = b;
        r.truncated = s.truncated;
        r.samples = std::move(s.values);
        std::sort(r.samples.begin(), r.samples.end());
        double n = double(r.samples.size());
        if (r.samples.empty())
        {
            out.push_back(std::move(r));
            continue;
        }
        // Survival on an even grid up to the point where it falls below the
        // configured floor
        double top = r.samples.back();
        constexpr int npts = 40;
        std::vector<FitPoint> pts;
        for (int i = 0; i < npts; ++i)
        {
            double x = top * i / npts;
            double above = double(r.samples.end()
                                  - std::upper_bound(r.samples.begin(),
                                                     r.samples.end(),
                                                     x));
            double sv = above / n;
            r.x.push_back(x);
            r.survival.push_back(sv);
            if (sv >= opts.min_survival && sv < 1)
                pts.push_back({x, sv, std::sqrt(sv * (1 - sv) / n)});
        }
        if (pts.size() >= 6)
            r.tail = fit_log_slope(pts, FitTransform::semilog);
        out.push_back(std::move(r));
    }
    return out;
}

//---------------------------------------------------------------------------//
std::uint64_t count_ladder_points(std::vector<double> const& path, double x)
{
    std::uint64_t count = 0;
    double running = inf;
    for (double s : path)
    {
        if (s < running)
        {
            running = s;
            if (s >= -x)
                ++count;
        }
    }
    return count;
}

namespace
{
struct RenewalSums
{
    std::vector<MeanAccumulator> acc;
    std::uint64_t truncated{0};
    void merge(RenewalSums const& o)
    {
        if (acc.empty())
            acc.resize(o.acc.size());
        for (std::size_t i = 0; i < o.acc.size(); ++i)
            acc[i].merge(o.acc[i]);
        truncated += o.truncated;
    }
};
}  // namespace

RenewalResult renewal_function(PointProcessModel const& model,
                               std::vector<double> const& x_grid,
                               RenewalOptions const& opts)
{
    if (x_grid.empty())
        throw ConfigError("renewal grid is empty");
    SpineStepLaw law = spine_step_law(model);
    std::vector<double> xs = x_grid;
    std::sort(xs.begin(), xs.end());
    double xmax = xs.back();

    auto sums = reduce_chunks<RenewalSums>(
        opts.replicas, [&](std::size_t lo, std::size_t hi) {
            RenewalSums s;
            s.acc.resize(xs.size());
            std::vector<double> heights;
            for (std::size_t r = lo; r < hi; ++r)
            {
                Stream rng = Stream::root(opts.seed, r, tag::walk);
                heights.assign(1, 0.0);
                double x = 0, running = 0;
                std::uint64_t k = 0;
                while (running >= -xmax && k < opts.step_cap)
                {
                    x += law.sample(rng);
                    ++k;
                    if (x < running)
                    {
                        running = x;
                        if (x >= -xmax)
                            heights.push_back(x);
                    }
                }
                if (running >= -xmax)
                {
                    ++s.truncated;
                    continue;
                }
                for (std::size_t i = 0; i < xs.size(); ++i)
                {
                    double c = double(std::count_if(
                        heights.begin(), heights.end(), [&](double h) {
                            return h >= -xs[i];
                        }));
                    s.acc[i].add(c);
                }
            }
            return s;
        });

    RenewalResult res;
    res.x = xs;
    res.truncated = sums.truncated;
    res.walks = opts.replicas - sums.truncated;
    double mn = inf, mx = -inf;
    MeanAccumulator plateau;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        res.r.push_back(sums.acc[i].estimate());
        double ratio = xs[i] > 0 ? res.r.back().value / xs[i] : inf;
        res.ratio.push_back(ratio);
        if (xs[i] >= opts.plateau_lo && xs[i] <= opts.plateau_hi)
        {
            mn = std::min(mn, ratio);
            mx = std::max(mx, ratio);
            plateau.add(ratio);
        }
    }
    if (plateau.count() > 0)
    {
        res.c1 = plateau.mean();
        res.plateau_spread = (mx - mn) / mn;
    }
    return res;
}

//---------------------------------------------------------------------------//
namespace
{
struct TailSums
{
    std::vector<MeanAccumulator> acc;
    void merge(TailSums const& o)
    {
        if (acc.empty())
            acc.resize(o.acc.size());
        for (std::size_t i = 0; i < o.acc.size(); ++i)
            acc[i].merge(o.acc[i]);
    }
};
}  // namespace

LeftTailResult spinal_left_tail(PointProcessModel const& model,
                                FrontLaw const& law,
                                std::size_t n,
                                std::vector<double> const& lambdas,
                                std::uint64_t replicas,
                                std::uint64_t seed,
                                std::size_t batch)
{
    if (law.generations() < n)
        throw ConfigError("front law does not reach generation n");
    if (batch < 2 || replicas < 2 * batch)
        throw ConfigError("spinal estimator needs at least two batches of two");
    SpineSampler spine(model);
    double const centre = 1.5 * std::log(double(n));
    std::size_t const nl = lambdas.size();
    std::size_t const nbatch = replicas / batch;

    // One batch: N spine paths, brother factors as incremental weights,
    // systematic resampling when the effective size halves
    auto run_batch = [&](std::size_t b, double xlev) {
        Stream rng = Stream::root(seed, b, tag::spine);
        std::vector<double> v(batch, 0.0), logw(batch, 0.0), w(batch);
        std::vector<double> next_v(batch), before;
        double log_z = 0;
        auto normalize = [&](bool final_step) {
            double mx = -inf;
            for (double l : logw)
                mx = std::max(mx, l);
            if (mx == -inf)
                return false;
            double sum = 0, sumsq = 0;
            for (std::size_t i = 0; i < batch; ++i)
            {
                w[i] = std::exp(logw[i] - mx);
                sum += w[i];
                sumsq += w[i] * w[i];
            }
            double ess = sum * sum / sumsq;
            if (final_step || ess >= 0.5 * double(batch))
                return true;
            log_z += mx + std::log(sum / double(batch));
            double u = rng.uniform() / double(batch), acc = w[0] / sum;
            std::size_t j = 0;
            for (std::size_t i = 0; i < batch; ++i)
            {
                double target = u + double(i) / double(batch);
                while (acc < target && j + 1 < batch)
                    acc += w[++j] / sum;
                next_v[i] = v[j];
            }
            std::swap(v, next_v);
            std::fill(logw.begin(), logw.end(), 0.0);
            return true;
        };
        for (std::size_t k = 1; k <= n; ++k)
        {
            for (std::size_t i = 0; i < batch; ++i)
            {
                if (logw[i] == -inf)
                    continue;
                double step = spine.next(rng, before);
                for (double x : before)
                    logw[i] += std::log(law.tail(n - k, xlev - (v[i] + x)));
                v[i] += step;
            }
            if (k == n)
            {
                for (std::size_t i = 0; i < batch; ++i)
                    logw[i] += v[i] < xlev ? v[i] : -inf;
            }
            if (!normalize(k == n))
                return 0.0;
        }
        double mx = -inf;
        for (double l : logw)
            mx = std::max(mx, l);
        double sum = 0;
        for (double l : logw)
            sum += std::exp(l - mx);
        return std::exp(log_z + mx + std::log(sum / double(batch)));
    };

    auto sums = reduce_chunks<TailSums>(
        nbatch,
        [&](std::size_t lo, std::size_t hi) {
            TailSums s;
            s.acc.resize(nl);
            for (std::size_t b = lo; b < hi; ++b)
            {
                for (std::size_t i = 0; i < nl; ++i)
                    s.acc[i].add(run_batch(b * nl + i, centre - lambdas[i]));
            }
            return s;
        },
        1);

    LeftTailResult res;
    res.n = n;
    res.lambda = lambdas;
    res.batches = nbatch;
    for (std::size_t i = 0; i < nl; ++i)
    {
        auto const& a = sums.acc[i];
        res.p.push_back(a.estimate());
        double m = a.mean();
        double m2 = a.variance() + m * m;
        res.ess_fraction.push_back(m2 > 0 ? m * m / m2 : 0.0);
    }
    return res;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
