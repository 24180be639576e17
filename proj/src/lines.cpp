//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file lines.cpp
//---------------------------------------------------------------------------//
#include "brwlab/lines.hpp"

#include <algorithm>
#include <cmath>

#include "brwlab/errors.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/tree.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
std::size_t default_gen_cap(double lambda)
{
    return std::max<std::size_t>(
        64, std::size_t(std::ceil(8 * lambda * lambda * lambda)));
}

namespace
{
struct Node
{
    std::uint64_t key;
    double v;
    double vbar;  //!< max position along the path, root included
    std::size_t gen;
};

struct LineSums
{
    CompensatedSum d, w, eta;
};
}  // namespace

std::vector<LineSample> first_passage_lines(PointProcessModel const& model,
                                            std::vector<double> const& lambdas,
                                            std::uint64_t seed,
                                            std::uint64_t replica,
                                            LineOptions const& opts)
{
    if (lambdas.empty())
        throw ConfigError("line construction needs at least one lambda");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw ConfigError("lambda grid must be ascending");
    if (lambdas.front() < 0)
        throw ConfigError("lambda must be nonnegative");

    std::size_t const nl = lambdas.size();
    std::size_t const na = opts.a.size();
    double const lmax = lambdas.back();
    std::size_t const cap = opts.gen_cap ? opts.gen_cap : default_gen_cap(lmax);

    std::vector<LineSample> out(nl);
    std::vector<LineSums> sums(nl);
    for (std::size_t i = 0; i < nl; ++i)
    {
        out[i].line.lambda = lambdas[i];
        out[i].f.count_restricted.assign(na, 0);
    }
    auto first_at_least = [&](double v) {
        return std::size_t(std::lower_bound(lambdas.begin(), lambdas.end(), v)
                           - lambdas.begin());
    };

    std::vector<Node> stack{{tree_root_key(seed, replica), 0.0, 0.0, 0}};
    std::vector<double> xs;
    while (!stack.empty())
    {
        Node u = stack.back();
        stack.pop_back();
        std::size_t lo = first_at_least(u.vbar);
        if (u.gen >= cap)
        {
            for (std::size_t i = lo; i < nl; ++i)
                out[i].line.complete = false;
            continue;
        }
        reproduce(model, u.key, xs);
        for (std::size_t i = lo; i < nl; ++i)
            out[i].line.branching_excess += std::int64_t(xs.size()) - 1;
        // Reverse push keeps sibling order in the depth-first visit
        for (std::size_t jj = xs.size(); jj-- > 0;)
        {
            double v = u.v + xs[jj];
            std::size_t hi = first_at_least(v);
            double e = std::exp(-v);
            for (std::size_t i = lo; i < hi; ++i)
            {
                double lam = lambdas[i];
                auto& f = out[i].f;
                ++f.count;
                for (std::size_t k = 0; k < na; ++k)
                    if (v <= lam + opts.a[k])
                        ++f.count_restricted[k];
                sums[i].d.add(v * e);
                sums[i].w.add(e);
                sums[i].eta.add((v - lam) * std::exp(lam - v));
                f.max_generation = std::max(f.max_generation, u.gen + 1);
                f.max_overshoot = std::max(f.max_overshoot, v - lam);
                f.strict_overshoot = f.strict_overshoot && v > lam;
                if (opts.keep_members)
                    out[i].line.members.push_back({v, u.gen + 1});
            }
            double vbar = std::max(u.vbar, v);
            if (vbar <= lmax)
                stack.push_back({child_key(u.key, jj), v, vbar, u.gen + 1});
        }
    }
    for (std::size_t i = 0; i < nl; ++i)
    {
        out[i].f.D = sums[i].d.value();
        out[i].f.W = sums[i].w.value();
        out[i].f.eta = sums[i].eta.value();
        out[i].line.extinct_before_crossing
            = out[i].line.complete && out[i].f.count == 0;
    }
    return out;
}

LineSample first_passage_line(PointProcessModel const& model,
                              double lambda,
                              std::uint64_t seed,
                              std::uint64_t replica,
                              LineOptions const& opts)
{
    return first_passage_lines(model, {lambda}, seed, replica, opts).front();
}

//---------------------------------------------------------------------------//
namespace
{
struct RowSums
{
    std::vector<std::vector<MeanAccumulator>> acc;  //!< [lambda][quantity]
    std::vector<std::uint64_t> incomplete;
    void merge(RowSums const& o)
    {
        if (acc.empty())
        {
            acc.resize(o.acc.size());
            for (std::size_t i = 0; i < o.acc.size(); ++i)
                acc[i].resize(o.acc[i].size());
            incomplete.assign(o.incomplete.size(), 0);
        }
        for (std::size_t i = 0; i < o.acc.size(); ++i)
        {
            for (std::size_t k = 0; k < o.acc[i].size(); ++k)
                acc[i][k].merge(o.acc[i][k]);
            incomplete[i] += o.incomplete[i];
        }
    }
};

std::vector<double> sorted_grid(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

// Run lines for every replica and let \c fill add per-lambda quantities
template<class F>
RowSums line_sums(PointProcessModel const& model,
                  std::vector<double> const& lambdas,
                  LineOptions const& lo,
                  std::size_t nq,
                  std::uint64_t replicas,
                  std::uint64_t seed,
                  F&& fill)
{
    return reduce_chunks<RowSums>(
        replicas, [&](std::size_t b, std::size_t e) {
            RowSums s;
            s.acc.assign(lambdas.size(), std::vector<MeanAccumulator>(nq));
            s.incomplete.assign(lambdas.size(), 0);
            for (std::size_t r = b; r < e; ++r)
            {
                auto lines = first_passage_lines(model, lambdas, seed, r, lo);
                for (std::size_t i = 0; i < lines.size(); ++i)
                {
                    if (!lines[i].line.complete)
                    {
                        ++s.incomplete[i];
                        continue;
                    }
                    fill(lines[i], s.acc[i]);
                }
            }
            return s;
        });
}
}  // namespace

std::vector<NermanRow> nerman_scan(PointProcessModel const& model,
                                   double a,
                                   std::vector<double> const& lambdas_in,
                                   std::uint64_t replicas,
                                   std::uint64_t seed,
                                   std::size_t gen_cap)
{
    if (model.lattice())
        throw ConfigError(
            "Nerman ratios are only defined for non-lattice models");
    auto lambdas = sorted_grid(lambdas_in);
    LineOptions lo;
    lo.a = {a};
    lo.gen_cap = gen_cap;
    auto sums = line_sums(
        model, lambdas, lo, 4, replicas, seed, [](LineSample const& s, auto& acc) {
            double lam = s.line.lambda;
            if (s.f.count == 0)
                return;
            double ew = std::exp(lam) * s.f.W;
            double ca = double(s.f.count_restricted[0]);
            acc[0].add(ca / ew);
            acc[1].add(s.f.eta / ew);
            acc[2].add(lam * std::exp(-lam) * ca / s.f.D);
            acc[3].add(s.f.W);
        });
    std::vector<NermanRow> rows;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
    {
        NermanRow r;
        r.lambda = lambdas[i];
        r.ratio = sums.acc[i][0].estimate();
        r.eta_ratio = sums.acc[i][1].estimate();
        r.d_ratio = sums.acc[i][2].estimate();
        r.mean_W = sums.acc[i][3].estimate();
        r.used = sums.acc[i][0].count();
        r.incomplete = sums.incomplete[i];
        rows.push_back(r);
    }
    return rows;
}

std::vector<LaplaceRow> line_count_laplace(PointProcessModel const& model,
                                           std::vector<double> const& a,
                                           std::vector<double> const& lambdas_in,
                                           std::uint64_t replicas,
                                           std::uint64_t seed,
                                           std::size_t gen_cap)
{
    auto lambdas = sorted_grid(lambdas_in);
    LineOptions lo;
    lo.gen_cap = gen_cap;
    auto sums = line_sums(
        model, lambdas, lo, a.size(), replicas, seed,
        [&](LineSample const& s, auto& acc) {
            for (std::size_t k = 0; k < a.size(); ++k)
                acc[k].add(s.f.count > 0
                               ? std::exp(-a[k] * double(s.f.count))
                               : 0.0);
        });
    std::vector<LaplaceRow> rows;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
    {
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            LaplaceRow r;
            r.lambda = lambdas[i];
            r.a = a[k];
            r.value = sums.acc[i][k].estimate();
            double n = double(sums.acc[i][k].count());
            if (r.value.value <= 0)
                r.upper_bound = rule_of_three(n);
            double v = r.value.value > 0 ? r.value.value : r.upper_bound;
            r.schroder_diag = -std::log(v) / r.lambda;
            r.bottcher_diag = std::log(-std::log(v)) / r.lambda;
            rows.push_back(r);
        }
    }
    return rows;
}

SmallLineReport small_line_probability(PointProcessModel const& model,
                                       std::vector<std::size_t> const& m,
                                       std::vector<double> const& lambdas_in,
                                       std::uint64_t replicas,
                                       std::uint64_t seed,
                                       std::size_t gen_cap)
{
    auto lambdas = sorted_grid(lambdas_in);
    double q = extinction_probability(model);
    LineOptions lo;
    lo.gen_cap = gen_cap;
    std::size_t nm = m.size();
    auto sums = line_sums(
        model, lambdas, lo, nm + 1, replicas, seed,
        [&](LineSample const& s, auto& acc) {
            std::uint64_t c = s.f.count;
            for (std::size_t k = 0; k < nm; ++k)
                acc[k].add(c > 0 && c <= m[k] ? 1.0 : 0.0);
            acc[nm].add(c > 0 ? std::pow(q, double(c)) : 0.0);
        });
    SmallLineReport rep;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
    {
        SmallLineRow r;
        r.lambda = lambdas[i];
        r.m = m;
        for (std::size_t k = 0; k < nm; ++k)
            r.p.push_back(sums.acc[i][k].estimate());
        r.extinct_after = sums.acc[i][nm].estimate();
        r.incomplete = sums.incomplete[i];
        rep.rows.push_back(r);
    }
    auto slope = [&](auto get) {
        std::vector<double> xs, ys;
        for (auto const& r : rep.rows)
        {
            double v = get(r);
            if (v > 0)
            {
                xs.push_back(r.lambda);
                ys.push_back(std::log(v));
            }
        }
        return xs.size() >= 2 ? least_squares(xs, ys).first : std::nan("");
    };
    for (std::size_t k = 0; k < nm; ++k)
        rep.slopes.push_back(
            slope([k](SmallLineRow const& r) { return r.p[k].value; }));
    rep.extinct_after_slope
        = slope([](SmallLineRow const& r) { return r.extinct_after.value; });
    return rep;
}

//---------------------------------------------------------------------------//
std::vector<Estimate> weighted_overshoot(PointProcessModel const& model,
                                         double b,
                                         std::vector<double> const& edges,
                                         std::uint64_t replicas,
                                         std::uint64_t seed)
{
    if (edges.size() < 2)
        throw ConfigError("overshoot histogram needs at least two edges");
    std::size_t nb = edges.size() - 1;
    LineOptions lo;
    lo.keep_members = true;
    auto sums = line_sums(
        model, {b}, lo, nb, replicas, seed, [&](LineSample const& s, auto& acc) {
            std::vector<double> bins(nb, 0.0);
            for (auto const& mem : s.line.members)
            {
                double o = mem.position - b;
                auto it = std::upper_bound(edges.begin(), edges.end(), o);
                if (it == edges.begin() || it == edges.end())
                    continue;
                bins[std::size_t(it - edges.begin()) - 1]
                    += std::exp(-mem.position);
            }
            for (std::size_t k = 0; k < nb; ++k)
                acc[k].add(bins[k]);
        });
    std::vector<Estimate> out;
    for (std::size_t k = 0; k < nb; ++k)
        out.push_back(sums.acc[0][k].estimate());
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
