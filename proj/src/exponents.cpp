//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file exponents.cpp
//---------------------------------------------------------------------------//
#include "brwlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "brwlab/errors.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/walk.hpp"

namespace brwlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

// Bisection to machine resolution on a bracket with f(lo) < 0 <= f(hi)
template<class F>
double bisect(F&& f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 200; ++i)
    {
        double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi)
            break;
        double fm = f(m);
        if ((fm < 0) == (flo < 0))
        {
            lo = m;
            flo = fm;
        }
        else
        {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}
}  // namespace

//---------------------------------------------------------------------------//
double schroder_function(PointProcessModel const& model, double q, double x)
{
    if (model.is_finite_support())
    {
        double g = 0;
        for (auto const& a : model.atoms())
        {
            std::size_t nu = a.displacements.size();
            if (nu == 0)
                continue;
            double s = 0;
            for (double v : a.displacements)
                s += std::exp(x * v);
            g += a.weight * std::pow(q, double(nu - 1)) * s;
        }
        return g;
    }
    auto const& law = model.parametric_spec().law;
    if (!law.mgf_finite(x))
        return inf;
    auto const& p = model.offspring_law();
    double dpgf = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        dpgf += p[k] * k * std::pow(q, double(k - 1));
    return dpgf * std::exp(law.cumulant(x).k);
}

GammaResult gamma(PointProcessModel const& model, double q)
{
    auto g = [&](double x) { return schroder_function(model, q, x) - 1; };
    if (!(g(0) < 0))
        throw NoRootError("g(0) >= 1: model is not Schroder-admissible");

    constexpr int npts = 4096;
    double const lo = 1e-4, hi = 64.0;
    double ratio = std::pow(hi / lo, 1.0 / (npts - 1));
    double prev = 0;
    double found = -1;
    for (int i = 0; i < npts; ++i)
    {
        double t = lo * std::pow(ratio, i);
        double gt = g(t);
        if (!std::isfinite(gt))
            break;
        if (gt >= 0)
        {
            found = bisect(g, prev, t);
            break;
        }
        prev = t;
    }
    if (found < 0)
        throw NoRootError(
            "g(gamma) never reaches 1 on the finite exponential-moment domain");

    GammaResult r;
    r.gamma = found;
    if (model.is_finite_support())
    {
        r.certified_all_a = true;
        r.verifying_a = 2 * found;
    }
    else
    {
        auto const& law = model.parametric_spec().law;
        r.certified_all_a = law.kind() != LawKind::shifted_exponential;
        if (r.certified_all_a)
            r.verifying_a = 2 * found;
        else if (law.b() > found)
            r.verifying_a = 0.5 * (found + law.b());
        else
            throw NoRootError("no a > gamma with finite exponential moment");
    }
    return r;
}

//---------------------------------------------------------------------------//
double essinf_weight_sum(PointProcessModel const& model, double a)
{
    if (model.is_finite_support())
    {
        double m = inf;
        for (auto const& atom : model.atoms())
        {
            double s = 0;
            for (double v : atom.displacements)
                s += std::exp(-a * v);
            m = std::min(m, s);
        }
        return m;
    }
    auto const& p = model.offspring_law();
    std::size_t kmin = 0;
    while (kmin < p.size() && p[kmin] == 0)
        ++kmin;
    double sup = model.parametric_spec().law.upper();
    return kmin * std::exp(-a * sup);
}

BetaResult beta(PointProcessModel const& model)
{
    auto const& p = model.offspring_law();
    if (p[0] > 0 || (p.size() > 1 && p[1] > 0))
        throw AdmissibilityError("Bottcher case needs p0 = p1 = 0");
    if (!std::isfinite(model.max_displacement()))
        throw AdmissibilityError("Bottcher case needs bounded displacements");
    if (model.is_finite_support())
    {
        bool all_one = true;
        for (auto const& atom : model.atoms())
        {
            double s = 0;
            for (double v : atom.displacements)
                s += std::exp(-v);
            all_one = all_one && std::fabs(s - 1) < 1e-12;
        }
        if (all_one)
            throw DegenerateError("sum e^{-V} = 1 almost surely");
    }

    auto h = [&](double a) { return essinf_weight_sum(model, a) - 1; };
    constexpr int npts = 4096;
    double const lo = 1e-4, hi = 16.0;
    double ratio = std::pow(hi / lo, 1.0 / (npts - 1));

    BetaResult r;
    double prev_t = lo;
    bool prev_in = h(lo) >= 0;
    double start = prev_in ? lo : -1;
    for (int i = 1; i < npts; ++i)
    {
        double t = lo * std::pow(ratio, i);
        bool in = h(t) >= 0;
        if (in != prev_in)
        {
            // crossing between prev_t and t, refined by bisection
            double c = in ? bisect([&](double x) { return h(x); }, prev_t, t)
                          : bisect([&](double x) { return -h(x); }, prev_t, t);
            if (in)
                start = c;
            else
                r.intervals.emplace_back(start, c);
        }
        prev_t = t;
        prev_in = in;
    }
    if (prev_in)
        r.intervals.emplace_back(start, hi);
    if (r.intervals.empty())
        throw NoRootError("essinf sum e^{-aV} < 1 for every scanned a");
    r.beta = r.intervals.back().second;
    r.essinf_at_beta = essinf_weight_sum(model, r.beta);
    return r;
}

//---------------------------------------------------------------------------//
Estimate
psi(PointProcessModel const& model, double x, std::uint64_t budget, std::uint64_t seed)
{
    auto term = [x](std::vector<double> const& vs) {
        double s = 0;
        for (double v : vs)
            s += std::exp(-x * v);
        return std::log(s);
    };
    if (model.is_finite_support())
    {
        double r = 0;
        for (auto const& a : model.atoms())
            r += a.weight * term(a.displacements);
        return {r, 0};
    }
    auto acc = reduce_chunks<MeanAccumulator>(
        budget, [&](std::size_t begin, std::size_t end) {
            MeanAccumulator m;
            std::vector<double> xs;
            for (std::size_t i = begin; i < end; ++i)
            {
                Stream rng = Stream::root(seed, i, tag::moments);
                model.sample(rng, xs);
                m.add(term(xs));
            }
            return m;
        });
    return acc.estimate();
}

//---------------------------------------------------------------------------//
namespace
{
struct LadderSums
{
    std::vector<double> heights;
    std::uint64_t truncated{0};
    void merge(LadderSums const& o)
    {
        heights.insert(heights.end(), o.heights.begin(), o.heights.end());
        truncated += o.truncated;
    }
};

// Ratio estimator mean(X)/mean(Y) with delta-method standard error
Estimate ratio_estimate(std::vector<double> const& x, std::vector<double> const& y)
{
    MeanAccumulator ax, ay;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        ax.add(x[i]);
        ay.add(y[i]);
    }
    double r = ax.mean() / ay.mean();
    MeanAccumulator res;
    for (std::size_t i = 0; i < x.size(); ++i)
        res.add(x[i] - r * y[i]);
    double se = std::sqrt(res.variance() / x.size()) / ay.mean();
    return {r, se};
}
}  // namespace

std::vector<NermanResult> nerman_constant(PointProcessModel const& model,
                                          std::vector<double> const& a_list,
                                          LadderOptions const& opts)
{
    SpineStepLaw law = spine_step_law(model);
    auto sums = reduce_chunks<LadderSums>(
        opts.samples, [&](std::size_t begin, std::size_t end) {
            LadderSums s;
            for (std::size_t i = begin; i < end; ++i)
            {
                Stream rng = Stream::root(opts.seed, i, tag::ladder);
                LadderSample ls = sample_ladder(law, rng, opts.step_cap);
                if (ls.truncated)
                    ++s.truncated;
                else
                    s.heights.push_back(ls.height);
            }
            return s;
        });
    auto const& h = sums.heights;
    if (h.empty())
        throw BudgetError("no ladder epoch completed within the step cap");

    std::vector<double> h2(h.size());
    std::vector<double> half_h(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        h2[i] = h[i] * h[i];
        half_h[i] = 2 * h[i];
    }
    Estimate c8 = ratio_estimate(h2, half_h);
    MeanAccumulator mh;
    for (double v : h)
        mh.add(v);

    std::vector<NermanResult> out;
    for (double a : a_list)
    {
        std::vector<double> num(h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
            num[i] = std::expm1(std::min(a, h[i]));
        NermanResult r;
        r.a = a;
        r.c7 = ratio_estimate(num, h);
        r.c8 = c8;
        r.mean_height = mh.estimate();
        r.samples = h.size();
        r.truncated = sums.truncated;
        out.push_back(r);
    }
    return out;
}

NermanResult
nerman_constant(PointProcessModel const& model, double a, LadderOptions const& opts)
{
    return nerman_constant(model, std::vector<double>{a}, opts).front();
}

NermanResult choose_nerman_a(std::vector<NermanResult> const& table)
{
    std::vector<NermanResult> sorted = table;
    std::sort(sorted.begin(), sorted.end(), [](auto const& x, auto const& y) {
        return x.a < y.a;
    });
    for (auto const& r : sorted)
        if (r.c7.value > 5 * r.c7.se)
            return r;
    throw NoRootError("no grid a has c7(a) more than 5 SE above zero");
}

//---------------------------------------------------------------------------//
std::string to_string(CaseTag t)
{
    switch (t)
    {
        case CaseTag::schroder:
            return "schroder";
        case CaseTag::bottcher:
            return "bottcher";
        case CaseTag::neither:
            return "neither";
    }
    return "unknown";
}

ExponentReport
exponent_report(PointProcessModel const& model, ExponentOptions const& opts)
{
    ExponentReport r;
    r.q = extinction_probability(model);
    auto const& p = model.offspring_law();
    bool bottcher_shape = p[0] == 0 && (p.size() < 2 || p[1] == 0);
    if (bottcher_shape)
    {
        try
        {
            r.beta = beta(model);
            r.case_tag = CaseTag::bottcher;
            r.diagnostics.push_back(
                "bottcher: p0 = p1 = 0 and bounded displacements certified");
        }
        catch (std::exception const& e)
        {
            r.diagnostics.push_back(std::string("beta unavailable: ") + e.what());
        }
    }
    else
    {
        try
        {
            r.gamma = gamma(model, r.q);
            r.case_tag = CaseTag::schroder;
            r.diagnostics.push_back(fmt::format(
                "schroder: defining equation solved, exponential moment {} "
                "certified at a={}",
                r.gamma->certified_all_a ? "for all a" : "only",
                r.gamma->verifying_a));
        }
        catch (std::exception const& e)
        {
            r.diagnostics.push_back(std::string("gamma unavailable: ") + e.what());
        }
    }
    for (double x : opts.psi_x)
        r.psi_values.emplace_back(x, psi(model, x, 200000, opts.ladder.seed));
    if (!opts.nerman_a.empty())
        r.c7 = nerman_constant(model, opts.nerman_a, opts.ladder);
    return r;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
