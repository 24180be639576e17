//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file law.cpp
//---------------------------------------------------------------------------//
#include "brwlab/law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "brwlab/errors.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/walk.hpp"

namespace brwlab
{
namespace
{
//! Four-point Lagrange weights at offsets -1, 0, 1, 2 for fraction f
std::array<double, 4> cubic_weights(double f)
{
    return {-f * (1 - f) * (2 - f) / 6,
            (1 - f) * (1 + f) * (2 - f) / 2,
            f * (1 + f) * (2 - f) / 2,
            -f * (1 - f) * (1 + f) / 6};
}

//! Cubic-spread weights of the displacement law on multiples of h
struct Kernel
{
    long first{0};  //!< grid offset of weights[0]
    std::vector<double> weights;
};

Kernel make_kernel(DisplacementLaw const& law, double h)
{
    std::map<long, double> acc;
    auto spread = [&](double x, double w) {
        double t = x / h;
        double m = std::floor(t);
        auto c = cubic_weights(t - m);
        for (int d = 0; d < 4; ++d)
            acc[long(m) + d - 1] += w * c[d];
    };
    if (law.kind() == LawKind::two_point)
    {
        spread(law.a(), law.p());
        spread(law.b(), 1 - law.p());
    }
    else
    {
        double lo = law.lower(), hi = law.upper();
        if (law.kind() == LawKind::gaussian)
        {
            lo = law.a() - 10 * law.b();
            hi = law.a() + 10 * law.b();
        }
        else if (law.kind() == LawKind::shifted_exponential)
        {
            hi = law.a() + 40 / law.b();
        }
        std::size_t panels = 2 * std::size_t(std::ceil((hi - lo) / (h / 8)));
        double dx = (hi - lo) / panels;
        for (std::size_t s = 0; s <= panels; ++s)
        {
            double x = lo + s * dx;
            double c = (s == 0 || s == panels) ? 1 : (s % 2 ? 4 : 2);
            spread(x, c * dx / 3 * law.density(x));
        }
    }
    Kernel k;
    k.first = acc.begin()->first;
    k.weights.assign(acc.rbegin()->first - k.first + 1, 0.0);
    double total = 0;
    for (auto const& [m, w] : acc)
    {
        k.weights[m - k.first] = w;
        total += w;
    }
    for (double& w : k.weights)
        w /= total;
    return k;
}

//! Row with explicit left/right padding, in both representations
struct Padded
{
    long pad{0};
    std::vector<double> g;
    std::vector<double> u;

    double G(long i) const { return g[i + pad]; }
    double U(long i) const { return u[i + pad]; }
};

void fill_padded(Padded& p,
                 std::vector<double> const& g,
                 std::vector<double> const& u,
                 long i0,
                 bool path_max)
{
    std::size_t n = g.size();
    std::size_t total = n + 2 * p.pad;
    p.g.assign(total, 1.0);
    p.u.assign(total, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        p.g[p.pad + i] = g[i];
        p.u[p.pad + i] = u[i];
    }
    for (std::size_t i = p.pad + n; i < total; ++i)
    {
        p.g[i] = g.back();
        p.u[i] = u.back();
    }
    if (path_max)
    {
        // Lineages already above the level count as exceeding it
        for (long i = 0; i < long(n) && i0 + i < 0; ++i)
        {
            p.g[p.pad + i] = 1.0;
            p.u[p.pad + i] = 0.0;
        }
    }
}

//! Run fn(begin, end) over grid chunks; no result
template<class F>
void for_chunks(std::size_t n, F&& fn)
{
    map_chunks<char>(n, [&](std::size_t b, std::size_t e) {
        fn(b, e);
        return char(0);
    });
}
}  // namespace

//---------------------------------------------------------------------------//
FrontLaw FrontLaw::minimum(PointProcessModel const& model,
                           std::size_t n,
                           GridSpec grid)
{
    return FrontLaw(model, n, grid, false);
}

FrontLaw FrontLaw::path_max(PointProcessModel const& model,
                            std::size_t n,
                            GridSpec grid)
{
    return FrontLaw(model, n, grid, true);
}

FrontLaw::FrontLaw(PointProcessModel const& model,
                   std::size_t n,
                   GridSpec grid,
                   bool path_max)
    : grid_(grid)
{
    if (std::isnan(grid.zmin))
    {
        double sd = 1;
        try
        {
            sd = std::sqrt(spine_step_law(model).variance);
        }
        catch (DomainError const&)
        {
        }
        grid.zmin = -(20 + 3 * sd * std::sqrt(double(n)));
        grid_.zmin = grid.zmin;
    }
    if (!(grid.h > 0) || !(grid.zmax > grid.zmin))
        throw ConfigError("front-law grid needs h > 0 and zmax > zmin");
    double const h = grid.h;
    i0_ = std::lround(grid.zmin / h);
    long i1 = std::lround(grid.zmax / h);
    if (i0_ > 0 || i1 < 0)
        throw ConfigError("front-law grid must contain z = 0");
    npts_ = std::size_t(i1 - i0_ + 1);
    extinct_ = extinction_by_generation(model, n);

    std::vector<double> g(npts_), u(npts_);
    for (std::size_t i = 0; i < npts_; ++i)
    {
        long k = i0_ + long(i);
        g[i] = k < 0 ? 1.0 : (k == 0 ? 0.5 : 0.0);
        u[i] = 1.0 - g[i];
    }
    auto encode = [&] {
        std::vector<double> row(npts_);
        for (std::size_t i = 0; i < npts_; ++i)
            row[i] = u[i] < 0.5 ? -u[i] : g[i];
        return row;
    };
    rows_.reserve(n + 1);
    rows_.push_back(encode());

    std::vector<double> gn(npts_), un(npts_);
    auto store = [&](std::size_t i, double gv, double uv) {
        if (uv < 0.5)
        {
            un[i] = uv;
            gn[i] = 1.0 - uv;
        }
        else
        {
            gn[i] = gv;
            un[i] = 1.0 - gv;
        }
    };

    // Pool adjacent violators on U = P(M <= z), capped by survival to j
    auto monotone = [&](std::size_t j) {
        struct Block
        {
            std::size_t start, len;
            double sum;
        };
        std::vector<Block> blocks;
        for (std::size_t i = 0; i < npts_; ++i)
        {
            blocks.push_back({i, 1, un[i]});
            while (blocks.size() > 1)
            {
                auto& a = blocks[blocks.size() - 2];
                auto const& b = blocks.back();
                if (a.sum * double(b.len) <= b.sum * double(a.len))
                    break;
                a.len += b.len;
                a.sum += b.sum;
                blocks.pop_back();
            }
        }
        double cap = 1 - extinct_[j];
        for (auto const& b : blocks)
        {
            if (b.len == 1 && un[b.start] <= cap)
                continue;
            double v = std::min(b.sum / double(b.len), cap);
            for (std::size_t i = b.start; i < b.start + b.len; ++i)
            {
                un[i] = v;
                gn[i] = v == cap ? extinct_[j] : 1 - v;
            }
        }
    };

    Padded pad;
    if (model.is_finite_support())
    {
        struct Shift
        {
            long k;
            std::array<double, 4> c;
        };
        struct AtomShifts
        {
            double w;
            std::vector<Shift> s;
        };
        std::vector<AtomShifts> atoms;
        long reach = 1;
        for (auto const& a : model.atoms())
        {
            AtomShifts as{a.weight, {}};
            for (double x : a.displacements)
            {
                double t = -x / h;
                double k = std::floor(t);
                as.s.push_back({long(k), cubic_weights(t - k)});
                reach = std::max(reach, long(std::fabs(k)) + 3);
            }
            atoms.push_back(std::move(as));
        }
        pad.pad = reach;
        for (std::size_t j = 1; j <= n; ++j)
        {
            fill_padded(pad, g, u, i0_, path_max);
            for_chunks(npts_, [&](std::size_t b, std::size_t e) {
                for (std::size_t i = b; i < e; ++i)
                {
                    double gv = 0, uv = 0;
                    for (auto const& a : atoms)
                    {
                        double prod = 1, logs = 0;
                        for (auto const& s : a.s)
                        {
                            long at = long(i) + s.k - 1;
                            double gs = 0, us = 0;
                            for (int d = 0; d < 4; ++d)
                            {
                                gs += s.c[d] * pad.G(at + d);
                                us += s.c[d] * pad.U(at + d);
                            }
                            prod *= std::clamp(gs, 0.0, 1.0);
                            logs += std::log1p(-std::clamp(us, 0.0, 1.0));
                        }
                        gv += a.w * prod;
                        uv -= a.w * std::expm1(logs);
                    }
                    store(i, gv, uv);
                }
            });
            monotone(j);
            std::swap(g, gn);
            std::swap(u, un);
            rows_.push_back(encode());
        }
        return;
    }

    auto const& spec = model.parametric_spec();
    Kernel kern = make_kernel(spec.law, h);
    auto const& p = model.offspring_law();
    long last = kern.first + long(kern.weights.size()) - 1;
    pad.pad = std::max(std::labs(kern.first), std::labs(last)) + 1;
    for (std::size_t j = 1; j <= n; ++j)
    {
        fill_padded(pad, g, u, i0_, path_max);
        for_chunks(npts_, [&](std::size_t b, std::size_t e) {
            double const* pg = pad.g.data() + pad.pad;
            double const* pu = pad.u.data() + pad.pad;
            double const* w = kern.weights.data();
            long nk = long(kern.weights.size());
            for (std::size_t i = b; i < e; ++i)
            {
                // H(z_i) = sum_m w_m G(z_{i - m})
                long base = long(i) - kern.first;
                double hg = 0, hu = 0;
                for (long m = 0; m < nk; ++m)
                {
                    hg += w[m] * pg[base - m];
                    hu += w[m] * pu[base - m];
                }
                hg = std::clamp(hg, 0.0, 1.0);
                hu = std::clamp(hu, 0.0, 1.0);
                double gv = 0, uv = 0, pw = 1;
                double l1 = std::log1p(-hu);
                for (std::size_t k = 0; k < p.size(); ++k)
                {
                    gv += p[k] * pw;
                    pw *= hg;
                    if (k > 0)
                        uv -= p[k] * std::expm1(double(k) * l1);
                }
                store(i, gv, uv);
            }
        });
        monotone(j);
        std::swap(g, gn);
        std::swap(u, un);
        rows_.push_back(encode());
    }
}

//---------------------------------------------------------------------------//
double FrontLaw::tail_at(std::size_t j, long i) const
{
    if (i < 0)
        return 1.0;
    if (i >= long(npts_))
        i = long(npts_) - 1;
    double c = rows_[j][i];
    return std::signbit(c) ? 1.0 + c : c;
}

double FrontLaw::lower_at(std::size_t j, long i) const
{
    if (i < 0)
        return 0.0;
    if (i >= long(npts_))
        i = long(npts_) - 1;
    double c = rows_[j][i];
    return std::signbit(c) ? -c : 1.0 - c;
}

double FrontLaw::tail(std::size_t j, double z) const
{
    if (j == 0)
        return z < 0 ? 1.0 : 0.0;
    double t = z / grid_.h - double(i0_);
    double k = std::floor(t);
    double f = t - k;
    long i = long(k);
    return (1 - f) * this->tail_at(j, i) + f * this->tail_at(j, i + 1);
}

double FrontLaw::lower(std::size_t j, double z) const
{
    if (j == 0)
        return z < 0 ? 0.0 : 1.0;
    double t = z / grid_.h - double(i0_);
    double k = std::floor(t);
    double f = t - k;
    long i = long(k);
    return (1 - f) * this->lower_at(j, i) + f * this->lower_at(j, i + 1);
}

double FrontLaw::extinct(std::size_t j) const { return extinct_.at(j); }

double FrontLaw::conditioned_tail(std::size_t j, double z) const
{
    double q = extinct_.at(j);
    return std::max(0.0, this->tail(j, z) - q) / (1 - q);
}

double FrontLaw::quantile(std::size_t j, double p) const
{
    double s = 1 - extinct_.at(j);
    double prev = 0;
    for (std::size_t i = 0; i < npts_; ++i)
    {
        double c = this->lower_at(j, long(i)) / s;
        if (c >= p)
        {
            if (i == 0 || c == prev)
                return this->z(i);
            double f = (p - prev) / (c - prev);
            return this->z(i - 1) + f * grid_.h;
        }
        prev = c;
    }
    return this->z(npts_ - 1);
}

double FrontLaw::lower_inverse(std::size_t j, double u) const
{
    if (j == 0)
        return 0.0;
    long lo = 0, hi = long(npts_) - 1;
    if (!(this->lower_at(j, hi) >= u))
        return std::numeric_limits<double>::infinity();
    if (this->lower_at(j, lo) >= u)
        return this->z(0);
    // lower_at(lo) < u <= lower_at(hi)
    while (hi - lo > 1)
    {
        long mid = (lo + hi) / 2;
        if (this->lower_at(j, mid) >= u)
            hi = mid;
        else
            lo = mid;
    }
    double a = this->lower_at(j, lo), b = this->lower_at(j, hi);
    double f = b > a ? (u - a) / (b - a) : 1.0;
    return this->z(std::size_t(lo)) + f * grid_.h;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
