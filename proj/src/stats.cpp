//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file stats.cpp
//---------------------------------------------------------------------------//
#include "brwlab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace brwlab
{
//---------------------------------------------------------------------------//
double MeanAccumulator::variance() const
{
    if (n_ < 2)
        return 0.0;
    double m = this->mean();
    double v = (sumsq_.value() - n_ * m * m) / (n_ - 1);
    return std::max(v, 0.0);
}

//---------------------------------------------------------------------------//
Interval wilson_interval(double k, double n, double z)
{
    if (n <= 0)
        return {0, 1};
    double p = k / n;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Interval wilson_from_estimate(Estimate const& e, double fallback_trials, double z)
{
    double p = std::clamp(e.value, 0.0, 1.0);
    double n = fallback_trials;
    if (e.se > 0 && p > 0 && p < 1)
        n = p * (1 - p) / (e.se * e.se);
    return wilson_interval(p * n, n, z);
}

//---------------------------------------------------------------------------//
double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size())
    {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v)
            ++i;
        while (j < b.size() && b[j] <= v)
            ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

double ks_critical(std::size_t n, std::size_t m, double alpha)
{
    // c(alpha) = sqrt(-log(alpha / 2) / 2)
    double c = std::sqrt(-0.5 * std::log(alpha / 2));
    return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

//---------------------------------------------------------------------------//
std::string to_string(FitTransform t)
{
    switch (t)
    {
        case FitTransform::loglog:
            return "loglog";
        case FitTransform::log_neg_log:
            return "log_neg_log";
        case FitTransform::semilog:
            return "semilog";
        case FitTransform::neg_log_linear:
            return "neg_log_linear";
    }
    return "unknown";
}

std::pair<double, double>
least_squares(std::vector<double> const& x, std::vector<double> const& y)
{
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

TailFit fit_log_slope(std::vector<FitPoint> const& points,
                      FitTransform transform,
                      double x_lo,
                      double x_hi)
{
    bool log_x = transform == FitTransform::loglog
                 || transform == FitTransform::log_neg_log;
    bool neg_log = transform == FitTransform::log_neg_log
                   || transform == FitTransform::neg_log_linear;

    std::vector<double> xs, ys, ws;
    bool weighted = true;
    for (auto const& p : points)
    {
        if (p.x < x_lo || p.x > x_hi)
            continue;
        if (log_x && !(p.x > 0))
            continue;
        if (!(p.y > 0) || (neg_log && !(p.y < 1)))
            continue;
        double tx = log_x ? std::log(p.x) : p.x;
        double ty, dty;  // transformed value and |d ty / d y|
        if (neg_log)
        {
            double l = -std::log(p.y);
            ty = std::log(l);
            dty = 1.0 / (p.y * l);
        }
        else
        {
            ty = std::log(p.y);
            dty = 1.0 / p.y;
        }
        if (!std::isfinite(tx) || !std::isfinite(ty))
            continue;
        xs.push_back(tx);
        ys.push_back(ty);
        double sd = p.se * dty;
        if (!(sd > 0))
            weighted = false;
        ws.push_back(sd > 0 ? 1.0 / (sd * sd) : 1.0);
    }
    if (xs.size() < 6)
        throw std::invalid_argument("fit_log_slope: fewer than 6 usable points");
    if (!weighted)
        std::fill(ws.begin(), ws.end(), 1.0);

    double sw = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sw += ws[i];
        mx += ws[i] * xs[i];
        my += ws[i] * ys[i];
    }
    mx /= sw;
    my /= sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
        syy += ws[i] * (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0))
        throw std::invalid_argument("fit_log_slope: degenerate window");

    TailFit fit;
    fit.transform = transform;
    fit.x_lo = *std::min_element(xs.begin(), xs.end());
    fit.x_hi = *std::max_element(xs.begin(), xs.end());
    if (log_x)
    {
        fit.x_lo = std::exp(fit.x_lo);
        fit.x_hi = std::exp(fit.x_hi);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = xs.size();
    double ssr = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double r = ys[i] - fit.intercept - fit.slope * xs[i];
        ssr += ws[i] * r * r;
    }
    fit.r_squared = syy > 0 ? 1 - ssr / syy : 1.0;
    if (weighted)
    {
        fit.slope_se = std::sqrt(1.0 / sxx);
    }
    else
    {
        double dof = double(xs.size()) - 2;
        fit.slope_se = std::sqrt(ssr / dof / sxx);
    }
    return fit;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
