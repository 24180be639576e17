//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file reference.cpp
//---------------------------------------------------------------------------//
#include "brwlab/reference.hpp"

#include <cmath>

#include "brwlab/errors.hpp"

namespace brwlab
{
namespace reference
{
//---------------------------------------------------------------------------//
PointProcessModel schroder_gaussian()
{
    double mu = 2 * std::log(1.5);
    return PointProcessModel::parametric(
        {0.0, 0.5, 0.5},
        DisplacementLaw::gaussian(mu, std::sqrt(mu)),
        "schroder_gaussian");
}

double schroder_gaussian_gamma()
{
    // 0.5 exp(gamma mu + gamma^2 s2 / 2) = 1 with mu = s2
    double s2 = 2 * std::log(1.5);
    double mu = s2;
    return (-mu + std::sqrt(mu * mu + 2 * s2 * std::log(2.0))) / s2;
}

PointProcessModel bottcher_two_atom()
{
    double const w1 = 0.6, w2 = 0.4, c = 1.5;
    double r1 = (1 - w1 * 2 * std::exp(-c)) / w2;  // e^{-a} + e^{-b}
    double r2 = -w1 * 2 * c * std::exp(-c) / w2;   // a e^{-a} + b e^{-b}
    double a = -0.59456579, b = 3.99727372;
    for (int it = 0; it < 50; ++it)
    {
        double ea = std::exp(-a), eb = std::exp(-b);
        double f1 = ea + eb - r1;
        double f2 = a * ea + b * eb - r2;
        // Jacobian of (f1, f2) in (a, b)
        double j11 = -ea, j12 = -eb;
        double j21 = (1 - a) * ea, j22 = (1 - b) * eb;
        double det = j11 * j22 - j12 * j21;
        double da = (f1 * j22 - f2 * j12) / det;
        double db = (j11 * f2 - j21 * f1) / det;
        a -= da;
        b -= db;
        if (std::fabs(da) + std::fabs(db) < 1e-16)
            break;
    }
    return PointProcessModel::finite_support(
        {{w1, {c, c}}, {w2, {a, b}}}, "bottcher_two_atom");
}

double bottcher_two_atom_beta() { return std::log(2.0) / 1.5; }

PointProcessModel quadratic_pgf()
{
    return PointProcessModel::finite_support(
        {{0.25, {}}, {0.75, {0.2, 1.3}}}, "quadratic_pgf");
}

PointProcessModel quadratic_boundary()
{
    return normalize_to_boundary(quadratic_pgf());
}

PointProcessModel shifted_exponential()
{
    auto raw = PointProcessModel::parametric(
        {0.0, 0.0, 1.0},
        DisplacementLaw::shifted_exponential(0.0, 1.0),
        "shifted_exponential");
    return normalize_to_boundary(raw);
}

PointProcessModel pd_family(double p, double d)
{
    if (!(p > 0 && p < 1) || !(d > 0))
        throw ConfigError("pd family needs 0 < p < 1 and d > 0");
    return PointProcessModel::finite_support(
        {{p, {d}}, {1 - p, {0.5, 1.5}}}, "pd_family");
}

std::vector<std::string> names()
{
    return {"schroder_gaussian",
            "bottcher_two_atom",
            "quadratic_pgf",
            "quadratic_boundary",
            "shifted_exponential"};
}

PointProcessModel by_name(std::string const& name)
{
    if (name == "schroder_gaussian")
        return schroder_gaussian();
    if (name == "bottcher_two_atom")
        return bottcher_two_atom();
    if (name == "quadratic_pgf")
        return quadratic_pgf();
    if (name == "quadratic_boundary")
        return quadratic_boundary();
    if (name == "shifted_exponential")
        return shifted_exponential();
    throw ConfigError("unknown reference model '" + name + "'");
}

//---------------------------------------------------------------------------//
}  // namespace reference
}  // namespace brwlab
