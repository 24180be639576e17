//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_exponents.cpp
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "brwlab/errors.hpp"
#include "brwlab/exponents.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"
#include "brwlab/walk.hpp"

using namespace brwlab;

namespace
{
double const ln2 = std::log(2.0);

double bisect_oracle(double (*f)(double, void*), void* ctx, double lo, double hi)
{
    for (int i = 0; i < 200; ++i)
    {
        double mid = 0.5 * (lo + hi);
        if ((f(lo, ctx) < 0) == (f(mid, ctx) < 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("gamma closed form on the (p, d) family")
{
    for (auto [p, d] : {std::pair{0.5, 1.0}, {0.5, 2.0}, {0.3, 1.2}, {0.1, 0.7}})
    {
        auto m = reference::pd_family(p, d);
        auto g = gamma(m, extinction_probability(m));
        CHECK(std::fabs(g.gamma - std::log(1 / p) / d) <= 1e-8);
        CHECK(g.certified_all_a);
        CHECK(g.verifying_a > g.gamma);
    }
    CHECK(gamma(reference::pd_family(0.5, 1.0), 0).gamma
          == doctest::Approx(ln2).epsilon(1e-9));
    CHECK(gamma(reference::pd_family(0.5, 2.0), 0).gamma
          == doctest::Approx(ln2 / 2).epsilon(1e-9));
}

TEST_CASE("gamma with positive extinction probability")
{
    auto m = reference::quadratic_boundary();
    double q = extinction_probability(m);
    CHECK(q == doctest::Approx(1.0 / 3).epsilon(1e-10));
    auto g = gamma(m, q);
    CHECK(std::fabs(schroder_function(m, q, g.gamma) - 1) <= 1e-8);

    struct Ctx
    {
        PointProcessModel const* m;
        double q;
    } ctx{&m, q};
    double oracle = bisect_oracle(
        [](double x, void* c) {
            auto* k = static_cast<Ctx*>(c);
            double s = 0;
            for (auto const& a : k->m->atoms())
            {
                if (a.displacements.empty())
                    continue;
                double w = a.weight * std::pow(k->q, double(a.displacements.size()) - 1);
                for (double v : a.displacements)
                    s += w * std::exp(x * v);
            }
            return s - 1;
        },
        &ctx, 0, 20);
    CHECK(std::fabs(g.gamma - oracle) <= 1e-8);
}

TEST_CASE("schroder function is increasing")
{
    auto m = reference::quadratic_boundary();
    double q = extinction_probability(m);
    double prev = schroder_function(m, q, 0);
    for (double x = 0.05; x < 3; x += 0.05)
    {
        double g = schroder_function(m, q, x);
        CHECK(g > prev);
        prev = g;
    }
}

TEST_CASE("gamma refuses Bottcher models")
{
    CHECK_THROWS_AS(gamma(reference::bottcher_two_atom(), 0), NoRootError);
}

TEST_CASE("beta matches the atom-minimum oracle")
{
    auto m = reference::bottcher_two_atom();
    auto b = beta(m);
    // worst atom (1.5, 1.5): 2 e^{-1.5 a} = 1
    CHECK(std::fabs(b.beta - ln2 / 1.5) <= 1e-8);
    CHECK(std::fabs(b.beta - reference::bottcher_two_atom_beta()) <= 1e-8);
    CHECK(std::fabs(b.essinf_at_beta - 1) <= 1e-8);
    CHECK(b.beta > 0);
    CHECK(b.beta < 1);
    CHECK(psi(m, b.beta).value >= 0);
    CHECK(psi(m, 1).value < 0);
}

TEST_CASE("beta admissibility errors")
{
    auto det = PointProcessModel::finite_support({{1.0, {ln2, ln2}}});
    CHECK_THROWS_AS(beta(det), DegenerateError);
    CHECK_THROWS_AS(beta(reference::schroder_gaussian()), AdmissibilityError);
    CHECK_THROWS_AS(beta(reference::quadratic_boundary()), AdmissibilityError);
}

TEST_CASE("beta scales inversely with the displacements")
{
    Stream rng(21);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<DisplacementAtom> atoms;
        int natoms = 1 + int(rng.below(3));
        for (int i = 0; i < natoms; ++i)
        {
            std::vector<double> d(2 + rng.below(2));
            for (auto& v : d)
                v = 0.2 + 1.8 * rng.uniform();
            atoms.push_back({1.0 / natoms, d});
        }
        auto m = PointProcessModel::finite_support(atoms);
        double s = 0.5 + 1.5 * rng.uniform();
        double b1 = beta(m).beta;
        double b2 = beta(m.affine(s, 0)).beta;
        CHECK(b2 == doctest::Approx(b1 / s).epsilon(1e-8));
        CHECK(beta(m).beta == b1);
    }
}

TEST_CASE("psi values")
{
    auto det = PointProcessModel::finite_support({{1.0, {ln2, ln2}}});
    CHECK(psi(det, 0).value == doctest::Approx(ln2).epsilon(1e-14));
    CHECK(std::fabs(psi(det, 1).value) < 1e-14);

    auto m = reference::bottcher_two_atom();
    // midpoint convexity on [0, 1]
    Stream rng(5);
    for (int i = 0; i < 100; ++i)
    {
        double x = rng.uniform(), y = rng.uniform();
        double mid = psi(m, 0.5 * (x + y)).value;
        CHECK(mid <= 0.5 * (psi(m, x).value + psi(m, y).value) + 1e-12);
    }
}

TEST_CASE("nerman constant against direct ladder simulation")
{
    auto m = reference::bottcher_two_atom();
    LadderOptions opts;
    opts.samples = 200000;
    opts.seed = 3;
    auto table = nerman_constant(m, {0.01, 0.5, 1.0, 3.0, 100.0}, opts);
    REQUIRE(table.size() == 5);
    for (std::size_t i = 1; i < table.size(); ++i)
        CHECK(table[i].c7.value >= table[i - 1].c7.value);
    CHECK(table[0].c7.value < 0.02);

    // independent ladder epochs straight from the step law
    auto law = spine_step_law(m);
    REQUIRE(law.exact);
    double num = 0, den = 0, num_inf = 0, h2 = 0;
    std::vector<double> nums, dens;
    int const draws = 20000;
    int truncated = 0;
    for (int i = 0; i < draws; ++i)
    {
        Stream rng = Stream::root(99, i, tag::walk);
        double s = 0;
        int steps = 0;
        do
        {
            if (++steps > 1000000)
                break;
            double u = rng.uniform();
            auto it = std::upper_bound(law.cumulative.begin(), law.cumulative.end(), u);
            std::size_t k = std::min<std::size_t>(it - law.cumulative.begin(),
                                                  law.values.size() - 1);
            s += law.values[k];
        } while (!(s > 0));
        if (!(s > 0))
        {
            ++truncated;
            continue;
        }
        num += std::expm1(std::min(1.0, s));
        num_inf += std::expm1(s);
        den += s;
        h2 += s * s;
        nums.push_back(std::expm1(std::min(1.0, s)));
        dens.push_back(s);
    }
    CHECK(truncated < draws / 100);
    int const n = int(nums.size());
    double r = num / den;
    double var = 0;
    for (int i = 0; i < n; ++i)
    {
        double e = nums[i] - r * dens[i];
        var += e * e;
    }
    double se_direct = std::sqrt(var / n) / (den / n) / std::sqrt(double(n));
    double se = std::hypot(se_direct, table[2].c7.se);
    CHECK(std::fabs(table[2].c7.value - r) <= 3 * se);
    CHECK(table[4].c7.value == doctest::Approx(num_inf / den).epsilon(0.05));
    CHECK(table[2].c8.value == doctest::Approx(h2 / (2 * den)).epsilon(0.05));
    CHECK(table[2].truncated < opts.samples / 100);

    auto chosen = choose_nerman_a(table);
    CHECK(chosen.c7.value > 5 * chosen.c7.se);
}

TEST_CASE("exponent report classification")
{
    auto s = exponent_report(reference::schroder_gaussian(), {});
    CHECK(s.case_tag == CaseTag::schroder);
    REQUIRE(s.gamma);
    CHECK(s.gamma->gamma
          == doctest::Approx(reference::schroder_gaussian_gamma()).epsilon(1e-8));

    auto b = exponent_report(reference::bottcher_two_atom(), {});
    CHECK(b.case_tag == CaseTag::bottcher);
    REQUIRE(b.beta);
    auto again = exponent_report(reference::bottcher_two_atom(), {});
    CHECK(again.beta->beta == b.beta->beta);
    CHECK(b.q == 0.0);
}
