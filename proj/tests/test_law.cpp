//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_law.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <vector>

#include <doctest.h>

#include "brwlab/brw.hpp"
#include "brwlab/law.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"

using namespace brwlab;

namespace
{
double gaussian_survival(DisplacementLaw const& law, double z)
{
    return 0.5 * std::erfc((z - law.a()) / (law.b() * std::sqrt(2.0)));
}
}  // namespace

TEST_CASE("front law after one generation")
{
    auto m = reference::schroder_gaussian();
    auto const& spec = m.parametric_spec();
    auto law = FrontLaw::minimum(m, 1, {0.01, -20, 30});
    for (double z : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.5})
    {
        double s = gaussian_survival(spec.law, z);
        double exact = spec.offspring[1] * s + spec.offspring[2] * s * s;
        CHECK(law.tail(1, z) == doctest::Approx(exact).epsilon(1e-5));
        CHECK(law.lower(1, z) == doctest::Approx(1 - exact).epsilon(1e-5));
    }
    CHECK(law.tail(0, -0.5) == 1.0);
    CHECK(law.tail(0, 0.5) == 0.0);
}

TEST_CASE("front law is a distribution function")
{
    auto m = reference::quadratic_boundary();
    auto law = FrontLaw::minimum(m, 20, {0.05, -40, 40});
    auto ext = extinction_by_generation(m, 20);
    for (std::size_t j = 1; j <= 20; ++j)
    {
        double prev = 1.0;
        for (double z = -10; z < 30; z += 0.25)
        {
            double g = law.tail(j, z);
            CHECK(g <= prev + 1e-12);
            CHECK(g >= law.extinct(j) - 1e-12);
            prev = g;
        }
        CHECK(law.extinct(j) == doctest::Approx(ext[j]).epsilon(1e-10));
        CHECK(law.conditioned_tail(j, 29)
              == doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("front law matches simulated minima")
{
    auto m = reference::bottcher_two_atom();
    std::size_t const n = 8;
    auto law = FrontLaw::minimum(m, n, {0.005, -30, 30});
    std::vector<double> zs{0.5, 1.5, 2.5, 3.5};
    std::vector<MeanAccumulator> acc(zs.size());
    SimulateOptions opts;
    opts.n_max = n;
    for (std::uint64_t r = 0; r < 20000; ++r)
    {
        auto t = simulate(m, opts, 31, r);
        double M = t.generations[n].M;
        for (std::size_t i = 0; i < zs.size(); ++i)
            acc[i].add(M > zs[i] ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < zs.size(); ++i)
    {
        // Atoms sit on a grid, so compare at points well away from the jumps
        double g = law.tail(n, zs[i]);
        CHECK(std::fabs(acc[i].mean() - g) <= 4 * acc[i].se() + 0.01);
    }
}

TEST_CASE("quantiles invert the conditioned law")
{
    auto m = reference::schroder_gaussian();
    auto law = FrontLaw::minimum(m, 64, {0.02, -60, 40});
    for (double p : {0.05, 0.5, 0.95})
    {
        double z = law.quantile(64, p);
        CHECK(1 - law.conditioned_tail(64, z) == doctest::Approx(p).epsilon(0.02));
    }
    CHECK(law.quantile(64, 0.25) < law.quantile(64, 0.75));
}

TEST_CASE("automatic left edge grows with the horizon")
{
    auto m = reference::schroder_gaussian();
    auto small = FrontLaw::minimum(m, 16);
    auto large = FrontLaw::minimum(m, 256);
    CHECK(std::isfinite(small.grid().zmin));
    CHECK(large.grid().zmin < small.grid().zmin);
    CHECK(small.generations() == 16);
}

TEST_CASE("path maximum law")
{
    auto m = reference::bottcher_two_atom();
    auto pm = FrontLaw::path_max(m, 1, {0.01, -20, 30});
    auto mn = FrontLaw::minimum(m, 1, {0.01, -20, 30});
    for (double z = -3; z < 3; z += 0.37)
        CHECK(pm.tail(1, z) == doctest::Approx(mn.tail(1, z)).epsilon(1e-9));

    auto pm8 = FrontLaw::path_max(m, 8, {0.01, -20, 30});
    auto mn8 = FrontLaw::minimum(m, 8, {0.01, -20, 30});
    for (double z = -3; z < 10; z += 0.37)
        CHECK(pm8.tail(8, z) >= mn8.tail(8, z) - 1e-9);
}
