//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_brw.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <vector>

#include <doctest.h>

#include "brwlab/brw.hpp"
#include "brwlab/errors.hpp"
#include "brwlab/law.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"

using namespace brwlab;

namespace
{
PointProcessModel deterministic(std::vector<double> d)
{
    return PointProcessModel::finite_support({{1.0, std::move(d)}});
}
}  // namespace

TEST_CASE("binary tree population")
{
    auto m = deterministic({0.2, 0.9});
    SimulateOptions opts;
    opts.n_max = 10;
    auto t = simulate(m, opts, 1, 0);
    REQUIRE(t.generations.size() == 11);
    CHECK(t.generations[10].population == 1024);
    CHECK(t.generations[0].W == 1.0);
    CHECK(t.generations[0].D == 0.0);
    CHECK(t.generations[0].M == 0.0);
    CHECK(t.generations[10].M == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.certified_min);
    CHECK(t.pruned_total == 0);
}

TEST_CASE("simulation is a pure function of seed and replica")
{
    auto m = reference::schroder_gaussian();
    SimulateOptions opts;
    opts.n_max = 12;
    auto a = simulate(m, opts, 5, 3);
    auto b = simulate(m, opts, 5, 3);
    auto c = simulate(m, opts, 5, 4);
    for (std::size_t k = 0; k <= 12; ++k)
    {
        CHECK(a.generations[k].M == b.generations[k].M);
        CHECK(a.generations[k].W == b.generations[k].W);
        CHECK(a.generations[k].population == b.generations[k].population);
    }
    CHECK(a.generations[12].W != c.generations[12].W);
}

TEST_CASE("frontier bookkeeping")
{
    auto m = reference::quadratic_boundary();
    SimulateOptions opts;
    opts.n_max = 12;
    for (std::uint64_t r = 0; r < 200; ++r)
    {
        auto t = simulate(m, opts, 2, r);
        for (auto const& g : t.generations)
        {
            CHECK(std::isfinite(g.M) == (g.population > 0));
            if (g.population > 0)
                CHECK(g.min_path_max >= g.M);
        }
    }
}

TEST_CASE("particle cap is a budget error")
{
    auto m = deterministic({0.2, 0.9});
    SimulateOptions opts;
    opts.n_max = 20;
    opts.particle_cap = 1000;
    CHECK_THROWS_AS(simulate(m, opts, 1, 0), BudgetError);
}

TEST_CASE("martingale means")
{
    for (auto const& m : {reference::schroder_gaussian(), reference::bottcher_two_atom()})
    {
        auto mm = martingale_means(m, 8, 20000, 7);
        CHECK(mm.replicas == 20000);
        CHECK(mm.W[0].value == 1.0);
        CHECK(mm.D[0].value == 0.0);
        for (std::size_t n = 1; n <= 8; ++n)
        {
            CHECK(std::fabs(mm.W[n].value - 1) <= 4 * mm.W[n].se);
            CHECK(std::fabs(mm.D[n].value) <= 4 * mm.D[n].se);
        }
    }
}

TEST_CASE("exact minimum examples")
{
    auto m = deterministic({0.2, 0.9});
    CHECK(minimum_exact(m, 1, 0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(minimum_exact(m, 3, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(displacement_floor(m) == 0.2);
    CHECK_THROWS_AS(displacement_floor(reference::schroder_gaussian()), DomainError);
}

TEST_CASE("branch and bound equals full enumeration")
{
    for (auto const& m : {reference::bottcher_two_atom(), reference::quadratic_boundary(),
                          reference::pd_family(0.3, 1.2)})
    {
        for (std::uint64_t r = 0; r < 100; ++r)
        {
            std::size_t n = 1 + r % 8;
            CHECK(minimum_exact(m, n, 13, r) == minimum_enumerate(m, n, 13, r));
        }
    }
}

TEST_CASE("upper barrier certifies the minimum")
{
    auto m = reference::bottcher_two_atom();
    SimulateOptions full, pruned;
    full.n_max = pruned.n_max = 14;
    pruned.policy.kind = PruningKind::upper_barrier;
    pruned.policy.barrier_offset = 2;
    int certified = 0;
    for (std::uint64_t r = 0; r < 50; ++r)
    {
        auto a = simulate(m, full, 4, r);
        auto b = simulate(m, pruned, 4, r);
        if (b.certified_min)
        {
            ++certified;
            CHECK(a.generations[14].M == b.generations[14].M);
        }
        else
        {
            CHECK(b.lost_bound < b.generations[14].M);
        }
        CHECK(b.generations[14].population <= a.generations[14].population);
    }
    CHECK(certified > 0);
}

TEST_CASE("conditional tail estimates agree with the front law")
{
    auto m = reference::schroder_gaussian();
    std::size_t const n = 32;
    auto law = FrontLaw::minimum(m, 2 * n);
    double c = 1.5 * std::log(double(n));
    std::vector<double> xs{c, c + 2, c + 4};
    ConditionalTailOptions opts;
    opts.replicas = 4000;
    opts.seed = 9;
    auto up = conditional_tail(m, law, n, xs, opts);
    REQUIRE(up.p.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        CHECK(std::fabs(up.p[i].value - law.tail(n, xs[i])) <= 4 * up.p[i].se + 1e-4);
        CHECK(up.p_star[i].value >= up.p[i].value);
    }
    CHECK(up.extinct == doctest::Approx(law.extinct(n)).epsilon(1e-9));

    opts.side = TailSide::lower;
    auto lo = conditional_tail(m, law, n, {c - 1, c - 3}, opts);
    CHECK(std::fabs(lo.p[0].value - law.lower(n, c - 1)) <= 4 * lo.p[0].se + 1e-4);
    CHECK(lo.p[1].value <= lo.p[0].value);

    opts.side = TailSide::running_max;
    auto rm = conditional_tail(m, law, n, xs, opts);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(rm.p[i].value >= up.p[i].value - 4 * up.p[i].se);
}

TEST_CASE("tightness scan survival")
{
    auto m = reference::quadratic_boundary();
    TightnessOptions opts;
    opts.replicas = 4000;
    opts.seed = 3;
    opts.running_max_limit = 0;
    auto rows = tightness_scan(m, {16, 64}, opts);
    REQUIRE(rows.size() == 2);
    double q = extinction_probability(m);
    for (auto const& row : rows)
    {
        CHECK(std::fabs(row.survival.value - (1 - q)) <= 3 * row.survival.se + 0.01);
        CHECK(row.survival_exact >= 1 - q - 1e-12);
        CHECK(std::is_sorted(row.quantiles.begin(), row.quantiles.end()));
    }
}

TEST_CASE("minimal path maximum")
{
    auto m = reference::bottcher_two_atom();
    auto rows = min_path_max(m, {1, 4}, 2000, 3);
    REQUIRE(rows.size() == 2);
    auto law = FrontLaw::minimum(m, 1, {0.05, -30, 80});
    CHECK(rows[0].median == doctest::Approx(law.quantile(1, 0.5)).epsilon(1e-9));

    auto positive = PointProcessModel::finite_support(
        {{0.5, {0.3, 1.2}}, {0.5, {0.0, 2.0, 0.4}}});
    auto pos = min_path_max(positive, {3, 6}, 500, 2);
    for (auto const& row : pos)
        CHECK(row.p_negative.value == 0.0);
}

TEST_CASE("windowed trajectories")
{
    auto m = reference::schroder_gaussian();
    auto a = window_trajectory(m, 40, 6, 1, 0);
    auto b = window_trajectory(m, 40, 6, 1, 0);
    REQUIRE(a.M.size() == 41);
    CHECK(a.M == b.M);
    CHECK(a.M[0] == 0.0);
    auto e = window_trajectory(reference::quadratic_boundary(), 40, 6, 1, 0);
    bool any_extinct = e.extinct;
    for (std::uint64_t r = 1; r < 20 && !any_extinct; ++r)
        any_extinct = window_trajectory(reference::quadratic_boundary(), 40, 6, 1, r).extinct;
    CHECK(any_extinct);
}

TEST_CASE("sampled trajectories reproduce the front law at each target")
{
    auto m = reference::schroder_gaussian();
    std::size_t const n = 64;
    auto law = FrontLaw::minimum(m, n, {0.05, std::nan(""), 45});
    double c = 1.5 * std::log(double(n));
    std::vector<double> zs{c - 1, c, c + 1};
    std::vector<MeanAccumulator> acc(zs.size()), acc16(1);
    std::uint64_t replaced = 0;
    for (std::uint64_t r = 0; r < 1500; ++r)
    {
        auto t = sampled_trajectory(m, law, {16, n}, 2, 5, r);
        REQUIRE(t.M.size() == 2);
        replaced += t.replaced;
        for (std::size_t i = 0; i < zs.size(); ++i)
            acc[i].add(t.M[1] <= zs[i] ? 1.0 : 0.0);
        acc16[0].add(t.M[0] <= 1.5 * std::log(16.0) ? 1.0 : 0.0);
    }
    CHECK(replaced > 0);
    for (std::size_t i = 0; i < zs.size(); ++i)
        CHECK(std::fabs(acc[i].mean() - law.lower(n, zs[i])) <= 4 * acc[i].se() + 0.01);
    CHECK(std::fabs(acc16[0].mean() - law.lower(16, 1.5 * std::log(16.0)))
          <= 4 * acc16[0].se() + 0.01);

    auto a = sampled_trajectory(m, law, {8, 32}, 2, 1, 7);
    auto b = sampled_trajectory(m, law, {8, 32}, 2, 1, 7);
    CHECK(a.M == b.M);
    CHECK_THROWS_AS(sampled_trajectory(m, law, {32, 8}, 2, 1, 7), ConfigError);
    CHECK_THROWS_AS(sampled_trajectory(m, law, {128}, 2, 1, 7), ConfigError);
}
