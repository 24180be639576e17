//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_walk.cpp
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "brwlab/errors.hpp"
#include "brwlab/law.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"
#include "brwlab/walk.hpp"

using namespace brwlab;

namespace
{
// O(k^2) definition: S_k < S_j for all j < k, and S_k >= -x
std::uint64_t brute_ladder_count(std::vector<double> const& path, double x)
{
    std::uint64_t count = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
    {
        bool record = true;
        for (std::size_t j = 0; j < k; ++j)
            record = record && path[k] < path[j];
        if (record && path[k] >= -x)
            ++count;
    }
    return count;
}
}  // namespace

TEST_CASE("exact spine step law")
{
    for (auto const& m : {reference::bottcher_two_atom(), reference::quadratic_boundary(),
                          normalize_to_boundary(reference::pd_family(0.3, 1.2))})
    {
        auto law = spine_step_law(m);
        REQUIRE(law.exact);
        double total = 0, mean = 0, var = 0;
        for (std::size_t i = 0; i < law.values.size(); ++i)
        {
            total += law.probs[i];
            mean += law.probs[i] * law.values[i];
            var += law.probs[i] * law.values[i] * law.values[i];
        }
        CHECK(std::fabs(total - 1) <= 1e-12);
        CHECK(std::is_sorted(law.values.begin(), law.values.end()));
        auto r = check_boundary(m);
        CHECK(std::fabs(law.mean) <= 1e-10);
        CHECK(std::fabs(mean - r.m2.value) <= 1e-10);
        CHECK(std::fabs(law.variance - r.sigma2.value) <= 1e-10);
        CHECK(std::fabs(var - r.sigma2.value) <= 1e-10);
    }
}

TEST_CASE("spine step law of a two-child atom")
{
    // children at a < b with weights e^{-a}, e^{-b}
    auto m = reference::bottcher_two_atom();
    auto law = spine_step_law(m);
    for (auto const& atom : m.atoms())
    {
        for (double v : atom.displacements)
        {
            auto it = std::find_if(law.values.begin(), law.values.end(),
                                   [v](double s) { return std::fabs(s - v) < 1e-14; });
            REQUIRE(it != law.values.end());
            CHECK(law.probs[it - law.values.begin()]
                  >= atom.weight * std::exp(-v) * (1 - 1e-12));
        }
    }
}

TEST_CASE("spine step law needs the boundary case")
{
    auto m = PointProcessModel::finite_support({{1.0, {0.1, 0.2}}});
    CHECK_THROWS_AS(spine_step_law(m), DomainError);
}

TEST_CASE("parametric spine step law is the tilted displacement law")
{
    auto law = spine_step_law(reference::schroder_gaussian());
    CHECK_FALSE(law.exact);
    REQUIRE(law.tilted);
    CHECK(std::fabs(law.mean) < 1e-10);
    Stream rng(4);
    MeanAccumulator acc;
    for (int i = 0; i < 100000; ++i)
        acc.add(law.sample(rng));
    CHECK(std::fabs(acc.mean()) < 4 * acc.se());
    CHECK(acc.variance() == doctest::Approx(law.variance).epsilon(0.03));
}

TEST_CASE("ladder heights are positive")
{
    auto law = spine_step_law(reference::bottcher_two_atom());
    for (int i = 0; i < 5000; ++i)
    {
        Stream rng = Stream::root(1, i, tag::ladder);
        auto s = sample_ladder(law, rng, 1000000);
        REQUIRE_FALSE(s.truncated);
        CHECK(s.height > 0);
        CHECK(s.tau0 >= 1);
    }
}

TEST_CASE("spine sampler draws size-biased atoms")
{
    auto m = reference::bottcher_two_atom();
    SpineSampler spine(m);
    auto law = spine_step_law(m);
    Stream rng(8);
    std::vector<double> before, after;
    MeanAccumulator acc;
    int const n = 100000;
    for (int i = 0; i < n; ++i)
    {
        double v = spine.next(rng, before, &after);
        CHECK(before.size() + after.size() == 1);
        acc.add(v);
    }
    CHECK(std::fabs(acc.mean()) < 4 * acc.se());
    CHECK(acc.variance() == doctest::Approx(law.variance).epsilon(0.03));
}

TEST_CASE("many-to-one on small trees")
{
    auto m = reference::bottcher_two_atom();
    for (std::size_t n : {3u, 5u})
    {
        auto res = many_to_one_check(m, n, registered_functionals(), 100000, 3000, 17);
        REQUIRE(res.size() == registered_functionals().size());
        for (auto const& r : res)
        {
            CHECK(r.n == n);
            CHECK(r.discrepancy <= 4.0);
            if (r.functional == PathFunctional::one)
            {
                CHECK(r.walk.value == 1.0);
                CHECK(std::fabs(r.tree.value - 1) <= 4 * r.tree.se);
            }
        }
    }
}

TEST_CASE("registered path functionals")
{
    std::vector<double> path{0.5, 0.2, 0.9};
    CHECK(evaluate(PathFunctional::one, path) == 1);
    CHECK(evaluate(PathFunctional::min_nonnegative, path) == 1);
    CHECK(evaluate(PathFunctional::box_end, path) == 1);
    CHECK(evaluate(PathFunctional::max_below_one, path) == 1);
    CHECK(evaluate(PathFunctional::poly_exp, path)
          == doctest::Approx(0.81 * std::exp(-0.9)));
    std::vector<double> neg{0.5, -0.1, 1.5};
    CHECK(evaluate(PathFunctional::min_nonnegative, neg) == 0);
    CHECK(evaluate(PathFunctional::box_end, neg) == 0);
    CHECK(evaluate(PathFunctional::max_below_one, neg) == 0);
}

TEST_CASE("ladder counting equals the brute-force scan")
{
    auto law = spine_step_law(reference::bottcher_two_atom());
    for (int i = 0; i < 1000; ++i)
    {
        Stream rng = Stream::root(2, i, tag::walk);
        std::vector<double> path{0.0};
        std::size_t len = 1 + rng.below(200);
        for (std::size_t k = 0; k < len; ++k)
            path.push_back(path.back() + law.sample(rng));
        for (double x : {0.0, 0.5, 3.0, 10.0})
            REQUIRE(count_ladder_points(path, x) == brute_ladder_count(path, x));
    }
}

TEST_CASE("renewal function")
{
    RenewalOptions opts;
    opts.replicas = 2000;
    opts.seed = 5;
    opts.step_cap = 1000000;
    opts.plateau_lo = 4;
    opts.plateau_hi = 10;
    std::vector<double> xs{0, 1, 2, 4, 6, 10};
    auto r = renewal_function(reference::bottcher_two_atom(), xs, opts);
    REQUIRE(r.r.size() == xs.size());
    CHECK(r.r[0].value >= 1.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
        CHECK(r.r[i].value >= r.r[i - 1].value);
    CHECK(r.c1 > 0);
    CHECK(r.walks + r.truncated == opts.replicas);
    CHECK(r.truncated < opts.replicas / 20);
}

TEST_CASE("overshoot of a bounded walk")
{
    auto m = reference::bottcher_two_atom();
    double K = spine_step_law(m).values.back();
    OvershootOptions opts;
    opts.replicas = 5000;
    opts.seed = 6;
    opts.step_cap = 100000;
    auto res = first_passage_overshoot(m, {0, 5, 20}, opts);
    REQUIRE(res.size() == 3);
    for (auto const& o : res)
    {
        CHECK(o.truncated < opts.replicas / 20);
        REQUIRE_FALSE(o.samples.empty());
        CHECK(std::is_sorted(o.samples.begin(), o.samples.end()));
        CHECK(o.samples.front() > 0);
        CHECK(o.samples.back() <= K);
        for (std::size_t i = 1; i < o.survival.size(); ++i)
            CHECK(o.survival[i] <= o.survival[i - 1]);
    }
}

TEST_CASE("spinal left tail agrees with the front law")
{
    auto m = reference::schroder_gaussian();
    std::size_t const n = 32;
    auto law = FrontLaw::minimum(m, n);
    std::vector<double> lambdas{0, 1, 2, 4};
    auto r = spinal_left_tail(m, law, n, lambdas, 8000, 12, 400);
    REQUIRE(r.p.size() == lambdas.size());
    CHECK(r.batches == 20);
    double c = 1.5 * std::log(double(n));
    for (std::size_t i = 0; i < lambdas.size(); ++i)
    {
        double exact = law.lower(n, c - lambdas[i]);
        CHECK(r.p[i].value <= 1.0);
        CHECK(r.p[i].se > 0);
        CHECK(std::fabs(r.p[i].value - exact) <= 4 * r.p[i].se);
        CHECK(r.ess_fraction[i] > 0.01);
    }
    CHECK_THROWS_AS(spinal_left_tail(m, law, n, lambdas, 100, 1, 1000), ConfigError);
}
