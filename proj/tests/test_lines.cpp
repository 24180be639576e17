//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_lines.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <vector>

#include <doctest.h>

#include "brwlab/errors.hpp"
#include "brwlab/lines.hpp"
#include "brwlab/model.hpp"
#include "brwlab/reference.hpp"

using namespace brwlab;

TEST_CASE("line at level zero of a positive binary tree")
{
    auto m = PointProcessModel::finite_support({{1.0, {0.2, 0.9}}});
    LineOptions opts;
    opts.keep_members = true;
    auto s = first_passage_line(m, 0, 1, 0, opts);
    CHECK(s.f.count == 2);
    CHECK(s.f.max_generation == 1);
    REQUIRE(s.line.members.size() == 2);
    CHECK(s.line.members[0].generation == 1);
    CHECK(s.line.complete);
    CHECK(s.f.W == doctest::Approx(std::exp(-0.2) + std::exp(-0.9)));
}

TEST_CASE("tree identity and strict overshoot on every line")
{
    for (auto const& m : {reference::schroder_gaussian(), reference::quadratic_boundary(),
                          reference::bottcher_two_atom()})
    {
        LineOptions opts;
        opts.keep_members = true;
        opts.a = {1.0, 3.0};
        for (std::uint64_t r = 0; r < 300; ++r)
        {
            auto lines = first_passage_lines(m, {0.5, 2, 4}, 3, r, opts);
            REQUIRE(lines.size() == 3);
            for (auto const& s : lines)
            {
                if (!s.line.complete)
                    continue;
                CHECK(std::int64_t(s.f.count) == 1 + s.line.branching_excess);
                CHECK(s.f.strict_overshoot);
                CHECK(s.line.members.size() == s.f.count);
                for (auto const& u : s.line.members)
                    CHECK(u.position > s.line.lambda);
                CHECK(s.f.count_restricted[0] <= s.f.count_restricted[1]);
                CHECK(s.f.count_restricted[1] <= s.f.count);
                CHECK(s.f.W <= s.f.count * std::exp(-s.line.lambda) + 1e-15);
                if (s.line.lambda > 1)
                    CHECK(s.line.lambda * std::exp(-s.line.lambda) * s.f.count
                          >= s.f.D - 1e-12);
            }
            // nested lines: {#L_z > 0} is nonincreasing in z
            for (std::size_t i = 1; i < lines.size(); ++i)
                CHECK((lines[i].f.count > 0) <= (lines[i - 1].f.count > 0));
        }
    }
}

TEST_CASE("stopped additive martingale has mean one")
{
    auto m = reference::schroder_gaussian();
    MeanAccumulator w;
    for (std::uint64_t r = 0; r < 20000; ++r)
        w.add(first_passage_line(m, 3, 8, r).f.W);
    CHECK(std::fabs(w.mean() - 1) <= 4 * w.se());
}

TEST_CASE("line construction rejects bad grids")
{
    auto m = reference::schroder_gaussian();
    CHECK_THROWS_AS(first_passage_lines(m, {}, 1, 0), ConfigError);
    CHECK_THROWS_AS(first_passage_lines(m, {2, 1}, 1, 0), ConfigError);
    CHECK_THROWS_AS(first_passage_lines(m, {-1}, 1, 0), ConfigError);
    CHECK(default_gen_cap(1) == 64);
    CHECK(default_gen_cap(10) == 8000);
}

TEST_CASE("nerman scan refuses lattice models")
{
    auto m = PointProcessModel::finite_support({{1.0, {0.5, 1.5}}}, "lattice", true);
    CHECK_THROWS_AS(nerman_scan(m, 1, {2}, 10, 1), ConfigError);
}

TEST_CASE("nerman scan reports ratios")
{
    auto rows = nerman_scan(reference::schroder_gaussian(), 2, {2, 4}, 400, 5);
    REQUIRE(rows.size() == 2);
    for (auto const& r : rows)
    {
        CHECK(r.used > 0);
        CHECK(r.ratio.value > 0);
        CHECK(r.eta_ratio.value > 0);
    }
}

TEST_CASE("line-count Laplace functional is decreasing in a")
{
    auto rows = line_count_laplace(reference::schroder_gaussian(), {0.5, 1, 2},
                                   {2, 4}, 2000, 6);
    REQUIRE(rows.size() == 6);
    for (double lambda : {2.0, 4.0})
    {
        double prev = 2;
        for (auto const& r : rows)
        {
            if (r.lambda != lambda)
                continue;
            CHECK(r.value.value <= prev);
            prev = r.value.value;
        }
    }
}

TEST_CASE("small line probabilities")
{
    auto q0 = small_line_probability(reference::schroder_gaussian(), {1, 4}, {1, 2, 3},
                                     1000, 7);
    REQUIRE(q0.rows.size() == 3);
    for (auto const& row : q0.rows)
    {
        CHECK(row.extinct_after.value == 0.0);
        CHECK(row.p[0].value <= row.p[1].value);
    }
    auto qpos = small_line_probability(reference::quadratic_boundary(), {1, 4},
                                       {1, 2, 3}, 4000, 7);
    for (auto const& row : qpos.rows)
        CHECK(row.extinct_after.value > 0.0);
}
