//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/lines.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
struct LineMember
{
    double position{0};
    std::size_t generation{0};
};

/*!
 * \brief First-passage line: particles whose position first exceeds lambda
 * along their ancestral path.
 */
struct StoppingLine
{
    double lambda{0};
    std::vector<LineMember> members;  //!< kept only when requested
    bool complete{true};              //!< no lineage was cut by the cap
    bool extinct_before_crossing{false};
    //! Sum over strictly-before-line particles of (children - 1)
    std::int64_t branching_excess{0};
};

struct LineFunctionals
{
    std::uint64_t count{0};
    std::vector<std::uint64_t> count_restricted;  //!< per a: overshoot <= a
    double D{0};
    double W{0};
    double eta{0};
    std::size_t max_generation{0};
    double max_overshoot{0};
    bool strict_overshoot{true};  //!< every member lies above lambda
};

struct LineSample
{
    StoppingLine line;
    LineFunctionals f;
};

//! Default cap max(64, ceil(8 lambda^3))
std::size_t default_gen_cap(double lambda);

struct LineOptions
{
    std::vector<double> a;        //!< restriction levels for count_restricted
    std::size_t gen_cap{0};       //!< zero selects default_gen_cap(max lambda)
    bool keep_members{false};
};

// Lines for every lambda (ascending) on one tree in a single pass
std::vector<LineSample> first_passage_lines(PointProcessModel const& model,
                                            std::vector<double> const& lambdas,
                                            std::uint64_t seed,
                                            std::uint64_t replica,
                                            LineOptions const& opts = {});

LineSample first_passage_line(PointProcessModel const& model,
                              double lambda,
                              std::uint64_t seed,
                              std::uint64_t replica,
                              LineOptions const& opts = {});

//---------------------------------------------------------------------------//
struct NermanRow
{
    double lambda{0};
    Estimate ratio;      //!< #L^(a) / (e^lambda W_L)
    Estimate eta_ratio;  //!< eta / (e^lambda W_L)
    Estimate d_ratio;    //!< lambda e^{-lambda} #L^(a) / D_L
    Estimate mean_W;
    std::uint64_t used{0};        //!< surviving complete replicas
    std::uint64_t incomplete{0};
};

std::vector<NermanRow> nerman_scan(PointProcessModel const& model,
                                   double a,
                                   std::vector<double> const& lambdas,
                                   std::uint64_t replicas,
                                   std::uint64_t seed,
                                   std::size_t gen_cap = 0);

//---------------------------------------------------------------------------//
struct LaplaceRow
{
    double lambda{0};
    double a{0};
    Estimate value;            //!< E[e^{-a #L} 1{#L > 0}]
    double upper_bound{0};     //!< rule-of-three bound when value is zero
    double schroder_diag{0};   //!< -log(value) / lambda
    double bottcher_diag{0};   //!< log(-log(value)) / lambda
};

std::vector<LaplaceRow> line_count_laplace(PointProcessModel const& model,
                                           std::vector<double> const& a,
                                           std::vector<double> const& lambdas,
                                           std::uint64_t replicas,
                                           std::uint64_t seed,
                                           std::size_t gen_cap = 0);

struct SmallLineRow
{
    double lambda{0};
    std::vector<std::size_t> m;
    std::vector<Estimate> p;   //!< P(0 < #L <= m) per m
    Estimate extinct_after;    //!< P(L nonempty, tree extinct), Rao-Blackwellized
    std::uint64_t incomplete{0};
};

struct SmallLineReport
{
    std::vector<SmallLineRow> rows;
    std::vector<double> slopes;  //!< per m: slope of log p against lambda
    double extinct_after_slope{0};
};

SmallLineReport small_line_probability(PointProcessModel const& model,
                                       std::vector<std::size_t> const& m,
                                       std::vector<double> const& lambdas,
                                       std::uint64_t replicas,
                                       std::uint64_t seed,
                                       std::size_t gen_cap = 0);

//---------------------------------------------------------------------------//
//! E[sum_{u in L_b} e^{-V(u)} 1{V(u) - b in [edges_i, edges_{i+1})}]
std::vector<Estimate> weighted_overshoot(PointProcessModel const& model,
                                         double b,
                                         std::vector<double> const& edges,
                                         std::uint64_t replicas,
                                         std::uint64_t seed);

//---------------------------------------------------------------------------//
}  // namespace brwlab
