//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/exponents.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
struct GammaResult
{
    double gamma{0};
    double verifying_a{0};       //!< some a > gamma with E[sum e^{aV}] finite
    bool certified_all_a{false}; //!< exponential moments finite for every a
};

// g(x) = E[1{nu >= 1} q^{nu - 1} sum e^{x V}]
double schroder_function(PointProcessModel const& model, double q, double x);

GammaResult gamma(PointProcessModel const& model, double q);

//---------------------------------------------------------------------------//
struct BetaResult
{
    double beta{0};
    double essinf_at_beta{0};
    //! Maximal a-intervals (on the scan grid) where essinf sum e^{-aV} >= 1
    std::vector<std::pair<double, double>> intervals;
};

// essinf over realizations of sum e^{-a V}
double essinf_weight_sum(PointProcessModel const& model, double a);

BetaResult beta(PointProcessModel const& model);

//---------------------------------------------------------------------------//
// psi(x) = E[log sum e^{-x V}]; exact for finite support, MC otherwise
Estimate psi(PointProcessModel const& model,
             double x,
             std::uint64_t mc_budget = 200000,
             std::uint64_t seed = 0);

//---------------------------------------------------------------------------//
struct NermanResult
{
    double a{0};
    Estimate c7;
    Estimate c8;
    Estimate mean_height;
    std::uint64_t samples{0};
    std::uint64_t truncated{0};
};

struct LadderOptions
{
    std::uint64_t samples{200000};
    std::uint64_t seed{0};
    std::uint64_t step_cap{1000000};
};

// c7(a) for each a, from one shared set of ladder heights
std::vector<NermanResult> nerman_constant(PointProcessModel const& model,
                                          std::vector<double> const& a_list,
                                          LadderOptions const& opts);

NermanResult nerman_constant(PointProcessModel const& model,
                             double a,
                             LadderOptions const& opts);

// Smallest grid a whose c7(a) estimate sits more than 5 SE above zero
NermanResult choose_nerman_a(std::vector<NermanResult> const& table);

//---------------------------------------------------------------------------//
enum class CaseTag
{
    schroder,
    bottcher,
    neither,
};

std::string to_string(CaseTag t);

struct ExponentReport
{
    std::optional<GammaResult> gamma;
    std::optional<BetaResult> beta;
    double q{0};
    CaseTag case_tag{CaseTag::neither};
    std::vector<std::pair<double, Estimate>> psi_values;
    std::vector<NermanResult> c7;
    std::vector<std::string> diagnostics;
};

struct ExponentOptions
{
    std::vector<double> psi_x;
    std::vector<double> nerman_a;
    LadderOptions ladder;
};

ExponentReport
exponent_report(PointProcessModel const& model, ExponentOptions const& opts);

//---------------------------------------------------------------------------//
}  // namespace brwlab
