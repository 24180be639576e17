//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/experiments.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brw.hpp"
#include "config.hpp"
#include "output.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
// MODERATE DEVIATIONS
//---------------------------------------------------------------------------//
struct DeviationPoint
{
    double lambda{0};
    double x{0};           //!< 1.5 log n + lambda (or minus, lower side)
    Estimate p;
    Interval wilson;
    double upper_bound{0}; //!< rule-of-three bound for an all-zero cell
    double law{0};         //!< same probability from the front-law recursion
    double diagnostic{0};  //!< -log p / lambda or log(-log p)
};

struct DeviationCurve
{
    TailSide variant{TailSide::upper};
    std::size_t n{0};
    Conditioning conditioning{Conditioning::none};
    std::uint64_t replicas{0};
    std::vector<DeviationPoint> points;
    std::optional<TailFit> fit;  //!< semilog (Schroder) or log(-log) (Bottcher)
    Estimate survival;           //!< simulated survival to the horizon
    double survival_exact{0};
    double certified_fraction{0};
    double kept_per_replica{0};
    std::vector<std::string> warnings;
};

std::vector<DeviationCurve> run_moderate_deviation(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
// LOWER DEVIATIONS
//---------------------------------------------------------------------------//
struct LowerDeviationPoint
{
    double lambda{0};
    Estimate direct;
    Interval wilson;
    double upper_bound{0};
    Estimate spinal;
    double ess_fraction{0};
    double law{0};
    double envelope_ratio{0};  //!< direct / ((1 + lambda) e^{-lambda})
    double aidekon_ratio{0};   //!< direct / (lambda e^{-lambda})
    double discrepancy{0};     //!< |direct - spinal| in combined SE
};

struct LowerDeviationCurve
{
    std::size_t n{0};
    std::uint64_t replicas{0};
    std::vector<LowerDeviationPoint> points;
    double certified_fraction{0};
};

std::vector<LowerDeviationCurve> run_lower_deviation(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
// LIL TRAJECTORIES
//---------------------------------------------------------------------------//
struct LilPoint
{
    std::size_t j{0};
    std::size_t n{0};
    double centered{0};  //!< M_n - 1.5 log n
    double lower{0};     //!< (M_n - 0.5 log n) / log log n
    double envelope{0};  //!< C log log log n (reported only)
};

struct LilTrajectory
{
    std::uint64_t replica{0};
    std::vector<LilPoint> points;
    bool extinct{false};
    std::size_t extinct_at{0};
};

std::vector<LilTrajectory> run_lil_trajectory(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
// DISPATCH
//---------------------------------------------------------------------------//
ExperimentResult run_experiment(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
}  // namespace brwlab
