//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/cascade.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
enum class CascadeMode
{
    derivative_martingale,  //!< Z = D_n by full simulation
    line_closure,           //!< composed first-passage lines plus a closure
    smoothing_iteration,    //!< pool iteration of Z -> sum e^{-V} Z_i
};

std::string to_string(CascadeMode m);

struct CascadeOptions
{
    CascadeMode mode{CascadeMode::line_closure};
    std::uint64_t samples{100000};
    std::uint64_t seed{0};
    //! derivative_martingale: generation (0 doubles from 4 until the KS
    //! distance between D_n and D_2n drops below 0.01)
    std::size_t n{0};
    //! smoothing_iteration: number of iterations from Z = 1
    std::size_t depth{40};
    double chi{1};
    //! line_closure: innermost line level, composition level and count
    double base_lambda{5};
    double lambda{4};
    std::size_t compositions{2};
    std::uint64_t pool{0};  //!< zero selects min(samples, 10^6)
    std::uint64_t particle_cap{10000000};
};

/*!
 * \brief Samples of the nontrivial fixed point Z of Z = sum e^{-V(u)} Z_u.
 *
 * Line closure: a pool of (D, W) pairs over the line at base_lambda is
 * composed with lines at \c lambda, D' = sum e^{-y} (D_J + y W_J),
 * W' = sum e^{-y} W_J, and each final pair is closed as
 * Z = D' + W' (S + log W' + b) with a totally skewed 1-stable S. The shift b
 * is calibrated so that E[e^{-Z}] agrees at the last two depths.
 */
struct CascadeSampleSet
{
    CascadeMode mode{CascadeMode::line_closure};
    std::vector<double> samples;  //!< nonnegative, zeros included
    double zero_fraction{0};
    double negative_fraction{0};  //!< excluded negative values
    double chi{1};
    std::size_t n_used{0};
    double closure_shift{0};
    double depth_ks{0};  //!< KS distance between the last two depths
    std::vector<std::string> diagnostics;
};

CascadeSampleSet
sample_fixed_point(PointProcessModel const& model, CascadeOptions const& opts);

//! Standard totally skewed 1-stable variate, characteristic exponent
//! -|t| (1 + i (2/pi) sign(t) log|t|)
double stable1(Stream& rng);

//---------------------------------------------------------------------------//
struct LaplaceEstimate
{
    double t{0};
    Estimate all;       //!< E[e^{-tZ}]
    Estimate positive;  //!< E[e^{-tZ} 1{Z > 0}]
};

std::vector<LaplaceEstimate>
laplace_grid(std::vector<double> const& samples, std::vector<double> const& t);

struct SmallDevRow
{
    double eps{0};
    Estimate p;            //!< P(0 < Z < eps)
    Interval wilson;
    Estimate conditioned;  //!< P(Z < eps | Z > 0) from the positive subsample
};

struct SmallDevReport
{
    std::vector<SmallDevRow> rows;
    TailFit fit;  //!< loglog of P(0 < Z < eps) against eps
    bool sparse{false};
    std::uint64_t below_max{0};
};

SmallDevReport schroder_small_dev(std::vector<double> const& samples,
                                  std::vector<double> const& eps);

struct BottcherReport
{
    TailFit laplace_fit;   //!< log(-log E e^{-tZ}) against log t
    TailFit smalldev_fit;  //!< log(-log P(Z < eps)) against log(1/eps)
    bool depth_warning{false};
    double h0{0};          //!< -log E[e^{-e^{-K} Z}]
    std::vector<double> r;
    std::vector<double> h;        //!< -log E[e^{-rZ}]
    std::vector<double> envelope; //!< h0 r^beta
    std::vector<double> slack;    //!< (h - envelope) / combined SE
    bool envelope_holds{true};
};

BottcherReport bottcher_tail(std::vector<double> const& samples,
                             std::vector<double> const& t,
                             std::vector<double> const& eps,
                             std::vector<double> const& r,
                             double beta,
                             double K);

//---------------------------------------------------------------------------//
struct SelfConsistency
{
    double ks{0};
    double critical{0};
    bool pass{false};
    std::size_t n{0};
};

// One smoothing step sum e^{-V_j} Z_J with Z_J resampled from the set
SelfConsistency self_consistency(PointProcessModel const& model,
                                 std::vector<double> const& samples,
                                 std::uint64_t seed,
                                 double alpha = 0.01);

//---------------------------------------------------------------------------//
}  // namespace brwlab
