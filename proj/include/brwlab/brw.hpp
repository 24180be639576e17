//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/brw.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "law.hpp"
#include "model.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
// SIMULATION
//---------------------------------------------------------------------------//
enum class PruningKind
{
    none,
    upper_barrier,          //!< drop particles above 1.5 log n + offset
    branch_and_bound_safe,  //!< drop particles that cannot beat an incumbent
};

std::string to_string(PruningKind k);

struct PruningPolicy
{
    PruningKind kind{PruningKind::none};
    double barrier_offset{40};

    //! Barrier height at generation k of an n-generation run
    double barrier(std::size_t n) const;
};

struct SimulateOptions
{
    std::size_t n_max{10};
    PruningPolicy policy;
    std::uint64_t particle_cap{10000000};
};

//! Per-generation statistics of one replica
struct TrajectoryStats
{
    std::size_t n{0};
    std::uint64_t population{0};
    double M{0};              //!< +inf when extinct
    double W{0};
    double D{0};
    double min_path_max{0};
    std::uint64_t pruned{0};  //!< particles removed at this generation
};

struct Trajectory
{
    std::vector<TrajectoryStats> generations;  //!< index = generation
    std::uint64_t pruned_total{0};
    //! Final minimum is exact: no removed particle could have gone lower
    bool certified_min{true};
    double lost_bound{0};  //!< lowest reachable position among removed ones
};

// One replica; the sampled tree is a pure function of (seed, replica)
Trajectory simulate(PointProcessModel const& model,
                    SimulateOptions const& opts,
                    std::uint64_t seed,
                    std::uint64_t replica);

//! Replica means of W_n, D_n and survival for n = 0..n_max (no pruning)
struct MartingaleMeans
{
    std::vector<Estimate> W;
    std::vector<Estimate> D;
    std::vector<Estimate> survival;
    std::uint64_t replicas{0};
};

MartingaleMeans martingale_means(PointProcessModel const& model,
                                 std::size_t n_max,
                                 std::uint64_t replicas,
                                 std::uint64_t seed);

//---------------------------------------------------------------------------//
// EXACT MINIMUM
//---------------------------------------------------------------------------//
// Lower bound on every displacement; throws DomainError if unbounded below
double displacement_floor(PointProcessModel const& model);

// Branch and bound over the sampled tree; exact
double minimum_exact(PointProcessModel const& model,
                     std::size_t n,
                     std::uint64_t seed,
                     std::uint64_t replica = 0,
                     std::uint64_t node_cap = 10000000);

// Full enumeration of generation n; oracle for minimum_exact
double minimum_enumerate(PointProcessModel const& model,
                         std::size_t n,
                         std::uint64_t seed,
                         std::uint64_t replica = 0,
                         std::uint64_t node_cap = 10000000);

//---------------------------------------------------------------------------//
// CONDITIONAL MONTE CARLO FOR FRONT TAILS
//---------------------------------------------------------------------------//
enum class TailSide
{
    upper,        //!< P(M_n > x)
    lower,        //!< P(M_n < x)
    running_max,  //!< lower bound on P(max_{n<=k<=2n} M_k > x)
};

std::string to_string(TailSide s);

struct ConditionalTailOptions
{
    TailSide side{TailSide::upper};
    std::uint64_t replicas{100000};
    std::uint64_t seed{0};
    double lookahead{3};        //!< barrier slack above the reference level
    std::size_t targets{16};    //!< running-max target times in (n, 2n]
    std::uint64_t particle_cap{10000000};
};

/*!
 * Particles above x_ref - 1.5 log(n - k + 1) + lookahead are removed and
 * their subtrees replaced by the exact front law, so each replica
 * contributes P(event | retained particles). Estimates are unbiased for any
 * lookahead; the lookahead controls variance and cost only.
 */
struct ConditionalTailResult
{
    TailSide side{TailSide::upper};
    std::size_t n{0};
    std::vector<double> x;
    std::vector<Estimate> p;       //!< unconditional probability
    std::vector<Estimate> p_star;  //!< conditioned on survival at the horizon
    double extinct{0};             //!< P(extinct by the horizon)
    Estimate survival;             //!< simulated survival to the horizon
    double kept_per_replica{0};
    double pruned_per_replica{0};
    double certified_fraction{0};
    std::uint64_t replicas{0};
};

ConditionalTailResult conditional_tail(PointProcessModel const& model,
                                       FrontLaw const& law,
                                       std::size_t n,
                                       std::vector<double> const& x,
                                       ConditionalTailOptions const& opts);

//---------------------------------------------------------------------------//
// TIGHTNESS AND PATH MAXIMA
//---------------------------------------------------------------------------//
struct TightnessRow
{
    std::size_t n{0};
    std::vector<double> probs;      //!< quantile levels
    std::vector<double> quantiles;  //!< of M_n - 1.5 log n given survival
    double median_ratio{0};         //!< median(M_n) / log n
    Estimate survival;              //!< simulated survival to n
    double survival_exact{0};       //!< 1 - P(extinct by n)
    //! Running-max quantiles of max_{n<=k<=2n} M_k - 1.5 log n (windowed
    //! simulation, empty when n exceeds the simulation limit)
    std::vector<double> running_max_quantiles;
};

struct TightnessOptions
{
    std::vector<double> probs{0.05, 0.25, 0.5, 0.75, 0.95};
    std::uint64_t replicas{2000};
    std::uint64_t seed{0};
    GridSpec grid{0.05, std::numeric_limits<double>::quiet_NaN(), 45};
    std::size_t running_max_limit{1024};
    std::uint64_t running_max_replicas{200};
    double window{8};
};

std::vector<TightnessRow> tightness_scan(PointProcessModel const& model,
                                         std::vector<std::size_t> const& n_list,
                                         TightnessOptions const& opts);

struct PathMaxRow
{
    std::size_t n{0};
    double median{0};         //!< of min_{|u|=n} max_{i<=n} V(u_i), given survival
    double ratio{0};          //!< median / n^{1/3}
    Estimate p_negative;      //!< simulated P(min path max < 0), small n only
};

std::vector<PathMaxRow> min_path_max(PointProcessModel const& model,
                                     std::vector<std::size_t> const& n_list,
                                     std::uint64_t replicas,
                                     std::uint64_t seed,
                                     GridSpec grid = {0.05, -30, 80});

//---------------------------------------------------------------------------//
// WINDOWED TRAJECTORIES
//---------------------------------------------------------------------------//
//! M_k along one tree, keeping only particles within \c window of the
//! current minimum (not certified)
struct WindowTrajectory
{
    std::vector<double> M;  //!< index = generation, +inf after extinction
    bool extinct{false};
    std::size_t extinct_at{0};
    std::uint64_t max_population{0};
};

WindowTrajectory window_trajectory(PointProcessModel const& model,
                                   std::size_t n_max,
                                   double window,
                                   std::uint64_t seed,
                                   std::uint64_t replica,
                                   std::uint64_t particle_cap = 10000000);

//---------------------------------------------------------------------------//
/*!
 * \brief M_n at several target generations along one tree.
 *
 * Particles above the barrier max_j (1.5 log(n_j / (n_j - k + 1))) +
 * lookahead are removed; at each later target the removed subtree
 * contributes v + F^{-1}(U) with F the front law after the remaining
 * generations and one uniform U per removed particle. Each target value is
 * an exact draw of M_{n_j}; across targets the removed subtrees are coupled
 * through U only (not certified).
 */
struct SampledTrajectory
{
    std::vector<std::size_t> targets;
    std::vector<double> M;  //!< per target, +inf when extinct
    bool extinct{false};
    std::size_t extinct_at{0};  //!< generation, or first extinct target
    std::uint64_t kept_total{0};
    std::uint64_t pruned_total{0};
    std::uint64_t replaced{0};  //!< targets decided by a removed subtree
};

SampledTrajectory sampled_trajectory(PointProcessModel const& model,
                                     FrontLaw const& law,
                                     std::vector<std::size_t> const& targets,
                                     double lookahead,
                                     std::uint64_t seed,
                                     std::uint64_t replica,
                                     std::uint64_t particle_cap = 10000000);

//---------------------------------------------------------------------------//
}  // namespace brwlab
