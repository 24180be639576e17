//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/walk.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace brwlab
{
class FrontLaw;

//---------------------------------------------------------------------------//
/*!
 * \brief Step law of the many-to-one walk, P(S_1 in dx) = E[sum 1{V in dx}
 * e^{-V}].
 */
struct SpineStepLaw
{
    bool exact{false};
    std::vector<double> values;  //!< sorted support (exact mode)
    std::vector<double> probs;
    std::vector<double> cumulative;
    std::optional<DisplacementLaw> tilted;  //!< parametric mode
    double mean{0};
    double variance{0};

    double sample(Stream& rng) const;
};

SpineStepLaw spine_step_law(PointProcessModel const& model, double tol = 1e-8);

//---------------------------------------------------------------------------//
/*!
 * \brief One generation of the spine under the size-biased measure.
 *
 * Finite support: atom chosen with weight w * sum e^{-x}, spine child with
 * probability proportional to e^{-x}. Parametric: offspring size-biased by
 * k p_k, spine child uniform among them with a tilted displacement, brothers
 * i.i.d. from the original law. Brothers are split into those preceding and
 * following the spine child in sibling order.
 */
class SpineSampler
{
  public:
    explicit SpineSampler(PointProcessModel const& model);

    //! Returns the spine displacement and fills the brother lists
    double next(Stream& rng,
                std::vector<double>& before,
                std::vector<double>* after = nullptr) const;

  private:
    PointProcessModel const* model_;
    std::vector<double> atom_cdf_;
    std::optional<DisplacementLaw> tilted_;
    std::vector<double> size_cdf_;
};

//---------------------------------------------------------------------------//
struct LadderSample
{
    std::uint64_t tau0{0};
    double height{0};
    bool truncated{false};
};

// First strict ascending ladder epoch tau0 = inf{j >= 1 : S_j > 0}
LadderSample
sample_ladder(SpineStepLaw const& law, Stream& rng, std::uint64_t step_cap);

//---------------------------------------------------------------------------//
// MANY-TO-ONE
//---------------------------------------------------------------------------//
enum class PathFunctional
{
    one,              //!< f = 1
    min_nonnegative,  //!< 1{min_k S_k >= 0}
    box_end,          //!< 1{S_n in [0, 1], min_k S_k >= 0}
    max_below_one,    //!< 1{max_k S_k <= 1}
    poly_exp,         //!< S_n^2 exp(-|S_n|)
};

std::string to_string(PathFunctional f);
std::vector<PathFunctional> registered_functionals();

// Path is S_1..S_n
double evaluate(PathFunctional f, std::vector<double> const& path);

struct ManyToOneResult
{
    PathFunctional functional{PathFunctional::one};
    std::size_t n{0};
    Estimate tree;
    Estimate walk;
    double discrepancy{0};  //!< |tree - walk| in combined standard errors
};

std::vector<ManyToOneResult>
many_to_one_check(PointProcessModel const& model,
                  std::size_t n,
                  std::vector<PathFunctional> const& functionals,
                  std::uint64_t walk_replicas,
                  std::uint64_t tree_replicas,
                  std::uint64_t seed);

//---------------------------------------------------------------------------//
// FIRST PASSAGE AND RENEWAL
//---------------------------------------------------------------------------//
struct OvershootResult
{
    double b{0};
    std::vector<double> samples;  //!< sorted overshoots S_{tau_b} - b
    std::uint64_t truncated{0};
    std::vector<double> x;        //!< survival abscissae
    std::vector<double> survival; //!< empirical P(overshoot > x)
    TailFit tail;                 //!< semilog fit of the survival
};

struct OvershootOptions
{
    std::uint64_t replicas{100000};
    std::uint64_t seed{0};
    std::uint64_t step_cap{10000000};
    double min_survival{1e-3};  //!< fit window ends where survival drops below
};

std::vector<OvershootResult>
first_passage_overshoot(PointProcessModel const& model,
                        std::vector<double> const& b_grid,
                        OvershootOptions const& opts);

// Strict descending ladder points of path S_0 = 0, S_1, ... at height >= -x
std::uint64_t count_ladder_points(std::vector<double> const& path, double x);

struct RenewalResult
{
    std::vector<double> x;
    std::vector<Estimate> r;
    std::vector<double> ratio;  //!< R(x) / x
    double c1{0};               //!< mean ratio over the plateau window
    double plateau_spread{0};   //!< (max - min) / min of ratio on the window
    std::uint64_t truncated{0};
    std::uint64_t walks{0};
};

struct RenewalOptions
{
    std::uint64_t replicas{4000};
    std::uint64_t seed{0};
    std::uint64_t step_cap{100000000};
    double plateau_lo{10};
    double plateau_hi{50};
};

RenewalResult renewal_function(PointProcessModel const& model,
                               std::vector<double> const& x_grid,
                               RenewalOptions const& opts);

//---------------------------------------------------------------------------//
// SPINAL LEFT TAIL
//---------------------------------------------------------------------------//
struct LeftTailResult
{
    std::size_t n{0};
    std::vector<double> lambda;
    std::vector<Estimate> p;          //!< P(M_n < 1.5 log n - lambda)
    //! mean^2 / second moment of the per-batch estimates
    std::vector<double> ess_fraction;
    std::size_t batches{0};
};

/*!
 * Importance sampler under the spine measure: the first generation-n particle
 * below x (in sibling order) is the spine with weight e^{V(w_n)}, and the
 * preceding brothers contribute their exact subtree laws. Spine paths are
 * propagated in batches with resampling; each batch gives an unbiased
 * estimate and the standard error comes from the spread across batches.
 */
LeftTailResult spinal_left_tail(PointProcessModel const& model,
                                FrontLaw const& law,
                                std::size_t n,
                                std::vector<double> const& lambdas,
                                std::uint64_t replicas,
                                std::uint64_t seed,
                                std::size_t batch = 1000);

//---------------------------------------------------------------------------//
}  // namespace brwlab
