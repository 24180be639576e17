//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/law.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "model.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
//! Uniform grid z = i h for i in [round(zmin/h), round(zmax/h)]
struct GridSpec
{
    double h{0.02};
    //! NaN selects -(20 + 3 sigma sqrt(n)) with sigma the spine step spread:
    //! lineages far above the level still reach it in the boundary case
    double zmin{std::numeric_limits<double>::quiet_NaN()};
    double zmax{45};
};

/*!
 * \brief Numerically exact law of the front, generation by generation.
 *
 * Row j holds G_j(z) = P(M_j > z) (extinct trees count as M_j = +inf), from
 * the recursion G_{j+1}(z) = E[prod_{|u|=1} G_j(z - V(u))] with
 * G_0 = 1{z < 0}. Each grid value is carried in whichever of G or 1 - G is
 * below one half, so both tails keep full relative precision.
 *
 * The path-max variant propagates P(min_{|u|=j} max_{i<=j} V(u_i) > z)
 * instead, which obeys the same recursion with G_j(w) replaced by 1 for
 * w < 0.
 */
class FrontLaw
{
  public:
    static FrontLaw
    minimum(PointProcessModel const& model, std::size_t n, GridSpec grid = {});
    static FrontLaw
    path_max(PointProcessModel const& model, std::size_t n, GridSpec grid = {});

    std::size_t generations() const { return rows_.size() - 1; }
    GridSpec const& grid() const { return grid_; }
    double z(std::size_t i) const { return (i0_ + double(i)) * grid_.h; }
    std::size_t size() const { return npts_; }

    //! P(M_j > z)
    double operator()(std::size_t j, double z) const { return this->tail(j, z); }
    double tail(std::size_t j, double z) const;
    //! P(M_j <= z), accurate far in the left tail
    double lower(std::size_t j, double z) const;
    //! P(M_j extinct), the right limit of tail(j, .)
    double extinct(std::size_t j) const;
    //! Smallest grid-interpolated z with P(M_j <= z | survival to j) >= p
    double quantile(std::size_t j, double p) const;
    //! Smallest z with P(M_j <= z) >= u (unconditioned); +inf past the
    //! surviving mass
    double lower_inverse(std::size_t j, double u) const;
    //! Survival-conditioned tail P(M_j > z | population at j > 0)
    double conditioned_tail(std::size_t j, double z) const;

  private:
    GridSpec grid_;
    long i0_{0};
    std::size_t npts_{0};
    // Encoded values: c >= 0 (sign bit clear) is G, sign bit set is -(1 - G)
    std::vector<std::vector<double>> rows_;
    std::vector<double> extinct_;

    FrontLaw(PointProcessModel const& model,
             std::size_t n,
             GridSpec grid,
             bool path_max);

    double tail_at(std::size_t j, long i) const;
    double lower_at(std::size_t j, long i) const;
};

//---------------------------------------------------------------------------//
}  // namespace brwlab
