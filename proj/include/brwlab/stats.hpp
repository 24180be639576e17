//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/stats.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brwlab
{
//---------------------------------------------------------------------------//
//! Neumaier compensated sum
class CompensatedSum
{
  public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(CompensatedSum const& other)
    {
        this->add(other.sum_);
        this->add(other.comp_);
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_{0};
    double comp_{0};
};

//! Value with standard error (zero for exact quantities)
struct Estimate
{
    double value{0};
    double se{0};
};

//---------------------------------------------------------------------------//
/*!
 * \brief Sample mean and variance accumulator.
 *
 * Merging is ordered by the caller (chunk index), so results do not depend on
 * the worker count.
 */
class MeanAccumulator
{
  public:
    void add(double x)
    {
        ++n_;
        sum_.add(x);
        sumsq_.add(x * x);
    }
    void merge(MeanAccumulator const& other)
    {
        n_ += other.n_;
        sum_.merge(other.sum_);
        sumsq_.merge(other.sumsq_);
    }

    std::uint64_t count() const { return n_; }
    double sum() const { return sum_.value(); }
    double mean() const { return n_ ? sum_.value() / n_ : 0.0; }
    double variance() const;
    double se() const { return n_ > 1 ? std::sqrt(variance() / n_) : 0.0; }
    Estimate estimate() const { return {this->mean(), this->se()}; }

  private:
    std::uint64_t n_{0};
    CompensatedSum sum_;
    CompensatedSum sumsq_;
};

//---------------------------------------------------------------------------//
// INTERVALS AND TESTS
//---------------------------------------------------------------------------//
struct Interval
{
    double lo{0};
    double hi{1};
};

// Wilson score interval for k successes out of n trials
Interval wilson_interval(double successes, double trials, double z = 1.959964);

// Wilson interval for a non-binomial estimate via its effective sample size
Interval wilson_from_estimate(Estimate const& e, double fallback_trials,
                              double z = 1.959964);

// Rule-of-three 95% upper bound when nothing was observed in n trials
inline double rule_of_three(double trials) { return 3.0 / trials; }

// Two-sample Kolmogorov-Smirnov statistic (inputs are copied and sorted)
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample KS statistic at the given level
double ks_critical(std::size_t n, std::size_t m, double alpha = 0.01);

//---------------------------------------------------------------------------//
// REGRESSION
//---------------------------------------------------------------------------//
enum class FitTransform
{
    loglog,          //!< log y against log x
    log_neg_log,     //!< log(-log y) against log x
    semilog,         //!< log y against x
    neg_log_linear,  //!< log(-log y) against x
};

std::string to_string(FitTransform t);

struct FitPoint
{
    double x{0};
    double y{0};
    double se{0};  //!< standard error of y; zero means unweighted
};

struct TailFit
{
    FitTransform transform{FitTransform::loglog};
    double x_lo{0};
    double x_hi{0};
    double slope{0};
    double intercept{0};
    double slope_se{0};
    double r_squared{0};
    std::size_t points{0};
};

// Weighted least squares on transformed coordinates within [x_lo, x_hi]
TailFit fit_log_slope(std::vector<FitPoint> const& points,
                      FitTransform transform,
                      double x_lo = -INFINITY,
                      double x_hi = INFINITY);

// Ordinary least squares slope/intercept for already-transformed data
std::pair<double, double>
least_squares(std::vector<double> const& x, std::vector<double> const& y);

//---------------------------------------------------------------------------//
}  // namespace brwlab
