//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/model.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rng.hpp"
#include "stats.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
// DISPLACEMENT LAWS
//---------------------------------------------------------------------------//
enum class LawKind
{
    gaussian,               //!< a = mean, b = standard deviation
    truncated_exponential,  //!< density ~ exp(p x) on [a, b]; p = 0 is uniform
    two_point,              //!< values a, b with P(a) = p
    shifted_exponential,    //!< a + Exp(rate b)
};

//! log E[e^{tX}] and its first two derivatives
struct Cumulant
{
    double k{0};
    double k1{0};
    double k2{0};
};

/*!
 * \brief Per-child displacement law with a closed-form moment generating
 * function.
 *
 * The family is closed under positive affine maps and under exponential
 * tilting, which is what boundary reduction and the spine construction need.
 */
class DisplacementLaw
{
  public:
    static DisplacementLaw gaussian(double mean, double sd);
    static DisplacementLaw uniform(double lo, double hi);
    static DisplacementLaw truncated_exponential(double lo, double hi,
                                                 double exponent);
    static DisplacementLaw two_point(double x1, double x2, double p1);
    static DisplacementLaw shifted_exponential(double shift, double rate);

    LawKind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double p() const { return p_; }
    std::string name() const;

    bool mgf_finite(double t) const;
    Cumulant cumulant(double t) const;  //!< throws DomainError if infinite
    double mean() const { return this->cumulant(0).k1; }
    double variance() const { return this->cumulant(0).k2; }

    double lower() const;  //!< essential infimum (may be -inf)
    double upper() const;  //!< essential supremum (may be +inf)

    double sample(Stream& rng) const;
    double density(double x) const;  //!< zero for two_point
    bool has_density() const { return kind_ != LawKind::two_point; }

    //! Law of scale * X + shift, scale > 0
    DisplacementLaw affine(double scale, double shift) const;
    //! Law with density proportional to e^{-theta x} relative to this one
    DisplacementLaw tilted(double theta) const;

  private:
    LawKind kind_{LawKind::gaussian};
    double a_{0};
    double b_{1};
    double p_{0};
};

//---------------------------------------------------------------------------//
// POINT PROCESS MODEL
//---------------------------------------------------------------------------//
//! One realization of the reproduction point process with its probability
struct DisplacementAtom
{
    double weight{1};
    std::vector<double> displacements;
};

//! Offspring law p_k (k = 0..K) with i.i.d. child displacements
struct ParametricSpec
{
    std::vector<double> offspring;
    DisplacementLaw law;
    std::size_t truncation{0};  //!< original support size if truncated, else 0
};

//! Affine reduction applied by normalize_to_boundary
struct Normalization
{
    double theta_star{1};
    double shift{0};
};

class PointProcessModel
{
  public:
    static PointProcessModel finite_support(std::vector<DisplacementAtom> atoms,
                                            std::string label = {},
                                            bool lattice = false);
    static PointProcessModel parametric(std::vector<double> offspring,
                                        DisplacementLaw law,
                                        std::string label = {},
                                        bool lattice = false,
                                        std::size_t truncation = 0);

    bool is_finite_support() const { return spec_.index() == 0; }
    std::vector<DisplacementAtom> const& atoms() const;
    ParametricSpec const& parametric_spec() const;

    std::string const& label() const { return label_; }
    bool lattice() const { return lattice_; }
    std::optional<Normalization> const& normalization() const
    {
        return normalization_;
    }

    //! Offspring law p_k for k = 0..max_offspring()
    std::vector<double> const& offspring_law() const { return offspring_; }
    std::size_t max_offspring() const { return offspring_.size() - 1; }
    double mean_offspring() const;
    double pgf(double s) const;

    double min_displacement() const;
    double max_displacement() const;

    //! Draw child displacements of one particle (clears \c out first)
    void sample(Stream& rng, std::vector<double>& out) const;

    //! Model with every displacement mapped to scale * x + shift
    PointProcessModel affine(double scale, double shift) const;
    PointProcessModel with_normalization(Normalization n,
                                         std::string label) const;

  private:
    std::variant<std::vector<DisplacementAtom>, ParametricSpec> spec_;
    std::vector<double> cumulative_;  //!< atom or offspring CDF
    std::vector<double> offspring_;
    std::string label_;
    bool lattice_{false};
    std::optional<Normalization> normalization_;

    void validate_and_index();
};

//---------------------------------------------------------------------------//
// MOMENTS AND BOUNDARY CHECKS
//---------------------------------------------------------------------------//
//! Lambda(theta) = log E[sum exp(-theta V)] with theta-derivatives
struct LogMoment
{
    double value{0};
    double d1{0};
    double d2{0};
};

LogMoment log_moment(PointProcessModel const& model, double theta);

enum class EvaluationMode
{
    exact,
    monte_carlo,
};

struct BoundaryPasses
{
    bool boundary{false};
    bool sigma2_finite{false};
    std::optional<bool> integrability;  //!< empty when the estimate is unstable
    std::optional<bool> third_moment;
};

struct BoundaryReport
{
    Estimate m1;
    Estimate m2;
    Estimate sigma2;
    Estimate third_plus;
    Estimate zeta_log2;
    Estimate zeta_tilde_log;
    std::vector<std::pair<double, Estimate>> exp_moment;
    EvaluationMode mode{EvaluationMode::exact};
    double tol{1e-10};
    BoundaryPasses passes;
};

struct BoundaryOptions
{
    double tol{1e-10};
    std::uint64_t mc_budget{200000};
    std::uint64_t seed{0};
    std::vector<double> exp_a;
    bool force_monte_carlo{false};
};

BoundaryReport
check_boundary(PointProcessModel const& model, BoundaryOptions const& opts = {});

// Map x -> theta* x + Lambda(theta*) where theta Lambda'(theta) = Lambda(theta)
PointProcessModel normalize_to_boundary(PointProcessModel const& model);

// Smallest fixed point of the offspring generating function
double extinction_probability(PointProcessModel const& model, double tol = 1e-14);

// Iterates 0, f(0), f(f(0)), ... up to convergence
std::vector<double>
extinction_iterates(PointProcessModel const& model, double tol = 1e-14);

// P(extinct by generation n) for n = 0..n_max
std::vector<double>
extinction_by_generation(PointProcessModel const& model, std::size_t n_max);

//---------------------------------------------------------------------------//
}  // namespace brwlab
