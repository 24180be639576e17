//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file model.cpp
//---------------------------------------------------------------------------//
#include "brwlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "brwlab/errors.hpp"
#include "brwlab/parallel.hpp"

namespace brwlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

// log of int_a^b e^{s x} dx and its s-derivatives, written around the
// midpoint m with half-width d
Cumulant log_box_integral(double s, double m, double d)
{
    double y = s * d;
    Cumulant c;
    if (std::fabs(y) < 1e-3)
    {
        double y2 = y * y;
        c.k = s * m + std::log(2 * d) + y2 / 6 - y2 * y2 / 180;
        c.k1 = m + d * (y / 3 - y * y2 / 45);
        c.k2 = d * d * (1.0 / 3 - y2 / 15);
        return c;
    }
    double ay = std::fabs(y);
    c.k = s * m + std::log(2 * d) + ay + std::log1p(-std::exp(-2 * ay))
          - std::log(2.0) - std::log(ay);
    c.k1 = m + d / std::tanh(y) - 1 / s;
    double sh = std::sinh(y);
    c.k2 = 1 / (s * s) - (std::isfinite(sh) ? d * d / (sh * sh) : 0.0);
    return c;
}

double log_sum_exp(double x, double y)
{
    double m = std::max(x, y);
    if (m == -inf)
        return -inf;
    return m + std::log(std::exp(x - m) + std::exp(y - m));
}
}  // namespace

//---------------------------------------------------------------------------//
// DISPLACEMENT LAW
//---------------------------------------------------------------------------//
DisplacementLaw DisplacementLaw::gaussian(double mean, double sd)
{
    if (!(sd > 0))
        throw ConfigError("gaussian law needs sd > 0");
    DisplacementLaw l;
    l.kind_ = LawKind::gaussian;
    l.a_ = mean;
    l.b_ = sd;
    return l;
}

DisplacementLaw DisplacementLaw::uniform(double lo, double hi)
{
    return truncated_exponential(lo, hi, 0);
}

DisplacementLaw
DisplacementLaw::truncated_exponential(double lo, double hi, double exponent)
{
    if (!(hi > lo))
        throw ConfigError("bounded law needs hi > lo");
    DisplacementLaw l;
    l.kind_ = LawKind::truncated_exponential;
    l.a_ = lo;
    l.b_ = hi;
    l.p_ = exponent;
    return l;
}

DisplacementLaw DisplacementLaw::two_point(double x1, double x2, double p1)
{
    if (!(p1 > 0 && p1 < 1))
        throw ConfigError("two_point law needs 0 < p < 1");
    DisplacementLaw l;
    l.kind_ = LawKind::two_point;
    l.a_ = x1;
    l.b_ = x2;
    l.p_ = p1;
    return l;
}

DisplacementLaw DisplacementLaw::shifted_exponential(double shift, double rate)
{
    if (!(rate > 0))
        throw ConfigError("shifted_exponential law needs rate > 0");
    DisplacementLaw l;
    l.kind_ = LawKind::shifted_exponential;
    l.a_ = shift;
    l.b_ = rate;
    return l;
}

std::string DisplacementLaw::name() const
{
    switch (kind_)
    {
        case LawKind::gaussian:
            return "gaussian";
        case LawKind::truncated_exponential:
            return p_ == 0 ? "uniform" : "truncated_exponential";
        case LawKind::two_point:
            return "two_point";
        case LawKind::shifted_exponential:
            return "shifted_exponential";
    }
    return "unknown";
}

bool DisplacementLaw::mgf_finite(double t) const
{
    return kind_ != LawKind::shifted_exponential || t < b_;
}

Cumulant DisplacementLaw::cumulant(double t) const
{
    switch (kind_)
    {
        case LawKind::gaussian:
            return {a_ * t + 0.5 * b_ * b_ * t * t, a_ + b_ * b_ * t, b_ * b_};
        case LawKind::truncated_exponential: {
            double m = 0.5 * (a_ + b_), d = 0.5 * (b_ - a_);
            Cumulant num = log_box_integral(t + p_, m, d);
            Cumulant den = log_box_integral(p_, m, d);
            return {num.k - den.k, num.k1, num.k2};
        }
        case LawKind::two_point: {
            double la = std::log(p_) + t * a_;
            double lb = std::log1p(-p_) + t * b_;
            double k = log_sum_exp(la, lb);
            double wa = std::exp(la - k), wb = std::exp(lb - k);
            double k1 = wa * a_ + wb * b_;
            return {k, k1, wa * a_ * a_ + wb * b_ * b_ - k1 * k1};
        }
        case LawKind::shifted_exponential: {
            if (!(t < b_))
                throw DomainError(fmt::format(
                    "shifted_exponential mgf diverges at t={} >= rate={}", t, b_));
            double r = b_ - t;
            return {t * a_ + std::log(b_) - std::log(r), a_ + 1 / r, 1 / (r * r)};
        }
    }
    return {};
}

double DisplacementLaw::lower() const
{
    switch (kind_)
    {
        case LawKind::gaussian:
            return -inf;
        case LawKind::two_point:
            return std::min(a_, b_);
        default:
            return a_;
    }
}

double DisplacementLaw::upper() const
{
    switch (kind_)
    {
        case LawKind::gaussian:
        case LawKind::shifted_exponential:
            return inf;
        case LawKind::two_point:
            return std::max(a_, b_);
        default:
            return b_;
    }
}

double DisplacementLaw::sample(Stream& rng) const
{
    switch (kind_)
    {
        case LawKind::gaussian: {
            std::normal_distribution<double> dist(a_, b_);
            return dist(rng);
        }
        case LawKind::truncated_exponential: {
            double u = rng.uniform();
            if (p_ == 0)
                return a_ + (b_ - a_) * u;
            return a_ + std::log1p(u * std::expm1(p_ * (b_ - a_))) / p_;
        }
        case LawKind::two_point:
            return rng.uniform() < p_ ? a_ : b_;
        case LawKind::shifted_exponential:
            return a_ - std::log(rng.uniform_pos()) / b_;
    }
    return 0;
}

double DisplacementLaw::density(double x) const
{
    switch (kind_)
    {
        case LawKind::gaussian: {
            double z = (x - a_) / b_;
            return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2 * M_PI));
        }
        case LawKind::truncated_exponential: {
            if (x < a_ || x > b_)
                return 0;
            double m = 0.5 * (a_ + b_), d = 0.5 * (b_ - a_);
            return std::exp(p_ * x - log_box_integral(p_, m, d).k);
        }
        case LawKind::two_point:
            return 0;
        case LawKind::shifted_exponential:
            return x < a_ ? 0 : b_ * std::exp(-b_ * (x - a_));
    }
    return 0;
}

DisplacementLaw DisplacementLaw::affine(double scale, double shift) const
{
    if (!(scale > 0))
        throw ConfigError("affine map needs scale > 0");
    DisplacementLaw l = *this;
    switch (kind_)
    {
        case LawKind::gaussian:
            l.a_ = scale * a_ + shift;
            l.b_ = scale * b_;
            break;
        case LawKind::truncated_exponential:
            l.a_ = scale * a_ + shift;
            l.b_ = scale * b_ + shift;
            l.p_ = p_ / scale;
            break;
        case LawKind::two_point:
            l.a_ = scale * a_ + shift;
            l.b_ = scale * b_ + shift;
            break;
        case LawKind::shifted_exponential:
            l.a_ = scale * a_ + shift;
            l.b_ = b_ / scale;
            break;
    }
    return l;
}

DisplacementLaw DisplacementLaw::tilted(double theta) const
{
    DisplacementLaw l = *this;
    switch (kind_)
    {
        case LawKind::gaussian:
            l.a_ = a_ - theta * b_ * b_;
            break;
        case LawKind::truncated_exponential:
            l.p_ = p_ - theta;
            break;
        case LawKind::two_point: {
            double la = std::log(p_) - theta * a_;
            double lb = std::log1p(-p_) - theta * b_;
            l.p_ = std::exp(la - log_sum_exp(la, lb));
            break;
        }
        case LawKind::shifted_exponential:
            if (!(b_ + theta > 0))
                throw DomainError("tilt leaves the exponential domain");
            l.b_ = b_ + theta;
            break;
    }
    return l;
}

//---------------------------------------------------------------------------//
// POINT PROCESS MODEL
//---------------------------------------------------------------------------//
PointProcessModel
PointProcessModel::finite_support(std::vector<DisplacementAtom> atoms,
                                  std::string label,
                                  bool lattice)
{
    PointProcessModel m;
    m.spec_ = std::move(atoms);
    m.label_ = std::move(label);
    m.lattice_ = lattice;
    m.validate_and_index();
    return m;
}

PointProcessModel PointProcessModel::parametric(std::vector<double> offspring,
                                                DisplacementLaw law,
                                                std::string label,
                                                bool lattice,
                                                std::size_t truncation)
{
    PointProcessModel m;
    m.spec_ = ParametricSpec{std::move(offspring), law, truncation};
    m.label_ = std::move(label);
    m.lattice_ = lattice;
    m.validate_and_index();
    return m;
}

void PointProcessModel::validate_and_index()
{
    cumulative_.clear();
    offspring_.clear();
    double total = 0;
    if (auto* atoms = std::get_if<0>(&spec_))
    {
        if (atoms->empty())
            throw ConfigError("model has no atoms");
        for (auto const& a : *atoms)
        {
            if (!(a.weight > 0))
                throw ConfigError("atom weight must be positive");
            for (double x : a.displacements)
                if (!std::isfinite(x))
                    throw ConfigError("atom displacement must be finite");
            total += a.weight;
            cumulative_.push_back(total);
            std::size_t k = a.displacements.size();
            if (offspring_.size() <= k)
                offspring_.resize(k + 1, 0.0);
            offspring_[k] += a.weight;
        }
    }
    else
    {
        auto const& p = std::get<1>(spec_);
        if (p.offspring.empty())
            throw ConfigError("offspring law is empty");
        for (double w : p.offspring)
        {
            if (!(w >= 0))
                throw ConfigError("offspring probabilities must be >= 0");
            total += w;
            cumulative_.push_back(total);
        }
        offspring_ = p.offspring;
        while (offspring_.size() > 1 && offspring_.back() == 0)
            offspring_.pop_back();
    }
    if (std::fabs(total - 1) > 1e-12)
        throw ConfigError(
            fmt::format("probabilities sum to {:.17g}, not 1", total));
    cumulative_.back() = 1.0;
    if (!(this->mean_offspring() > 1))
        throw ConfigError(fmt::format("model is not supercritical: E[nu]={}",
                                      this->mean_offspring()));
}

std::vector<DisplacementAtom> const& PointProcessModel::atoms() const
{
    if (!this->is_finite_support())
        throw AdmissibilityError("model is parametric, not finite support");
    return std::get<0>(spec_);
}

ParametricSpec const& PointProcessModel::parametric_spec() const
{
    if (this->is_finite_support())
        throw AdmissibilityError("model is finite support, not parametric");
    return std::get<1>(spec_);
}

double PointProcessModel::mean_offspring() const
{
    double m = 0;
    for (std::size_t k = 0; k < offspring_.size(); ++k)
        m += k * offspring_[k];
    return m;
}

double PointProcessModel::pgf(double s) const
{
    double r = 0;
    for (std::size_t k = offspring_.size(); k-- > 0;)
        r = r * s + offspring_[k];
    return r;
}

double PointProcessModel::min_displacement() const
{
    if (auto* atoms = std::get_if<0>(&spec_))
    {
        double lo = inf;
        for (auto const& a : *atoms)
            for (double x : a.displacements)
                lo = std::min(lo, x);
        return lo;
    }
    return std::get<1>(spec_).law.lower();
}

double PointProcessModel::max_displacement() const
{
    if (auto* atoms = std::get_if<0>(&spec_))
    {
        double hi = -inf;
        for (auto const& a : *atoms)
            for (double x : a.displacements)
                hi = std::max(hi, x);
        return hi;
    }
    return std::get<1>(spec_).law.upper();
}

void PointProcessModel::sample(Stream& rng, std::vector<double>& out) const
{
    out.clear();
    double u = rng.uniform();
    std::size_t i
        = std::upper_bound(cumulative_.begin(), cumulative_.end(), u)
          - cumulative_.begin();
    i = std::min(i, cumulative_.size() - 1);
    if (auto* atoms = std::get_if<0>(&spec_))
    {
        auto const& d = (*atoms)[i].displacements;
        out.assign(d.begin(), d.end());
        return;
    }
    auto const& law = std::get<1>(spec_).law;
    for (std::size_t k = 0; k < i; ++k)
        out.push_back(law.sample(rng));
}

PointProcessModel PointProcessModel::affine(double scale, double shift) const
{
    PointProcessModel m = *this;
    if (auto* atoms = std::get_if<0>(&m.spec_))
    {
        for (auto& a : *atoms)
            for (double& x : a.displacements)
                x = scale * x + shift;
    }
    else
    {
        auto& p = std::get<1>(m.spec_);
        p.law = p.law.affine(scale, shift);
    }
    return m;
}

PointProcessModel
PointProcessModel::with_normalization(Normalization n, std::string label) const
{
    PointProcessModel m = *this;
    m.normalization_ = n;
    m.label_ = std::move(label);
    return m;
}

//---------------------------------------------------------------------------//
// MOMENTS
//---------------------------------------------------------------------------//
LogMoment log_moment(PointProcessModel const& model, double theta)
{
    if (model.is_finite_support())
    {
        // log-sum-exp over all (atom, child) terms
        double mx = -inf;
        for (auto const& a : model.atoms())
            for (double x : a.displacements)
                mx = std::max(mx, std::log(a.weight) - theta * x);
        if (mx == -inf)
            throw DomainError("model has no children");
        double s0 = 0, s1 = 0, s2 = 0;
        for (auto const& a : model.atoms())
            for (double x : a.displacements)
            {
                double e = std::exp(std::log(a.weight) - theta * x - mx);
                s0 += e;
                s1 += e * x;
                s2 += e * x * x;
            }
        double mean = s1 / s0;
        return {mx + std::log(s0), -mean, s2 / s0 - mean * mean};
    }
    auto const& law = model.parametric_spec().law;
    if (!law.mgf_finite(-theta))
        throw DomainError(fmt::format("Lambda diverges at theta={}", theta));
    Cumulant c = law.cumulant(-theta);
    return {std::log(model.mean_offspring()) + c.k, -c.k1, c.k2};
}

namespace
{
struct MomentSums
{
    MeanAccumulator m1, m2, sigma2, third, zeta, zeta_tilde;
    std::vector<MeanAccumulator> expo;

    void merge(MomentSums const& o)
    {
        m1.merge(o.m1);
        m2.merge(o.m2);
        sigma2.merge(o.sigma2);
        third.merge(o.third);
        zeta.merge(o.zeta);
        zeta_tilde.merge(o.zeta_tilde);
        expo.resize(std::max(expo.size(), o.expo.size()));
        for (std::size_t i = 0; i < o.expo.size(); ++i)
            expo[i].merge(o.expo[i]);
    }
};

// Per-realization functionals; weight multiplies every term
void add_realization(MomentSums& s,
                     std::vector<double> const& xs,
                     std::vector<double> const& exp_a,
                     double weight,
                     bool weighted)
{
    double z = 0, zt = 0, a1 = 0, a2 = 0, a3 = 0;
    std::vector<double> ea(exp_a.size(), 0.0);
    for (double x : xs)
    {
        double e = std::exp(-x);
        z += e;
        zt += std::max(x, 0.0) * e;
        a1 += x * e;
        a2 += x * x * e;
        double xp = std::max(x, 0.0);
        a3 += xp * xp * xp * e;
        for (std::size_t i = 0; i < exp_a.size(); ++i)
            ea[i] += std::exp(exp_a[i] * x);
    }
    auto lz = z > 1 ? std::log(z) : 0.0;
    auto lzt = zt > 1 ? std::log(zt) : 0.0;
    auto put = [&](MeanAccumulator& acc, double v) {
        if (weighted)
            acc.add(weight * v);
        else
            acc.add(v);
    };
    put(s.m1, z);
    put(s.m2, a1);
    put(s.sigma2, a2);
    put(s.third, a3);
    put(s.zeta, z * lz * lz);
    put(s.zeta_tilde, zt * lzt);
    s.expo.resize(exp_a.size());
    for (std::size_t i = 0; i < exp_a.size(); ++i)
        put(s.expo[i], ea[i]);
}

Estimate exact_of(MeanAccumulator const& acc) { return {acc.sum(), 0.0}; }
}  // namespace

BoundaryReport
check_boundary(PointProcessModel const& model, BoundaryOptions const& opts)
{
    BoundaryReport r;
    r.tol = opts.tol;
    bool exact = model.is_finite_support() && !opts.force_monte_carlo;

    MomentSums sums;
    if (exact)
    {
        for (auto const& a : model.atoms())
            add_realization(sums, a.displacements, opts.exp_a, a.weight, true);
        r.mode = EvaluationMode::exact;
        r.m1 = exact_of(sums.m1);
        r.m2 = exact_of(sums.m2);
        r.sigma2 = exact_of(sums.sigma2);
        r.third_plus = exact_of(sums.third);
        r.zeta_log2 = exact_of(sums.zeta);
        r.zeta_tilde_log = exact_of(sums.zeta_tilde);
        for (std::size_t i = 0; i < opts.exp_a.size(); ++i)
            r.exp_moment.emplace_back(opts.exp_a[i], exact_of(sums.expo[i]));
        r.passes.boundary = std::fabs(r.m1.value - 1) <= opts.tol
                            && std::fabs(r.m2.value) <= opts.tol;
        r.passes.sigma2_finite = r.sigma2.value > 0;
        r.passes.integrability = true;
        r.passes.third_moment = true;
        return r;
    }

    sums = reduce_chunks<MomentSums>(
        opts.mc_budget, [&](std::size_t begin, std::size_t end) {
            MomentSums s;
            std::vector<double> xs;
            for (std::size_t i = begin; i < end; ++i)
            {
                Stream rng = Stream::root(opts.seed, i, tag::moments);
                model.sample(rng, xs);
                add_realization(s, xs, opts.exp_a, 1.0, false);
            }
            return s;
        });
    r.mode = EvaluationMode::monte_carlo;
    r.m1 = sums.m1.estimate();
    r.m2 = sums.m2.estimate();
    r.sigma2 = sums.sigma2.estimate();
    r.third_plus = sums.third.estimate();
    r.zeta_log2 = sums.zeta.estimate();
    r.zeta_tilde_log = sums.zeta_tilde.estimate();
    for (std::size_t i = 0; i < opts.exp_a.size(); ++i)
        r.exp_moment.emplace_back(opts.exp_a[i], sums.expo[i].estimate());

    if (!model.is_finite_support() && !opts.force_monte_carlo)
    {
        // closed-form MGF gives the first three weighted moments exactly
        LogMoment lm = log_moment(model, 1.0);
        double m1 = std::exp(lm.value);
        r.m1 = {m1, 0};
        r.m2 = {-lm.d1 * m1, 0};
        r.sigma2 = {(lm.d2 + lm.d1 * lm.d1) * m1, 0};
        for (auto& [a, e] : r.exp_moment)
        {
            try
            {
                e = {std::exp(log_moment(model, -a).value), 0};
            }
            catch (DomainError const&)
            {
                e = {inf, 0};
            }
        }
    }

    auto within = [&](Estimate const& e, double target) {
        if (e.se == 0)
            return std::fabs(e.value - target) <= opts.tol;
        return std::fabs(e.value - target) <= 3 * e.se;
    };
    r.passes.boundary = within(r.m1, 1.0) && within(r.m2, 0.0);
    r.passes.sigma2_finite = r.sigma2.value > 0 && std::isfinite(r.sigma2.value);
    auto stable = [](Estimate const& e) {
        return std::isfinite(e.value) && (e.value == 0 || e.se <= 0.1 * e.value);
    };
    if (stable(r.zeta_log2) && stable(r.zeta_tilde_log))
        r.passes.integrability = true;
    if (stable(r.third_plus))
        r.passes.third_moment = true;
    return r;
}

//---------------------------------------------------------------------------//
// REDUCTION
//---------------------------------------------------------------------------//
PointProcessModel normalize_to_boundary(PointProcessModel const& model)
{
    auto f = [&](double theta) {
        LogMoment lm = log_moment(model, theta);
        return theta * lm.d1 - lm.value;
    };

    // geometric scan on [1e-4, 64]
    constexpr int npts = 512;
    double const lo = 1e-4, hi = 64.0;
    double ratio = std::pow(hi / lo, 1.0 / (npts - 1));
    double prev_t = 0, prev_f = 0;
    bool have_prev = false, any_curvature = false;
    double bracket_lo = 0, bracket_hi = 0;
    bool found = false;
    for (int i = 0; i < npts && !found; ++i)
    {
        double t = lo * std::pow(ratio, i);
        double ft;
        try
        {
            LogMoment lm = log_moment(model, t);
            if (lm.d2 > 1e-14)
                any_curvature = true;
            ft = t * lm.d1 - lm.value;
        }
        catch (DomainError const&)
        {
            have_prev = false;
            continue;
        }
        if (ft == 0)
        {
            bracket_lo = bracket_hi = t;
            found = true;
            break;
        }
        if (have_prev && (prev_f < 0) != (ft < 0))
        {
            bracket_lo = prev_t;
            bracket_hi = t;
            found = true;
        }
        prev_t = t;
        prev_f = ft;
        have_prev = true;
    }
    if (!any_curvature)
        throw DegenerateError(
            "tilted displacement variance is zero: reduction impossible");
    if (!found)
        throw NoRootError(
            "theta Lambda'(theta) - Lambda(theta) has no sign change on "
            "[1e-4, 64]");

    double a = bracket_lo, b = bracket_hi;
    double fa = f(a);
    while (b - a > 0)
    {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        double fm = f(m);
        if (fm == 0)
        {
            a = b = m;
            break;
        }
        if ((fm < 0) == (fa < 0))
        {
            a = m;
            fa = fm;
        }
        else
        {
            b = m;
        }
    }
    double theta = 0.5 * (a + b);
    double shift = log_moment(model, theta).value;

    PointProcessModel out = model.affine(theta, shift);
    std::string label = fmt::format("{} [theta*={:.12g}, shift={:.12g}]",
                                    model.label(),
                                    theta,
                                    shift);
    return out.with_normalization({theta, shift}, label);
}

//---------------------------------------------------------------------------//
// EXTINCTION
//---------------------------------------------------------------------------//
std::vector<double>
extinction_iterates(PointProcessModel const& model, double tol)
{
    std::vector<double> it{0.0};
    for (int i = 0; i < 100000000; ++i)
    {
        double next = std::min(1.0, model.pgf(it.back()));
        it.push_back(next);
        if (std::fabs(next - it[it.size() - 2]) < tol)
            break;
    }
    return it;
}

double extinction_probability(PointProcessModel const& model, double tol)
{
    return extinction_iterates(model, tol).back();
}

std::vector<double>
extinction_by_generation(PointProcessModel const& model, std::size_t n_max)
{
    std::vector<double> q(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n)
        q[n] = std::min(1.0, model.pgf(q[n - 1]));
    return q;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
