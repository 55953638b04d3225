#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fid/numerics.hpp"

namespace fid {

// An immutable univariate law over a parameter.
class Distribution1D {
public:
    virtual ~Distribution1D() = default;

    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual Interval support() const = 0;
    virtual std::string describe() const = 0;

    // Generic inversion of cdf; closed forms override with library quantiles.
    virtual double quantile(double u) const;
    // Inverse-cdf draw.
    virtual double sample(Rng& rng) const { return quantile(uniform01(rng)); }
    // A point near the centre of mass used to seed bracketing.
    virtual double center() const;
    // Mean, when finite. Numeric fallback integrates x * pdf.
    virtual double mean() const;
    virtual double log_pdf(double x) const;
};

using DistPtr = std::shared_ptr<const Distribution1D>;

DistPtr normal_dist(double mean, double sd);
// Shape/rate parameterisation: mean shape / rate.
DistPtr gamma_dist(double shape, double rate);
// If X ~ gamma(shape, rate) then 1/X ~ inverse_gamma(shape, rate).
DistPtr inverse_gamma_dist(double shape, double rate);
DistPtr beta_dist(double a, double b);
// Law of U / (1 - U) for U ~ beta(a, b).
DistPtr beta_prime_dist(double a, double b);
DistPtr uniform_dist(double lo, double hi);
// Density k * lo^k / x^{k+1} on (lo, inf).
DistPtr pareto_dist(double lo, double k);

// Normalised version of an unnormalised log density on `support`. Mass is
// found by adaptive quadrature, split at `breaks` (typically the mode).
class NumericDensity : public Distribution1D {
public:
    NumericDensity(std::function<double(double)> log_density, Interval support,
                   std::vector<double> breaks, std::string name, double tol = kDefaultQuadTol);

    double pdf(double x) const override;
    double log_pdf(double x) const override;
    double cdf(double x) const override;
    Interval support() const override { return support_; }
    std::string describe() const override { return name_; }
    double center() const override { return pivot_; }

    double log_normalizer() const { return log_norm_; }
    double unnormalized(double x) const;

private:
    double mass(double a, double b) const;

    std::function<double(double)> log_density_;
    Interval support_;
    std::vector<double> breaks_;
    std::string name_;
    double tol_;
    double shift_ = 0.0;    // log-scale offset applied before exponentiating
    double log_norm_ = 0.0;  // log of the integral of exp(log_density)
    double pivot_ = 0.0;
    double mass_below_pivot_ = 0.0;
};

// Law of y = g(x) for x ~ base with g strictly monotone.
struct MonotoneMap {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    // d inverse / dy
    std::function<double(double)> inverse_derivative;
    bool increasing = true;
    Interval image;
    std::string name;
};

DistPtr transformed(DistPtr base, MonotoneMap map);

// Equal-weight mixture; used for the half-corrected fiducial.
DistPtr mixture(std::vector<DistPtr> parts, std::vector<double> weights);

// Common maps.
MonotoneMap logit_map();            // (0,1) -> R
MonotoneMap log_map();              // (0,inf) -> R
MonotoneMap odds_map();             // (0,1) -> (0,inf), u/(1-u)
MonotoneMap log_one_minus_map();    // (0,1) -> (-inf,0), log(1-u)
MonotoneMap affine_map(double a, double b);  // x -> a x + b, a != 0
MonotoneMap negate_map();

}  // namespace fid
