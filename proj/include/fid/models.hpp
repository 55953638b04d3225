#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fid/numerics.hpp"

namespace fid {

enum class Family {
    NormalKnownVar,    // theta = mean, fixed sigma2
    NormalKnownMean,   // theta = variance, fixed mu
    Gamma,             // theta = rate, fixed alpha (shape)
    Pareto,            // theta = shape, fixed x0
    Weibull,           // theta = rate in c*l*x^{c-1} exp(-l x^c), fixed c
    Binomial,          // theta = p, fixed m
    Poisson,           // theta = mean
    NegativeBinomial,  // theta = success probability p, fixed m; counts failures
    Logarithmic,       // theta in (0,1)
    TruncatedExponential,  // theta real, density theta e^{-theta x}/(1-e^{-theta}) on (0,1)
    UniformScale,      // U(0, theta)
    UniformShift,      // U(theta, theta + 1)
    UniformLocScale,   // U(theta, theta + sigma), two parameters
    NormalLocScale,    // N(theta, sigma^2), two parameters
};

struct ModelSpec {
    Family family;
    std::map<std::string, double> fixed;
    Interval param_space;
    bool discrete = false;
    int param_dim = 1;

    double get(const std::string& name) const;
};

ModelSpec make_model(Family family, std::map<std::string, double> fixed = {});
ModelSpec model_from_key(const std::string& key, std::map<std::string, double> fixed = {});
std::string model_key(Family family);
std::vector<std::string> model_keys();

// Sufficient statistic S for a raw sample, accumulated with compensated summation.
// UniformScale uses X_(n); UniformShift uses X_(1).
double sufficient_statistic(const ModelSpec& model, std::span<const double> x);
std::string sufficient_statistic_name(const ModelSpec& model);

// Support of S for a sample of size n.
Interval stat_support(const ModelSpec& model, int n);

// True when F_theta(s) decreases as theta grows.
bool cdf_decreasing(const ModelSpec& model);

// Distribution of S under theta.
double stat_cdf(const ModelSpec& model, int n, double theta, double s);        // Pr{S <= s}
double stat_cdf_below(const ModelSpec& model, int n, double theta, double s);  // Pr{S < s}
double stat_pdf(const ModelSpec& model, int n, double theta, double s);
double stat_log_pdf(const ModelSpec& model, int n, double theta, double s);
// Analytic partial derivatives in theta.
double stat_dcdf(const ModelSpec& model, int n, double theta, double s);
double stat_dcdf_below(const ModelSpec& model, int n, double theta, double s);
double stat_dpdf(const ModelSpec& model, int n, double theta, double s);
// Mean of S under theta.
double stat_mean(const ModelSpec& model, int n, double theta);

double stat_sample(const ModelSpec& model, int n, double theta, Rng& rng);
double stat_sample(const ModelSpec& model, int n, double theta, std::uint64_t seed);

// Raw observations. Two-parameter families take theta = {location, scale}.
std::vector<double> sample_observations(const ModelSpec& model, int n, std::span<const double> theta,
                                        Rng& rng);

// Single-observation pieces used by the generalized fiducial density.
double obs_log_pdf(const ModelSpec& model, std::span<const double> theta, double x);
double obs_cdf(const ModelSpec& model, std::span<const double> theta, double x);
std::vector<double> obs_dcdf(const ModelSpec& model, std::span<const double> theta, double x);

// |s(t, n)|, unsigned Stirling numbers of the first kind.
boost::multiprecision::cpp_int stirling_first_kind_abs(int t, int n);
double log_stirling_first_kind_abs(int t, int n);

}  // namespace fid
