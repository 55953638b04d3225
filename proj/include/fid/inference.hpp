#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fid/distributions.hpp"
#include "fid/fiducial1d.hpp"
#include "fid/models.hpp"
#include "fid/stepwise.hpp"

namespace fid {

struct ConfidenceCurve {
    std::vector<double> grid;
    std::vector<double> values;  // |1 - 2 C(phi)|
    std::string source;
};

ConfidenceCurve confidence_curve(const Distribution1D& dist, const Grid& grid);

// (q_{a/2}, q_{1-a/2}) with a = 1 - level.
std::pair<double, double> equal_tail_interval(const Distribution1D& dist, double level);

inline const std::vector<double> kCoverageLevels{0.5, 0.8, 0.9, 0.95, 0.99};

struct CoverageReport {
    std::string model;
    double theta0 = 0.0;
    std::vector<double> levels;
    std::vector<double> coverage;
    std::vector<double> mean_length;  // empty unless lengths were requested
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double ks = 0.0;  // distance of the PIT sample from U(0,1)
    std::vector<double> pit;
    std::size_t boundary_fallbacks = 0;  // replicates where the variant was improper
};

// One replicate: simulate data with the given generator and return the
// confidence distribution built from it.
using ReplicateBuilder = std::function<DistPtr(Rng&)>;

// Replicate i draws from stream (seed, i), so results do not depend on order.
CoverageReport pit_study(const std::string& label, double theta0, const ReplicateBuilder& build,
                         std::size_t replicates, std::uint64_t seed, const std::vector<double>& levels = kCoverageLevels,
                         bool with_lengths = false);

// Simulates S for a catalog model and builds the fiducial of the given variant,
// or the proper member of the pair when S falls on the boundary.
CoverageReport pit_uniformity(const ModelSpec& model, int n, double theta0, FiducialVariant variant,
                              std::size_t replicates, std::uint64_t seed,
                              const std::vector<double>& levels = kCoverageLevels, bool with_lengths = false);

struct RiskReport {
    std::string model;
    int n = 0;
    std::vector<double> mu;
    std::vector<double> gap;  // R(mu, H^A) - R(mu, H^G)
    double analytic = 0.0;
    double truncation_bound = 0.0;  // added to any comparison tolerance
    double max_mean_difference = 0.0;  // |E^A mu - E^G mu| over the summed statistics
};

// Binomial (m = 1), negative binomial (m = 1) or Poisson, risk in the mean of
// one observation. Exact summation over S.
RiskReport confidence_risk_gap(const ModelSpec& model, int n, std::vector<double> mu_grid = {});
double risk_gap_formula(const ModelSpec& model, int n);

enum class Prior { Jeffreys, Reference, Flat, OneOverTheta };

Prior prior_from_name(const std::string& name);
std::string prior_name(Prior p);
// log prior density (up to a constant) in the model's parameter.
double log_prior(const ModelSpec& model, Prior prior, double theta);

// Normalised likelihood x prior from the sufficient statistic.
DistPtr bayes_posterior(const ModelSpec& model, Prior prior, int n, double s);
// Same from the raw sample, for continuous models (uniform shift needs both extremes).
DistPtr bayes_posterior_sample(const ModelSpec& model, Prior prior, std::span<const double> x);
// Normalised exp(log_post) on support.
DistPtr posterior_from_log(std::function<double(double)> log_post, Interval support, std::vector<double> breaks,
                           const std::string& name);

// X_i = theta + sigma e_i with prior 1/sigma: marginal posteriors of sigma and
// theta, each integrating the other parameter out numerically.
std::pair<DistPtr, DistPtr> location_scale_posterior(const StandardFamily& f0, std::span<const double> x);

// sup over the grid of |F_fid - F_post|.
double fiducial_bayes_gap(const Distribution1D& fid, const Distribution1D& post, const std::vector<double>& grid);

}  // namespace fid
