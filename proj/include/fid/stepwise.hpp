#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fid/distributions.hpp"
#include "fid/fiducial1d.hpp"

namespace fid {

// One step of a conditional chain: the distribution function of the k-th
// statistic as a function of its own parameter, given the parameters already
// handled by earlier steps.
struct StepComponent {
    std::string param;
    std::function<ParamCurve(std::span<const double> earlier)> curve;
    // Closed-form law of this step for a variant, or nullptr.
    std::function<DistPtr(std::span<const double> earlier, FiducialVariant)> closed;
};

// Components in importance order: the first one is the parameter of interest.
struct StepChain {
    std::string key;
    std::vector<StepComponent> components;
    std::string ancillary;  // description of the conditioning statistic, if any

    std::size_t dim() const { return components.size(); }
};

class JointFiducial {
public:
    using Factory = std::function<DistPtr(std::span<const double> earlier)>;

    JointFiducial(std::vector<std::string> names, std::vector<Factory> factories, std::string name);

    std::size_t dim() const { return factories_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name() const { return name_; }

    // Law of component k given the first k components.
    DistPtr conditional(std::size_t k, std::span<const double> earlier) const;

    // Sum of conditional log densities.
    double log_pdf(std::span<const double> phi) const;
    double pdf(std::span<const double> phi) const;

    // Sequential inverse-cdf draw.
    std::vector<double> sample(Rng& rng) const;
    std::vector<std::vector<double>> sample_many(std::size_t count, std::uint64_t seed) const;

private:
    std::vector<std::string> names_;
    std::vector<Factory> factories_;
    std::string name_;
    DistPtr first_;  // the marginal of interest, built once
};

struct JointOptions {
    FiducialVariant variant = FiducialVariant::Right;
    bool use_closed_form = true;
    double tol = kDefaultQuadTol;
};

JointFiducial build_joint(const StepChain& chain, const JointOptions& opts = {});
DistPtr marginal_of_interest(const JointFiducial& joint);

// Curve of the same statistic with the parameter moved through a monotone map.
ParamCurve reparameterize(const ParamCurve& base, const MonotoneMap& base_to_phi);

// Statistic distributed N(a + b phi, sd^2).
ParamCurve normal_mean_curve(double obs, double a, double b, double sd);

// Standardised error laws for location and scale models.
struct StandardFamily {
    enum class Kind { Normal, Cauchy, Logistic, Uniform, Exponential };
    Kind kind = Kind::Normal;
    double scale = 1.0;  // a known scale factor, e.g. sigma for a known-variance normal

    double log_pdf(double z) const;
    double cdf(double z) const;
    Interval support() const;
    std::string name() const;
};

StandardFamily standard_family(const std::string& name, double scale = 1.0);

// X_i = theta + e_i. Conditions on the configuration x_i - x_1.
StepChain location_chain(const StandardFamily& f0, std::span<const double> x);
// X_i = theta * e_i with e_i > 0. Conditions on x_i / x_1.
StepChain scale_chain(const StandardFamily& f0, std::span<const double> x);
// X_i = theta + sigma e_i, parameters ordered (sigma, theta). Conditions on
// the sign of x_2 - x_1 and the configuration (x_j - x_1) / (x_2 - x_1).
StepChain location_scale_chain(const StandardFamily& f0, std::span<const double> x);
// Normal (sigma, theta) through the sample mean and sum of squares.
StepChain normal_sufficient_chain(std::span<const double> x);

DistPtr location_fiducial(const StandardFamily& f0, std::span<const double> x);
DistPtr scale_fiducial(const StandardFamily& f0, std::span<const double> x);
JointFiducial location_scale_fiducial(const StandardFamily& f0, std::span<const double> x);

// Catalog chains.
StepChain diff_means_chain(int n, double sigma2, double s1, double s2);
StepChain neyman_scott_chain(std::span<const double> xbar, double w);
StepChain poisson_ratio_chain(int n, double s1, double s2, bool reversed = false);
StepChain bivariate_binomial_chain(int m, int r, int s);
StepChain trinomial_ratio_chain(int n, int x1, int x2);
StepChain uniform_shift_chain(std::span<const double> x, bool full_sample);
StepChain uniform_scale_chain(std::span<const double> x, bool full_sample);

struct ChainRequest {
    std::map<std::string, double> params;
    std::vector<double> x;
    std::string route;  // "full" or "sufficient" where both exist
    bool reversed = false;
};

StepChain catalog_chain(const std::string& key, const ChainRequest& req);
std::vector<std::string> catalog_chain_keys();

// phi -> lambda with lambda_k depending on phi_1..phi_k only.
struct TriangularMap {
    std::function<std::vector<double>(std::span<const double>)> forward;
    std::function<std::vector<double>(std::span<const double>)> inverse;
    std::vector<std::string> names;
    // Range of lambda_k given lambda_1..lambda_{k-1}; derived from the base
    // support when empty.
    std::function<Interval(std::size_t, std::span<const double>)> image;
};

// Throws DomainError when the map or its inverse is not lower triangular on
// points drawn from the joint.
JointFiducial pushforward_lower_triangular(const JointFiducial& joint, const TriangularMap& map,
                                           std::uint64_t probe_seed = 7);

struct SufficiencyReport {
    double cdf_gap = 0.0;  // sup over probes of conditional cdf differences
    double pdf_gap = 0.0;
    std::size_t points = 0;
};

// Compares every conditional of the two joints at points drawn from the first
// (plus an even quantile grid when d = 1). Equal conditionals at all points
// means equal joints.
SufficiencyReport sufficiency_check(const StepChain& full, const StepChain& reduced, const JointOptions& opts = {},
                                    std::size_t probes = 200, std::uint64_t seed = 3);

}  // namespace fid
