#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fid/stepwise.hpp"

namespace fid {

// Basic families whose joint law factorises into one-parameter conditionals
// S_k | S_1..S_{k-1}, each an exponential family in its own phi_k.
enum class CrNefFamily {
    PoissonNormal,       // m Poisson cells then d - m normal cells with known variance sigma2
    Multinomial,         // d free cells out of N trials
    NegativeMultinomial, // d counting cells, R occurrences in the stopping cell
    NegMultGammaNormal,  // m negative-multinomial cells, one gamma cell, d - m - 1 normal cells
};

struct CrNefSpec {
    CrNefFamily family = CrNefFamily::Multinomial;
    int d = 1;
    int m = 0;           // Poisson cells, or negative-multinomial cells
    double N = 1.0;      // multinomial trials per observation
    double R = 1.0;      // negative-multinomial stopping count
    double sigma2 = 1.0; // normal cells of PoissonNormal

    double q() const;       // quadratic coefficient of the variance function
    double z(int k) const;  // 1 for counting cells, 0 otherwise (k is 0-based)
    std::string name() const;
};

CrNefSpec crnef_spec(const std::string& key, int d, const std::map<std::string, double>& params);
std::vector<std::string> crnef_keys();

// Parameter conversions. phi_k is the natural parameter of the k-th
// conditional; mu is the mean of one observation; theta is the natural
// parameter of the joint family.
std::vector<double> mu_of_phi(const CrNefSpec& spec, std::span<const double> phi);
std::vector<double> phi_of_mu(const CrNefSpec& spec, std::span<const double> mu);
std::vector<double> theta_of_phi(const CrNefSpec& spec, std::span<const double> phi);
std::vector<double> phi_of_theta(const CrNefSpec& spec, std::span<const double> theta);

// phi_k = log(p_k / (1 - p_1 - ... - p_k)).
std::vector<double> phi_of_p_multinomial(std::span<const double> p);
std::vector<double> p_of_phi_multinomial(std::span<const double> phi);

// Independent per-cell fiducials for phi given the sample total s.
JointFiducial joint_fiducial_phi(const CrNefSpec& spec, int n, std::span<const double> s, FiducialVariant variant,
                                 bool use_closed_form = true);
// Same construction carried to the mean parameter, in cell order.
JointFiducial joint_fiducial_mu(const CrNefSpec& spec, int n, std::span<const double> s, FiducialVariant variant,
                                bool use_closed_form = true);
// Map phi -> mu as a triangular map for pushforward checks.
TriangularMap mu_map(const CrNefSpec& spec);

// Geometric fiducial for multinomial cell probabilities, built by sequential
// conditional steps.
JointFiducial multinomial_p_geometric(double N, int n, std::span<const double> s);
// Closed generalized Dirichlet log density of the same law.
double generalized_dirichlet_log_pdf(double N, int n, std::span<const double> s, std::span<const double> p);
// Draws p by sequential beta variates.
std::vector<std::vector<double>> sample_generalized_dirichlet(double N, int n, std::span<const double> s,
                                                              std::size_t count, std::uint64_t seed);

// Log density (up to a constant) of the prior whose posterior is the
// geometric fiducial: the s = n = 0 limit of the per-cell densities.
double fiducial_prior_log_pdf(const CrNefSpec& spec, std::span<const double> phi);
// Log likelihood of the sample total s in the phi parameterisation.
double crnef_log_likelihood(const CrNefSpec& spec, int n, std::span<const double> s, std::span<const double> phi);

}  // namespace fid
