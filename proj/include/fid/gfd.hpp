#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fid/distributions.hpp"
#include "fid/fiducial1d.hpp"
#include "fid/models.hpp"

namespace fid {

// Subset enumeration is exact and refused for larger samples.
inline constexpr int kGfdMaxSample = 20;

// Sum over index subsets {i_1..i_d} of |det(dF_theta(x_{i_j}) / dtheta_k)| / prod f_theta(x_{i_j}).
double jacobian_J(const ModelSpec& model, std::span<const double> x, std::span<const double> theta);
double log_jacobian_J(const ModelSpec& model, std::span<const double> x, std::span<const double> theta);

// log f_theta(x) + log J(x, theta), any parameter dimension.
double gfd_log_unnormalized(const ModelSpec& model, std::span<const double> x, std::span<const double> theta);

// Normalised generalized fiducial density of a one-parameter model, built
// from the raw sample (not reduced to the sufficient statistic).
struct GfdResult {
    std::shared_ptr<const NumericDensity> density;
    double log_normalizer = 0.0;
    std::vector<double> sample;

    double log_unnormalized(const ModelSpec& model, double theta) const;
};

GfdResult gfd_density(const ModelSpec& model, std::span<const double> x, double tol = kDefaultQuadTol);

// Parameter range where the density can be positive for this sample.
Interval gfd_support(const ModelSpec& model, std::span<const double> x);

struct GfdCurveRow {
    double theta, r, h, cc_r, cc_h;
};

struct GfdComparison {
    double cdf_gap = 0.0;  // sup over the grid of |R(theta) - H(theta)|
    std::pair<double, double> r_interval, h_interval;
    std::vector<GfdCurveRow> rows;
};

// r from the raw sample against the right fiducial h_s of the sufficient
// statistic, on `grid` (an automatic grid when empty).
GfdComparison compare_gfd_vs_stepwise(const ModelSpec& model, std::span<const double> x, double level = 0.95,
                                      std::vector<double> grid = {});

}  // namespace fid
