#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fid/distributions.hpp"
#include "fid/models.hpp"

namespace fid {

enum class FiducialVariant { Right, Left, Arithmetic, Geometric };

std::string variant_name(FiducialVariant v);
FiducialVariant variant_from_name(const std::string& name);

// A family of distribution functions for an observed statistic t, viewed as a
// function of one parameter phi. Everything one-dimensional in the library
// reduces to this: a sufficient statistic of a catalog model, or one step of a
// conditional chain.
struct ParamCurve {
    std::function<double(double)> cdf;         // Pr_phi{T <= t}
    std::function<double(double)> cdf_below;   // Pr_phi{T < t}; same as cdf when continuous
    std::function<double(double)> dcdf;       // d/dphi of cdf
    std::function<double(double)> dcdf_below;  // d/dphi of cdf_below
    Interval space;
    bool decreasing = true;  // cdf decreases as phi grows
    bool discrete = false;
    bool right_proper = true;
    bool left_proper = true;
    double guess = std::numeric_limits<double>::quiet_NaN();  // a point inside the bulk
    std::string name;
};

// Curve for the sufficient statistic of a one-parameter catalog model.
ParamCurve model_curve(const ModelSpec& model, int n, double s);

struct FiducialOptions {
    bool use_closed_form = true;
    double tol = kDefaultQuadTol;
};

class Fiducial1D : public Distribution1D {
public:
    Fiducial1D(ParamCurve curve, FiducialVariant variant, DistPtr closed_form, double tol = kDefaultQuadTol);

    double pdf(double x) const override;
    double cdf(double x) const override;
    Interval support() const override { return curve_.space; }
    std::string describe() const override;
    double quantile(double u) const override;
    double center() const override { return center_; }
    double mean() const override;

    // Cdf on many points at once. Geometric integrates between consecutive
    // sorted points instead of restarting from the edge each time.
    std::vector<double> cdf_many(const std::vector<double>& xs) const;

    FiducialVariant variant() const { return variant_; }
    const ParamCurve& curve() const { return curve_; }
    // Closed-form law when one applies (and use_closed_form was set).
    const DistPtr& closed_form() const { return closed_; }
    // Normalising constant of the geometric mean density.
    std::optional<double> norm_constant() const;

    // Unnormalised pieces.
    double right_cdf(double x) const;
    double left_cdf(double x) const;
    double right_pdf(double x) const;
    double left_pdf(double x) const;

private:
    double geo_unnormalized(double x) const;
    double geo_mass(double a, double b) const;

    ParamCurve curve_;
    FiducialVariant variant_;
    DistPtr closed_;
    double tol_;
    double center_ = 0.0;
    double norm_ = 1.0;
};

using FidPtr = std::shared_ptr<const Fiducial1D>;

FidPtr make_fiducial(ParamCurve curve, FiducialVariant variant, DistPtr closed_form = nullptr,
                     double tol = kDefaultQuadTol);

FidPtr fiducial(const ModelSpec& model, int n, double s, FiducialVariant variant,
                const FiducialOptions& opts = {});
FidPtr fiducial_right(const ModelSpec& model, int n, double s, const FiducialOptions& opts = {});
FidPtr fiducial_left(const ModelSpec& model, int n, double s, const FiducialOptions& opts = {});
FidPtr fiducial_geometric(const ModelSpec& model, int n, double s, const FiducialOptions& opts = {});
FidPtr fiducial_arithmetic(const ModelSpec& model, int n, double s, const FiducialOptions& opts = {});

// Closed-form fiducial law for the catalog rows that have one, else nullptr.
DistPtr closed_form_fiducial(const ModelSpec& model, int n, double s, FiducialVariant variant);

// (d p_theta(s) / d theta) / (-d F_theta(s) / d theta) for discrete models.
// The ratio is the same in any smooth reparameterisation.
double gamma_ratio(const ModelSpec& model, int n, double s, double theta);

}  // namespace fid
