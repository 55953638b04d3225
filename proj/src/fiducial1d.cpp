#include "fid/fiducial1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fid {

std::string variant_name(FiducialVariant v) {
    switch (v) {
        case FiducialVariant::Right: return "right";
        case FiducialVariant::Left: return "left";
        case FiducialVariant::Arithmetic: return "arithmetic";
        case FiducialVariant::Geometric: return "geometric";
    }
    return "?";
}

FiducialVariant variant_from_name(const std::string& name) {
    if (name == "right") return FiducialVariant::Right;
    if (name == "left") return FiducialVariant::Left;
    if (name == "arithmetic") return FiducialVariant::Arithmetic;
    if (name == "geometric") return FiducialVariant::Geometric;
    throw UnsupportedError("unknown fiducial variant '" + name + "'");
}

namespace {

double default_guess(const Interval& space) {
    if (space.bounded()) return 0.5 * (space.lo + space.hi);
    if (space.lo > -kInf) return space.lo + std::max(1.0, std::fabs(space.lo));
    if (space.hi < kInf) return space.hi - std::max(1.0, std::fabs(space.hi));
    return 0.0;
}

}  // namespace

ParamCurve model_curve(const ModelSpec& model, int n, double s) {
    if (model.param_dim != 1) throw DomainError("model has more than one parameter");
    if (n < 1) throw DomainError("sample size must be at least 1");
    Interval sup = stat_support(model, n);
    ParamCurve c;
    c.space = model.param_space;
    c.decreasing = cdf_decreasing(model);
    c.discrete = model.discrete;
    if (model.discrete) {
        if (std::fabs(s - std::round(s)) > 1e-9) throw DomainError("discrete statistic must be an integer");
        s = std::round(s);
        if (s < sup.lo || s > sup.hi) throw DomainError("statistic outside its support");
        c.right_proper = s < sup.hi;
        c.left_proper = s > sup.lo;
    } else if (!sup.contains(s)) {
        throw BoundaryError("statistic must lie inside the support of S");
    }

    c.cdf = [model, n, s](double th) { return stat_cdf(model, n, th, s); };
    c.dcdf = [model, n, s](double th) { return stat_dcdf(model, n, th, s); };
    if (model.discrete) {
        c.cdf_below = [model, n, s](double th) { return stat_cdf_below(model, n, th, s); };
        c.dcdf_below = [model, n, s](double th) { return stat_dcdf_below(model, n, th, s); };
    } else {
        c.cdf_below = c.cdf;
        c.dcdf_below = c.dcdf;
    }

    double M = 0.0;
    switch (model.family) {
        case Family::NormalKnownVar:
        case Family::NormalKnownMean: c.guess = s / n; break;
        case Family::Gamma: c.guess = n * model.get("alpha") / s; break;
        case Family::Pareto:
        case Family::Weibull: c.guess = n / s; break;
        case Family::Binomial:
            M = n * model.get("m");
            c.guess = (s + 0.5) / (M + 1.0);
            break;
        case Family::Poisson: c.guess = (s + 0.5) / n; break;
        case Family::NegativeBinomial:
            M = n * model.get("m");
            c.guess = M / (M + s + 0.5);
            break;
        case Family::Logarithmic: c.guess = 0.5; break;
        case Family::TruncatedExponential: c.guess = 0.0; break;
        case Family::UniformScale:
            c.space = {s, kInf};
            c.guess = s * (1.0 + 1.0 / n);
            break;
        case Family::UniformShift:
            c.space = {s - 1.0, s};
            c.guess = s - 0.5;
            break;
        default: break;
    }
    std::ostringstream os;
    os << model_key(model.family) << " n=" << n << " s=" << s;
    c.name = os.str();
    return c;
}

Fiducial1D::Fiducial1D(ParamCurve curve, FiducialVariant variant, DistPtr closed_form, double tol)
    : curve_(std::move(curve)), variant_(variant), closed_(std::move(closed_form)), tol_(tol) {
    bool need_right = variant_ != FiducialVariant::Left;
    bool need_left = variant_ != FiducialVariant::Right;
    if (need_right && !curve_.right_proper) {
        throw BoundaryError("right fiducial is improper at this statistic (" + curve_.name + ")");
    }
    if (need_left && !curve_.left_proper) {
        throw BoundaryError("left fiducial is improper at this statistic (" + curve_.name + ")");
    }
    if (!curve_.discrete) {
        // both members coincide for continuous data
        curve_.cdf_below = curve_.cdf;
        curve_.dcdf_below = curve_.dcdf;
    }

    double guess = std::isfinite(curve_.guess) ? curve_.guess : default_guess(curve_.space);
    if (!curve_.space.contains(guess)) guess = default_guess(curve_.space);
    if (closed_) {
        center_ = closed_->quantile(0.5);
    } else if (variant_ != FiducialVariant::Geometric) {
        // only a starting point for quantile searches
        center_ = guess;
    } else {
        auto med = [&](const std::function<double(double)>& H) {
            return find_root_expanding(H, 0.5, guess, curve_.space, 1e-12);
        };
        if (curve_.right_proper) {
            center_ = med([this](double x) { return right_cdf(x); });
        } else {
            center_ = med([this](double x) { return left_cdf(x); });
        }
    }

    if (variant_ == FiducialVariant::Geometric && !closed_) {
        double below = geo_mass(curve_.space.lo, center_);
        double above = geo_mass(center_, curve_.space.hi);
        norm_ = below + above;
        if (!(norm_ > 0.0) || !std::isfinite(norm_)) {
            throw ConvergenceError("geometric fiducial: normalising constant is not finite and positive");
        }
    }
}

double Fiducial1D::right_cdf(double x) const {
    if (x <= curve_.space.lo) return 0.0;
    if (x >= curve_.space.hi) return 1.0;
    double F = curve_.cdf(x);
    return std::clamp(curve_.decreasing ? 1.0 - F : F, 0.0, 1.0);
}

double Fiducial1D::left_cdf(double x) const {
    if (x <= curve_.space.lo) return 0.0;
    if (x >= curve_.space.hi) return 1.0;
    double F = curve_.cdf_below(x);
    return std::clamp(curve_.decreasing ? 1.0 - F : F, 0.0, 1.0);
}

double Fiducial1D::right_pdf(double x) const {
    if (!curve_.space.contains(x)) return 0.0;
    double d = curve_.dcdf(x);
    return std::max(0.0, curve_.decreasing ? -d : d);
}

double Fiducial1D::left_pdf(double x) const {
    if (!curve_.space.contains(x)) return 0.0;
    double d = curve_.dcdf_below(x);
    return std::max(0.0, curve_.decreasing ? -d : d);
}

double Fiducial1D::geo_unnormalized(double x) const {
    return std::sqrt(right_pdf(x) * left_pdf(x));
}

double Fiducial1D::geo_mass(double a, double b) const {
    if (!(b > a)) return 0.0;
    std::vector<double> br;
    if (center_ > a && center_ < b) br.push_back(center_);
    return integrate_split([this](double x) { return geo_unnormalized(x); }, a, b, br, tol_).value;
}

std::optional<double> Fiducial1D::norm_constant() const {
    if (variant_ != FiducialVariant::Geometric || closed_) return std::nullopt;
    return norm_;
}

double Fiducial1D::pdf(double x) const {
    if (closed_) return closed_->pdf(x);
    switch (variant_) {
        case FiducialVariant::Right: return right_pdf(x);
        case FiducialVariant::Left: return left_pdf(x);
        case FiducialVariant::Arithmetic: return 0.5 * (right_pdf(x) + left_pdf(x));
        case FiducialVariant::Geometric: return geo_unnormalized(x) / norm_;
    }
    return 0.0;
}

double Fiducial1D::cdf(double x) const {
    if (closed_) return closed_->cdf(x);
    switch (variant_) {
        case FiducialVariant::Right: return right_cdf(x);
        case FiducialVariant::Left: return left_cdf(x);
        case FiducialVariant::Arithmetic: return 0.5 * (right_cdf(x) + left_cdf(x));
        case FiducialVariant::Geometric:
            if (x <= curve_.space.lo) return 0.0;
            if (x >= curve_.space.hi) return 1.0;
            if (x <= center_) return std::clamp(geo_mass(curve_.space.lo, x) / norm_, 0.0, 1.0);
            return std::clamp(1.0 - geo_mass(x, curve_.space.hi) / norm_, 0.0, 1.0);
    }
    return 0.0;
}

std::vector<double> Fiducial1D::cdf_many(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    if (closed_ || variant_ != FiducialVariant::Geometric) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = cdf(xs[i]);
        return out;
    }
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
    double lo = curve_.space.lo, hi = curve_.space.hi;
    // lower half accumulates upward from the left edge, upper half downward from the right
    double prev = lo, acc = 0.0;
    std::size_t k = 0;
    for (; k < idx.size() && xs[idx[k]] <= center_; ++k) {
        double x = xs[idx[k]];
        if (x <= lo) {
            out[idx[k]] = 0.0;
            continue;
        }
        acc += geo_mass(prev, x);
        prev = x;
        out[idx[k]] = std::clamp(acc / norm_, 0.0, 1.0);
    }
    prev = hi;
    acc = 0.0;
    for (std::size_t j = idx.size(); j > k; --j) {
        double x = xs[idx[j - 1]];
        if (x >= hi) {
            out[idx[j - 1]] = 1.0;
            continue;
        }
        acc += geo_mass(x, prev);
        prev = x;
        out[idx[j - 1]] = std::clamp(1.0 - acc / norm_, 0.0, 1.0);
    }
    return out;
}

double Fiducial1D::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must be in (0,1)");
    if (closed_) return closed_->quantile(u);
    return find_root_expanding([this](double x) { return cdf(x); }, u, center_, curve_.space, 1e-12);
}

double Fiducial1D::mean() const {
    if (closed_) return closed_->mean();
    auto f = [this](double x) { return x * pdf(x); };
    return integrate_split(f, curve_.space.lo, curve_.space.hi, {center_}, tol_).value;
}

std::string Fiducial1D::describe() const {
    std::string out = variant_name(variant_) + " fiducial [" + curve_.name + "]";
    if (closed_) out += " = " + closed_->describe();
    return out;
}

FidPtr make_fiducial(ParamCurve curve, FiducialVariant variant, DistPtr closed_form, double tol) {
    return std::make_shared<const Fiducial1D>(std::move(curve), variant, std::move(closed_form), tol);
}

DistPtr closed_form_fiducial(const ModelSpec& model, int n, double s, FiducialVariant variant) {
    switch (model.family) {
        case Family::NormalKnownVar: return normal_dist(s / n, std::sqrt(model.get("sigma2") / n));
        case Family::NormalKnownMean: return inverse_gamma_dist(n / 2.0, s / 2.0);
        case Family::Gamma: return gamma_dist(n * model.get("alpha"), s);
        case Family::Pareto:
        case Family::Weibull: return gamma_dist(n, s);
        case Family::UniformScale: return pareto_dist(s, n);
        case Family::Binomial: {
            double M = n * model.get("m");
            auto R = [&] { return beta_dist(s + 1.0, M - s); };
            auto L = [&] { return beta_dist(s, M - s + 1.0); };
            switch (variant) {
                case FiducialVariant::Right: return R();
                case FiducialVariant::Left: return L();
                case FiducialVariant::Geometric: return beta_dist(s + 0.5, M - s + 0.5);
                case FiducialVariant::Arithmetic: return mixture({R(), L()}, {0.5, 0.5});
            }
            break;
        }
        case Family::Poisson: {
            auto R = [&] { return gamma_dist(s + 1.0, n); };
            auto L = [&] { return gamma_dist(s, n); };
            switch (variant) {
                case FiducialVariant::Right: return R();
                case FiducialVariant::Left: return L();
                case FiducialVariant::Geometric: return gamma_dist(s + 0.5, n);
                case FiducialVariant::Arithmetic: return mixture({R(), L()}, {0.5, 0.5});
            }
            break;
        }
        case Family::NegativeBinomial: {
            double r = n * model.get("m");
            auto R = [&] { return beta_dist(r, s + 1.0); };
            auto L = [&] { return beta_dist(r, s); };
            switch (variant) {
                case FiducialVariant::Right: return R();
                case FiducialVariant::Left: return L();
                case FiducialVariant::Geometric: return beta_dist(r, s + 0.5);
                case FiducialVariant::Arithmetic: return mixture({R(), L()}, {0.5, 0.5});
            }
            break;
        }
        default: break;
    }
    return nullptr;
}

FidPtr fiducial(const ModelSpec& model, int n, double s, FiducialVariant variant, const FiducialOptions& opts) {
    ParamCurve curve = model_curve(model, n, s);
    DistPtr closed;
    if (opts.use_closed_form) {
        // properness is still checked by the constructor before the closed form is used
        bool ok = (variant == FiducialVariant::Left || curve.right_proper) &&
                  (variant == FiducialVariant::Right || curve.left_proper);
        if (ok) closed = closed_form_fiducial(model, n, s, variant);
    }
    return make_fiducial(std::move(curve), variant, std::move(closed), opts.tol);
}

FidPtr fiducial_right(const ModelSpec& model, int n, double s, const FiducialOptions& opts) {
    return fiducial(model, n, s, FiducialVariant::Right, opts);
}
FidPtr fiducial_left(const ModelSpec& model, int n, double s, const FiducialOptions& opts) {
    return fiducial(model, n, s, FiducialVariant::Left, opts);
}
FidPtr fiducial_geometric(const ModelSpec& model, int n, double s, const FiducialOptions& opts) {
    return fiducial(model, n, s, FiducialVariant::Geometric, opts);
}
FidPtr fiducial_arithmetic(const ModelSpec& model, int n, double s, const FiducialOptions& opts) {
    return fiducial(model, n, s, FiducialVariant::Arithmetic, opts);
}

double gamma_ratio(const ModelSpec& model, int n, double s, double theta) {
    if (!model.discrete) throw DomainError("gamma_ratio: discrete models only");
    ParamCurve c = model_curve(model, n, s);
    if (!c.right_proper || !c.left_proper) throw BoundaryError("gamma_ratio: statistic at the support boundary");
    double num = stat_dpdf(model, n, theta, s);
    double den = -stat_dcdf(model, n, theta, s);
    return num / den;
}

}  // namespace fid
