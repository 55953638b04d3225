#include "fid/stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace fid {

namespace {

MonotoneMap sqrt_map() {
    MonotoneMap m;
    m.forward = [](double v) { return std::sqrt(v); };
    m.inverse = [](double y) { return y * y; };
    m.inverse_derivative = [](double y) { return 2.0 * y; };
    m.increasing = true;
    m.image = {0.0, kInf};
    m.name = "sqrt";
    return m;
}

MonotoneMap scaled_probability_map(double a) {
    // pi -> pi * a, used where a probability is a product with a known factor
    MonotoneMap m = affine_map(a, 0.0);
    m.image = {0.0, a};
    m.name = "scaled";
    return m;
}

DistPtr normal_closed(double obs, double a, double b, double sd) {
    return normal_dist((obs - a) / b, sd / std::fabs(b));
}

ModelSpec binomial_of(int m) { return make_model(Family::Binomial, {{"m", static_cast<double>(m)}}); }

int as_count(double v, const char* what) {
    if (!(v >= 0.0) || std::fabs(v - std::round(v)) > 1e-9) {
        throw DomainError(std::string(what) + " must be a non-negative integer");
    }
    return static_cast<int>(std::round(v));
}

// Component for the odds phi = pi / (1 - pi) of a binomial success probability.
StepComponent odds_component(const std::string& name, int trials, int successes) {
    ModelSpec bin = binomial_of(trials);
    StepComponent c;
    c.param = name;
    c.curve = [bin, successes](std::span<const double>) {
        return reparameterize(model_curve(bin, 1, successes), odds_map());
    };
    c.closed = [bin, successes](std::span<const double>, FiducialVariant v) -> DistPtr {
        DistPtr cf = closed_form_fiducial(bin, 1, successes, v);
        return cf ? transformed(cf, odds_map()) : nullptr;
    };
    return c;
}

StepComponent model_component(const std::string& name, const ModelSpec& model, int n, double s) {
    StepComponent c;
    c.param = name;
    c.curve = [model, n, s](std::span<const double>) { return model_curve(model, n, s); };
    c.closed = [model, n, s](std::span<const double>, FiducialVariant v) {
        return closed_form_fiducial(model, n, s, v);
    };
    return c;
}

double sample_mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Density of e_1 given the configuration z_i = x_i - x_1, in the location model.
struct LocationPieces {
    std::shared_ptr<NumericDensity> g;
    Interval u_range;
};

LocationPieces location_pieces(const StandardFamily& f0, std::span<const double> x) {
    if (x.empty()) throw DomainError("location model needs at least one observation");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - x[0];
    Interval sup = f0.support();
    Interval ur{-kInf, kInf};
    for (double zi : z) {
        ur.lo = std::max(ur.lo, sup.lo - zi);
        ur.hi = std::min(ur.hi, sup.hi - zi);
    }
    if (!(ur.lo < ur.hi)) throw DomainError("sample is impossible under the location model");
    std::vector<double> breaks;
    for (double zi : z) breaks.push_back(-zi);
    if (ur.bounded()) breaks.push_back(0.5 * (ur.lo + ur.hi));
    auto logg = [f0, z](double u) {
        double acc = 0.0;
        for (double zi : z) acc += f0.log_pdf(u + zi);
        return acc;
    };
    auto g = std::make_shared<NumericDensity>(logg, ur, breaks, "location error | configuration", 1e-12);
    return {g, ur};
}

ParamCurve location_curve(const StandardFamily& f0, std::span<const double> x) {
    LocationPieces p = location_pieces(f0, x);
    double x1 = x[0];
    ParamCurve c;
    auto g = p.g;
    c.cdf = [g, x1](double th) { return g->cdf(x1 - th); };
    c.dcdf = [g, x1](double th) { return -g->pdf(x1 - th); };
    c.cdf_below = c.cdf;
    c.dcdf_below = c.dcdf;
    c.space = {x1 - p.u_range.hi, x1 - p.u_range.lo};
    c.decreasing = true;
    c.guess = x1 - g->center();
    c.name = "location " + f0.name();
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------

JointFiducial::JointFiducial(std::vector<std::string> names, std::vector<Factory> factories, std::string name)
    : names_(std::move(names)), factories_(std::move(factories)), name_(std::move(name)) {
    if (factories_.empty()) throw DomainError("joint fiducial needs at least one component");
    if (names_.size() != factories_.size()) throw DomainError("one name per component");
    first_ = factories_[0](std::span<const double>{});
}

DistPtr JointFiducial::conditional(std::size_t k, std::span<const double> earlier) const {
    if (k >= dim()) throw DomainError("component index out of range");
    if (earlier.size() < k) throw DomainError("conditional needs the earlier components");
    if (k == 0) return first_;
    return factories_[k](earlier.first(k));
}

double JointFiducial::log_pdf(std::span<const double> phi) const {
    if (phi.size() != dim()) throw DomainError("point has the wrong dimension");
    double acc = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        DistPtr d = conditional(k, phi);
        if (!d->support().contains(phi[k])) return -kInf;
        acc += d->log_pdf(phi[k]);
        if (acc == -kInf) return acc;
    }
    return acc;
}

double JointFiducial::pdf(std::span<const double> phi) const {
    double l = log_pdf(phi);
    return l == -kInf ? 0.0 : std::exp(l);
}

std::vector<double> JointFiducial::sample(Rng& rng) const {
    std::vector<double> phi;
    phi.reserve(dim());
    for (std::size_t k = 0; k < dim(); ++k) phi.push_back(conditional(k, phi)->sample(rng));
    return phi;
}

std::vector<std::vector<double>> JointFiducial::sample_many(std::size_t count, std::uint64_t seed) const {
    Rng rng = make_rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample(rng));
    return out;
}

JointFiducial build_joint(const StepChain& chain, const JointOptions& opts) {
    if (chain.components.empty()) throw DomainError("empty chain");
    std::vector<std::string> names;
    std::vector<JointFiducial::Factory> fs;
    for (const StepComponent& comp : chain.components) {
        names.push_back(comp.param);
        fs.push_back([comp, opts](std::span<const double> earlier) -> DistPtr {
            ParamCurve c = comp.curve(earlier);
            // the variants only differ for discrete statistics
            FiducialVariant v = c.discrete ? opts.variant : FiducialVariant::Right;
            DistPtr cf = (opts.use_closed_form && comp.closed) ? comp.closed(earlier, v) : nullptr;
            return make_fiducial(std::move(c), v, cf, opts.tol);
        });
    }
    return JointFiducial(names, fs, chain.key + " [" + variant_name(opts.variant) + "]");
}

DistPtr marginal_of_interest(const JointFiducial& joint) { return joint.conditional(0, {}); }

ParamCurve reparameterize(const ParamCurve& base, const MonotoneMap& m) {
    ParamCurve c = base;
    // far-tail phi can round onto an open end of the base space
    auto inv = [m, sp = base.space](double phi) {
        double u = m.inverse(phi);
        if (u <= sp.lo) u = std::nextafter(sp.lo, kInf);
        if (u >= sp.hi) u = std::nextafter(sp.hi, -kInf);
        return u;
    };
    auto wrap = [inv](const std::function<double(double)>& f) {
        return [f, inv](double phi) { return f(inv(phi)); };
    };
    auto wrap_d = [m, inv](const std::function<double(double)>& f) {
        return [f, m, inv](double phi) { return f(inv(phi)) * m.inverse_derivative(phi); };
    };
    c.cdf = wrap(base.cdf);
    c.cdf_below = wrap(base.cdf_below);
    c.dcdf = wrap_d(base.dcdf);
    c.dcdf_below = wrap_d(base.dcdf_below);
    c.decreasing = base.decreasing == m.increasing;

    auto end = [&](double b, double fallback) {
        if (!std::isfinite(b)) return fallback;
        double y = m.forward(b);
        return std::isnan(y) ? fallback : y;
    };
    double a = end(base.space.lo, m.increasing ? m.image.lo : m.image.hi);
    double b = end(base.space.hi, m.increasing ? m.image.hi : m.image.lo);
    c.space = m.increasing ? Interval{a, b} : Interval{b, a};
    if (std::isfinite(base.guess)) c.guess = m.forward(base.guess);
    c.name = m.name + "(" + base.name + ")";
    return c;
}

ParamCurve normal_mean_curve(double obs, double a, double b, double sd) {
    if (b == 0.0 || !(sd > 0.0)) throw DomainError("normal_mean_curve: need b != 0 and sd > 0");
    ParamCurve c;
    c.cdf = [=](double phi) { return normal_cdf((obs - a - b * phi) / sd); };
    c.dcdf = [=](double phi) { return -normal_pdf((obs - a - b * phi) / sd) * b / sd; };
    c.cdf_below = c.cdf;
    c.dcdf_below = c.dcdf;
    c.space = {-kInf, kInf};
    c.decreasing = b > 0.0;
    c.guess = (obs - a) / b;
    c.name = "normal mean";
    return c;
}

// ---------------------------------------------------------------------------

double StandardFamily::log_pdf(double z) const {
    double u = z / scale;
    double l = 0.0;
    switch (kind) {
        case Kind::Normal: l = -0.5 * u * u - 0.5 * std::log(2.0 * M_PI); break;
        case Kind::Cauchy: l = -std::log(M_PI) - std::log1p(u * u); break;
        case Kind::Logistic: {
            double a = std::fabs(u);
            l = -a - 2.0 * std::log1p(std::exp(-a));
            break;
        }
        case Kind::Uniform: l = (u > 0.0 && u < 1.0) ? 0.0 : -kInf; break;
        case Kind::Exponential: l = u > 0.0 ? -u : -kInf; break;
    }
    return l - std::log(scale);
}

double StandardFamily::cdf(double z) const {
    double u = z / scale;
    switch (kind) {
        case Kind::Normal: return normal_cdf(u);
        case Kind::Cauchy: return 0.5 + std::atan(u) / M_PI;
        case Kind::Logistic: return 1.0 / (1.0 + std::exp(-u));
        case Kind::Uniform: return std::clamp(u, 0.0, 1.0);
        case Kind::Exponential: return u > 0.0 ? -std::expm1(-u) : 0.0;
    }
    return 0.0;
}

Interval StandardFamily::support() const {
    switch (kind) {
        case Kind::Uniform: return {0.0, scale};
        case Kind::Exponential: return {0.0, kInf};
        default: return {-kInf, kInf};
    }
}

std::string StandardFamily::name() const {
    std::string s;
    switch (kind) {
        case Kind::Normal: s = "normal"; break;
        case Kind::Cauchy: s = "cauchy"; break;
        case Kind::Logistic: s = "logistic"; break;
        case Kind::Uniform: s = "uniform"; break;
        case Kind::Exponential: s = "exponential"; break;
    }
    if (scale != 1.0) {
        std::ostringstream os;
        os << s << "*" << scale;
        s = os.str();
    }
    return s;
}

StandardFamily standard_family(const std::string& name, double scale) {
    if (!(scale > 0.0)) throw DomainError("scale must be positive");
    using K = StandardFamily::Kind;
    static const std::map<std::string, K> kinds{{"normal", K::Normal},
                                                 {"cauchy", K::Cauchy},
                                                 {"logistic", K::Logistic},
                                                 {"uniform", K::Uniform},
                                                 {"exponential", K::Exponential}};
    auto it = kinds.find(name);
    if (it == kinds.end()) throw UnsupportedError("unknown error law '" + name + "'");
    return {it->second, scale};
}

StepChain location_chain(const StandardFamily& f0, std::span<const double> x) {
    ParamCurve curve = location_curve(f0, x);
    StepChain ch;
    ch.key = "location-" + f0.name();
    ch.ancillary = "x_i - x_1";
    StepComponent c;
    c.param = "theta";
    c.curve = [curve](std::span<const double>) { return curve; };
    ch.components.push_back(std::move(c));
    return ch;
}

StepChain scale_chain(const StandardFamily& f0, std::span<const double> x) {
    if (x.empty()) throw DomainError("scale model needs at least one observation");
    if (f0.support().lo < 0.0) throw DomainError("scale model needs a positive error law");
    for (double v : x) {
        if (!(v > 0.0)) throw DomainError("scale model needs positive observations");
    }
    const double n = static_cast<double>(x.size());
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] / x[0];
    Interval sup = f0.support();
    double zmax = *std::max_element(z.begin(), z.end());
    Interval yr{0.0, sup.hi / zmax};
    double zbar = sample_mean(z);
    std::vector<double> breaks{f0.scale / zbar};
    if (yr.bounded()) breaks.push_back(0.5 * yr.hi);
    auto logg = [f0, z, n](double y) {
        double acc = (n - 1.0) * std::log(y);
        for (double zi : z) acc += f0.log_pdf(y * zi);
        return acc;
    };
    auto g = std::make_shared<NumericDensity>(logg, yr, breaks, "scale error | configuration", 1e-12);
    double x1 = x[0];
    ParamCurve c;
    c.cdf = [g, x1](double th) { return g->cdf(x1 / th); };
    c.dcdf = [g, x1](double th) { return -g->pdf(x1 / th) * x1 / (th * th); };
    c.cdf_below = c.cdf;
    c.dcdf_below = c.dcdf;
    c.space = {x1 / yr.hi, kInf};
    c.decreasing = true;
    c.guess = x1 / g->center();
    c.name = "scale " + f0.name();

    StepChain ch;
    ch.key = "scale-" + f0.name();
    ch.ancillary = "x_i / x_1";
    StepComponent comp;
    comp.param = "theta";
    comp.curve = [c](std::span<const double>) { return c; };
    ch.components.push_back(std::move(comp));
    return ch;
}

StepChain location_scale_chain(const StandardFamily& f0, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("location-scale model needs at least two observations");
    if (f0.scale != 1.0) throw DomainError("location-scale model takes a standard error law");
    const double z2 = x[1] - x[0];
    if (z2 == 0.0) throw DomainError("first two observations must differ");
    const double az2 = std::fabs(z2);
    // d_i = (x_i - x_1) / |z2|; with A = |e_2 - e_1| the errors are e_1 + A d_i
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (x[i] - x[0]) / az2;
    const double dbar = sample_mean(d);
    double ss = 0.0;
    for (double v : d) ss += (v - dbar) * (v - dbar);
    const double dspan = *std::max_element(d.begin(), d.end()) - *std::min_element(d.begin(), d.end());
    const Interval sup = f0.support();

    Interval ar{0.0, kInf};
    if (sup.bounded()) ar.hi = (sup.hi - sup.lo) / dspan;

    auto inner = [f0, d, sup](double a) {
        Interval ur{-kInf, kInf};
        for (double di : d) {
            ur.lo = std::max(ur.lo, sup.lo - a * di);
            ur.hi = std::min(ur.hi, sup.hi - a * di);
        }
        if (!(ur.lo < ur.hi)) return -kInf;
        double mid = 0.0;
        if (ur.bounded()) {
            mid = 0.5 * (ur.lo + ur.hi);
        } else {
            mid = -a * std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
            mid = std::clamp(mid, std::nextafter(ur.lo, kInf), std::nextafter(ur.hi, -kInf));
        }
        auto logf = [&](double u) {
            double acc = 0.0;
            for (double di : d) acc += f0.log_pdf(u + a * di);
            return acc;
        };
        double shift = logf(mid);
        if (!std::isfinite(shift)) shift = 0.0;
        // far tail of a: the log terms lose all precision and the mass is nil
        if (shift < -1e4) return -kInf;
        double v = integrate_split(
                       [&](double u) {
                           double l = logf(u);
                           return l == -kInf ? 0.0 : std::exp(l - shift);
                       },
                       ur.lo, ur.hi, {mid}, 1e-12)
                       .value;
        return v > 0.0 ? std::log(v) + shift : -kInf;
    };
    const double nm2 = static_cast<double>(n) - 2.0;
    auto logk = [inner, nm2](double a) { return nm2 * std::log(a) + inner(a); };
    std::vector<double> breaks{std::sqrt(std::max(nm2, 1.0) / ss)};
    if (ar.bounded()) breaks.push_back(0.5 * ar.hi);
    auto k = std::make_shared<NumericDensity>(logk, ar, breaks, "|e2 - e1| | configuration", 1e-11);

    ParamCurve sc;
    sc.cdf = [k, az2](double s) { return k->cdf(az2 / s); };
    sc.dcdf = [k, az2](double s) { return -k->pdf(az2 / s) * az2 / (s * s); };
    sc.cdf_below = sc.cdf;
    sc.dcdf_below = sc.dcdf;
    sc.space = {az2 / ar.hi, kInf};
    sc.decreasing = true;
    sc.guess = az2 / k->center();
    sc.name = "scale step " + f0.name();

    StepChain ch;
    ch.key = "location-scale-" + f0.name();
    ch.ancillary = "sign(x_2 - x_1), (x_j - x_1) / (x_2 - x_1)";
    StepComponent cs;
    cs.param = "sigma";
    cs.curve = [sc](std::span<const double>) { return sc; };
    ch.components.push_back(std::move(cs));

    StepComponent ct;
    ct.param = "theta";
    std::vector<double> xs(x.begin(), x.end());
    ct.curve = [f0, xs](std::span<const double> earlier) {
        StandardFamily scaled = f0;
        scaled.scale = earlier[0];
        return location_curve(scaled, xs);
    };
    ch.components.push_back(std::move(ct));
    return ch;
}

StepChain normal_sufficient_chain(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("need at least two observations");
    const double xbar = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - xbar) * (v - xbar);
    if (!(ss > 0.0)) throw BoundaryError("sum of squares must be positive");
    const double a = 0.5 * (static_cast<double>(n) - 1.0);

    ParamCurve var;
    var.cdf = [a, ss](double v) { return boost::math::gamma_p(a, 0.5 * ss / v); };
    var.dcdf = [a, ss](double v) {
        return -boost::math::gamma_p_derivative(a, 0.5 * ss / v) * 0.5 * ss / (v * v);
    };
    var.cdf_below = var.cdf;
    var.dcdf_below = var.dcdf;
    var.space = {0.0, kInf};
    var.decreasing = true;
    var.guess = ss / (2.0 * a);
    var.name = "sum of squares";
    ParamCurve sd = reparameterize(var, sqrt_map());

    StepChain ch;
    ch.key = "normal-mean-and-squares";
    ch.ancillary = "none";
    StepComponent cs;
    cs.param = "sigma";
    cs.curve = [sd](std::span<const double>) { return sd; };
    cs.closed = [a, ss](std::span<const double>, FiducialVariant) {
        return transformed(inverse_gamma_dist(a, 0.5 * ss), sqrt_map());
    };
    ch.components.push_back(std::move(cs));

    const double rn = std::sqrt(static_cast<double>(n));
    StepComponent ct;
    ct.param = "theta";
    ct.curve = [xbar, rn](std::span<const double> e) { return normal_mean_curve(xbar, 0.0, 1.0, e[0] / rn); };
    ct.closed = [xbar, rn](std::span<const double> e, FiducialVariant) { return normal_dist(xbar, e[0] / rn); };
    ch.components.push_back(std::move(ct));
    return ch;
}

DistPtr location_fiducial(const StandardFamily& f0, std::span<const double> x) {
    return marginal_of_interest(build_joint(location_chain(f0, x)));
}

DistPtr scale_fiducial(const StandardFamily& f0, std::span<const double> x) {
    return marginal_of_interest(build_joint(scale_chain(f0, x)));
}

JointFiducial location_scale_fiducial(const StandardFamily& f0, std::span<const double> x) {
    return build_joint(location_scale_chain(f0, x));
}

// ---------------------------------------------------------------------------

StepChain diff_means_chain(int n, double sigma2, double s1, double s2) {
    if (n < 1 || !(sigma2 > 0.0)) throw DomainError("diff-means: need n >= 1 and sigma2 > 0");
    const double nn = n, t = s1 + s2;
    StepChain ch;
    ch.key = "diff-means";
    ch.ancillary = "none";

    // S2 given S1 + S2 = t is N((n phi1 + t) / 2, n sigma2 / 2)
    const double sd1 = std::sqrt(nn * sigma2 / 2.0);
    StepComponent c1;
    c1.param = "phi1";
    c1.curve = [=](std::span<const double>) { return normal_mean_curve(s2, t / 2.0, nn / 2.0, sd1); };
    c1.closed = [=](std::span<const double>, FiducialVariant) { return normal_closed(s2, t / 2.0, nn / 2.0, sd1); };
    ch.components.push_back(std::move(c1));

    // S1 + S2 is N(n (phi1 + 2 phi2), 2 n sigma2)
    const double sd2 = std::sqrt(2.0 * nn * sigma2);
    StepComponent c2;
    c2.param = "phi2";
    c2.curve = [=](std::span<const double> e) { return normal_mean_curve(t, nn * e[0], 2.0 * nn, sd2); };
    c2.closed = [=](std::span<const double> e, FiducialVariant) {
        return normal_closed(t, nn * e[0], 2.0 * nn, sd2);
    };
    ch.components.push_back(std::move(c2));
    return ch;
}

StepChain neyman_scott_chain(std::span<const double> xbar, double w) {
    if (xbar.empty()) throw DomainError("neyman-scott: need at least one pair");
    if (!(w > 0.0)) throw BoundaryError("neyman-scott: w must be positive");
    const double a = 0.5 * static_cast<double>(xbar.size());
    StepChain ch;
    ch.key = "neyman-scott";
    ch.ancillary = "none";

    // W is gamma with shape n/2 and rate 1 / (4 sigma2)
    ParamCurve var;
    var.cdf = [a, w](double v) { return boost::math::gamma_p(a, w / (4.0 * v)); };
    var.dcdf = [a, w](double v) { return -boost::math::gamma_p_derivative(a, w / (4.0 * v)) * w / (4.0 * v * v); };
    var.cdf_below = var.cdf;
    var.dcdf_below = var.dcdf;
    var.space = {0.0, kInf};
    var.decreasing = true;
    var.guess = w / (4.0 * a);
    var.name = "pair differences";
    StepComponent cv;
    cv.param = "sigma2";
    cv.curve = [var](std::span<const double>) { return var; };
    cv.closed = [a, w](std::span<const double>, FiducialVariant) { return inverse_gamma_dist(a, w / 4.0); };
    ch.components.push_back(std::move(cv));

    for (std::size_t i = 0; i < xbar.size(); ++i) {
        const double xb = xbar[i];
        StepComponent cm;
        cm.param = "mu" + std::to_string(i + 1);
        cm.curve = [xb](std::span<const double> e) { return normal_mean_curve(xb, 0.0, 1.0, std::sqrt(e[0] / 2.0)); };
        cm.closed = [xb](std::span<const double> e, FiducialVariant) {
            return normal_dist(xb, std::sqrt(e[0] / 2.0));
        };
        ch.components.push_back(std::move(cm));
    }
    return ch;
}

StepChain poisson_ratio_chain(int n, double s1, double s2, bool reversed) {
    if (n < 1) throw DomainError("poisson-ratio: n must be positive");
    int a = as_count(s1, "s1"), b = as_count(s2, "s2");
    if (a + b == 0) throw BoundaryError("poisson-ratio: both counts are zero");
    StepChain ch;
    ch.key = "poisson-ratio";
    ch.ancillary = "none";
    // S2 given S1 + S2 = t is Bi(t, phi1 / (1 + phi1)); S1 + S2 is Po(n phi2)
    StepComponent ratio = odds_component("phi1", a + b, b);
    StepComponent total = model_component("phi2", make_model(Family::Poisson), n, a + b);
    if (reversed) {
        ch.components = {total, ratio};
    } else {
        ch.components = {ratio, total};
    }
    return ch;
}

StepChain bivariate_binomial_chain(int m, int r, int s) {
    if (m < 1 || r < 1 || r > m || s < 0 || s > r) throw DomainError("bivariate-binomial: need 0 <= s <= r <= m, r >= 1");
    StepChain ch;
    ch.key = "bivariate-binomial";
    ch.ancillary = "none";
    // S given R = r is Bi(r, q); R is Bi(m, p)
    ch.components.push_back(model_component("q", binomial_of(r), 1, s));
    ch.components.push_back(model_component("p", binomial_of(m), 1, r));
    return ch;
}

StepChain trinomial_ratio_chain(int n, int x1, int x2) {
    if (n < 1 || x1 < 0 || x2 < 0 || x1 + x2 > n) throw DomainError("trinomial-ratio: need x1 + x2 <= n");
    if (x1 + x2 == 0) throw BoundaryError("trinomial-ratio: both counts are zero");
    const int t = x1 + x2;
    StepChain ch;
    ch.key = "trinomial-ratio";
    ch.ancillary = "none";
    // X1 given T = t is Bi(t, phi1 / (1 + phi1))
    ch.components.push_back(odds_component("phi1", t, x1));
    // T is Bi(n, phi2 (1 + phi1))
    ModelSpec bin = binomial_of(n);
    StepComponent c2;
    c2.param = "phi2";
    c2.curve = [bin, t](std::span<const double> e) {
        return reparameterize(model_curve(bin, 1, t), scaled_probability_map(1.0 / (1.0 + e[0])));
    };
    c2.closed = [bin, t](std::span<const double> e, FiducialVariant v) -> DistPtr {
        DistPtr cf = closed_form_fiducial(bin, 1, t, v);
        return cf ? transformed(cf, scaled_probability_map(1.0 / (1.0 + e[0]))) : nullptr;
    };
    ch.components.push_back(std::move(c2));
    return ch;
}

StepChain uniform_shift_chain(std::span<const double> x, bool full_sample) {
    if (full_sample) {
        StepChain ch = location_chain(standard_family("uniform"), x);
        ch.key = "uniform-shift";
        return ch;
    }
    if (x.empty()) throw DomainError("uniform-shift: empty sample");
    auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    const double lo = *mn, hi = *mx, z = hi - lo;
    if (!(z < 1.0)) throw DomainError("uniform-shift: sample range must be below 1");
    // X_(1) - theta given the range z is uniform on (0, 1 - z)
    ParamCurve c;
    c.cdf = [lo, z](double th) { return std::clamp((lo - th) / (1.0 - z), 0.0, 1.0); };
    c.dcdf = [z](double) { return -1.0 / (1.0 - z); };
    c.cdf_below = c.cdf;
    c.dcdf_below = c.dcdf;
    c.space = {hi - 1.0, lo};
    c.decreasing = true;
    c.guess = 0.5 * (hi - 1.0 + lo);
    c.name = "minimum given range";
    StepChain ch;
    ch.key = "uniform-shift";
    ch.ancillary = "range";
    StepComponent comp;
    comp.param = "theta";
    comp.curve = [c](std::span<const double>) { return c; };
    comp.closed = [lo, hi](std::span<const double>, FiducialVariant) { return uniform_dist(hi - 1.0, lo); };
    ch.components.push_back(std::move(comp));
    return ch;
}

StepChain uniform_scale_chain(std::span<const double> x, bool full_sample) {
    if (full_sample) {
        StepChain ch = scale_chain(standard_family("uniform"), x);
        ch.key = "uniform-scale";
        return ch;
    }
    if (x.empty()) throw DomainError("uniform-scale: empty sample");
    ModelSpec m = make_model(Family::UniformScale);
    double s = sufficient_statistic(m, x);
    StepChain ch;
    ch.key = "uniform-scale";
    ch.ancillary = "none";
    ch.components.push_back(model_component("theta", m, static_cast<int>(x.size()), s));
    return ch;
}

namespace {

double need(const ChainRequest& req, const std::string& name) {
    auto it = req.params.find(name);
    if (it == req.params.end()) throw DomainError("chain parameter '" + name + "' is required");
    return it->second;
}

double get_or(const ChainRequest& req, const std::string& name, double fallback) {
    auto it = req.params.find(name);
    return it == req.params.end() ? fallback : it->second;
}

bool full_route(const ChainRequest& req) {
    if (req.route.empty() || req.route == "full") return true;
    if (req.route == "sufficient") return false;
    throw UnsupportedError("unknown route '" + req.route + "'");
}

}  // namespace

std::vector<std::string> catalog_chain_keys() {
    return {"diff-means",       "neyman-scott",     "poisson-ratio", "bivariate-binomial",
            "trinomial-ratio", "loc-scale-normal", "uniform-shift", "uniform-scale"};
}

StepChain catalog_chain(const std::string& key, const ChainRequest& req) {
    if (key == "diff-means") {
        return diff_means_chain(as_count(need(req, "n"), "n"), get_or(req, "sigma2", 1.0), need(req, "s1"),
                                need(req, "s2"));
    }
    if (key == "neyman-scott") return neyman_scott_chain(req.x, need(req, "w"));
    if (key == "poisson-ratio") {
        return poisson_ratio_chain(as_count(need(req, "n"), "n"), need(req, "s1"), need(req, "s2"), req.reversed);
    }
    if (key == "bivariate-binomial") {
        return bivariate_binomial_chain(as_count(need(req, "m"), "m"), as_count(need(req, "r"), "r"),
                                        as_count(need(req, "s"), "s"));
    }
    if (key == "trinomial-ratio") {
        return trinomial_ratio_chain(as_count(need(req, "n"), "n"), as_count(need(req, "x1"), "x1"),
                                     as_count(need(req, "x2"), "x2"));
    }
    if (key == "loc-scale-normal") {
        return full_route(req) ? location_scale_chain(standard_family("normal"), req.x)
                               : normal_sufficient_chain(req.x);
    }
    if (key == "uniform-shift") return uniform_shift_chain(req.x, full_route(req));
    if (key == "uniform-scale") return uniform_scale_chain(req.x, full_route(req));
    throw UnsupportedError("unknown chain '" + key + "'");
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> padded(std::span<const double> head, std::size_t d, double extra_at_k = kInf) {
    std::vector<double> v(head.begin(), head.end());
    if (std::isfinite(extra_at_k)) v.push_back(extra_at_k);
    v.resize(d, 0.0);
    return v;
}

void check_triangular(const std::function<std::vector<double>(std::span<const double>)>& f,
                      const std::vector<std::vector<double>>& pts, const char* what) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        std::vector<double> fa = f(a);
        for (std::size_t k = 0; k + 1 < a.size(); ++k) {
            // keep the first k+1 coordinates of a, take the rest from b
            std::vector<double> mixed(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k + 1));
            mixed.insert(mixed.end(), b.begin() + static_cast<std::ptrdiff_t>(k + 1), b.end());
            std::vector<double> fm = f(mixed);
            for (std::size_t j = 0; j <= k; ++j) {
                if (!std::isfinite(fa[j]) || !std::isfinite(fm[j])) continue;
                if (std::fabs(fa[j] - fm[j]) > 1e-12 * std::max(1.0, std::fabs(fa[j]))) {
                    throw DomainError(std::string("map is not lower triangular (") + what + ")");
                }
            }
        }
    }
}

}  // namespace

JointFiducial pushforward_lower_triangular(const JointFiducial& joint, const TriangularMap& map,
                                           std::uint64_t probe_seed) {
    const std::size_t d = joint.dim();
    if (!map.forward || !map.inverse) throw DomainError("map needs forward and inverse");
    std::vector<std::vector<double>> phis = joint.sample_many(8, probe_seed);
    std::vector<std::vector<double>> lams;
    for (const auto& p : phis) {
        std::vector<double> l = map.forward(p);
        if (l.size() != d) throw DomainError("map changes the dimension");
        std::vector<double> back = map.inverse(l);
        for (std::size_t j = 0; j < d; ++j) {
            if (std::fabs(back[j] - p[j]) > 1e-8 * std::max(1.0, std::fabs(p[j]))) {
                throw DomainError("map inverse does not invert forward");
            }
        }
        lams.push_back(std::move(l));
    }
    if (d > 1) {
        check_triangular(map.forward, phis, "forward");
        check_triangular(map.inverse, lams, "inverse");
    }

    auto src = std::make_shared<JointFiducial>(joint);
    std::vector<JointFiducial::Factory> fs;
    for (std::size_t k = 0; k < d; ++k) {
        fs.push_back([src, map, k, d](std::span<const double> lam_earlier) -> DistPtr {
            std::vector<double> lam_head(lam_earlier.begin(), lam_earlier.end());
            std::vector<double> phi_earlier = map.inverse(padded(lam_head, d));
            phi_earlier.resize(k);
            DistPtr base = src->conditional(k, phi_earlier);

            MonotoneMap m;
            m.forward = [map, phi_earlier, k, d](double v) { return map.forward(padded(phi_earlier, d, v))[k]; };
            m.inverse = [map, lam_head, k, d](double y) { return map.inverse(padded(lam_head, d, y))[k]; };
            double q1 = base->quantile(0.25), q3 = base->quantile(0.75);
            m.increasing = m.forward(q3) > m.forward(q1);
            auto inv = m.inverse;
            m.inverse_derivative = [inv](double y) {
                double h = 1e-6 * std::max(1.0, std::fabs(y));
                double a = inv(y + h), b = inv(y - h);
                if (std::isfinite(a) && std::isfinite(b)) return (a - b) / (2.0 * h);
                double c = inv(y);
                return std::isfinite(a) ? (a - c) / h : (c - b) / h;
            };
            if (map.image) {
                m.image = map.image(k, lam_head);
            } else {
                Interval s = base->support();
                double sign = m.increasing ? 1.0 : -1.0;
                double lo = std::isfinite(s.lo) ? m.forward(s.lo) : -sign * kInf;
                double hi = std::isfinite(s.hi) ? m.forward(s.hi) : sign * kInf;
                m.image = m.increasing ? Interval{lo, hi} : Interval{hi, lo};
            }
            m.name = "pushforward";
            return transformed(base, m);
        });
    }
    std::vector<std::string> names = map.names;
    if (names.size() != d) {
        names.clear();
        for (std::size_t k = 0; k < d; ++k) names.push_back("lambda" + std::to_string(k + 1));
    }
    return JointFiducial(names, fs, "pushforward of " + joint.name());
}

SufficiencyReport sufficiency_check(const StepChain& full, const StepChain& reduced, const JointOptions& opts,
                                    std::size_t probes, std::uint64_t seed) {
    JointFiducial a = build_joint(full, opts);
    JointFiducial b = build_joint(reduced, opts);
    if (a.dim() != b.dim()) throw DomainError("chains have different dimensions");
    std::vector<std::vector<double>> pts = a.sample_many(probes, seed);
    if (a.dim() == 1) {
        DistPtr m = marginal_of_interest(a);
        for (std::size_t i = 0; i < probes; ++i) {
            pts.push_back({m->quantile((static_cast<double>(i) + 0.5) / static_cast<double>(probes))});
        }
    }
    SufficiencyReport rep;
    for (const auto& p : pts) {
        for (std::size_t k = 0; k < a.dim(); ++k) {
            DistPtr da = a.conditional(k, p), db = b.conditional(k, p);
            rep.cdf_gap = std::max(rep.cdf_gap, std::fabs(da->cdf(p[k]) - db->cdf(p[k])));
            rep.pdf_gap = std::max(rep.pdf_gap, std::fabs(da->pdf(p[k]) - db->pdf(p[k])));
        }
        ++rep.points;
    }
    return rep;
}

}  // namespace fid
