#include "fid/crnef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/random/gamma_distribution.hpp>

namespace fid {

namespace {

bool is_integer(double v) { return std::fabs(v - std::round(v)) < 1e-9; }

double sum_first(std::span<const double> v, std::size_t k) {
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

double log1pexp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// y = C (1 - p) / p, a success probability to the mean count of a negative binomial step
MonotoneMap nb_mean_map(double C) {
    MonotoneMap m;
    m.forward = [C](double p) { return C * (1.0 - p) / p; };
    m.inverse = [C](double y) { return C / (C + y); };
    m.inverse_derivative = [C](double y) { return -C / ((C + y) * (C + y)); };
    m.increasing = false;
    m.image = {0.0, kInf};
    m.name = "nb-mean";
    return m;
}

// y = C / x on the positive half line
MonotoneMap reciprocal_map(double C) {
    MonotoneMap m;
    m.forward = [C](double x) { return C / x; };
    m.inverse = [C](double y) { return C / y; };
    m.inverse_derivative = [C](double y) { return -C / (y * y); };
    m.increasing = false;
    m.image = {0.0, kInf};
    m.name = "recip";
    return m;
}

MonotoneMap identity_map(Interval image) {
    MonotoneMap m = affine_map(1.0, 0.0);
    m.image = image;
    m.name = "id";
    return m;
}

MonotoneMap scaled_map(double a, Interval image) {
    MonotoneMap m = affine_map(a, 0.0);
    m.image = image;
    m.name = "scaled";
    return m;
}

enum class CellKind { Binomial, NegBin, Poisson, Normal, Gamma, NormalGiven };

CellKind cell_kind(const CrNefSpec& spec, int k) {
    switch (spec.family) {
        case CrNefFamily::Multinomial: return CellKind::Binomial;
        case CrNefFamily::NegativeMultinomial: return CellKind::NegBin;
        case CrNefFamily::PoissonNormal: return k < spec.m ? CellKind::Poisson : CellKind::Normal;
        case CrNefFamily::NegMultGammaNormal:
            if (k < spec.m) return CellKind::NegBin;
            return k == spec.m ? CellKind::Gamma : CellKind::NormalGiven;
    }
    return CellKind::Binomial;
}

// One conditional step: a catalog model for S_k given the earlier totals, in
// its own parameter, plus the maps from that parameter to phi_k and to mu_k.
struct Cell {
    ModelSpec model;
    int n_eff = 1;
    double stat = 0.0;
    MonotoneMap to_phi;
    std::function<MonotoneMap(std::span<const double> mu_earlier)> to_mu;
};

Cell make_cell(const CrNefSpec& spec, int n, std::span<const double> s, int k) {
    Cell c;
    c.stat = s[k];
    const double before = sum_first(s, static_cast<std::size_t>(k));
    switch (cell_kind(spec, k)) {
        case CellKind::Binomial: {
            // S_k | earlier ~ Bi(nN - sum, pi_k), mu_k = pi_k (N - sum of earlier mu)
            c.model = make_model(Family::Binomial, {{"m", n * spec.N - before}});
            c.to_phi = logit_map();
            double N = spec.N;
            c.to_mu = [N](std::span<const double> mu) {
                double room = N - std::accumulate(mu.begin(), mu.end(), 0.0);
                return scaled_map(room, {0.0, room});
            };
            break;
        }
        case CellKind::NegBin: {
            // S_k | earlier ~ NB(nR + sum, success p), phi_k = log(1 - p)
            c.model = make_model(Family::NegativeBinomial, {{"m", n * spec.R + before}});
            c.to_phi = log_one_minus_map();
            double R = spec.R;
            c.to_mu = [R](std::span<const double> mu) {
                return nb_mean_map(R + std::accumulate(mu.begin(), mu.end(), 0.0));
            };
            break;
        }
        case CellKind::Poisson:
            c.model = make_model(Family::Poisson);
            c.n_eff = n;
            c.to_phi = log_map();
            c.to_mu = [](std::span<const double>) { return identity_map({0.0, kInf}); };
            break;
        case CellKind::Normal:
            c.model = make_model(Family::NormalKnownVar, {{"sigma2", spec.sigma2}});
            c.n_eff = n;
            c.to_phi = affine_map(1.0 / spec.sigma2, 0.0);
            c.to_mu = [](std::span<const double>) { return identity_map({-kInf, kInf}); };
            break;
        case CellKind::Gamma: {
            // S_{m+1} | earlier ~ Ga(nR + sum, rate -phi)
            c.model = make_model(Family::Gamma, {{"alpha", n * spec.R + before}});
            c.to_phi = negate_map();
            double R = spec.R;
            int m = spec.m;
            c.to_mu = [R, m](std::span<const double> mu) {
                return reciprocal_map(R + std::accumulate(mu.begin(), mu.begin() + m, 0.0));
            };
            break;
        }
        case CellKind::NormalGiven: {
            // S_k | earlier ~ N(phi_k g, g) with g the gamma total; model mean theta = phi_k g
            const double g = s[spec.m];
            c.model = make_model(Family::NormalKnownVar, {{"sigma2", g}});
            c.to_phi = affine_map(1.0 / g, 0.0);
            int m = spec.m;
            c.to_mu = [g, m](std::span<const double> mu) { return affine_map(mu[m] / g, 0.0); };
            break;
        }
    }
    return c;
}

void check_totals(const CrNefSpec& spec, int n, std::span<const double> s) {
    if (n < 1) throw DomainError("sample size must be positive");
    if (static_cast<int>(s.size()) != spec.d) throw DomainError("statistic has the wrong dimension");
    for (int k = 0; k < spec.d; ++k) {
        CellKind kind = cell_kind(spec, k);
        bool counting = kind == CellKind::Binomial || kind == CellKind::NegBin || kind == CellKind::Poisson;
        if (counting && (!(s[k] >= 0.0) || !is_integer(s[k]))) {
            throw DomainError("counting cells need non-negative integer totals");
        }
        if (kind == CellKind::Gamma && !(s[k] > 0.0)) throw BoundaryError("gamma total must be positive");
    }
    if (spec.family == CrNefFamily::Multinomial && sum_first(s, s.size()) > n * spec.N + 1e-9) {
        throw DomainError("multinomial totals exceed the number of trials");
    }
}

StepChain crnef_chain(const CrNefSpec& spec, int n, std::span<const double> s, bool mu_space) {
    check_totals(spec, n, s);
    StepChain ch;
    ch.key = spec.name() + (mu_space ? " mu" : " phi");
    for (int k = 0; k < spec.d; ++k) {
        Cell cell = make_cell(spec, n, s, k);
        StepComponent comp;
        comp.param = (mu_space ? "mu" : "phi") + std::to_string(k + 1);
        comp.curve = [cell, mu_space](std::span<const double> e) {
            ParamCurve base = model_curve(cell.model, cell.n_eff, cell.stat);
            return reparameterize(base, mu_space ? cell.to_mu(e) : cell.to_phi);
        };
        comp.closed = [cell, mu_space](std::span<const double> e, FiducialVariant v) -> DistPtr {
            DistPtr cf = closed_form_fiducial(cell.model, cell.n_eff, cell.stat, v);
            if (!cf) return nullptr;
            return transformed(cf, mu_space ? cell.to_mu(e) : cell.to_phi);
        };
        ch.components.push_back(std::move(comp));
    }
    return ch;
}

}  // namespace

double CrNefSpec::q() const {
    switch (family) {
        case CrNefFamily::PoissonNormal: return 0.0;
        case CrNefFamily::Multinomial: return -1.0 / N;
        default: return 1.0 / R;
    }
}

double CrNefSpec::z(int k) const {
    CellKind kind = cell_kind(*this, k);
    return (kind == CellKind::Binomial || kind == CellKind::NegBin || kind == CellKind::Poisson) ? 1.0 : 0.0;
}

std::string CrNefSpec::name() const {
    std::ostringstream os;
    switch (family) {
        case CrNefFamily::PoissonNormal: os << "poisson-normal(m=" << m << ",sigma2=" << sigma2; break;
        case CrNefFamily::Multinomial: os << "multinomial(N=" << N; break;
        case CrNefFamily::NegativeMultinomial: os << "neg-multinomial(R=" << R; break;
        case CrNefFamily::NegMultGammaNormal: os << "nm-gamma-normal(m=" << m << ",R=" << R; break;
    }
    os << ",d=" << d << ")";
    return os.str();
}

std::vector<std::string> crnef_keys() { return {"multinomial", "neg-multinomial", "poisson-normal", "nm-gamma-normal"}; }

CrNefSpec crnef_spec(const std::string& key, int d, const std::map<std::string, double>& params) {
    auto get = [&](const std::string& name, double fallback) {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    };
    for (const auto& [k, v] : params) {
        if (k != "N" && k != "R" && k != "m" && k != "sigma2") throw DomainError("unknown cr-NEF parameter '" + k + "'");
        (void)v;
    }
    if (d < 1) throw DomainError("dimension must be at least 1");
    CrNefSpec s;
    s.d = d;
    if (key == "multinomial") {
        s.family = CrNefFamily::Multinomial;
        s.N = get("N", 1.0);
        if (!(s.N >= 1.0) || !is_integer(s.N)) throw DomainError("N must be a positive integer");
    } else if (key == "neg-multinomial") {
        s.family = CrNefFamily::NegativeMultinomial;
        s.R = get("R", 1.0);
    } else if (key == "poisson-normal") {
        s.family = CrNefFamily::PoissonNormal;
        s.m = static_cast<int>(get("m", d));
        s.sigma2 = get("sigma2", 1.0);
        if (s.m < 0 || s.m > d) throw DomainError("m must lie in [0, d]");
        if (!(s.sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
    } else if (key == "nm-gamma-normal") {
        s.family = CrNefFamily::NegMultGammaNormal;
        s.m = static_cast<int>(get("m", d - 1));
        s.R = get("R", 1.0);
        if (s.m < 0 || s.m >= d) throw DomainError("m must lie in [0, d - 1]");
    } else {
        throw UnsupportedError("unknown cr-NEF family '" + key + "'");
    }
    if (s.family == CrNefFamily::NegativeMultinomial || s.family == CrNefFamily::NegMultGammaNormal) {
        // the negative binomial steps need integer sizes
        if (!(s.R >= 1.0) || !is_integer(s.R)) throw DomainError("R must be a positive integer");
    }
    return s;
}

namespace {

// Invalid coordinates become NaN when not strict; later means depend on them
// and turn NaN too.
std::vector<double> mu_sequence(const CrNefSpec& spec, std::span<const double> phi, bool strict) {
    if (static_cast<int>(phi.size()) != spec.d) throw DomainError("phi has the wrong dimension");
    auto bad = [strict](const char* what) {
        if (strict) throw DomainError(what);
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<double> mu(phi.size());
    for (int k = 0; k < spec.d; ++k) {
        double f = phi[k];
        double before = sum_first(mu, static_cast<std::size_t>(k));
        switch (cell_kind(spec, k)) {
            case CellKind::Binomial: mu[k] = (spec.N - before) / (1.0 + std::exp(-f)); break;
            case CellKind::NegBin:
                mu[k] = f < 0.0 ? (spec.R + before) * std::exp(f) / (-std::expm1(f))
                                : bad("negative-multinomial phi must be negative");
                break;
            case CellKind::Poisson: mu[k] = std::exp(f); break;
            case CellKind::Normal: mu[k] = spec.sigma2 * f; break;
            case CellKind::Gamma:
                mu[k] = f < 0.0 ? (spec.R + before) / (-f) : bad("gamma phi must be negative");
                break;
            case CellKind::NormalGiven: mu[k] = f * mu[spec.m]; break;
        }
    }
    return mu;
}

}  // namespace

std::vector<double> mu_of_phi(const CrNefSpec& spec, std::span<const double> phi) {
    return mu_sequence(spec, phi, true);
}

std::vector<double> phi_of_mu(const CrNefSpec& spec, std::span<const double> mu) {
    if (static_cast<int>(mu.size()) != spec.d) throw DomainError("mu has the wrong dimension");
    std::vector<double> phi(mu.size());
    for (int k = 0; k < spec.d; ++k) {
        double upto = sum_first(mu, static_cast<std::size_t>(k) + 1);
        double before = upto - mu[k];
        switch (cell_kind(spec, k)) {
            case CellKind::Binomial:
                if (!(mu[k] > 0.0 && upto < spec.N)) throw BoundaryError("mu outside the multinomial simplex");
                phi[k] = std::log(mu[k]) - std::log(spec.N - upto);
                break;
            case CellKind::NegBin:
                if (!(mu[k] > 0.0)) throw BoundaryError("negative-multinomial mu must be positive");
                phi[k] = std::log(mu[k]) - std::log(spec.R + upto);
                break;
            case CellKind::Poisson:
                if (!(mu[k] > 0.0)) throw BoundaryError("Poisson mu must be positive");
                phi[k] = std::log(mu[k]);
                break;
            case CellKind::Normal: phi[k] = mu[k] / spec.sigma2; break;
            case CellKind::Gamma:
                if (!(mu[k] > 0.0)) throw BoundaryError("gamma mu must be positive");
                phi[k] = -(spec.R + before) / mu[k];
                break;
            case CellKind::NormalGiven: phi[k] = mu[k] / mu[spec.m]; break;
        }
    }
    return phi;
}

namespace {

// A_uk(phi_u): coefficient of x_k in the cumulant of cell u, k < u.
double coupling(const CrNefSpec& spec, int u, int k, double phi_u) {
    switch (cell_kind(spec, u)) {
        case CellKind::Binomial: return -log1pexp(phi_u);
        case CellKind::NegBin: return -std::log(-std::expm1(phi_u));
        case CellKind::Gamma: return -std::log(-phi_u);
        case CellKind::NormalGiven: return k == spec.m ? 0.5 * phi_u * phi_u : 0.0;
        default: return 0.0;
    }
}

}  // namespace

std::vector<double> theta_of_phi(const CrNefSpec& spec, std::span<const double> phi) {
    if (static_cast<int>(phi.size()) != spec.d) throw DomainError("phi has the wrong dimension");
    std::vector<double> th(phi.begin(), phi.end());
    for (int k = 0; k < spec.d; ++k) {
        for (int u = k + 1; u < spec.d; ++u) th[k] -= coupling(spec, u, k, phi[u]);
    }
    return th;
}

std::vector<double> phi_of_theta(const CrNefSpec& spec, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != spec.d) throw DomainError("theta has the wrong dimension");
    std::vector<double> phi(theta.begin(), theta.end());
    for (int k = spec.d - 1; k >= 0; --k) {
        for (int u = k + 1; u < spec.d; ++u) phi[k] += coupling(spec, u, k, phi[u]);
    }
    return phi;
}

std::vector<double> phi_of_p_multinomial(std::span<const double> p) {
    std::vector<double> phi(p.size());
    double used = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(p[k] >= 1e-12)) throw BoundaryError("cell probabilities must be positive");
        used += p[k];
        if (!(1.0 - used >= 1e-12)) throw BoundaryError("cell probabilities must leave positive remaining mass");
        phi[k] = std::log(p[k]) - std::log1p(-used);
    }
    return phi;
}

std::vector<double> p_of_phi_multinomial(std::span<const double> phi) {
    std::vector<double> p(phi.size());
    double room = 1.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        p[k] = room / (1.0 + std::exp(-phi[k]));
        room -= p[k];
    }
    return p;
}

JointFiducial joint_fiducial_phi(const CrNefSpec& spec, int n, std::span<const double> s, FiducialVariant variant,
                                 bool use_closed_form) {
    JointOptions o;
    o.variant = variant;
    o.use_closed_form = use_closed_form;
    return build_joint(crnef_chain(spec, n, s, false), o);
}

JointFiducial joint_fiducial_mu(const CrNefSpec& spec, int n, std::span<const double> s, FiducialVariant variant,
                                bool use_closed_form) {
    JointOptions o;
    o.variant = variant;
    o.use_closed_form = use_closed_form;
    return build_joint(crnef_chain(spec, n, s, true), o);
}

TriangularMap mu_map(const CrNefSpec& spec) {
    TriangularMap t;
    // both directions tolerate placeholder values in the later coordinates
    t.forward = [spec](std::span<const double> phi) { return mu_sequence(spec, phi, false); };
    t.inverse = [spec](std::span<const double> mu) {
        std::vector<double> out(mu.size(), 0.0);
        std::vector<double> head;
        for (std::size_t k = 0; k < mu.size(); ++k) {
            head.assign(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(k + 1));
            CrNefSpec sub = spec;
            sub.d = static_cast<int>(k + 1);
            try {
                out[k] = phi_of_mu(sub, head)[k];
            } catch (const BoundaryError&) {
                out[k] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        return out;
    };
    t.image = [spec](std::size_t k, std::span<const double> mu) -> Interval {
        switch (cell_kind(spec, static_cast<int>(k))) {
            case CellKind::Binomial: return {0.0, spec.N - std::accumulate(mu.begin(), mu.end(), 0.0)};
            case CellKind::Normal:
            case CellKind::NormalGiven: return {-kInf, kInf};
            default: return {0.0, kInf};
        }
    };
    for (int k = 0; k < spec.d; ++k) t.names.push_back("mu" + std::to_string(k + 1));
    return t;
}

JointFiducial multinomial_p_geometric(double N, int n, std::span<const double> s) {
    CrNefSpec spec;
    spec.family = CrNefFamily::Multinomial;
    spec.d = static_cast<int>(s.size());
    spec.N = N;
    check_totals(spec, n, s);
    StepChain ch;
    ch.key = "multinomial p";
    for (int k = 0; k < spec.d; ++k) {
        Cell cell = make_cell(spec, n, s, k);
        StepComponent comp;
        comp.param = "p" + std::to_string(k + 1);
        auto to_p = [](std::span<const double> e) {
            double room = 1.0 - std::accumulate(e.begin(), e.end(), 0.0);
            return scaled_map(room, {0.0, room});
        };
        comp.curve = [cell, to_p](std::span<const double> e) {
            return reparameterize(model_curve(cell.model, 1, cell.stat), to_p(e));
        };
        comp.closed = [cell, to_p](std::span<const double> e, FiducialVariant v) -> DistPtr {
            DistPtr cf = closed_form_fiducial(cell.model, 1, cell.stat, v);
            return cf ? transformed(cf, to_p(e)) : nullptr;
        };
        ch.components.push_back(std::move(comp));
    }
    JointOptions o;
    o.variant = FiducialVariant::Geometric;
    return build_joint(ch, o);
}

double generalized_dirichlet_log_pdf(double N, int n, std::span<const double> s, std::span<const double> p) {
    if (p.size() != s.size()) throw DomainError("p and s must have the same length");
    const double total = n * N;
    double acc = 0.0, used = 0.0, sused = 0.0;
    const std::size_t d = s.size();
    for (std::size_t k = 0; k < d; ++k) {
        if (!(p[k] > 0.0)) return -kInf;
        used += p[k];
        if (!(used < 1.0)) return -kInf;
        double rest = total - sused;  // trials left for cell k
        sused += s[k];
        double gamma_k = k + 1 < d ? -0.5 : total - 0.5 - sused;
        acc += (s[k] - 0.5) * std::log(p[k]) + gamma_k * std::log1p(-used);
        acc -= log_beta(s[k] + 0.5, rest - s[k] + 0.5);
    }
    return acc;
}

std::vector<std::vector<double>> sample_generalized_dirichlet(double N, int n, std::span<const double> s,
                                                              std::size_t count, std::uint64_t seed) {
    const double total = n * N;
    std::vector<double> a(s.size()), b(s.size());
    double sused = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        a[k] = s[k] + 0.5;
        b[k] = total - sused - s[k] + 0.5;
        sused += s[k];
        if (!(b[k] > 0.0)) throw BoundaryError("multinomial totals exceed the number of trials");
    }
    Rng rng = make_rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> p(s.size());
        double room = 1.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            double x = boost::random::gamma_distribution<double>(a[k])(rng);
            double y = boost::random::gamma_distribution<double>(b[k])(rng);
            p[k] = room * x / (x + y);
            room -= p[k];
        }
        out.push_back(std::move(p));
    }
    return out;
}

double fiducial_prior_log_pdf(const CrNefSpec& spec, std::span<const double> phi) {
    if (static_cast<int>(phi.size()) != spec.d) throw DomainError("phi has the wrong dimension");
    double acc = 0.0;
    for (int k = 0; k < spec.d; ++k) {
        double f = phi[k];
        switch (cell_kind(spec, k)) {
            case CellKind::Binomial: acc += 0.5 * f - log1pexp(f); break;
            case CellKind::NegBin:
                if (!(f < 0.0)) return -kInf;
                acc += 0.5 * f - std::log(-std::expm1(f));
                break;
            case CellKind::Poisson: acc += 0.5 * f; break;
            case CellKind::Gamma:
                if (!(f < 0.0)) return -kInf;
                acc -= std::log(-f);
                break;
            case CellKind::Normal:
            case CellKind::NormalGiven: break;
        }
    }
    return acc;
}

double crnef_log_likelihood(const CrNefSpec& spec, int n, std::span<const double> s, std::span<const double> phi) {
    check_totals(spec, n, s);
    if (static_cast<int>(phi.size()) != spec.d) throw DomainError("phi has the wrong dimension");
    double acc = 0.0;
    for (int k = 0; k < spec.d; ++k) {
        double f = phi[k];
        double before = sum_first(s, static_cast<std::size_t>(k));
        double cum = 0.0;
        switch (cell_kind(spec, k)) {
            case CellKind::Binomial: cum = (n * spec.N - before) * log1pexp(f); break;
            case CellKind::NegBin:
                if (!(f < 0.0)) return -kInf;
                cum = -(n * spec.R + before) * std::log(-std::expm1(f));
                break;
            case CellKind::Poisson: cum = n * std::exp(f); break;
            case CellKind::Normal: cum = 0.5 * n * spec.sigma2 * f * f; break;
            case CellKind::Gamma:
                if (!(f < 0.0)) return -kInf;
                cum = -(n * spec.R + before) * std::log(-f);
                break;
            case CellKind::NormalGiven: cum = 0.5 * s[spec.m] * f * f; break;
        }
        acc += f * s[k] - cum;
    }
    return acc;
}

}  // namespace fid
