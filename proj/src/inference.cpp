#include "fid/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fid/gfd.hpp"

namespace fid {

ConfidenceCurve confidence_curve(const Distribution1D& dist, const Grid& grid) {
    ConfidenceCurve cc;
    cc.grid = grid.points();
    cc.source = dist.describe();
    cc.values.reserve(cc.grid.size());
    for (double x : cc.grid) cc.values.push_back(std::fabs(1.0 - 2.0 * dist.cdf(x)));
    return cc;
}

std::pair<double, double> equal_tail_interval(const Distribution1D& dist, double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
    const double a = 0.5 * (1.0 - level);
    return {dist.quantile(a), dist.quantile(1.0 - a)};
}

CoverageReport pit_study(const std::string& label, double theta0, const ReplicateBuilder& build,
                         std::size_t replicates, std::uint64_t seed, const std::vector<double>& levels,
                         bool with_lengths) {
    if (replicates == 0) throw DomainError("need at least one replicate");
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw DomainError("levels must lie in (0, 1)");
    }
    CoverageReport rep;
    rep.model = label;
    rep.theta0 = theta0;
    rep.levels = levels;
    rep.replicates = replicates;
    rep.seed = seed;
    std::vector<std::size_t> hits(levels.size(), 0);
    std::vector<double> length(levels.size(), 0.0);
    rep.pit.reserve(replicates);
    for (std::size_t i = 0; i < replicates; ++i) {
        Rng rng = make_rng(seed, i);
        DistPtr h = build(rng);
        double u = h->cdf(theta0);
        rep.pit.push_back(u);
        for (std::size_t j = 0; j < levels.size(); ++j) {
            double a = 0.5 * (1.0 - levels[j]);
            // theta0 lies inside (q_a, q_{1-a}) exactly when a < H(theta0) < 1 - a
            if (u > a && u < 1.0 - a) ++hits[j];
            if (with_lengths) {
                auto [lo, hi] = equal_tail_interval(*h, levels[j]);
                length[j] += hi - lo;
            }
        }
    }
    for (std::size_t j = 0; j < levels.size(); ++j) {
        rep.coverage.push_back(static_cast<double>(hits[j]) / static_cast<double>(replicates));
        if (with_lengths) rep.mean_length.push_back(length[j] / static_cast<double>(replicates));
    }
    rep.ks = ks_statistic(rep.pit, [](double u) { return std::clamp(u, 0.0, 1.0); });
    return rep;
}

CoverageReport pit_uniformity(const ModelSpec& model, int n, double theta0, FiducialVariant variant,
                              std::size_t replicates, std::uint64_t seed, const std::vector<double>& levels,
                              bool with_lengths) {
    if (!model.param_space.contains(theta0)) throw DomainError("true parameter outside the parameter space");
    std::ostringstream label;
    label << model_key(model.family) << " n=" << n << " " << variant_name(variant);
    std::size_t fallbacks = 0;
    auto build = [&](Rng& rng) -> DistPtr {
        double s = stat_sample(model, n, theta0, rng);
        try {
            return fiducial(model, n, s, variant);
        } catch (const BoundaryError&) {
            // outside S_0 only one member of the pair is proper
            ++fallbacks;
            try {
                return fiducial(model, n, s, FiducialVariant::Right);
            } catch (const BoundaryError&) {
                return fiducial(model, n, s, FiducialVariant::Left);
            }
        }
    };
    CoverageReport rep = pit_study(label.str(), theta0, build, replicates, seed, levels, with_lengths);
    rep.boundary_fallbacks = fallbacks;
    return rep;
}

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
};

// a = 0 and b = 0 are the point masses at 0 and 1
Moments beta_moments(double a, double b) {
    if (a == 0.0) return {0.0, 0.0};
    if (b == 0.0) return {1.0, 0.0};
    double t = a + b;
    return {a / t, a * b / (t * t * (t + 1.0))};
}

Moments gamma_moments(double a, double rate) { return {a / rate, a / (rate * rate)}; }

// law of (1 - p) / p when p ~ Be(b, a); a = 0 is the point mass at 0
Moments beta_prime_moments(double a, double b) {
    if (a == 0.0) return {0.0, 0.0};
    return {a / (b - 1.0), a * (a + b - 1.0) / ((b - 2.0) * (b - 1.0) * (b - 1.0))};
}

Moments half_mixture(Moments u, Moments v) {
    double d = u.mean - v.mean;
    return {0.5 * (u.mean + v.mean), 0.5 * (u.var + v.var) + 0.25 * d * d};
}

enum class RiskModel { Binomial, NegBin, Poisson };

RiskModel risk_model(const ModelSpec& model) {
    switch (model.family) {
        case Family::Binomial:
            if (model.get("m") != 1.0) break;
            return RiskModel::Binomial;
        case Family::NegativeBinomial:
            if (model.get("m") != 1.0) break;
            return RiskModel::NegBin;
        case Family::Poisson: return RiskModel::Poisson;
        default: break;
    }
    throw UnsupportedError("risk gap is defined for binomial (m = 1), negative binomial (m = 1) and Poisson");
}

// fiducial moments of the mean of one observation given S = s
std::pair<Moments, Moments> arithmetic_and_geometric(RiskModel rm, int n, double s) {
    switch (rm) {
        case RiskModel::Binomial:
            return {half_mixture(beta_moments(s + 1.0, n - s), beta_moments(s, n - s + 1.0)),
                    beta_moments(s + 0.5, n - s + 0.5)};
        case RiskModel::Poisson: {
            Moments left = s == 0.0 ? Moments{} : gamma_moments(s, n);
            return {half_mixture(gamma_moments(s + 1.0, n), left), gamma_moments(s + 0.5, n)};
        }
        case RiskModel::NegBin:
            return {half_mixture(beta_prime_moments(s + 1.0, n), beta_prime_moments(s, n)),
                    beta_prime_moments(s + 0.5, n)};
    }
    return {};
}

}  // namespace

double risk_gap_formula(const ModelSpec& model, int n) {
    const double N = n;
    switch (risk_model(model)) {
        case RiskModel::Binomial: return 1.0 / (4.0 * (N + 1.0) * (N + 2.0));
        case RiskModel::NegBin:
            if (n < 3) throw DomainError("negative binomial risk needs n >= 3");
            return 1.0 / (4.0 * (N - 1.0) * (N - 2.0));
        case RiskModel::Poisson: return 1.0 / (4.0 * N * N);
    }
    return 0.0;
}

RiskReport confidence_risk_gap(const ModelSpec& model, int n, std::vector<double> mu_grid) {
    const RiskModel rm = risk_model(model);
    if (n < 1) throw DomainError("n must be positive");
    if (rm == RiskModel::NegBin && n < 3) throw DomainError("negative binomial risk needs n >= 3");
    if (mu_grid.empty()) {
        double lo = 0.05, hi = 0.95;
        if (rm == RiskModel::Poisson) lo = 0.5, hi = 5.0;
        if (rm == RiskModel::NegBin) lo = 0.25, hi = 4.0;
        mu_grid = Grid::uniform(lo, hi, 10).points();
    }
    const double tail = 1e-12;
    RiskReport rep;
    rep.model = model_key(model.family);
    rep.n = n;
    rep.mu = mu_grid;
    rep.analytic = risk_gap_formula(model, n);
    for (double mu : mu_grid) {
        double theta = mu;
        if (rm == RiskModel::Binomial && !(mu > 0.0 && mu < 1.0)) throw DomainError("binomial mean must lie in (0, 1)");
        if (!(mu > 0.0)) throw DomainError("mean must be positive");
        if (rm == RiskModel::NegBin) theta = 1.0 / (1.0 + mu);
        // R(mu, H) = Var^H + (E^H - mu)^2; the squared-error parts cancel when the means agree
        double gap = 0.0, mass = 0.0, dropped = 0.0;
        for (long s = 0;; ++s) {
            if (rm == RiskModel::Binomial && s > n) break;
            double pmf = std::exp(stat_log_pdf(model, n, theta, static_cast<double>(s)));
            auto [A, G] = arithmetic_and_geometric(rm, n, static_cast<double>(s));
            double ra = A.var + (A.mean - mu) * (A.mean - mu);
            double rg = G.var + (G.mean - mu) * (G.mean - mu);
            gap += pmf * (ra - rg);
            mass += pmf;
            rep.max_mean_difference = std::max(rep.max_mean_difference, std::fabs(A.mean - G.mean));
            if (rm != RiskModel::Binomial && mass > 1.0 - tail && pmf < tail) {
                dropped = std::max(0.0, 1.0 - mass);
                break;
            }
        }
        rep.gap.push_back(gap);
        // each term of the difference is bounded by the analytic per-s gap
        rep.truncation_bound = std::max(rep.truncation_bound, dropped * rep.analytic + 1e-15);
    }
    return rep;
}

Prior prior_from_name(const std::string& name) {
    if (name == "jeffreys") return Prior::Jeffreys;
    if (name == "reference") return Prior::Reference;
    if (name == "flat") return Prior::Flat;
    if (name == "one-over-theta") return Prior::OneOverTheta;
    throw UnsupportedError("unknown prior '" + name + "'");
}

std::string prior_name(Prior p) {
    switch (p) {
        case Prior::Jeffreys: return "jeffreys";
        case Prior::Reference: return "reference";
        case Prior::Flat: return "flat";
        case Prior::OneOverTheta: return "one-over-theta";
    }
    return "?";
}

namespace {

double trunc_exp_variance(double t) {
    if (std::fabs(t) < 1e-3) return 1.0 / 12.0 - t * t / 720.0;
    double e = std::expm1(t);
    return 1.0 / (t * t) - (e + 1.0) / (e * e);
}

double logarithmic_variance(double t) {
    double l = std::log1p(-t);
    return -t * (t + l) / ((1.0 - t) * (1.0 - t) * l * l);
}

}  // namespace

double log_prior(const ModelSpec& model, Prior prior, double theta) {
    if (!model.param_space.contains(theta)) return -kInf;
    if (prior == Prior::Flat) return 0.0;
    if (prior == Prior::OneOverTheta) {
        if (!(theta > 0.0)) throw DomainError("1/theta prior needs a positive parameter");
        return -std::log(theta);
    }
    // one-parameter models: the reference prior is the Jeffreys prior
    switch (model.family) {
        case Family::NormalKnownVar:
        case Family::UniformShift: return 0.0;
        case Family::NormalKnownMean:
        case Family::Gamma:
        case Family::Pareto:
        case Family::Weibull:
        case Family::UniformScale: return -std::log(theta);
        case Family::Binomial: return -0.5 * std::log(theta) - 0.5 * std::log1p(-theta);
        case Family::Poisson: return -0.5 * std::log(theta);
        case Family::NegativeBinomial: return -std::log(theta) - 0.5 * std::log1p(-theta);
        case Family::Logarithmic: return 0.5 * std::log(logarithmic_variance(theta)) - std::log(theta);
        case Family::TruncatedExponential: return 0.5 * std::log(trunc_exp_variance(theta));
        default: break;
    }
    throw UnsupportedError("no Jeffreys prior for this model");
}

DistPtr posterior_from_log(std::function<double(double)> log_post, Interval support, std::vector<double> breaks,
                           const std::string& name) {
    try {
        return std::make_shared<NumericDensity>(std::move(log_post), support, std::move(breaks), name);
    } catch (const ConvergenceError&) {
        throw DomainError("posterior is improper or not integrable (" + name + ")");
    }
}

DistPtr bayes_posterior(const ModelSpec& model, Prior prior, int n, double s) {
    if (model.param_dim != 1) throw UnsupportedError("one-parameter models only");
    Interval sup = model.param_space;
    if (model.family == Family::UniformScale) sup.lo = std::max(sup.lo, s);
    ParamCurve c = model_curve(model, n, s);
    std::vector<double> breaks;
    if (sup.contains(c.guess)) breaks.push_back(c.guess);
    auto lp = [model, prior, n, s](double t) {
        double ll = stat_log_pdf(model, n, t, s);
        return ll == -kInf ? -kInf : ll + log_prior(model, prior, t);
    };
    std::ostringstream name;
    name << prior_name(prior) << " posterior " << model_key(model.family) << " n=" << n << " s=" << s;
    return posterior_from_log(lp, sup, breaks, name.str());
}

DistPtr bayes_posterior_sample(const ModelSpec& model, Prior prior, std::span<const double> x) {
    if (model.param_dim != 1 || model.discrete) throw UnsupportedError("continuous one-parameter models only");
    Interval sup = gfd_support(model, x);
    std::vector<double> data(x.begin(), x.end());
    std::vector<double> breaks;
    if (sup.bounded()) {
        breaks.push_back(0.5 * (sup.lo + sup.hi));
    } else {
        double g = model_curve(model, static_cast<int>(x.size()), sufficient_statistic(model, x)).guess;
        if (sup.contains(g)) breaks.push_back(g);
    }
    auto lp = [model, prior, data](double t) {
        double th[1] = {t}, acc = log_prior(model, prior, t);
        for (double xi : data) acc += obs_log_pdf(model, th, xi);
        return acc;
    };
    std::ostringstream name;
    name << prior_name(prior) << " posterior " << model_key(model.family) << " n=" << x.size();
    return posterior_from_log(lp, sup, breaks, name.str());
}

std::pair<DistPtr, DistPtr> location_scale_posterior(const StandardFamily& f0, std::span<const double> x) {
    if (x.size() < 2) throw DomainError("need at least two observations");
    std::vector<double> data(x.begin(), x.end());
    const double n = static_cast<double>(data.size());
    const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : data) ss += (v - mean) * (v - mean);
    const double spread = std::sqrt(ss / (n - 1.0));
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (!(spread > 0.0)) throw BoundaryError("all observations are equal");

    // log of likelihood x 1/sigma
    auto ll = [f0, data](double theta, double sigma) {
        double acc = -std::log(sigma) * (static_cast<double>(data.size()) + 1.0);
        for (double v : data) acc += f0.log_pdf((v - theta) / sigma);
        return acc;
    };
    // log of the integral of exp(g), shifted by its largest value at the breaks
    auto log_integral = [](const std::function<double(double)>& g, double lo, double hi, std::vector<double> breaks) {
        double shift = -kInf;
        for (double b : breaks) shift = std::max(shift, g(b));
        if (!std::isfinite(shift)) return -kInf;
        auto h = [&](double t) {
            double v = g(t);
            return v == -kInf ? 0.0 : std::exp(v - shift);
        };
        double val = integrate_split(h, lo, hi, breaks, 1e-11).value;
        return val > 0.0 ? shift + std::log(val) : -kInf;
    };

    std::vector<double> theta_breaks = sorted;
    theta_breaks.push_back(mean);
    std::sort(theta_breaks.begin(), theta_breaks.end());
    auto log_sigma = [ll, log_integral, theta_breaks](double sigma) {
        return log_integral([&](double t) { return ll(t, sigma); }, -kInf, kInf, theta_breaks);
    };
    auto log_theta = [ll, log_integral, spread, data](double theta) {
        double rms = 0.0;
        for (double v : data) rms += (v - theta) * (v - theta);
        rms = std::sqrt(rms / static_cast<double>(data.size()));
        std::vector<double> br{std::min(spread, rms), std::max(spread, rms)};
        if (br[0] == br[1]) br.pop_back();
        return log_integral([&](double s) { return ll(theta, s); }, 0.0, kInf, br);
    };
    DistPtr sig = posterior_from_log(log_sigma, {0.0, kInf}, {spread}, "sigma posterior, prior 1/sigma");
    DistPtr th = posterior_from_log(log_theta, {-kInf, kInf}, {median}, "theta posterior, prior 1/sigma");
    return {sig, th};
}

double fiducial_bayes_gap(const Distribution1D& fid, const Distribution1D& post, const std::vector<double>& grid) {
    double gap = 0.0;
    for (double x : grid) gap = std::max(gap, std::fabs(fid.cdf(x) - post.cdf(x)));
    return gap;
}

}  // namespace fid
