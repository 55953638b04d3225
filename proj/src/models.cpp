#include "fid/models.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace fid {

namespace mp = boost::multiprecision;

double ModelSpec::get(const std::string& name) const {
    auto it = fixed.find(name);
    if (it == fixed.end()) throw DomainError("model parameter '" + name + "' is not set");
    return it->second;
}

namespace {

struct KeyEntry {
    const char* key;
    Family family;
};

constexpr KeyEntry kKeys[] = {
    {"normal-location", Family::NormalKnownVar},
    {"normal-variance", Family::NormalKnownMean},
    {"gamma-rate", Family::Gamma},
    {"pareto", Family::Pareto},
    {"weibull", Family::Weibull},
    {"binomial", Family::Binomial},
    {"poisson", Family::Poisson},
    {"negative-binomial", Family::NegativeBinomial},
    {"logarithmic", Family::Logarithmic},
    {"truncated-exponential", Family::TruncatedExponential},
    {"uniform-scale", Family::UniformScale},
    {"uniform-shift", Family::UniformShift},
    {"uniform-loc-scale", Family::UniformLocScale},
    {"normal-loc-scale", Family::NormalLocScale},
};

double dflt(const std::map<std::string, double>& m, const char* k, double v) {
    auto it = m.find(k);
    return it == m.end() ? v : it->second;
}

void require_theta(const ModelSpec& model, double theta) {
    const Interval& ps = model.param_space;
    bool ok = model.family == Family::Binomial ? (theta >= 0.0 && theta <= 1.0) : ps.contains(theta);
    if (!ok) throw DomainError("parameter outside the parameter space");
}

void require_one_param(const ModelSpec& model) {
    if (model.param_dim != 1) {
        throw DomainError("two-parameter model has no one-dimensional sufficient statistic");
    }
}

int trials(const ModelSpec& model, int n) {
    return n * static_cast<int>(std::lround(model.get("m")));
}

double log_choose(double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// Binomial(M, p) pmf at integer k.
double binom_pmf(int M, double p, long k) {
    if (k < 0 || k > M) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == M ? 1.0 : 0.0;
    return std::exp(log_choose(M, static_cast<double>(k)) + k * std::log(p) + (M - k) * std::log1p(-p));
}

double binom_cdf(int M, double p, long k) {
    if (k < 0) return 0.0;
    if (k >= M) return 1.0;
    if (static_cast<double>(k) <= M * p) {
        double acc = 0.0;
        for (long j = 0; j <= k; ++j) acc += binom_pmf(M, p, j);
        return std::min(acc, 1.0);
    }
    double upper = 0.0;
    for (long j = M; j > k; --j) upper += binom_pmf(M, p, j);
    return std::max(0.0, 1.0 - upper);
}

double pois_pmf(double lambda, long k) {
    if (k < 0) return 0.0;
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double pois_cdf(double lambda, long k) {
    if (k < 0) return 0.0;
    if (k > 20000) return boost::math::gamma_q(static_cast<double>(k) + 1.0, lambda);
    double acc = 0.0;
    for (long j = 0; j <= k; ++j) acc += pois_pmf(lambda, j);
    return std::min(acc, 1.0);
}

double negbin_pmf(double r, double p, long k) {
    if (k < 0) return 0.0;
    return std::exp(std::lgamma(k + r) - std::lgamma(r) - std::lgamma(k + 1.0) + r * std::log(p) +
                    k * std::log1p(-p));
}

double negbin_cdf(double r, double p, long k) {
    if (k < 0) return 0.0;
    if (k > 20000) return regularized_incomplete_beta(r, static_cast<double>(k) + 1.0, p);
    double acc = 0.0;
    for (long j = 0; j <= k; ++j) acc += negbin_pmf(r, p, j);
    return std::min(acc, 1.0);
}

// Logarithmic sum of n draws.
double log_pmf_logarithmic(int n, double theta, long t) {
    if (t < n) return -kInf;
    return std::lgamma(n + 1.0) + log_stirling_first_kind_abs(static_cast<int>(t), n) + t * std::log(theta) -
           std::lgamma(t + 1.0) - n * std::log(-std::log1p(-theta));
}

double dlog_pmf_logarithmic(int n, double theta, long t) {
    return t / theta + n / ((1.0 - theta) * std::log1p(-theta));
}

// Truncated exponential pieces. a(theta) = log(theta / (1 - e^{-theta})).
double trunc_a(double theta) {
    if (std::fabs(theta) < 1e-8) return theta / 2.0;
    double at = std::fabs(theta);
    double base = std::log(at) - log1mexp(at);
    return theta > 0.0 ? base : base - at;
}

// Mean of one observation: 1/theta - 1/(e^theta - 1).
double trunc_mean1(double theta) {
    if (std::fabs(theta) < 1e-2) {
        double t2 = theta * theta;
        return 0.5 - theta / 12.0 + theta * t2 / 720.0 - theta * t2 * t2 / 30240.0;
    }
    return 1.0 / theta - 1.0 / std::expm1(theta);
}

double irwin_hall_pdf(int n, double u) {
    if (u <= 0.0 || u >= n) return 0.0;
    if (n == 1) return 1.0;
    double acc = 0.0;
    int kmax = static_cast<int>(std::floor(u));
    for (int k = 0; k <= kmax; ++k) {
        double term = std::exp(log_choose(n, k) + (n - 1) * std::log(u - k));
        acc += (k % 2 == 0) ? term : -term;
    }
    return std::max(0.0, acc / std::exp(std::lgamma(static_cast<double>(n))));
}

double trunc_log_pdf_sum(int n, double theta, double s) {
    double f = irwin_hall_pdf(n, s);
    if (f <= 0.0) return -kInf;
    return n * trunc_a(theta) - theta * s + std::log(f);
}

std::vector<double> integer_breaks(int n) {
    std::vector<double> b;
    for (int k = 1; k < n; ++k) b.push_back(k);
    return b;
}

double trunc_partial(int n, double theta, double a, double b, bool derivative) {
    double m = n * trunc_mean1(theta);
    auto f = [&](double u) {
        double l = trunc_log_pdf_sum(n, theta, u);
        double p = l == -kInf ? 0.0 : std::exp(l);
        return derivative ? (m - u) * p : p;
    };
    return integrate_split(f, a, b, integer_breaks(n), 1e-12).value;
}

double trunc_cdf(int n, double theta, double s) {
    if (s <= 0.0) return 0.0;
    if (s >= n) return 1.0;
    double m = n * trunc_mean1(theta);
    if (s <= m) return std::clamp(trunc_partial(n, theta, 0.0, s, false), 0.0, 1.0);
    return std::clamp(1.0 - trunc_partial(n, theta, s, n, false), 0.0, 1.0);
}

double trunc_dcdf(int n, double theta, double s) {
    if (s <= 0.0 || s >= n) return 0.0;
    double m = n * trunc_mean1(theta);
    if (s <= m) return trunc_partial(n, theta, 0.0, s, true);
    return -trunc_partial(n, theta, s, n, true);
}

// Single truncated exponential observation.
double trunc_obs_cdf(double theta, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (theta == 0.0) return x;
    if (theta > 0.0) return std::expm1(-theta * x) / std::expm1(-theta);
    double at = -theta;
    return std::exp(at * (x - 1.0)) * (-std::expm1(-at * x)) / (-std::expm1(-at));
}

double trunc_obs_dlogcdf(double theta, double x) {
    if (std::fabs(theta) < 1e-2) {
        double x2 = x * x;
        return (1.0 - x) / 2.0 - theta * (1.0 - x2) / 12.0 + theta * theta * theta * (1.0 - x2 * x2) / 720.0;
    }
    auto bern = [](double y) { return y == 0.0 ? 1.0 : y / std::expm1(y); };
    return (bern(theta * x) - bern(theta)) / theta;
}

long floor_count(double s) { return static_cast<long>(std::floor(s + 1e-9)); }
long below_count(double s) { return static_cast<long>(std::ceil(s - 1e-9)) - 1; }
bool is_lattice(double s) { return std::fabs(s - std::round(s)) < 1e-9; }

struct Neumaier {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace

ModelSpec make_model(Family family, std::map<std::string, double> fixed) {
    ModelSpec m;
    m.family = family;
    switch (family) {
        case Family::NormalKnownVar:
            m.fixed = {{"sigma2", dflt(fixed, "sigma2", 1.0)}};
            m.param_space = {-kInf, kInf};
            break;
        case Family::NormalKnownMean:
            m.fixed = {{"mu", dflt(fixed, "mu", 0.0)}};
            m.param_space = {0.0, kInf};
            break;
        case Family::Gamma:
            m.fixed = {{"alpha", dflt(fixed, "alpha", 1.0)}};
            m.param_space = {0.0, kInf};
            break;
        case Family::Pareto:
            m.fixed = {{"x0", dflt(fixed, "x0", 1.0)}};
            m.param_space = {0.0, kInf};
            break;
        case Family::Weibull:
            m.fixed = {{"c", dflt(fixed, "c", 1.0)}};
            m.param_space = {0.0, kInf};
            break;
        case Family::Binomial:
            m.fixed = {{"m", dflt(fixed, "m", 1.0)}};
            m.param_space = {0.0, 1.0};
            m.discrete = true;
            break;
        case Family::Poisson:
            m.param_space = {0.0, kInf};
            m.discrete = true;
            break;
        case Family::NegativeBinomial:
            m.fixed = {{"m", dflt(fixed, "m", 1.0)}};
            m.param_space = {0.0, 1.0};
            m.discrete = true;
            break;
        case Family::Logarithmic:
            m.param_space = {0.0, 1.0};
            m.discrete = true;
            break;
        case Family::TruncatedExponential:
            m.param_space = {-kInf, kInf};
            break;
        case Family::UniformScale:
            m.param_space = {0.0, kInf};
            break;
        case Family::UniformShift:
            m.param_space = {-kInf, kInf};
            break;
        case Family::UniformLocScale:
        case Family::NormalLocScale:
            m.param_space = {-kInf, kInf};
            m.param_dim = 2;
            break;
    }
    for (const auto& [k, v] : fixed) {
        if (!m.fixed.count(k)) throw DomainError("parameter '" + k + "' does not apply to " + model_key(family));
    }
    for (const auto& [k, v] : m.fixed) {
        if (k == "mu") continue;
        if (!(v > 0.0)) throw DomainError("fixed parameter '" + k + "' must be positive");
        if (k == "m" && std::fabs(v - std::round(v)) > 0.0) throw DomainError("m must be an integer");
    }
    return m;
}

ModelSpec model_from_key(const std::string& key, std::map<std::string, double> fixed) {
    for (const auto& e : kKeys) {
        if (key == e.key) return make_model(e.family, std::move(fixed));
    }
    throw UnsupportedError("unknown model key '" + key + "'");
}

std::string model_key(Family family) {
    for (const auto& e : kKeys) {
        if (e.family == family) return e.key;
    }
    return "?";
}

std::vector<std::string> model_keys() {
    std::vector<std::string> out;
    for (const auto& e : kKeys) out.emplace_back(e.key);
    return out;
}

double sufficient_statistic(const ModelSpec& model, std::span<const double> x) {
    require_one_param(model);
    if (x.empty()) throw DomainError("empty sample");
    Neumaier acc;
    switch (model.family) {
        case Family::NormalKnownMean: {
            double mu = model.get("mu");
            for (double v : x) acc.add((v - mu) * (v - mu));
            return acc.value();
        }
        case Family::Pareto: {
            double x0 = model.get("x0");
            for (double v : x) {
                if (!(v > x0)) throw DomainError("pareto observation must exceed x0");
                acc.add(std::log(v / x0));
            }
            return acc.value();
        }
        case Family::Weibull: {
            double c = model.get("c");
            for (double v : x) {
                if (!(v > 0.0)) throw DomainError("weibull observation must be positive");
                acc.add(std::pow(v, c));
            }
            return acc.value();
        }
        case Family::UniformScale:
            return *std::max_element(x.begin(), x.end());
        case Family::UniformShift:
            return *std::min_element(x.begin(), x.end());
        default:
            for (double v : x) acc.add(v);
            return acc.value();
    }
}

std::string sufficient_statistic_name(const ModelSpec& model) {
    switch (model.family) {
        case Family::NormalKnownMean: return "sum (x - mu)^2";
        case Family::Pareto: return "sum log(x / x0)";
        case Family::Weibull: return "sum x^c";
        case Family::UniformScale: return "max x";
        case Family::UniformShift: return "min x";
        case Family::UniformLocScale:
        case Family::NormalLocScale: return "(none)";
        default: return "sum x";
    }
}

Interval stat_support(const ModelSpec& model, int n) {
    require_one_param(model);
    if (n < 1) throw DomainError("sample size must be at least 1");
    switch (model.family) {
        case Family::NormalKnownVar:
        case Family::UniformShift: return {-kInf, kInf};
        case Family::Binomial: return {0.0, static_cast<double>(trials(model, n))};
        case Family::Poisson:
        case Family::NegativeBinomial: return {0.0, kInf};
        case Family::Logarithmic: return {static_cast<double>(n), kInf};
        case Family::TruncatedExponential: return {0.0, static_cast<double>(n)};
        default: return {0.0, kInf};
    }
}

bool cdf_decreasing(const ModelSpec& model) {
    switch (model.family) {
        case Family::Gamma:
        case Family::Pareto:
        case Family::Weibull:
        case Family::NegativeBinomial:
        case Family::TruncatedExponential: return false;
        default: return true;
    }
}

double stat_cdf(const ModelSpec& model, int n, double theta, double s) {
    require_one_param(model);
    require_theta(model, theta);
    if (n < 1) throw DomainError("sample size must be at least 1");
    switch (model.family) {
        case Family::NormalKnownVar: {
            double sd = std::sqrt(n * model.get("sigma2"));
            return normal_cdf((s - n * theta) / sd);
        }
        case Family::NormalKnownMean:
            return s <= 0.0 ? 0.0 : regularized_gamma_p(n / 2.0, s / (2.0 * theta));
        case Family::Gamma:
            return s <= 0.0 ? 0.0 : regularized_gamma_p(n * model.get("alpha"), theta * s);
        case Family::Pareto:
        case Family::Weibull:
            return s <= 0.0 ? 0.0 : regularized_gamma_p(n, theta * s);
        case Family::Binomial: return binom_cdf(trials(model, n), theta, floor_count(s));
        case Family::Poisson: return pois_cdf(n * theta, floor_count(s));
        case Family::NegativeBinomial: return negbin_cdf(trials(model, n), theta, floor_count(s));
        case Family::Logarithmic: {
            long k = floor_count(s);
            double acc = 0.0;
            for (long t = n; t <= k; ++t) acc += std::exp(log_pmf_logarithmic(n, theta, t));
            return std::min(acc, 1.0);
        }
        case Family::TruncatedExponential: return trunc_cdf(n, theta, s);
        case Family::UniformScale:
            if (s <= 0.0) return 0.0;
            if (s >= theta) return 1.0;
            return std::pow(s / theta, n);
        case Family::UniformShift:
            if (s <= theta) return 0.0;
            if (s >= theta + 1.0) return 1.0;
            return -std::expm1(n * std::log1p(-(s - theta)));
        default: break;
    }
    throw DomainError("stat_cdf: unsupported family");
}

double stat_cdf_below(const ModelSpec& model, int n, double theta, double s) {
    if (!model.discrete) return stat_cdf(model, n, theta, s);
    return stat_cdf(model, n, theta, static_cast<double>(below_count(s)));
}

double stat_log_pdf(const ModelSpec& model, int n, double theta, double s) {
    require_one_param(model);
    require_theta(model, theta);
    if (model.discrete && !is_lattice(s)) return -kInf;
    long k = model.discrete ? std::lround(s) : 0;
    switch (model.family) {
        case Family::NormalKnownVar: {
            double v = n * model.get("sigma2");
            double z = (s - n * theta);
            return -0.5 * z * z / v - 0.5 * std::log(2.0 * M_PI * v);
        }
        case Family::NormalKnownMean: {
            if (s <= 0.0) return -kInf;
            double a = n / 2.0;
            return -a * std::log(2.0 * theta) + (a - 1.0) * std::log(s) - s / (2.0 * theta) - std::lgamma(a);
        }
        case Family::Gamma:
        case Family::Pareto:
        case Family::Weibull: {
            if (s <= 0.0) return -kInf;
            double a = model.family == Family::Gamma ? n * model.get("alpha") : n;
            return a * std::log(theta) + (a - 1.0) * std::log(s) - theta * s - std::lgamma(a);
        }
        case Family::Binomial: {
            double p = binom_pmf(trials(model, n), theta, k);
            return p > 0.0 ? std::log(p) : -kInf;
        }
        case Family::Poisson: return k < 0 ? -kInf : k * std::log(n * theta) - n * theta - std::lgamma(k + 1.0);
        case Family::NegativeBinomial: {
            double p = negbin_pmf(trials(model, n), theta, k);
            return p > 0.0 ? std::log(p) : -kInf;
        }
        case Family::Logarithmic: return log_pmf_logarithmic(n, theta, k);
        case Family::TruncatedExponential: return trunc_log_pdf_sum(n, theta, s);
        case Family::UniformScale:
            if (s <= 0.0 || s >= theta) return -kInf;
            return std::log(static_cast<double>(n)) + (n - 1) * std::log(s) - n * std::log(theta);
        case Family::UniformShift:
            if (s <= theta || s >= theta + 1.0) return -kInf;
            return std::log(static_cast<double>(n)) + (n - 1) * std::log1p(-(s - theta));
        default: break;
    }
    throw DomainError("stat_pdf: unsupported family");
}

double stat_pdf(const ModelSpec& model, int n, double theta, double s) {
    double l = stat_log_pdf(model, n, theta, s);
    return l == -kInf ? 0.0 : std::exp(l);
}

double stat_dcdf(const ModelSpec& model, int n, double theta, double s) {
    require_one_param(model);
    require_theta(model, theta);
    switch (model.family) {
        case Family::NormalKnownVar: {
            double sd = std::sqrt(n * model.get("sigma2"));
            return -n * normal_pdf((s - n * theta) / sd) / sd;
        }
        case Family::NormalKnownMean: {
            if (s <= 0.0) return 0.0;
            double x = s / (2.0 * theta);
            return -boost::math::gamma_p_derivative(n / 2.0, x) * x / theta;
        }
        case Family::Gamma:
        case Family::Pareto:
        case Family::Weibull: {
            if (s <= 0.0) return 0.0;
            double a = model.family == Family::Gamma ? n * model.get("alpha") : n;
            return boost::math::gamma_p_derivative(a, theta * s) * s;
        }
        case Family::Binomial: {
            int M = trials(model, n);
            long k = floor_count(s);
            if (k < 0 || k >= M) return 0.0;
            return -M * binom_pmf(M - 1, theta, k);
        }
        case Family::Poisson: {
            long k = floor_count(s);
            return k < 0 ? 0.0 : -n * pois_pmf(n * theta, k);
        }
        case Family::NegativeBinomial: {
            double r = trials(model, n);
            long k = floor_count(s);
            return k < 0 ? 0.0 : (r + k) / theta * negbin_pmf(r, theta, k);
        }
        case Family::Logarithmic: {
            long k = floor_count(s);
            double acc = 0.0;
            for (long t = n; t <= k; ++t) {
                acc += std::exp(log_pmf_logarithmic(n, theta, t)) * dlog_pmf_logarithmic(n, theta, t);
            }
            return acc;
        }
        case Family::TruncatedExponential: return trunc_dcdf(n, theta, s);
        case Family::UniformScale:
            if (s <= 0.0 || s >= theta) return 0.0;
            return -n * std::pow(s / theta, n) / theta;
        case Family::UniformShift:
            if (s <= theta || s >= theta + 1.0) return 0.0;
            return -n * std::pow(1.0 - (s - theta), n - 1);
        default: break;
    }
    throw DomainError("stat_dcdf: unsupported family");
}

double stat_dcdf_below(const ModelSpec& model, int n, double theta, double s) {
    if (!model.discrete) return stat_dcdf(model, n, theta, s);
    return stat_dcdf(model, n, theta, static_cast<double>(below_count(s)));
}

double stat_dpdf(const ModelSpec& model, int n, double theta, double s) {
    if (!model.discrete) throw DomainError("stat_dpdf: only defined for discrete models");
    if (!is_lattice(s)) return 0.0;
    return stat_dcdf(model, n, theta, s) - stat_dcdf_below(model, n, theta, s);
}

double stat_mean(const ModelSpec& model, int n, double theta) {
    require_one_param(model);
    require_theta(model, theta);
    switch (model.family) {
        case Family::NormalKnownVar: return n * theta;
        case Family::NormalKnownMean: return n * theta;
        case Family::Gamma: return n * model.get("alpha") / theta;
        case Family::Pareto:
        case Family::Weibull: return n / theta;
        case Family::Binomial: return trials(model, n) * theta;
        case Family::Poisson: return n * theta;
        case Family::NegativeBinomial: return trials(model, n) * (1.0 - theta) / theta;
        case Family::Logarithmic: return n * theta / ((theta - 1.0) * std::log1p(-theta));
        case Family::TruncatedExponential: return n * trunc_mean1(theta);
        case Family::UniformScale: return theta * n / (n + 1.0);
        case Family::UniformShift: return theta + 1.0 / (n + 1.0);
        default: break;
    }
    throw DomainError("stat_mean: unsupported family");
}

namespace {

double draw_logarithmic(double theta, Rng& rng) {
    double u = uniform01(rng);
    double p = -theta / std::log1p(-theta);
    double acc = p;
    long x = 1;
    while (acc < u && x < 100000000) {
        p *= theta * x / (x + 1.0);
        ++x;
        acc += p;
        if (p < 1e-300) break;
    }
    return static_cast<double>(x);
}

double draw_trunc_exp(double theta, Rng& rng) {
    double u = uniform01(rng);
    if (std::fabs(theta) < 1e-12) return u;
    // invert F(x) = (1 - e^{-theta x}) / (1 - e^{-theta})
    return -std::log1p(u * std::expm1(-theta)) / theta;
}

}  // namespace

double stat_sample(const ModelSpec& model, int n, double theta, Rng& rng) {
    require_one_param(model);
    require_theta(model, theta);
    if (n < 1) throw DomainError("sample size must be at least 1");
    switch (model.family) {
        case Family::NormalKnownVar:
            return n * theta + std::sqrt(n * model.get("sigma2")) * normal_quantile(uniform01(rng));
        case Family::NormalKnownMean:
            return boost::random::gamma_distribution<double>(n / 2.0, 2.0 * theta)(rng);
        case Family::Gamma:
            return boost::random::gamma_distribution<double>(n * model.get("alpha"), 1.0 / theta)(rng);
        case Family::Pareto:
        case Family::Weibull:
            return boost::random::gamma_distribution<double>(n, 1.0 / theta)(rng);
        case Family::Binomial: {
            int M = trials(model, n);
            if (theta == 0.0) return 0.0;
            if (theta == 1.0) return M;
            return boost::random::binomial_distribution<int, double>(M, theta)(rng);
        }
        case Family::Poisson: return boost::random::poisson_distribution<long, double>(n * theta)(rng);
        case Family::NegativeBinomial:
            return boost::random::negative_binomial_distribution<long, double>(trials(model, n), theta)(rng);
        case Family::Logarithmic: {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += draw_logarithmic(theta, rng);
            return acc;
        }
        case Family::TruncatedExponential: {
            Neumaier acc;
            for (int i = 0; i < n; ++i) acc.add(draw_trunc_exp(theta, rng));
            return acc.value();
        }
        case Family::UniformScale: return theta * std::pow(uniform01(rng), 1.0 / n);
        case Family::UniformShift: return theta + 1.0 - std::pow(uniform01(rng), 1.0 / n);
        default: break;
    }
    throw DomainError("stat_sample: unsupported family");
}

double stat_sample(const ModelSpec& model, int n, double theta, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return stat_sample(model, n, theta, rng);
}

std::vector<double> sample_observations(const ModelSpec& model, int n, std::span<const double> theta,
                                        Rng& rng) {
    if (static_cast<int>(theta.size()) != model.param_dim) throw DomainError("parameter vector has wrong size");
    if (n < 1) throw DomainError("sample size must be at least 1");
    std::vector<double> x(static_cast<std::size_t>(n));
    double t = theta[0];
    if (model.param_dim == 1) require_theta(model, t);
    for (auto& v : x) {
        switch (model.family) {
            case Family::NormalKnownVar: v = t + std::sqrt(model.get("sigma2")) * normal_quantile(uniform01(rng)); break;
            case Family::NormalKnownMean: v = model.get("mu") + std::sqrt(t) * normal_quantile(uniform01(rng)); break;
            case Family::Gamma: v = boost::random::gamma_distribution<double>(model.get("alpha"), 1.0 / t)(rng); break;
            case Family::Pareto: v = model.get("x0") * std::exp(-std::log(uniform01(rng)) / t); break;
            case Family::Weibull: v = std::pow(-std::log(uniform01(rng)) / t, 1.0 / model.get("c")); break;
            case Family::Binomial: v = stat_sample(model, 1, t, rng); break;
            case Family::Poisson: v = stat_sample(model, 1, t, rng); break;
            case Family::NegativeBinomial: v = stat_sample(model, 1, t, rng); break;
            case Family::Logarithmic: v = draw_logarithmic(t, rng); break;
            case Family::TruncatedExponential: v = draw_trunc_exp(t, rng); break;
            case Family::UniformScale: v = t * uniform01(rng); break;
            case Family::UniformShift: v = t + uniform01(rng); break;
            case Family::UniformLocScale:
                if (!(theta[1] > 0.0)) throw DomainError("scale must be positive");
                v = t + theta[1] * uniform01(rng);
                break;
            case Family::NormalLocScale:
                if (!(theta[1] > 0.0)) throw DomainError("scale must be positive");
                v = t + theta[1] * normal_quantile(uniform01(rng));
                break;
        }
    }
    return x;
}

double obs_log_pdf(const ModelSpec& model, std::span<const double> theta, double x) {
    double t = theta[0];
    switch (model.family) {
        case Family::NormalKnownVar: {
            double s2 = model.get("sigma2");
            return -0.5 * (x - t) * (x - t) / s2 - 0.5 * std::log(2.0 * M_PI * s2);
        }
        case Family::NormalKnownMean: {
            double mu = model.get("mu");
            return -0.5 * (x - mu) * (x - mu) / t - 0.5 * std::log(2.0 * M_PI * t);
        }
        case Family::Gamma: {
            double a = model.get("alpha");
            if (x <= 0.0) return -kInf;
            return a * std::log(t) + (a - 1.0) * std::log(x) - t * x - std::lgamma(a);
        }
        case Family::Pareto: {
            double x0 = model.get("x0");
            if (x <= x0) return -kInf;
            return std::log(t) + t * std::log(x0) - (t + 1.0) * std::log(x);
        }
        case Family::Weibull: {
            double c = model.get("c");
            if (x <= 0.0) return -kInf;
            return std::log(c * t) + (c - 1.0) * std::log(x) - t * std::pow(x, c);
        }
        case Family::TruncatedExponential:
            if (x <= 0.0 || x >= 1.0) return -kInf;
            return trunc_a(t) - t * x;
        case Family::UniformScale:
            return (x > 0.0 && x < t) ? -std::log(t) : -kInf;
        case Family::UniformShift:
            return (x > t && x < t + 1.0) ? 0.0 : -kInf;
        case Family::UniformLocScale:
            return (x > t && x < t + theta[1]) ? -std::log(theta[1]) : -kInf;
        case Family::NormalLocScale: {
            double z = (x - t) / theta[1];
            return -0.5 * z * z - std::log(theta[1]) - 0.5 * std::log(2.0 * M_PI);
        }
        default: break;
    }
    throw DomainError("obs_log_pdf: discrete families are not supported");
}

double obs_cdf(const ModelSpec& model, std::span<const double> theta, double x) {
    double t = theta[0];
    switch (model.family) {
        case Family::NormalKnownVar: return normal_cdf((x - t) / std::sqrt(model.get("sigma2")));
        case Family::NormalKnownMean: return normal_cdf((x - model.get("mu")) / std::sqrt(t));
        case Family::Gamma: return x <= 0.0 ? 0.0 : regularized_gamma_p(model.get("alpha"), t * x);
        case Family::Pareto: {
            double x0 = model.get("x0");
            return x <= x0 ? 0.0 : -std::expm1(t * std::log(x0 / x));
        }
        case Family::Weibull: return x <= 0.0 ? 0.0 : -std::expm1(-t * std::pow(x, model.get("c")));
        case Family::TruncatedExponential: return trunc_obs_cdf(t, x);
        case Family::UniformScale: return std::clamp(x / t, 0.0, 1.0);
        case Family::UniformShift: return std::clamp(x - t, 0.0, 1.0);
        case Family::UniformLocScale: return std::clamp((x - t) / theta[1], 0.0, 1.0);
        case Family::NormalLocScale: return normal_cdf((x - t) / theta[1]);
        default: break;
    }
    throw DomainError("obs_cdf: discrete families are not supported");
}

std::vector<double> obs_dcdf(const ModelSpec& model, std::span<const double> theta, double x) {
    double t = theta[0];
    switch (model.family) {
        case Family::NormalKnownVar: {
            double sd = std::sqrt(model.get("sigma2"));
            return {-normal_pdf((x - t) / sd) / sd};
        }
        case Family::NormalKnownMean: {
            double z = (x - model.get("mu")) / std::sqrt(t);
            return {-normal_pdf(z) * z / (2.0 * t)};
        }
        case Family::Gamma:
            return {x <= 0.0 ? 0.0 : x * boost::math::gamma_p_derivative(model.get("alpha"), t * x)};
        case Family::Pareto: {
            double x0 = model.get("x0");
            return {x <= x0 ? 0.0 : std::exp(t * std::log(x0 / x)) * std::log(x / x0)};
        }
        case Family::Weibull: {
            double xc = std::pow(x, model.get("c"));
            return {x <= 0.0 ? 0.0 : xc * std::exp(-t * xc)};
        }
        case Family::TruncatedExponential:
            if (x <= 0.0 || x >= 1.0) return {0.0};
            return {trunc_obs_cdf(t, x) * trunc_obs_dlogcdf(t, x)};
        case Family::UniformScale: return {(x > 0.0 && x < t) ? -x / (t * t) : 0.0};
        case Family::UniformShift: return {(x > t && x < t + 1.0) ? -1.0 : 0.0};
        case Family::UniformLocScale: {
            double s = theta[1];
            if (!(x > t && x < t + s)) return {0.0, 0.0};
            return {-1.0 / s, -(x - t) / (s * s)};
        }
        case Family::NormalLocScale: {
            double s = theta[1];
            double z = (x - t) / s;
            return {-normal_pdf(z) / s, -normal_pdf(z) * z / s};
        }
        default: break;
    }
    throw DomainError("obs_dcdf: discrete families are not supported");
}

namespace {

std::mutex g_stirling_mutex;
std::vector<std::vector<mp::cpp_int>> g_stirling{{mp::cpp_int(1)}};
std::vector<std::vector<double>> g_log_stirling{{0.0}};

double log_of(const mp::cpp_int& v) {
    if (v <= 0) return -kInf;
    std::size_t bits = mp::msb(v);
    if (bits < 900) return std::log(v.convert_to<double>());
    std::size_t shift = bits - 60;
    mp::cpp_int top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * M_LN2;
}

void grow_stirling(int t) {
    while (static_cast<int>(g_stirling.size()) <= t) {
        const auto& prev = g_stirling.back();
        int r = static_cast<int>(g_stirling.size()) - 1;  // row index of prev
        std::vector<mp::cpp_int> next(static_cast<std::size_t>(r + 2));
        for (int k = 0; k <= r + 1; ++k) {
            mp::cpp_int v = 0;
            if (k <= r) v += prev[static_cast<std::size_t>(k)] * r;
            if (k >= 1) v += prev[static_cast<std::size_t>(k - 1)];
            next[static_cast<std::size_t>(k)] = v;
        }
        std::vector<double> logs(next.size());
        for (std::size_t k = 0; k < next.size(); ++k) logs[k] = log_of(next[k]);
        g_stirling.push_back(std::move(next));
        g_log_stirling.push_back(std::move(logs));
    }
}

}  // namespace

mp::cpp_int stirling_first_kind_abs(int t, int n) {
    if (n < 1 || t < n) throw DomainError("stirling_first_kind_abs: need 1 <= n <= t");
    std::lock_guard<std::mutex> lock(g_stirling_mutex);
    grow_stirling(t);
    return g_stirling[static_cast<std::size_t>(t)][static_cast<std::size_t>(n)];
}

double log_stirling_first_kind_abs(int t, int n) {
    if (n < 1 || t < n) throw DomainError("log_stirling_first_kind_abs: need 1 <= n <= t");
    std::lock_guard<std::mutex> lock(g_stirling_mutex);
    grow_stirling(t);
    return g_log_stirling[static_cast<std::size_t>(t)][static_cast<std::size_t>(n)];
}

}  // namespace fid
