#include "fid/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace fid {

namespace {

std::string fmt2(const char* name, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << name << '(' << a << ", " << b << ')';
    return os.str();
}

// Wraps a boost.math distribution object.
template <class D>
class BoostDist : public Distribution1D {
public:
    BoostDist(D d, Interval support, std::string name)
        : d_(std::move(d)), support_(support), name_(std::move(name)) {}

    double pdf(double x) const override {
        if (!(x > support_.lo && x < support_.hi)) return 0.0;
        return boost::math::pdf(d_, x);
    }
    double log_pdf(double x) const override {
        double p = pdf(x);
        return p > 0.0 ? std::log(p) : -kInf;
    }
    double cdf(double x) const override {
        if (x <= support_.lo) return 0.0;
        if (x >= support_.hi) return 1.0;
        return boost::math::cdf(d_, x);
    }
    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must be in (0, 1)");
        return boost::math::quantile(d_, u);
    }
    Interval support() const override { return support_; }
    std::string describe() const override { return name_; }
    double center() const override { return boost::math::median(d_); }
    double mean() const override { return boost::math::mean(d_); }

private:
    D d_;
    Interval support_;
    std::string name_;
};

class BetaPrime : public Distribution1D {
public:
    BetaPrime(double a, double b) : a_(a), b_(b), base_(a, b), lb_(log_beta(a, b)) {}

    double pdf(double x) const override { return x > 0.0 ? std::exp(log_pdf(x)) : 0.0; }
    double log_pdf(double x) const override {
        if (!(x > 0.0)) return -kInf;
        return (a_ - 1.0) * std::log(x) - (a_ + b_) * std::log1p(x) - lb_;
    }
    double cdf(double x) const override {
        if (!(x > 0.0)) return 0.0;
        if (std::isinf(x)) return 1.0;
        // I_{x/(1+x)}(a, b), evaluated through the complement for large x.
        if (x <= 1.0) return boost::math::ibeta(a_, b_, x / (1.0 + x));
        return boost::math::ibetac(b_, a_, 1.0 / (1.0 + x));
    }
    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must be in (0, 1)");
        double v = boost::math::quantile(base_, u);
        return v / (1.0 - v);
    }
    Interval support() const override { return {0.0, kInf}; }
    std::string describe() const override { return fmt2("BetaPrime", a_, b_); }
    double center() const override { return quantile(0.5); }
    double mean() const override { return b_ > 1.0 ? a_ / (b_ - 1.0) : kInf; }

private:
    double a_, b_;
    boost::math::beta_distribution<double> base_;
    double lb_;
};

class Pareto : public Distribution1D {
public:
    Pareto(double lo, double k) : lo_(lo), k_(k) {}
    double pdf(double x) const override {
        return x > lo_ ? k_ * std::pow(lo_, k_) / std::pow(x, k_ + 1.0) : 0.0;
    }
    double cdf(double x) const override {
        return x > lo_ ? -std::expm1(k_ * std::log(lo_ / x)) : 0.0;
    }
    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must be in (0, 1)");
        return lo_ * std::exp(-std::log1p(-u) / k_);
    }
    Interval support() const override { return {lo_, kInf}; }
    std::string describe() const override { return fmt2("Pareto", lo_, k_); }
    double center() const override { return quantile(0.5); }
    double mean() const override { return k_ > 1.0 ? k_ * lo_ / (k_ - 1.0) : kInf; }

private:
    double lo_, k_;
};

class Transformed : public Distribution1D {
public:
    Transformed(DistPtr base, MonotoneMap map) : base_(std::move(base)), map_(std::move(map)) {}

    double pdf(double y) const override {
        if (!map_.image.contains(y)) return 0.0;
        double x = map_.inverse(y);
        return base_->pdf(x) * std::fabs(map_.inverse_derivative(y));
    }
    double log_pdf(double y) const override {
        if (!map_.image.contains(y)) return -kInf;
        double x = map_.inverse(y);
        return base_->log_pdf(x) + std::log(std::fabs(map_.inverse_derivative(y)));
    }
    double cdf(double y) const override {
        if (y <= map_.image.lo) return 0.0;
        if (y >= map_.image.hi) return 1.0;
        double c = base_->cdf(map_.inverse(y));
        return map_.increasing ? c : 1.0 - c;
    }
    double quantile(double u) const override {
        return map_.forward(base_->quantile(map_.increasing ? u : 1.0 - u));
    }
    Interval support() const override { return map_.image; }
    std::string describe() const override { return map_.name + "[" + base_->describe() + "]"; }
    double center() const override { return map_.forward(base_->center()); }
    double mean() const override { return Distribution1D::mean(); }

private:
    DistPtr base_;
    MonotoneMap map_;
};

class Mixture : public Distribution1D {
public:
    Mixture(std::vector<DistPtr> parts, std::vector<double> weights)
        : parts_(std::move(parts)), weights_(std::move(weights)) {
        if (parts_.empty() || parts_.size() != weights_.size()) {
            throw DomainError("mixture: parts and weights must match");
        }
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw DomainError("mixture: negative weight");
            total += w;
        }
        for (double& w : weights_) w /= total;
        support_ = parts_.front()->support();
        for (const auto& p : parts_) {
            support_.lo = std::min(support_.lo, p->support().lo);
            support_.hi = std::max(support_.hi, p->support().hi);
        }
    }
    double pdf(double x) const override {
        double v = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) v += weights_[i] * parts_[i]->pdf(x);
        return v;
    }
    double cdf(double x) const override {
        double v = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) v += weights_[i] * parts_[i]->cdf(x);
        return v;
    }
    Interval support() const override { return support_; }
    std::string describe() const override {
        std::string s = "Mixture(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ", ";
            s += parts_[i]->describe();
        }
        return s + ")";
    }
    double center() const override {
        double c = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) c += weights_[i] * parts_[i]->center();
        return c;
    }
    double mean() const override {
        double m = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) m += weights_[i] * parts_[i]->mean();
        return m;
    }

private:
    std::vector<DistPtr> parts_;
    std::vector<double> weights_;
    Interval support_;
};

}  // namespace

double Distribution1D::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must be in (0, 1)");
    return find_root_expanding([this](double x) { return cdf(x); }, u, center(), support());
}

double Distribution1D::center() const {
    Interval s = support();
    if (s.bounded()) return 0.5 * (s.lo + s.hi);
    if (s.lo > -kInf) return s.lo + 1.0;
    if (s.hi < kInf) return s.hi - 1.0;
    return 0.0;
}

double Distribution1D::mean() const {
    Interval s = support();
    double c = center();
    return integrate_split([this](double x) { return x * pdf(x); }, s.lo, s.hi, {c}).value;
}

double Distribution1D::log_pdf(double x) const {
    double p = pdf(x);
    return p > 0.0 ? std::log(p) : -kInf;
}

DistPtr normal_dist(double mean, double sd) {
    if (!(sd > 0.0)) throw DomainError("normal_dist: sd must be positive");
    return std::make_shared<BoostDist<boost::math::normal_distribution<double>>>(
        boost::math::normal_distribution<double>(mean, sd), Interval{-kInf, kInf},
        fmt2("N", mean, sd * sd));
}

DistPtr gamma_dist(double shape, double rate) {
    if (!(shape > 0.0 && rate > 0.0)) throw DomainError("gamma_dist: shape and rate must be positive");
    return std::make_shared<BoostDist<boost::math::gamma_distribution<double>>>(
        boost::math::gamma_distribution<double>(shape, 1.0 / rate), Interval{0.0, kInf},
        fmt2("Ga", shape, rate));
}

DistPtr inverse_gamma_dist(double shape, double rate) {
    if (!(shape > 0.0 && rate > 0.0)) throw DomainError("inverse_gamma_dist: parameters must be positive");
    return std::make_shared<BoostDist<boost::math::inverse_gamma_distribution<double>>>(
        boost::math::inverse_gamma_distribution<double>(shape, rate), Interval{0.0, kInf},
        fmt2("InGa", shape, rate));
}

DistPtr beta_dist(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("beta_dist: parameters must be positive");
    return std::make_shared<BoostDist<boost::math::beta_distribution<double>>>(
        boost::math::beta_distribution<double>(a, b), Interval{0.0, 1.0}, fmt2("Be", a, b));
}

DistPtr beta_prime_dist(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("beta_prime_dist: parameters must be positive");
    return std::make_shared<BetaPrime>(a, b);
}

DistPtr uniform_dist(double lo, double hi) {
    if (!(lo < hi)) throw DomainError("uniform_dist: need lo < hi");
    MonotoneMap m = affine_map(hi - lo, lo);
    m.image = {lo, hi};
    m.name = fmt2("U", lo, hi);
    return std::make_shared<Transformed>(beta_dist(1.0, 1.0), m);
}

DistPtr pareto_dist(double lo, double k) {
    if (!(lo > 0.0 && k > 0.0)) throw DomainError("pareto_dist: parameters must be positive");
    return std::make_shared<Pareto>(lo, k);
}

NumericDensity::NumericDensity(std::function<double(double)> log_density, Interval support,
                               std::vector<double> breaks, std::string name, double tol)
    : log_density_(std::move(log_density)),
      support_(support),
      breaks_(std::move(breaks)),
      name_(std::move(name)),
      tol_(tol) {
    if (!(support_.lo < support_.hi)) throw DomainError("NumericDensity: empty support");
    std::vector<double> inside;
    for (double b : breaks_) {
        if (support_.contains(b)) inside.push_back(b);
    }
    std::sort(inside.begin(), inside.end());
    breaks_ = inside;
    if (breaks_.empty()) breaks_.push_back(Distribution1D::center());
    pivot_ = breaks_.front();
    shift_ = -kInf;
    for (double b : breaks_) shift_ = std::max(shift_, log_density_(b));
    if (!std::isfinite(shift_)) shift_ = 0.0;
    double total = mass(support_.lo, support_.hi);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw ConvergenceError("NumericDensity: density is not integrable (" + name_ + ")");
    }
    log_norm_ = shift_ + std::log(total);
    mass_below_pivot_ = mass(support_.lo, pivot_) / total;
}

double NumericDensity::unnormalized(double x) const {
    if (!support_.contains(x)) return 0.0;
    double l = log_density_(x);
    return l == -kInf ? 0.0 : std::exp(l - shift_);
}

double NumericDensity::mass(double a, double b) const {
    return integrate_split([this](double x) { return unnormalized(x); }, a, b, breaks_, tol_).value;
}

double NumericDensity::log_pdf(double x) const {
    if (!support_.contains(x)) return -kInf;
    return log_density_(x) - log_norm_;
}

double NumericDensity::pdf(double x) const {
    double l = log_pdf(x);
    return l == -kInf ? 0.0 : std::exp(l);
}

double NumericDensity::cdf(double x) const {
    if (x <= support_.lo) return 0.0;
    if (x >= support_.hi) return 1.0;
    double scale = std::exp(shift_ - log_norm_);
    if (x <= pivot_) return std::clamp(mass(support_.lo, x) * scale, 0.0, 1.0);
    return std::clamp(1.0 - mass(x, support_.hi) * scale, 0.0, 1.0);
}

DistPtr transformed(DistPtr base, MonotoneMap map) {
    return std::make_shared<Transformed>(std::move(base), std::move(map));
}

DistPtr mixture(std::vector<DistPtr> parts, std::vector<double> weights) {
    return std::make_shared<Mixture>(std::move(parts), std::move(weights));
}

MonotoneMap logit_map() {
    MonotoneMap m;
    m.forward = [](double u) { return std::log(u) - std::log1p(-u); };
    m.inverse = [](double y) { return 1.0 / (1.0 + std::exp(-y)); };
    m.inverse_derivative = [](double y) {
        double e = std::exp(-std::fabs(y));
        return e / ((1.0 + e) * (1.0 + e));
    };
    m.increasing = true;
    m.image = {-kInf, kInf};
    m.name = "logit";
    return m;
}

MonotoneMap log_map() {
    MonotoneMap m;
    m.forward = [](double u) { return std::log(u); };
    m.inverse = [](double y) { return std::exp(y); };
    m.inverse_derivative = [](double y) { return std::exp(y); };
    m.increasing = true;
    m.image = {-kInf, kInf};
    m.name = "log";
    return m;
}

MonotoneMap odds_map() {
    MonotoneMap m;
    m.forward = [](double u) { return u / (1.0 - u); };
    m.inverse = [](double y) { return y / (1.0 + y); };
    m.inverse_derivative = [](double y) { return 1.0 / ((1.0 + y) * (1.0 + y)); };
    m.increasing = true;
    m.image = {0.0, kInf};
    m.name = "odds";
    return m;
}

MonotoneMap log_one_minus_map() {
    MonotoneMap m;
    m.forward = [](double u) { return std::log1p(-u); };
    m.inverse = [](double y) { return -std::expm1(y); };
    m.inverse_derivative = [](double y) { return -std::exp(y); };
    m.increasing = false;
    m.image = {-kInf, 0.0};
    m.name = "log1m";
    return m;
}

MonotoneMap affine_map(double a, double b) {
    if (a == 0.0) throw DomainError("affine_map: zero slope");
    MonotoneMap m;
    m.forward = [a, b](double x) { return a * x + b; };
    m.inverse = [a, b](double y) { return (y - b) / a; };
    m.inverse_derivative = [a](double) { return 1.0 / a; };
    m.increasing = a > 0.0;
    m.image = {-kInf, kInf};
    m.name = "affine";
    return m;
}

MonotoneMap negate_map() {
    MonotoneMap m = affine_map(-1.0, 0.0);
    m.name = "neg";
    return m;
}

}  // namespace fid
