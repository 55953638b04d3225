#include "fid/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace fid {

Grid::Grid(double lo, double hi, std::vector<double> points) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw DomainError("grid requires lo < hi");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double p : points) {
        if (p < lo || p > hi) throw DomainError("grid point outside [lo, hi]");
    }
    points_ = std::move(points);
}

Grid Grid::uniform(double lo, double hi, int count) {
    if (count < 2) throw DomainError("grid needs at least two points");
    if (!(lo < hi)) throw DomainError("grid requires lo < hi");
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    pts.back() = hi;
    return Grid(lo, hi, std::move(pts));
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: x must be positive");
    return boost::math::lgamma(x);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw DomainError("regularized_incomplete_beta: need a, b > 0 and 0 <= x <= 1");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("regularized_gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(a, x);
}

double normal_cdf(double z) {
    if (std::isnan(z)) throw DomainError("normal_cdf: NaN");
    return 0.5 * boost::math::erfc(-z / std::sqrt(2.0));
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must be in (0, 1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double log1mexp(double x) {
    if (!(x > 0.0)) throw DomainError("log1mexp: x must be positive");
    return x < M_LN2 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error, l1;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& g, double a, double b, int& evals) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double fc = g(c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double l1 = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[static_cast<std::size_t>(j)];
        double f1 = g(c - dx);
        double f2 = g(c + dx);
        resk += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
        l1 += kWgk[static_cast<std::size_t>(j)] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
    }
    evals += 15;
    return {a, b, resk * h, std::fabs((resk - resg) * h), l1 * std::fabs(h)};
}

QuadratureResult adaptive(const std::function<double(double)>& g, double a, double b, double tol) {
    constexpr int kInitial = 8;
    constexpr int kMaxSegments = 4000;
    int evals = 0;
    std::priority_queue<Segment> heap;
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (int i = 0; i < kInitial; ++i) {
        double lo = a + (b - a) * i / kInitial;
        double hi = (i + 1 == kInitial) ? b : a + (b - a) * (i + 1) / kInitial;
        Segment s = gk15(g, lo, hi, evals);
        value += s.value;
        error += s.error;
        l1 += s.l1;
        heap.push(s);
    }
    auto done = [&] {
        double floor = 50.0 * std::numeric_limits<double>::epsilon() * l1;
        return error <= std::max(tol * std::fabs(value), floor) || l1 == 0.0;
    };
    while (!done() && static_cast<int>(heap.size()) < kMaxSegments) {
        Segment worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        Segment left = gk15(g, worst.a, mid, evals);
        Segment right = gk15(g, mid, worst.b, evals);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }
    // Re-add from scratch to shed accumulated cancellation in the running sums.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    if (!std::isfinite(v)) throw ConvergenceError("integrate: non-finite integrand");
    double floor = 50.0 * std::numeric_limits<double>::epsilon() * l1;
    if (e > std::max(tol * std::max(1.0, std::fabs(v)), floor)) {
        throw ConvergenceError("integrate: error estimate above tolerance after subdivision budget");
    }
    return {v, e, evals};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
    if (std::isnan(lo) || std::isnan(hi)) throw DomainError("integrate: NaN endpoint");
    if (!(tol > 0.0)) throw DomainError("integrate: tolerance must be positive");
    if (lo == hi) return {0.0, 0.0, 1};
    if (lo > hi) {
        QuadratureResult r = integrate(f, hi, lo, tol);
        r.value = -r.value;
        return r;
    }
    bool lo_inf = std::isinf(lo);
    bool hi_inf = std::isinf(hi);
    if (!lo_inf && !hi_inf) return adaptive(f, lo, hi, tol);
    if (lo_inf && hi_inf) {
        auto g = [&](double t) {
            double u = 1.0 - std::fabs(t);
            return f(t / u) / (u * u);
        };
        return adaptive(g, -1.0, 1.0, tol);
    }
    if (hi_inf) {
        auto g = [&](double t) {
            double u = 1.0 - t;
            return f(lo + t / u) / (u * u);
        };
        return adaptive(g, 0.0, 1.0, tol);
    }
    auto g = [&](double t) {
        double u = 1.0 - t;
        return f(hi - t / u) / (u * u);
    };
    return adaptive(g, 0.0, 1.0, tol);
}

QuadratureResult integrate_split(const std::function<double(double)>& f, double lo, double hi,
                                 const std::vector<double>& breaks, double tol) {
    std::vector<double> cuts{lo};
    std::vector<double> inner = breaks;
    std::sort(inner.begin(), inner.end());
    for (double b : inner) {
        if (b > cuts.back() && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    QuadratureResult total{0.0, 0.0, 0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadratureResult r = integrate(f, cuts[i], cuts[i + 1], tol);
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
    }
    return total;
}

double find_root_increasing(const std::function<double(double)>& g, double target,
                            std::pair<double, double> bracket, double tol) {
    double a = bracket.first;
    double b = bracket.second;
    if (!(a <= b)) throw BracketError("find_root_increasing: bracket must satisfy lo <= hi");
    double fa = g(a) - target;
    double fb = g(b) - target;
    if (std::fabs(fa) <= tol && fa >= 0.0) return a;
    if (std::fabs(fb) <= tol && fb <= 0.0) return b;
    if (fa > 0.0 || fb < 0.0) throw BracketError("find_root_increasing: target not enclosed");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    auto h = [&](double x) { return g(x) - target; };
    auto stop = [](double x, double y) {
        return std::fabs(y - x) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::fabs(x), std::fabs(y)) +
                                   std::numeric_limits<double>::min();
    };
    std::uintmax_t iters = 300;
    auto r = boost::math::tools::toms748_solve(h, a, b, fa, fb, stop, iters);
    return 0.5 * (r.first + r.second);
}

double find_root_expanding(const std::function<double(double)>& g, double target, double guess,
                           Interval domain, double tol) {
    if (!domain.contains(guess)) {
        if (domain.bounded()) {
            guess = 0.5 * (domain.lo + domain.hi);
        } else if (domain.lo > -kInf) {
            guess = domain.lo + 1.0;
        } else if (domain.hi < kInf) {
            guess = domain.hi - 1.0;
        } else {
            guess = 0.0;
        }
    }
    double step = std::max(1.0, std::fabs(guess)) * 0.25;
    double v = g(guess) - target;
    if (v == 0.0) return guess;
    double a = guess, b = guess;
    for (int k = 0; k < 400; ++k) {
        if (v < 0.0) {
            a = b;
            b = domain.hi < kInf ? domain.hi - (domain.hi - a) * 0.5 : a + step;
            if (b <= a) break;
            double vb = g(b) - target;
            if (vb >= 0.0) return find_root_increasing(g, target, {a, b}, tol);
            v = vb;
        } else {
            b = a;
            a = domain.lo > -kInf ? domain.lo + (b - domain.lo) * 0.5 : b - step;
            if (a >= b) break;
            double va = g(a) - target;
            if (va <= 0.0) return find_root_increasing(g, target, {a, b}, tol);
            v = va;
        }
        step *= 2.0;
    }
    throw BracketError("find_root_expanding: could not enclose the target");
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw DomainError("ks_statistic: empty sample");
    std::sort(values.begin(), values.end());
    double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double F = cdf(values[i]);
        d = std::max(d, std::max((i + 1) / n - F, F - i / n));
    }
    return d;
}

}  // namespace fid
