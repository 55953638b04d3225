#include "doctest.h"

#include <cmath>

#include "fid/numerics.hpp"

using namespace fid;

TEST_CASE("log_gamma at known points") {
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
    CHECK(log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-13));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("incomplete beta boundaries and symmetric cases") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(regularized_incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("incomplete beta reflection, randomized") {
    Rng rng = make_rng(11);
    for (int i = 0; i < 500; ++i) {
        double a = 0.05 + 30.0 * uniform01(rng);
        double b = 0.05 + 30.0 * uniform01(rng);
        double x = uniform01(rng);
        double lhs = regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(b, a, 1.0 - x);
        CHECK(std::fabs(lhs - 1.0) < 1e-12);
    }
}

TEST_CASE("integrate simple ranges") {
    CHECK(integrate([](double) { return 1.0; }, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, kInf).value == doctest::Approx(1.0).epsilon(1e-10));
    auto g = integrate([](double x) { return normal_pdf(x); }, -kInf, kInf);
    CHECK(g.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.abs_error_estimate >= 0.0);
    CHECK(g.evaluations > 0);
    // a narrow bump far from the origin is found once its location is given as a break
    auto bump = integrate_split([](double x) { return normal_pdf((x - 40.0) / 0.01) / 0.01; }, -kInf, kInf, {40.0});
    CHECK(bump.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("integrate is linear on random polynomials") {
    Rng rng = make_rng(5);
    auto poly = [](const std::vector<double>& c) {
        return [c](double x) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
            return acc;
        };
    };
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> c1(6), c2(6);
        for (auto& v : c1) v = 2.0 * uniform01(rng) - 1.0;
        for (auto& v : c2) v = 2.0 * uniform01(rng) - 1.0;
        double al = 3.0 * uniform01(rng), be = -2.0 * uniform01(rng);
        auto f = poly(c1), g = poly(c2);
        double lhs = integrate([&](double x) { return al * f(x) + be * g(x); }, -1.0, 2.0).value;
        double rhs = al * integrate(f, -1.0, 2.0).value + be * integrate(g, -1.0, 2.0).value;
        CHECK(std::fabs(lhs - rhs) <= 2e-10 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("integrate_split handles kinks") {
    auto f = [](double x) { return std::fabs(x - 0.3); };
    double v = integrate_split(f, 0.0, 1.0, {0.3}).value;
    CHECK(v == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
}

TEST_CASE("find_root_increasing") {
    CHECK(find_root_increasing([](double x) { return x; }, 0.5, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(find_root_increasing(normal_cdf, 0.975, {-10.0, 10.0}) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    // median of Be(1.5, 9.5); a two-million-cell grid scan of the integrated density puts it at 0.114347
    double med = find_root_increasing([](double x) { return regularized_incomplete_beta(1.5, 9.5, x); }, 0.5,
                                      {0.0, 1.0});
    CHECK(std::fabs(med - 0.114347) < 1e-6);
    CHECK_THROWS_AS(find_root_increasing([](double x) { return x; }, 2.0, {0.0, 1.0}), BracketError);
}

TEST_CASE("find_root_increasing recovers random points") {
    Rng rng = make_rng(17);
    for (int i = 0; i < 200; ++i) {
        double a = 0.5 + 3.0 * uniform01(rng);
        double x0 = 4.0 * uniform01(rng) - 2.0;
        auto g = [a](double x) { return std::sinh(a * x) + x; };
        double r = find_root_increasing(g, g(x0), {-5.0, 5.0});
        CHECK(std::fabs(r - x0) < 1e-10);
    }
}

TEST_CASE("find_root_expanding on half line") {
    double r = find_root_expanding([](double x) { return std::log(x); }, 5.0, 1.0, {0.0, kInf});
    CHECK(r == doctest::Approx(std::exp(5.0)).epsilon(1e-10));
    r = find_root_expanding([](double x) { return std::log(x); }, -30.0, 1.0, {0.0, kInf});
    CHECK(r == doctest::Approx(std::exp(-30.0)).epsilon(1e-8));
}

TEST_CASE("grid validation") {
    Grid g = Grid::uniform(0.0, 1.0, 11);
    CHECK(g.size() == 11);
    CHECK(g.points().front() == 0.0);
    CHECK(g.points().back() == 1.0);
    CHECK_THROWS_AS(Grid::uniform(1.0, 1.0, 5), DomainError);
    Grid h(0.0, 2.0, {1.5, 0.5, 0.5, 1.0});
    CHECK(h.size() == 3);
    CHECK(h.points()[0] == 0.5);
    CHECK_THROWS_AS(Grid(0.0, 1.0, {2.0}), DomainError);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a = make_rng(42, 3), b = make_rng(42, 3), c = make_rng(42, 4);
    for (int i = 0; i < 10; ++i) {
        double ua = uniform01(a), ub = uniform01(b);
        CHECK(ua == ub);
        CHECK(ua > 0.0);
        CHECK(ua < 1.0);
    }
    CHECK(uniform01(c) != uniform01(a));
}

TEST_CASE("ks statistic of an exact grid is small") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back((i + 0.5) / 1000.0);
    CHECK(ks_statistic(v, [](double x) { return x; }) == doctest::Approx(0.0005).epsilon(1e-9));
}

TEST_CASE("log1mexp and log_sum_exp") {
    CHECK(log1mexp(1e-20) == doctest::Approx(std::log(1e-20)).epsilon(1e-12));
    CHECK(log1mexp(50.0) == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
    CHECK(log_sum_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp(-kInf, 2.0) == 2.0);
}
