#include "doctest.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "fid/scenario.hpp"

using namespace fid;

namespace {

std::string temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("fid_scenario_" + tag);
    std::filesystem::remove_all(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::vector<std::string>* header = nullptr) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (header) {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("defaults for a minimal discrete scenario") {
    Scenario sc = parse_scenario(R"({"command": "density", "model": "binomial", "params": {"m": 1}, "n": 10, "s": 3})");
    REQUIRE(sc.variants.size() == 1);
    CHECK(sc.variants[0] == FiducialVariant::Geometric);
    CHECK(sc.replicates == 10000);
    CHECK_FALSE(sc.grid);
    auto dir = temp_dir("defaults");
    RunResult r = run_scenario(sc, dir);
    auto rows = read_csv(r.files.at(0));
    CHECK(rows.size() == 201);
    // auto grid holds the central 0.9999 of Be(3.5, 7.5)
    CHECK(rows.front()[0] == doctest::Approx(boost::math::ibeta_inv(3.5, 7.5, 5e-5)).epsilon(1e-8));
    CHECK(rows.back()[0] == doctest::Approx(boost::math::ibeta_inv(3.5, 7.5, 1 - 5e-5)).epsilon(1e-8));
    for (const auto& row : rows) {
        double t = row[0];
        CHECK(row[1] == doctest::Approx(boost::math::ibeta_derivative(3.5, 7.5, t)).epsilon(1e-9));
    }
    Scenario cont = parse_scenario(R"({"command": "cdf", "model": "gamma-rate", "n": 3, "s": 2.5})");
    CHECK(cont.variants[0] == FiducialVariant::Right);
}

TEST_CASE("validation") {
    const std::string base = R"({"command": "density", "model": "binomial", "n": 10, "s": 3)";
    CHECK_THROWS_AS(parse_scenario(base + R"(, "grid": {"lo": 0.6, "hi": 0.2}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(base + R"(, "grid": {"lo": 0.2, "hi": 0.2}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(base + R"(, "grid": {"lo": -0.2, "hi": 0.5}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(base + R"(, "grid": {"lo": 0.1, "hi": 0.5, "points": 1}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(base + R"(, "colour": "red"})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "density", "model": "zipf", "n": 3, "s": 1})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "plot", "model": "poisson", "n": 3, "s": 1})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "sample", "model": "poisson", "n": 3, "s": 1})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "coverage", "model": "poisson", "n": 3})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(base + R"(, "variant": "median"})"), ScenarioError);
    try {
        parse_scenario("{\"command\": \"density\",\n \"model\": }");
        FAIL("no error");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        parse_scenario(base + R"(, "levels": [1.5]})");
        FAIL("no error");
    } catch (const ScenarioError& e) {
        CHECK(e.field == "levels");
    }
}

TEST_CASE("overrides") {
    Scenario sc = parse_scenario(R"({"command": "density", "model": "poisson", "n": 3, "s": 4})",
                                 {"s=5", "grid.lo=0.5", "grid.hi=4", "variant=right"});
    CHECK(*sc.s == 5);
    REQUIRE(sc.grid);
    CHECK(sc.grid->hi == 4);
    CHECK(sc.grid->points == 201);
    CHECK(sc.variants[0] == FiducialVariant::Right);
    CHECK_THROWS_AS(parse_scenario("", {"nonsense"}), ScenarioError);
}

TEST_CASE("shortest round-trip formatting") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        double v = i % 2 ? u(gen) : std::ldexp(u(gen), static_cast<int>(gen() % 200) - 100);
        std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 48) == "0.020833333333333332");
}

TEST_CASE("identical scenario and seed give identical bytes") {
    const std::string text = R"({"command": "coverage", "model": "gamma-rate", "params": {"alpha": 2},
                                 "n": 4, "theta0": 0.7, "replicates": 500, "seed": 3})";
    auto a = run_scenario(parse_scenario(text), temp_dir("det_a"));
    auto b = run_scenario(parse_scenario(text), temp_dir("det_b"));
    CHECK(slurp(a.files[0]) == slurp(b.files[0]));
    CHECK(a.summary == b.summary);
    auto c = run_scenario(parse_scenario(text, {"seed=4"}), temp_dir("det_c"));
    CHECK(slurp(a.files[0]) != slurp(c.files[0]));
    const std::string draw = R"({"command": "crnef", "model": "multinomial", "params": {"N": 5}, "n": 1,
                                 "s": [1, 2], "replicates": 200, "seed": 9})";
    auto d = run_scenario(parse_scenario(draw), temp_dir("det_d"));
    auto e = run_scenario(parse_scenario(draw), temp_dir("det_e"));
    CHECK(slurp(d.files[0]) == slurp(e.files[0]));
}

TEST_CASE("risk scenario reports 1/48 for binomial n = 2") {
    auto r = run_scenario(parse_scenario(R"({"command": "risk", "model": "binomial", "ns": [2]})"), temp_dir("risk"));
    std::vector<std::string> head;
    auto rows = read_csv(r.files[0], &head);
    CHECK(head == std::vector<std::string>{"n", "mu", "gap", "analytic"});
    for (const auto& row : rows) CHECK(row[2] == doctest::Approx(1.0 / 48).epsilon(1e-12));
}

TEST_CASE("gfd scenario: confidence curves cross the level at the interval ends") {
    auto sc = parse_scenario(R"({"command": "gfd", "model": "truncated-exponential", "x": [0.5, 0.5],
                                 "levels": [0.9], "grid": {"lo": -8, "hi": 8, "points": 1601}})");
    auto r = run_scenario(sc, temp_dir("gfd"));
    std::vector<std::string> head;
    auto rows = read_csv(r.files[0], &head);
    CHECK(head == std::vector<std::string>{"theta", "r", "h", "cc_r", "cc_h"});
    auto crossing = [&](std::size_t col) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i][0] > 0 && rows[i - 1][col] < 0.9 && rows[i][col] >= 0.9) {
                double w = (0.9 - rows[i - 1][col]) / (rows[i][col] - rows[i - 1][col]);
                return rows[i - 1][0] + w * (rows[i][0] - rows[i - 1][0]);
            }
        }
        return std::nan("");
    };
    // independent values: h from its closed-form cdf, r by direct quadrature
    CHECK(crossing(4) == doctest::Approx(4.19140192236561).epsilon(1e-4));
    CHECK(crossing(3) == doctest::Approx(4.096113432687016).epsilon(1e-4));
}

TEST_CASE("chain scenarios") {
    auto sc = parse_scenario(R"({"command": "interval", "chain": "loc-scale-normal", "x": [0.4, -1.1, 2.3, 0.9, 1.6]})");
    CHECK(sc.variants[0] == FiducialVariant::Right);
    auto r = run_scenario(sc, temp_dir("chain"));
    auto rows = read_csv(r.files[0]);
    // sigma marginal: sigma^2 = ss / chi2_4
    REQUIRE(rows.size() == 1);
    const double ss = 6.668;
    boost::math::chi_squared_distribution<> chi(4);
    CHECK(rows[0][1] == doctest::Approx(std::sqrt(ss / quantile(chi, 0.975))).epsilon(1e-7));
    CHECK(rows[0][2] == doctest::Approx(std::sqrt(ss / quantile(chi, 0.025))).epsilon(1e-7));
    auto pr = parse_scenario(R"({"command": "sample", "chain": "poisson-ratio",
                                 "params": {"n": 10, "s1": 20, "s2": 30}, "replicates": 50, "seed": 1})");
    CHECK(pr.variants[0] == FiducialVariant::Geometric);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "risk", "chain": "poisson-ratio", "params": {}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"command": "cdf", "chain": "poisson-ratio", "params": {"n": 10}})"),
                    ScenarioError);
}
