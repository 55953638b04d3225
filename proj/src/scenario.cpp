#include "fid/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fid/crnef.hpp"
#include "fid/gfd.hpp"
#include "fid/inference.hpp"
#include "fid/models.hpp"

namespace fid {

using nlohmann::json;

namespace {

const std::set<std::string> kFields{"command", "model", "params", "n",   "s",        "t",      "x",     "datasets",
                                    "variant", "variants", "grid", "levels", "replicates", "seed", "theta0", "prior",
                                    "d",       "ns",       "output", "count", "chain", "route"};

bool stochastic(const std::string& cmd) { return cmd == "coverage" || cmd == "sample" || cmd == "crnef"; }

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ScenarioError(field, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
    double d = as_number(v, field);
    if (d != std::floor(d) || std::fabs(d) > 1e9) throw ScenarioError(field, "expected an integer");
    return static_cast<int>(d);
}

std::vector<double> as_numbers(const json& v, const std::string& field) {
    if (!v.is_array()) throw ScenarioError(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, field));
    return out;
}

void apply_override(json& doc, const std::string& item) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ScenarioError("", "override '" + item + "' is not key=value");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    json v = json::parse(val, nullptr, false);
    if (v.is_discarded()) v = val;
    // grid.lo=... style for nested objects
    auto dot = key.find('.');
    if (dot != std::string::npos) {
        std::string outer = key.substr(0, dot), inner = key.substr(dot + 1);
        if (!doc.contains(outer) || !doc[outer].is_object()) doc[outer] = json::object();
        doc[outer][inner] = v;
    } else {
        doc[key] = v;
    }
}

bool is_discrete_model(const std::string& key) {
    return key == "binomial" || key == "poisson" || key == "negative-binomial" || key == "logarithmic";
}

ModelSpec model_of(const Scenario& sc) { return model_from_key(sc.model, sc.params); }

JointFiducial build_chain(const Scenario& sc, FiducialVariant v) {
    ChainRequest req;
    req.params = sc.params;
    if (!sc.samples.empty()) req.x = sc.samples.front();
    req.route = sc.route;
    JointOptions o;
    o.variant = v;
    return build_joint(catalog_chain(sc.chain, req), o);
}

DistPtr build_fiducial(const Scenario& sc, FiducialVariant v) {
    if (!sc.chain.empty()) return marginal_of_interest(build_chain(sc, v));
    return fiducial(model_of(sc), sc.n, *sc.s, v);
}

std::string csv_path(const Scenario& sc, const std::string& dir, const std::string& suffix = "") {
    std::string stem = sc.output.empty() ? sc.command : sc.output;
    return (std::filesystem::path(dir) / (stem + suffix + ".csv")).string();
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<double>& values) { rows_.push_back(values); }
    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DomainError("cannot write " + path);
        for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
        out << "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
            out << "\n";
        }
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

std::vector<double> grid_points(const Scenario& sc, const std::vector<DistPtr>& dists) {
    GridSpec g;
    if (sc.grid) {
        g = *sc.grid;
    } else {
        // central 0.9999 mass of every curve
        g.lo = kInf;
        g.hi = -kInf;
        for (const auto& d : dists) {
            g.lo = std::min(g.lo, d->quantile(5e-5));
            g.hi = std::max(g.hi, d->quantile(1.0 - 5e-5));
        }
    }
    return Grid::uniform(g.lo, g.hi, g.points).points();
}

std::string suffix(const Scenario& sc, FiducialVariant v) {
    return sc.variants.size() == 1 ? std::string() : "_" + variant_name(v);
}

std::string fmt_pair(std::pair<double, double> p) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << p.first << ", " << p.second << ")";
    return os.str();
}

RunResult run_curves(const Scenario& sc, const std::string& dir) {
    std::vector<DistPtr> fids;
    for (auto v : sc.variants) fids.push_back(build_fiducial(sc, v));
    auto grid = grid_points(sc, fids);
    std::vector<std::string> head{"theta"};
    for (auto v : sc.variants) {
        std::string sfx = suffix(sc, v);
        if (sc.command == "density" || sc.command == "curve") head.push_back("density" + sfx);
        if (sc.command == "cdf" || sc.command == "curve") head.push_back("cdf" + sfx);
        if (sc.command == "curve") head.push_back("cc" + sfx);
    }
    Csv csv(head);
    for (double t : grid) {
        std::vector<double> row{t};
        for (const auto& f : fids) {
            double c = f->cdf(t);
            if (sc.command == "density" || sc.command == "curve") row.push_back(f->pdf(t));
            if (sc.command == "cdf" || sc.command == "curve") row.push_back(c);
            if (sc.command == "curve") row.push_back(std::fabs(1.0 - 2.0 * c));
        }
        csv.row(row);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    for (std::size_t i = 0; i < fids.size(); ++i) {
        sum << variant_name(sc.variants[i]);
        for (double l : sc.levels) sum << "  " << l << ": " << fmt_pair(equal_tail_interval(*fids[i], l));
        sum << "\n";
    }
    res.summary = sum.str();
    return res;
}

RunResult run_quantiles(const Scenario& sc, const std::string& dir) {
    std::vector<DistPtr> fids;
    for (auto v : sc.variants) fids.push_back(build_fiducial(sc, v));
    std::vector<std::string> head{sc.command == "quantile" ? "u" : "level"};
    for (auto v : sc.variants) {
        std::string sfx = suffix(sc, v);
        if (sc.command == "quantile") {
            head.push_back("quantile" + sfx);
        } else {
            head.push_back("lo" + sfx);
            head.push_back("hi" + sfx);
        }
    }
    Csv csv(head);
    std::ostringstream sum;
    for (double l : sc.levels) {
        std::vector<double> row{l};
        sum << l;
        for (const auto& f : fids) {
            if (sc.command == "quantile") {
                row.push_back(f->quantile(l));
                sum << "  " << row.back();
            } else {
                auto iv = equal_tail_interval(*f, l);
                row.push_back(iv.first);
                row.push_back(iv.second);
                sum << "  " << fmt_pair(iv);
            }
        }
        sum << "\n";
        csv.row(row);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    res.summary = sum.str();
    return res;
}

RunResult run_coverage(const Scenario& sc, const std::string& dir) {
    ModelSpec m = model_of(sc);
    std::vector<std::string> head{"level"};
    std::vector<CoverageReport> reps;
    for (auto v : sc.variants) {
        reps.push_back(pit_uniformity(m, sc.n, *sc.theta0, v, sc.replicates, *sc.seed, sc.levels, true));
        head.push_back("coverage" + suffix(sc, v));
        head.push_back("mean_length" + suffix(sc, v));
    }
    Csv csv(head);
    for (std::size_t j = 0; j < sc.levels.size(); ++j) {
        std::vector<double> row{sc.levels[j]};
        for (const auto& r : reps) {
            row.push_back(r.coverage[j]);
            row.push_back(r.mean_length[j]);
        }
        csv.row(row);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        sum << variant_name(sc.variants[i]) << "  KS=" << reps[i].ks
            << "  band(1%)=" << 1.63 / std::sqrt(static_cast<double>(sc.replicates))
            << "  boundary=" << reps[i].boundary_fallbacks;
        for (std::size_t j = 0; j < sc.levels.size(); ++j) sum << "  " << sc.levels[j] << ":" << reps[i].coverage[j];
        sum << "\n";
    }
    res.summary = sum.str();
    return res;
}

RunResult run_risk(const Scenario& sc, const std::string& dir) {
    ModelSpec m = model_of(sc);
    Csv csv({"n", "mu", "gap", "analytic"});
    std::ostringstream sum;
    for (int n : sc.ns) {
        RiskReport r = confidence_risk_gap(m, n);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.mu.size(); ++i) {
            csv.row({static_cast<double>(n), r.mu[i], r.gap[i], r.analytic});
            worst = std::max(worst, std::fabs(r.gap[i] - r.analytic));
        }
        sum << "n=" << n << "  gap=" << format_double(r.gap.front()) << "  analytic=" << format_double(r.analytic)
            << "  max|diff|=" << worst << "\n";
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    res.summary = sum.str();
    return res;
}

RunResult run_gfd(const Scenario& sc, const std::string& dir) {
    ModelSpec m = model_of(sc);
    const double level = sc.levels.front();
    std::vector<GfdComparison> cmps;
    for (const auto& x : sc.samples) cmps.push_back(compare_gfd_vs_stepwise(m, x, level, {}));
    std::vector<double> grid;
    if (sc.grid) {
        grid = Grid::uniform(sc.grid->lo, sc.grid->hi, sc.grid->points).points();
    } else {
        double lo = kInf, hi = -kInf;
        for (const auto& c : cmps) {
            lo = std::min(lo, c.rows.front().theta);
            hi = std::max(hi, c.rows.back().theta);
        }
        grid = Grid::uniform(lo, hi, 401).points();
    }
    std::vector<std::string> head{"theta"};
    const bool many = sc.samples.size() > 1;
    for (std::size_t k = 0; k < sc.samples.size(); ++k) {
        std::string sfx = many ? "_" + std::to_string(k + 1) : "";
        for (const char* c : {"r", "h", "cc_r", "cc_h"}) head.push_back(c + sfx);
    }
    std::vector<GfdComparison> rows;
    for (const auto& x : sc.samples) rows.push_back(compare_gfd_vs_stepwise(m, x, level, grid));
    Csv csv(head);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : rows) {
            const auto& r = c.rows[i];
            row.insert(row.end(), {r.r, r.h, r.cc_r, r.cc_h});
        }
        csv.row(row);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        sum << "x=(";
        for (std::size_t j = 0; j < sc.samples[k].size(); ++j) sum << (j ? "," : "") << sc.samples[k][j];
        sum << ")  level " << level << "  r: " << fmt_pair(rows[k].r_interval) << "  h: " << fmt_pair(rows[k].h_interval)
            << "  sup|R-H|=" << rows[k].cdf_gap << "\n";
    }
    res.summary = sum.str();
    return res;
}

RunResult run_compare_bayes(const Scenario& sc, const std::string& dir) {
    ModelSpec m = model_of(sc);
    Prior prior = prior_from_name(sc.prior);
    DistPtr fid = build_fiducial(sc, sc.variants.front());
    DistPtr post = sc.samples.empty() ? bayes_posterior(m, prior, sc.n, *sc.s)
                                      : bayes_posterior_sample(m, prior, sc.samples.front());
    auto grid = grid_points(sc, {fid});
    Csv csv({"theta", "fiducial_cdf", "posterior_cdf", "abs_gap"});
    double gap = 0.0;
    for (double t : grid) {
        double a = fid->cdf(t), b = post->cdf(t);
        csv.row({t, a, b, std::fabs(a - b)});
        gap = std::max(gap, std::fabs(a - b));
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    sum << variant_name(sc.variants.front()) << " fiducial vs " << sc.prior << " posterior: sup|F-G|=" << gap << "\n";
    res.summary = sum.str();
    return res;
}

RunResult run_chain_sample(const Scenario& sc, const std::string& dir) {
    JointFiducial j = build_chain(sc, sc.variants.front());
    auto draws = j.sample_many(sc.replicates, *sc.seed);
    Csv csv(j.names());
    std::vector<double> mean(j.dim(), 0.0);
    for (const auto& d : draws) {
        for (std::size_t i = 0; i < d.size(); ++i) mean[i] += d[i] / static_cast<double>(draws.size());
        csv.row(d);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    sum << j.name() << ", " << draws.size() << " draws\n";
    for (std::size_t i = 0; i < mean.size(); ++i) sum << "  mean " << j.names()[i] << " = " << mean[i] << "\n";
    res.summary = sum.str();
    return res;
}

RunResult run_sample(const Scenario& sc, const std::string& dir) {
    if (!sc.chain.empty()) return run_chain_sample(sc, dir);
    DistPtr fid = build_fiducial(sc, sc.variants.front());
    Rng rng = make_rng(*sc.seed);
    Csv csv({"draw"});
    double acc = 0.0;
    for (std::size_t i = 0; i < sc.replicates; ++i) {
        double v = fid->sample(rng);
        acc += v;
        csv.row({v});
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    sum << sc.replicates << " draws, mean " << acc / static_cast<double>(sc.replicates) << "\n";
    res.summary = sum.str();
    return res;
}

RunResult run_crnef(const Scenario& sc, const std::string& dir) {
    CrNefSpec spec = crnef_spec(sc.model, sc.d, sc.params);
    JointFiducial j = joint_fiducial_phi(spec, sc.n, sc.svec, sc.variants.front());
    auto draws = j.sample_many(sc.replicates, *sc.seed);
    std::vector<std::string> head;
    for (int k = 1; k <= spec.d; ++k) head.push_back("phi" + std::to_string(k));
    for (int k = 1; k <= spec.d; ++k) head.push_back("mu" + std::to_string(k));
    Csv csv(head);
    std::vector<double> mean(2 * spec.d, 0.0);
    for (const auto& phi : draws) {
        std::vector<double> row = phi;
        auto mu = mu_of_phi(spec, phi);
        row.insert(row.end(), mu.begin(), mu.end());
        for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i] / static_cast<double>(draws.size());
        csv.row(row);
    }
    RunResult res;
    res.files.push_back(csv_path(sc, dir));
    csv.write(res.files.back());
    std::ostringstream sum;
    sum << spec.name() << " " << variant_name(sc.variants.front()) << ", " << draws.size() << " draws\n";
    for (std::size_t i = 0; i < head.size(); ++i) sum << "  mean " << head[i] << " = " << mean[i] << "\n";
    res.summary = sum.str();
    return res;
}

void fill_common(const json& doc, Scenario& sc, bool discrete) {
    // variants
    if (doc.contains("variant") && doc.contains("variants")) throw ScenarioError("variants", "give variant or variants");
    auto read_variant = [](const json& v, const std::string& field) {
        if (!v.is_string()) throw ScenarioError(field, "expected a variant name");
        try {
            return variant_from_name(v.get<std::string>());
        } catch (const UnsupportedError& e) {
            throw ScenarioError(field, e.what());
        }
    };
    if (doc.contains("variant")) {
        if (doc["variant"] == "all") {
            sc.variants = {FiducialVariant::Right, FiducialVariant::Left, FiducialVariant::Arithmetic,
                           FiducialVariant::Geometric};
        } else {
            sc.variants.push_back(read_variant(doc["variant"], "variant"));
        }
    }
    if (doc.contains("variants")) {
        if (!doc["variants"].is_array() || doc["variants"].empty()) throw ScenarioError("variants", "expected a list");
        for (const auto& v : doc["variants"]) sc.variants.push_back(read_variant(v, "variants"));
    }
    if (sc.variants.empty()) {
        sc.variants.push_back(discrete ? FiducialVariant::Geometric : FiducialVariant::Right);
    }

    // grid
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        if (!g.is_object()) throw ScenarioError("grid", "expected {lo, hi, points}");
        for (const auto& [k, v] : g.items()) {
            if (k != "lo" && k != "hi" && k != "points") throw ScenarioError("grid." + k, "unknown key");
            (void)v;
        }
        if (!g.contains("lo") || !g.contains("hi")) throw ScenarioError("grid", "needs lo and hi");
        GridSpec gs;
        gs.lo = as_number(g["lo"], "grid.lo");
        gs.hi = as_number(g["hi"], "grid.hi");
        if (g.contains("points")) gs.points = as_int(g["points"], "grid.points");
        if (!(gs.lo < gs.hi)) throw ScenarioError("grid", "lo must be below hi");
        if (gs.points < 2) throw ScenarioError("grid.points", "need at least two points");
        if (sc.chain.empty() && sc.command != "crnef" && sc.command != "risk") {
            Interval ps = model_of(sc).param_space;
            if (gs.lo < ps.lo || gs.hi > ps.hi) throw ScenarioError("grid", "outside the parameter space");
        }
        sc.grid = gs;
    }

    if (doc.contains("levels")) {
        sc.levels = as_numbers(doc["levels"], "levels");
    } else if (sc.command == "coverage") {
        sc.levels = kCoverageLevels;
    } else if (sc.command == "quantile") {
        sc.levels = {0.025, 0.25, 0.5, 0.75, 0.975};
    } else {
        sc.levels = {0.95};
    }
    for (double l : sc.levels) {
        if (!(l > 0.0 && l < 1.0)) throw ScenarioError("levels", "values must lie in (0, 1)");
    }
    if (sc.levels.empty()) throw ScenarioError("levels", "empty");

    if (doc.contains("replicates") || doc.contains("count")) {
        const char* key = doc.contains("count") ? "count" : "replicates";
        int r = as_int(doc[key], key);
        if (r < 1) throw ScenarioError(key, "must be positive");
        sc.replicates = static_cast<std::size_t>(r);
    }
    if (doc.contains("seed")) {
        double sd = as_number(doc["seed"], "seed");
        if (sd < 0 || sd != std::floor(sd)) throw ScenarioError("seed", "expected a non-negative integer");
        sc.seed = static_cast<std::uint64_t>(sd);
    }
    if (stochastic(sc.command) && !sc.seed) throw ScenarioError("seed", "required for " + sc.command);
    if (doc.contains("theta0")) sc.theta0 = as_number(doc["theta0"], "theta0");
    if (sc.command == "coverage") {
        if (!sc.theta0) throw ScenarioError("theta0", "coverage needs the true parameter");
        if (!model_of(sc).param_space.contains(*sc.theta0)) throw ScenarioError("theta0", "outside the parameter space");
    }
    if (doc.contains("prior")) {
        if (!doc["prior"].is_string()) throw ScenarioError("prior", "expected a name");
        sc.prior = doc["prior"].get<std::string>();
        try {
            prior_from_name(sc.prior);
        } catch (const UnsupportedError& e) {
            throw ScenarioError("prior", e.what());
        }
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ScenarioError("output", "expected a file stem");
        sc.output = doc["output"].get<std::string>();
        if (sc.output.empty() || sc.output.find('/') != std::string::npos) {
            throw ScenarioError("output", "expected a plain file stem");
        }
    }
}

Scenario parse_chain_scenario(const json& doc, Scenario sc) {
    if (!doc["chain"].is_string()) throw ScenarioError("chain", "expected a chain key");
    sc.chain = doc["chain"].get<std::string>();
    auto keys = catalog_chain_keys();
    if (std::find(keys.begin(), keys.end(), sc.chain) == keys.end()) {
        throw ScenarioError("chain", "unknown chain '" + sc.chain + "'");
    }
    static const std::set<std::string> kChainCommands{"density", "cdf", "curve", "quantile", "interval", "sample"};
    if (!kChainCommands.count(sc.command)) throw ScenarioError("command", sc.command + " does not take a chain");
    for (const char* k : {"model", "s", "t", "n", "datasets", "theta0", "d", "ns"}) {
        if (doc.contains(k)) throw ScenarioError(k, "not used with a chain; give counts in params");
    }
    if (doc.contains("x")) sc.samples.push_back(as_numbers(doc["x"], "x"));
    if (doc.contains("route")) {
        if (doc["route"] != "full" && doc["route"] != "sufficient") throw ScenarioError("route", "full or sufficient");
        sc.route = doc["route"].get<std::string>();
    }
    bool discrete = sc.chain == "poisson-ratio" || sc.chain == "bivariate-binomial" || sc.chain == "trinomial-ratio";
    fill_common(doc, sc, discrete);
    try {
        build_chain(sc, sc.variants.front());
    } catch (const std::exception& e) {
        throw ScenarioError("params", e.what());
    }
    return sc;
}

}  // namespace

std::vector<std::string> scenario_commands() {
    return {"density", "cdf", "quantile", "interval", "curve", "coverage", "risk", "gfd", "compare-bayes", "sample",
            "crnef"};
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Scenario parse_scenario(const std::string& text, const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = text.empty() ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("", std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioError("", "scenario must be a JSON object");
    for (const auto& o : overrides) apply_override(doc, o);
    for (const auto& [k, v] : doc.items()) {
        if (!kFields.count(k)) throw ScenarioError(k, "unknown key");
        (void)v;
    }

    Scenario sc;
    if (!doc.contains("command") || !doc["command"].is_string()) throw ScenarioError("command", "missing");
    sc.command = doc["command"].get<std::string>();
    auto cmds = scenario_commands();
    if (std::find(cmds.begin(), cmds.end(), sc.command) == cmds.end()) {
        throw ScenarioError("command", "unknown command '" + sc.command + "'");
    }
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw ScenarioError("params", "expected an object");
        for (const auto& [k, v] : doc["params"].items()) sc.params[k] = as_number(v, "params." + k);
    }
    if (doc.contains("chain")) return parse_chain_scenario(doc, std::move(sc));
    if (!doc.contains("model") || !doc["model"].is_string()) throw ScenarioError("model", "missing");
    sc.model = doc["model"].get<std::string>();
    if (sc.command == "crnef") {
        auto keys = crnef_keys();
        if (std::find(keys.begin(), keys.end(), sc.model) == keys.end()) {
            throw ScenarioError("model", "unknown cr-NEF family '" + sc.model + "'");
        }
    } else {
        auto keys = model_keys();
        if (std::find(keys.begin(), keys.end(), sc.model) == keys.end()) {
            throw ScenarioError("model", "unknown model '" + sc.model + "'");
        }
        try {
            model_of(sc);
        } catch (const std::exception& e) {
            throw ScenarioError("params", e.what());
        }
    }

    // data
    if (doc.contains("x")) sc.samples.push_back(as_numbers(doc["x"], "x"));
    if (doc.contains("datasets")) {
        if (!doc["datasets"].is_array()) throw ScenarioError("datasets", "expected an array of arrays");
        for (const auto& e : doc["datasets"]) sc.samples.push_back(as_numbers(e, "datasets"));
    }
    for (const char* key : {"s", "t"}) {
        if (!doc.contains(key)) continue;
        if (sc.s || !sc.svec.empty()) throw ScenarioError(key, "statistic given twice");
        if (doc[key].is_array()) sc.svec = as_numbers(doc[key], key);
        else sc.s = as_number(doc[key], key);
    }
    if (doc.contains("n")) sc.n = as_int(doc["n"], "n");
    if (doc.contains("d")) sc.d = as_int(doc["d"], "d");
    if (doc.contains("ns")) {
        for (double v : as_numbers(doc["ns"], "ns")) sc.ns.push_back(static_cast<int>(v));
    }
    if (sc.command != "crnef" && sc.command != "risk" && sc.command != "coverage") {
        if (!sc.samples.empty() && sc.command != "gfd") {
            if (sc.samples.size() > 1) throw ScenarioError("datasets", "only the gfd command takes several data sets");
            ModelSpec m = model_of(sc);
            if (sc.s) throw ScenarioError("s", "give either the raw sample x or the statistic s");
            sc.n = static_cast<int>(sc.samples.front().size());
            sc.s = sufficient_statistic(m, sc.samples.front());
        }
        if (sc.command == "gfd") {
            if (sc.samples.empty()) throw ScenarioError("x", "gfd needs the raw sample");
        } else {
            if (!sc.s) throw ScenarioError("s", "missing statistic (s, t or x)");
            if (sc.n < 1) throw ScenarioError("n", "sample size must be positive");
        }
    }
    if (sc.command == "coverage" && sc.n < 1) throw ScenarioError("n", "sample size must be positive");
    if (sc.command == "risk") {
        if (sc.ns.empty()) sc.ns.push_back(sc.n);
        for (int n : sc.ns) {
            if (n < 1) throw ScenarioError("ns", "sample sizes must be positive");
        }
    }
    if (sc.command == "crnef") {
        if (sc.svec.empty()) throw ScenarioError("s", "crnef needs the vector statistic s");
        if (sc.d == 0) sc.d = static_cast<int>(sc.svec.size());
        if (sc.d != static_cast<int>(sc.svec.size())) throw ScenarioError("d", "does not match the length of s");
        if (sc.n < 1) throw ScenarioError("n", "sample size must be positive");
    }

    // every cr-NEF family has a discrete block
    fill_common(doc, sc, sc.command == "crnef" || is_discrete_model(sc.model));
    return sc;
}

RunResult run_scenario(const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string& c = sc.command;
    if (c == "density" || c == "cdf" || c == "curve") return run_curves(sc, out_dir);
    if (c == "quantile" || c == "interval") return run_quantiles(sc, out_dir);
    if (c == "coverage") return run_coverage(sc, out_dir);
    if (c == "risk") return run_risk(sc, out_dir);
    if (c == "gfd") return run_gfd(sc, out_dir);
    if (c == "compare-bayes") return run_compare_bayes(sc, out_dir);
    if (c == "sample") return run_sample(sc, out_dir);
    if (c == "crnef") return run_crnef(sc, out_dir);
    throw ScenarioError("command", "unknown command '" + c + "'");
}

}  // namespace fid
