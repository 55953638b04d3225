#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fid/scenario.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, const std::string& field = "") {
    nlohmann::json rec{{"status", "error"}, {"kind", kind}, {"message", message}};
    if (!field.empty()) rec["field"] = field;
    std::cerr << rec.dump() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fiducial and confidence distributions"};
    app.require_subcommand(1);
    std::string scenario_path, out_dir;
    std::vector<std::string> sets;
    for (const auto& name : fid::scenario_commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--scenario", scenario_path, "scenario JSON file");
        sub->add_option("--set", sets, "override, key=value (value parsed as JSON when possible)")->take_all();
        sub->add_option("-o,--out", out_dir, "output directory (default $FID_OUTPUT_DIR or .)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();

    std::string text;
    if (!scenario_path.empty()) {
        std::ifstream in(scenario_path);
        if (!in) return fail("io", "cannot read " + scenario_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    if (out_dir.empty()) {
        const char* env = std::getenv("FID_OUTPUT_DIR");
        out_dir = env && *env ? env : ".";
    }
    // the subcommand wins over a command written in the file
    sets.insert(sets.begin(), "command=\"" + command + "\"");

    try {
        fid::Scenario sc = fid::parse_scenario(text, sets);
        fid::RunResult r = fid::run_scenario(sc, out_dir);
        std::cout << r.summary;
        for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
    } catch (const fid::ScenarioError& e) {
        return fail("scenario", e.what(), e.field);
    } catch (const fid::BoundaryError& e) {
        return fail("boundary", e.what());
    } catch (const fid::ConvergenceError& e) {
        return fail("convergence", e.what());
    } catch (const fid::BracketError& e) {
        return fail("convergence", e.what());
    } catch (const fid::UnsupportedError& e) {
        return fail("unsupported", e.what());
    } catch (const fid::DomainError& e) {
        return fail("domain", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
