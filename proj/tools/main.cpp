#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ncl/triple.hpp"

namespace {

using ncl::cli::RawConfig;

struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config;
    bool formal = false;
    bool no_reality = false;
};

void add_options(Sub& s) {
    static const std::map<std::string, std::string> help{
        {"geometry", "torus | sphere | suq2"},
        {"tau", "tau1+,tau2+,tau1-,tau2- (torus)"},
        {"N", "mode cutoff |n|,|m| <= N (torus)"},
        {"theta", "deformation parameter"},
        {"spin", "sigma+,sigma- in {0,1/2} (torus)"},
        {"R", "sphere radius parameter"},
        {"S", "sphere coupling, complex: x, x,y or x+yi; suq2: real"},
        {"L", "cutoff l <= L (sphere), half-integer"},
        {"q", "deformation 0 < q < 1 (suq2)"},
        {"Jcut", "cutoff j <= Jcut (suq2), half-integer"},
        {"r", "suq2 Dirac scale"},
        {"out", "output file (default stdout)"},
        {"report", "spectrum: JSON summary file"},
        {"tol", "relative tolerance of all checks"},
        {"operator", "spectrum: D or absD2"},
    };
    for (auto& [k, h] : help) s.app->add_option("--" + k, s.values[k], h);
    s.app->add_flag("--formal", s.formal, "allow the formal (theta-independent) metric");
    s.app->add_flag("--no-reality", s.no_reality, "drop the reality constraint (solve)");
    s.app->add_option("--config", s.config, "key=value file; flags override it");
}

RawConfig collect(const Sub& s) {
    RawConfig flags;
    for (auto& [k, v] : s.values)
        if (s.app->count("--" + k) > 0) flags[k] = v;
    if (s.formal) flags["formal"] = "true";
    if (s.no_reality) flags["reality"] = "false";
    RawConfig file;
    if (!s.config.empty()) file = ncl::cli::read_config_file(s.config);
    return ncl::cli::merge(flags, file);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lorentzian spectral triple truncations: verify, spectrum, solve, metric"};
    app.require_subcommand(1);
    Sub verify, spectrum, solve, metric;
    verify.app = app.add_subcommand("verify", "run the axiom suite; exit 1 if an asserted check fails");
    spectrum.app = app.add_subcommand("spectrum", "block spectrum as CSV");
    solve.app = app.add_subcommand("solve", "solve for the admissible Dirac family");
    metric.app = app.add_subcommand("metric", "metric from the Clifford anticommutators");
    for (Sub* s : {&verify, &spectrum, &solve, &metric}) add_options(*s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Sub* s = nullptr;
        for (Sub* t : {&verify, &spectrum, &solve, &metric})
            if (t->app->parsed()) s = t;
        ncl::cli::RunConfig cfg = ncl::cli::parse_config(collect(*s));
        if (cfg.tol) ncl::rel_tol = *cfg.tol;
        if (s == &verify) return ncl::cli::cmd_verify(cfg);
        if (s == &spectrum) return ncl::cli::cmd_spectrum(cfg);
        if (s == &solve) return ncl::cli::cmd_solve(cfg);
        return ncl::cli::cmd_metric(cfg);
    } catch (const ncl::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
