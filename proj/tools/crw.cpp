#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crw/experiment.hpp"
#include "crw/verify.hpp"

using namespace crw;

namespace {

struct Flags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t replicas = 1;
    int L = 256;
    std::string t;
    std::string mode = "coalesce";
    std::string init = "full";
    std::string starts;
    std::string offsets;
    std::vector<double> starts_1d;
    std::string kind = "rho1_ere";
    double y0 = 1.0;
    int n_walkers = 2;
    double r0 = 1.0;
    std::string out = "crw_out";
    unsigned threads = 0;
    std::string level = "fast";
    std::vector<int> only;
};

bool given(CLI::App* app, const std::string& name) {
    const auto* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
}

// Config file values first, then any flag given on the command line.
ExperimentConfig build_config(Command cmd, CLI::App* app, const Flags& f) {
    ExperimentConfig c;
    if (!f.config_path.empty()) {
        c = load_config(f.config_path);
        if (c.command != cmd)
            throw std::invalid_argument("config command '" + to_string(c.command) + "' does not match '" +
                                        to_string(cmd) + "'");
    }
    c.command = cmd;
    if (given(app, "--seed")) c.master_seed = f.seed;
    if (given(app, "--replicas")) c.replicas = f.replicas;
    if (given(app, "--L")) c.L = f.L;
    if (given(app, "--t")) c.t_grid = parse_time_grid(f.t);
    if (given(app, "--mode")) c.mode = parse_reaction_mode(f.mode);
    if (given(app, "--init")) c.init = parse_init_kind(f.init);
    if (given(app, "--starts")) {
        if (cmd == Command::oned)
            c.starts_1d = f.starts_1d;
        else
            c.starts = parse_sites(f.starts);
    }
    if (given(app, "--offsets")) c.offsets = parse_sites(f.offsets);
    if (given(app, "--symmetrize")) c.symmetrize = true;
    if (given(app, "--exact")) c.exact_pair = true;
    if (given(app, "--kind")) c.rhs_kind = parse_rhs_kind(f.kind);
    if (given(app, "--y0")) c.y0 = f.y0;
    if (given(app, "--walkers")) c.n_walkers = f.n_walkers;
    if (given(app, "--r0")) c.r0 = f.r0;
    if (given(app, "--out")) c.output_path = f.out;
    if (given(app, "--threads")) c.threads = f.threads;
    return c;
}

void common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "JSON config; flags given here override it");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--replicas", f.replicas, "independent replicas");
    app->add_option("--t", f.t, "geometric time grid t_min:t_max:points");
    app->add_option("--out", f.out, "output directory")->capture_default_str();
    app->add_option("--threads", f.threads, "worker threads (default: CRW_THREADS or all cores)");
}

int run(const ExperimentConfig& c) {
    const auto m = run_experiment(c);
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& o : m.outputs) std::cout << c.output_path << "/" << o << "\n";
    return m.success ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coalescing random walks: estimators, exact kernels and checks"};
    app.require_subcommand(0, 1);
    Flags f;
    std::string top_config;
    app.add_option("--config", top_config, "run the experiment described by a JSON config");

    auto* pnc = app.add_subcommand("pnc", "non-collision probability of N walkers (Monte Carlo)");
    common(pnc, f);
    pnc->add_option("--starts", f.starts, "walker starts \"(x,y);(x,y);...\"");
    pnc->add_flag("--exact", "two walkers: also write the exact pair survival");

    auto* density = app.add_subcommand("density", "single-site density of the torus system");
    auto* rhon = app.add_subcommand("rhoN", "probability that all offsets are occupied");
    for (auto* sub : {density, rhon}) {
        common(sub, f);
        sub->add_option("--L", f.L, "torus side (power of two)");
        sub->add_option("--mode", f.mode, "coalesce|annihilate");
        sub->add_option("--init", f.init, "full|bernoulli_half");
    }
    rhon->add_option("--offsets", f.offsets, "pattern offsets \"(x,y);(x,y);...\"");
    rhon->add_flag("--symmetrize", "average over lattice images of the pattern");

    auto* oned = app.add_subcommand("oned", "1D Brownian non-collision probability (Pfaffian)");
    common(oned, f);
    oned->add_option("--starts", f.starts_1d, "strictly increasing starts, even count")->delimiter(',');

    auto* ode = app.add_subcommand("ode", "integrate a rate equation on the t grid (t0 = t_min)");
    common(ode, f);
    ode->add_option("--kind", f.kind, "rho1_ere|rho1_mean_field|pnc_ere|smoluchowski|zero");
    ode->add_option("--y0", f.y0, "initial value at t_min");
    ode->add_option("--walkers", f.n_walkers, "N for pnc_ere");
    ode->add_option("--r0", f.r0, "cutoff radius for smoluchowski");

    auto* verify = app.add_subcommand("verify", "run the verification criteria");
    verify->add_option("--level", f.level, "fast|full")->capture_default_str();
    verify->add_option("--only", f.only, "criterion ids to run")->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    try {
        if (verify->parsed()) {
            const auto report = verify_suite(parse_verify_level(f.level), &std::cout, f.only);
            std::cout << (report.pass() ? "all criteria passed" : "some criteria FAILED") << "\n";
            return report.pass() ? 0 : 1;
        }
        for (auto [sub, cmd] : {std::pair{pnc, Command::pnc}, {density, Command::density}, {rhon, Command::rhoN},
                                {oned, Command::oned}, {ode, Command::ode}})
            if (sub->parsed()) return run(build_config(cmd, sub, f));
        if (!top_config.empty()) return run(load_config(top_config));
        std::cout << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
