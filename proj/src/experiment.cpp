#include "crw/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crw/finite_system.hpp"
#include "crw/oned_exact.hpp"
#include "crw/parallel.hpp"
#include "crw/verify.hpp"

namespace crw {

using nlohmann::json;

std::string to_string(Command c) {
    switch (c) {
        case Command::pnc: return "pnc";
        case Command::density: return "density";
        case Command::rhoN: return "rhoN";
        case Command::oned: return "oned";
        case Command::ode: return "ode";
        case Command::verify: return "verify";
    }
    return "?";
}

Command parse_command(const std::string& s) {
    for (auto c : {Command::pnc, Command::density, Command::rhoN, Command::oned, Command::ode, Command::verify})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown command '" + s + "'");
}

std::vector<double> TimeGrid::times() const { return geometric_grid(t_min, t_max, points); }

TimeGrid parse_time_grid(const std::string& s) {
    const auto a = s.find(':');
    const auto b = a == std::string::npos ? a : s.find(':', a + 1);
    if (b == std::string::npos) throw std::invalid_argument("time grid must look like t_min:t_max:points, got '" + s + "'");
    TimeGrid g;
    try {
        std::size_t used = 0;
        const std::string lo = s.substr(0, a), hi = s.substr(a + 1, b - a - 1), n = s.substr(b + 1);
        g.t_min = std::stod(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(lo);
        g.t_max = std::stod(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(hi);
        g.points = std::stoi(n, &used);
        if (used != n.size()) throw std::invalid_argument(n);
    } catch (const std::exception&) {
        throw std::invalid_argument("time grid must look like t_min:t_max:points, got '" + s + "'");
    }
    return g;
}

std::string format_time_grid(const TimeGrid& g) {
    return format_double(g.t_min) + ":" + format_double(g.t_max) + ":" + std::to_string(g.points);
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (c.command == Command::verify) {
        parse_verify_level(c.level);
        return;
    }
    if (!(c.t_grid.t_min > 0.0)) fail("t_min must be > 0");
    if (!(c.t_grid.t_min < c.t_grid.t_max)) fail("t_min must be < t_max");
    if (c.t_grid.points < 2) fail("points must be >= 2");
    if (c.replicas < 1) fail("replicas must be >= 1");
    switch (c.command) {
        case Command::pnc:
            if (c.starts.empty()) fail("pnc needs --starts");
            require_distinct(c.starts);
            if (c.exact_pair && c.starts.size() != 2) fail("exact_pair needs exactly two starts");
            break;
        case Command::density:
        case Command::rhoN:
            OccupancyField(c.L, c.mode);  // validates L
            if (c.command == Command::rhoN && c.offsets.empty()) fail("rhoN needs --offsets");
            break;
        case Command::oned:
            if (c.starts_1d.empty() || c.starts_1d.size() % 2) fail("oned needs an even, nonzero number of starts");
            OrderedStarts1D{c.starts_1d};
            break;
        case Command::ode: {
            OdeSpec s{c.t_grid.t_min, c.y0, c.rhs_kind, c.n_walkers, c.r0, c.t_grid.t_max};
            crw::validate(s);
            break;
        }
        case Command::verify: break;
    }
}

namespace {

json sites_json(const std::vector<Site>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back({s.x, s.y});
    return a;
}

std::vector<Site> sites_from(const json& j) {
    if (j.is_string()) return parse_sites(j.get<std::string>());
    std::vector<Site> out;
    for (const auto& p : j) out.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>()});
    return out;
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"command", to_string(c.command)},
             {"master_seed", c.master_seed},
             {"replicas", c.replicas},
             {"L", c.L},
             {"t_grid", {{"t_min", c.t_grid.t_min}, {"t_max", c.t_grid.t_max}, {"points", c.t_grid.points}}},
             {"mode", to_string(c.mode)},
             {"init", to_string(c.init)},
             {"starts", sites_json(c.starts)},
             {"offsets", sites_json(c.offsets)},
             {"symmetrize", c.symmetrize},
             {"starts_1d", c.starts_1d},
             {"rhs_kind", to_string(c.rhs_kind)},
             {"y0", c.y0},
             {"n_walkers", c.n_walkers},
             {"r0", c.r0},
             {"exact_pair", c.exact_pair},
             {"level", c.level},
             {"output_path", c.output_path},
             {"threads", c.threads}};
}

// Missing keys keep their defaults so hand-written configs can stay short.
void from_json(const json& j, ExperimentConfig& c) {
    ExperimentConfig d;
    d.command = parse_command(j.at("command").get<std::string>());
    d.master_seed = j.value("master_seed", d.master_seed);
    d.replicas = j.value("replicas", d.replicas);
    d.L = j.value("L", d.L);
    if (j.contains("t_grid")) {
        const auto& g = j.at("t_grid");
        if (g.is_string()) {
            d.t_grid = parse_time_grid(g.get<std::string>());
        } else {
            d.t_grid.t_min = g.value("t_min", d.t_grid.t_min);
            d.t_grid.t_max = g.value("t_max", d.t_grid.t_max);
            d.t_grid.points = g.value("points", d.t_grid.points);
        }
    }
    if (j.contains("mode")) d.mode = parse_reaction_mode(j.at("mode").get<std::string>());
    if (j.contains("init")) d.init = parse_init_kind(j.at("init").get<std::string>());
    if (j.contains("starts")) d.starts = sites_from(j.at("starts"));
    if (j.contains("offsets")) d.offsets = sites_from(j.at("offsets"));
    d.symmetrize = j.value("symmetrize", d.symmetrize);
    d.starts_1d = j.value("starts_1d", d.starts_1d);
    if (j.contains("rhs_kind")) d.rhs_kind = parse_rhs_kind(j.at("rhs_kind").get<std::string>());
    d.y0 = j.value("y0", d.y0);
    d.n_walkers = j.value("n_walkers", d.n_walkers);
    d.r0 = j.value("r0", d.r0);
    d.exact_pair = j.value("exact_pair", d.exact_pair);
    d.level = j.value("level", d.level);
    d.output_path = j.value("output_path", d.output_path);
    d.threads = j.value("threads", d.threads);
    c = std::move(d);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    try {
        return json::parse(in).get<ExperimentConfig>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad config " + path.string() + ": " + e.what());
    }
}

void to_json(json& j, const RunManifest& m) {
    j = json{{"config", m.config},         {"version", m.version},   {"wall_seconds", m.wall_seconds},
             {"outputs", m.outputs},       {"warnings", m.warnings}, {"success", m.success}};
}

void from_json(const json& j, RunManifest& m) {
    m.config = j.at("config").get<ExperimentConfig>();
    m.version = j.at("version").get<std::string>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    m.success = j.at("success").get<bool>();
}

std::string code_version() { return CRW_VERSION; }

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Density grids start with the t = 0 sample.
std::vector<double> with_origin(std::vector<double> times) {
    times.insert(times.begin(), 0.0);
    return times;
}

DensityRun density_run(const ExperimentConfig& c) {
    DensityRun r;
    r.L = c.L;
    r.mode = c.mode;
    r.init = c.init;
    r.times = with_origin(c.t_grid.times());
    r.replicas = c.replicas;
    r.seed = c.master_seed;
    r.threads = c.threads;
    return r;
}

std::string verify_csv(const VerifyReport& report) {
    std::ostringstream os;
    os << "criterion,status,seconds,detail\n";
    for (const auto& r : report.results) {
        std::string detail = r.detail;
        for (auto& ch : detail)
            if (ch == '"') ch = '\'';
        os << r.id << ',' << (r.status == Status::pass ? "pass" : r.status == Status::fail ? "fail" : "skip") << ','
           << format_double(r.seconds) << ",\"" << detail << "\"\n";
    }
    return os.str();
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(config.output_path);
    std::filesystem::create_directories(dir);

    RunManifest m;
    m.config = config;
    m.version = code_version();
    const unsigned threads = config.threads ? config.threads : default_threads();
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(dir / name, text);
        m.outputs.push_back(name);
    };
    auto keep_warnings = [&](const EstimateSeries& s) {
        m.warnings.insert(m.warnings.end(), s.warnings.begin(), s.warnings.end());
    };

    switch (config.command) {
        case Command::pnc: {
            const auto grid = config.t_grid.times();
            const auto s = estimate_pnc_mc(config.starts, grid, config.replicas, config.master_seed, threads);
            emit("pnc.csv", series_csv(s));
            if (config.exact_pair) {
                const auto exact = exact_pnc_pair_series(config.starts[1] - config.starts[0], grid);
                emit("pnc_exact.csv", series_csv(EstimateSeries::exact(grid, exact)));
            }
            break;
        }
        case Command::density: {
            const auto d = estimate_rho1(density_run(config));
            keep_warnings(d.series);
            emit("density.csv", series_csv(d.series, d.csv_columns()));
            break;
        }
        case Command::rhoN: {
            const auto d = estimate_rhoN(density_run(config), {config.offsets, config.symmetrize, std::nullopt});
            keep_warnings(d.series);
            emit("rhoN.csv", series_csv(d.series, d.csv_columns()));
            break;
        }
        case Command::oned: {
            const OrderedStarts1D starts(config.starts_1d);
            const auto grid = config.t_grid.times();
            std::vector<double> v;
            for (double t : grid) v.push_back(pnc_pfaffian_1d(starts, t));
            emit("oned.csv", series_csv(EstimateSeries::exact(grid, v)));
            break;
        }
        case Command::ode: {
            const OdeSpec spec{config.t_grid.t_min, config.y0,  config.rhs_kind,
                               config.n_walkers,    config.r0, config.t_grid.t_max};
            emit("ode.csv", series_csv(solve_ode(spec, config.t_grid.times())));
            break;
        }
        case Command::verify: {
            const auto report = verify_suite(parse_verify_level(config.level), nullptr);
            emit("verify.csv", verify_csv(report));
            m.success = report.pass();
            break;
        }
    }
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", json(m).dump(2) + "\n");
    return m;
}

}  // namespace crw
