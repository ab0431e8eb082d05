#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "crw/infinite_system.hpp"
#include "crw/rate_equations.hpp"
#include "crw/site.hpp"

namespace crw {

enum class Command { pnc, density, rhoN, oned, ode, verify };
std::string to_string(Command c);
Command parse_command(const std::string& s);

/// Geometric grid of `points` times on [t_min, t_max].
struct TimeGrid {
    double t_min = 1.0;
    double t_max = 100.0;
    int points = 8;

    [[nodiscard]] std::vector<double> times() const;
    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Parses "t_min:t_max:points", e.g. "1e2:1e4:8".
TimeGrid parse_time_grid(const std::string& s);
std::string format_time_grid(const TimeGrid& g);

struct ExperimentConfig {
    Command command = Command::pnc;
    std::uint64_t master_seed = 0;
    std::uint64_t replicas = 1;
    int L = 256;
    TimeGrid t_grid;
    ReactionMode mode = ReactionMode::coalesce;
    InitKind init = InitKind::full;
    /// Walker starts (pnc).
    std::vector<Site> starts;
    /// Pattern offsets (rhoN); averaged over lattice images when symmetrize.
    std::vector<Site> offsets;
    bool symmetrize = false;
    /// Brownian starts (oned), strictly increasing, even count.
    std::vector<double> starts_1d;
    /// ode: t0 is t_grid.t_min and t_max is t_grid.t_max.
    RhsKind rhs_kind = RhsKind::rho1_ere;
    double y0 = 1.0;
    int n_walkers = 2;
    double r0 = 1.0;
    /// pnc with two walkers: also write the exact pair survival.
    bool exact_pair = false;
    /// verify: "fast" or "full".
    std::string level = "fast";
    /// Output directory.
    std::string output_path = "crw_out";
    /// 0 selects default_threads().
    unsigned threads = 0;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentConfig& c);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunManifest {
    ExperimentConfig config;
    std::string version;
    double wall_seconds = 0.0;
    /// File names relative to the output directory.
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    bool success = true;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

std::string code_version();

/// Runs one experiment, writes `<command>.csv` (plus any extra series) and
/// `manifest.json` into config.output_path. Throws on invalid configuration.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace crw
