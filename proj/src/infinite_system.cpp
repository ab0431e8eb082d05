#include "crw/infinite_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "crw/parallel.hpp"

namespace crw {

std::string to_string(InitKind k) { return k == InitKind::full ? "full" : "bernoulli_half"; }

InitKind parse_init_kind(const std::string& s) {
    if (s == "full") return InitKind::full;
    if (s == "bernoulli_half") return InitKind::bernoulli_half;
    throw std::invalid_argument("unknown init '" + s + "' (expected full|bernoulli_half)");
}

OccupancyField::OccupancyField(int L, ReactionMode mode) : L_(L), mode_(mode) {
    if (L < 4 || !std::has_single_bit(static_cast<unsigned>(L)) || L > (1 << 15))
        throw std::invalid_argument("torus side L must be a power of two in [4, 32768]");
    shift_ = std::countr_zero(static_cast<unsigned>(L));
    mask_ = L - 1;
    site_to_particle_.assign(static_cast<std::size_t>(L) * L, -1);
}

void OccupancyField::place(const Site& s) {
    const auto w = wrap(s);
    if (site_to_particle_[w] >= 0) return;
    site_to_particle_[w] = static_cast<std::int32_t>(particles_.size());
    particles_.push_back(w);
}

void OccupancyField::remove(std::uint32_t particle) {
    site_to_particle_[particles_[particle]] = -1;
    const std::uint32_t last = static_cast<std::uint32_t>(particles_.size() - 1);
    if (particle != last) {
        particles_[particle] = particles_[last];
        site_to_particle_[particles_[particle]] = static_cast<std::int32_t>(particle);
    }
    particles_.pop_back();
}

void OccupancyField::evolve(double t_target, Rng& rng) {
    if (!(t_target >= clock_)) throw std::invalid_argument("evolve_field: t_target precedes the field clock");
    const auto mask = static_cast<std::uint32_t>(mask_);
    const auto row_mask = mask << shift_;
    while (!particles_.empty()) {
        const auto n = static_cast<std::uint32_t>(particles_.size());
        const double dt = -std::log(rng.uniform_open0()) / static_cast<double>(n);
        if (clock_ + dt > t_target) break;  // memoryless: restart the clock at t_target
        clock_ += dt;

        const std::uint64_t bits = rng();
        const auto mover = static_cast<std::uint32_t>(((bits >> 32) * n) >> 32);
        const std::uint32_t from = particles_[mover];
        std::uint32_t to;
        switch (bits & 3) {
            case 0: to = (from & row_mask) | ((from + 1) & mask); break;
            case 1: to = (from & row_mask) | ((from - 1) & mask); break;
            case 2: to = (from + (1u << shift_)) & (row_mask | mask); break;
            default: to = (from - (1u << shift_)) & (row_mask | mask); break;
        }
        const std::int32_t target = site_to_particle_[to];
        if (target < 0) {
            site_to_particle_[from] = -1;
            site_to_particle_[to] = static_cast<std::int32_t>(mover);
            particles_[mover] = to;
        } else if (mode_ == ReactionMode::coalesce) {
            remove(mover);
        } else {
            const auto other = static_cast<std::uint32_t>(target);
            remove(std::max(mover, other));
            remove(std::min(mover, other));
        }
    }
    clock_ = t_target;
}

OccupancyField init_field(int L, ReactionMode mode, InitKind init, Rng& rng) {
    OccupancyField field(L, mode);
    for (std::int64_t y = 0; y < L; ++y) {
        for (std::int64_t x = 0; x < L; x += 64) {
            const std::uint64_t bits = init == InitKind::full ? ~0ULL : rng();
            for (std::int64_t b = 0; b < 64 && x + b < L; ++b)
                if ((bits >> b) & 1) field.place({x + b, y});
        }
    }
    return field;
}

OccupancyField init_field(int L, ReactionMode mode, InitKind init, std::uint64_t seed) {
    Rng rng(seed);
    return init_field(L, mode, init, rng);
}

OccupancyField evolve_field(OccupancyField field, double t_target, std::uint64_t seed) {
    Rng rng(seed);
    field.evolve(t_target, rng);
    return field;
}

namespace {

/// Distinct images of an offset pattern under the lattice symmetries,
/// each normalised by translation so that equal patterns compare equal.
std::vector<std::vector<Site>> symmetry_images(const std::vector<Site>& offsets) {
    std::set<std::vector<Site>> seen;
    std::vector<std::vector<Site>> out;
    for (int g = 0; g < 8; ++g) {
        std::vector<Site> img;
        for (const auto& o : offsets) img.push_back(apply_symmetry(g, o));
        std::vector<Site> key = img;
        std::sort(key.begin(), key.end());
        const Site base = key.front();
        for (auto& k : key) k = k - base;
        if (seen.insert(key).second) out.push_back(std::move(img));
    }
    return out;
}

double fraction_for(const OccupancyField& field, const std::vector<Site>& offsets, const std::optional<Site>& probe) {
    if (offsets.empty()) return 1.0;
    if (probe) {
        for (const auto& o : offsets)
            if (!field.occupied(*probe + o)) return 0.0;
        return 1.0;
    }
    // Every probe origin with all offsets occupied has a particle at
    // origin + offsets[0]; enumerate those.
    std::uint64_t hits = 0;
    for (const auto w : field.particle_sites()) {
        const Site origin = field.site_of(w) - offsets[0];
        bool all = true;
        for (std::size_t k = 1; k < offsets.size() && all; ++k) all = field.occupied(origin + offsets[k]);
        hits += all ? 1 : 0;
    }
    const double area = static_cast<double>(field.side()) * field.side();
    return static_cast<double>(hits) / area;
}

void validate_run(const DensityRun& run) {
    if (run.replicas < 1) throw std::invalid_argument("density run: replicas must be >= 1");
    if (run.times.empty()) throw std::invalid_argument("density run: empty time grid");
    for (std::size_t i = 0; i < run.times.size(); ++i)
        if (run.times[i] < 0.0 || (i && run.times[i] < run.times[i - 1]))
            throw std::invalid_argument("density run: time grid must be non-decreasing and >= 0");
}

}  // namespace

double pattern_fraction(const OccupancyField& field, const CorrelationSpec& spec) {
    if (!spec.symmetrize) return fraction_for(field, spec.offsets, spec.probe);
    const auto images = symmetry_images(spec.offsets);
    double total = 0.0;
    for (const auto& img : images) total += fraction_for(field, img, spec.probe);
    return total / static_cast<double>(images.size());
}

bool horizon_ok(int L, double t_max) { return static_cast<double>(L) >= 8.0 * std::sqrt(t_max); }

std::vector<std::pair<std::string, std::string>> DensitySeries::csv_columns() const {
    return {{"L", std::to_string(L)}, {"mode", to_string(mode)}, {"init", to_string(init)}};
}

std::vector<DensitySeries> estimate_patterns(const DensityRun& run, const std::vector<CorrelationSpec>& patterns) {
    validate_run(run);
    OccupancyField probe_check(run.L, run.mode);  // validates L
    for (const auto& p : patterns) {
        std::set<Site> distinct(p.offsets.begin(), p.offsets.end());
        if (distinct.size() != p.offsets.size()) throw std::invalid_argument("correlation offsets must be distinct");
        std::int64_t reach = 0;
        for (const auto& o : p.offsets) reach = std::max(reach, sup_norm(o));
        if (2 * static_cast<std::int64_t>(p.offsets.size()) * reach >= run.L)
            throw std::invalid_argument("correlation offsets too large for the torus");
    }
    const std::size_t g = run.times.size();
    const std::size_t np = patterns.size();
    // Flattened grid, pattern-major, so one merge pass covers every pattern.
    std::vector<double> flat;
    flat.reserve(g * np);
    for (std::size_t p = 0; p < np; ++p) flat.insert(flat.end(), run.times.begin(), run.times.end());

    const unsigned threads = run.threads ? run.threads : default_threads();
    auto merged = run_replicas(flat, run.replicas, threads, [&](std::uint64_t r) {
        Rng rng(replica_seed(run.seed, r));
        auto field = init_field(run.L, run.mode, run.init, rng);
        std::vector<double> values(g * np);
        for (std::size_t i = 0; i < g; ++i) {
            field.evolve(run.times[i], rng);
            for (std::size_t p = 0; p < np; ++p) {
                const auto& spec = patterns[p];
                values[p * g + i] = (spec.n() == 1 && !spec.probe && spec.offsets[0] == kOrigin)
                                        ? field.density()
                                        : pattern_fraction(field, spec);
            }
        }
        return values;
    });

    std::vector<DensitySeries> out;
    for (std::size_t p = 0; p < np; ++p) {
        DensitySeries d;
        d.L = run.L;
        d.mode = run.mode;
        d.init = run.init;
        d.n = patterns[p].n();
        EstimateSeries s(run.times);
        const auto lo = static_cast<std::ptrdiff_t>(p * g), hi = static_cast<std::ptrdiff_t>((p + 1) * g);
        s.mean.assign(merged.mean.begin() + lo, merged.mean.begin() + hi);
        s.var_accum.assign(merged.var_accum.begin() + lo, merged.var_accum.begin() + hi);
        s.n.assign(merged.n.begin() + lo, merged.n.begin() + hi);
        if (!horizon_ok(run.L, run.times.back())) {
            std::ostringstream w;
            w << "torus horizon violated: L=" << run.L << " < 8*sqrt(t_max)=" << 8.0 * std::sqrt(run.times.back());
            s.add_warning(w.str());
        }
        d.series = std::move(s);
        out.push_back(std::move(d));
    }
    return out;
}

DensitySeries estimate_rho1(const DensityRun& run) {
    return estimate_patterns(run, {CorrelationSpec{{kOrigin}, false, std::nullopt}}).front();
}

DensitySeries estimate_rhoN(const DensityRun& run, const CorrelationSpec& spec) {
    if (spec.offsets.empty()) throw std::invalid_argument("estimate_rhoN: empty offset list");
    return estimate_patterns(run, {spec}).front();
}

namespace {

void tally(StatReport& r, TimeCheck row) {
    (row.pass ? r.passes : r.failures) += 1;
    r.rows.push_back(row);
}

void check_aligned(const EstimateSeries& a, const EstimateSeries& b) {
    if (a.times != b.times) throw std::invalid_argument("report: time grids are not aligned");
}

}  // namespace

StatReport neg_corr_report(const DensitySeries& rho1, const DensitySeries& rhoN, int N) {
    StatReport report;
    check_aligned(rho1.series, rhoN.series);
    if (N < 1) throw std::invalid_argument("neg_corr_report: N must be >= 1");
    for (std::size_t i = 0; i < rho1.series.size(); ++i) {
        const double m1 = rho1.series.mean[i];
        const double mN = rhoN.series.mean[i];
        const double s1 = rho1.series.stderr_at(i);
        const double sN = rhoN.series.stderr_at(i);
        const double grad = N * std::pow(m1, N - 1);
        TimeCheck row;
        row.t = rho1.series.times[i];
        row.lhs = mN;
        row.rhs = std::pow(m1, N);
        row.slack = 3.0 * std::sqrt(sN * sN + grad * grad * s1 * s1);
        row.pass = row.lhs <= row.rhs + row.slack;
        tally(report, row);
    }
    return report;
}

StatReport thinning_report(const DensitySeries& coalescing, const DensitySeries& annihilating, int N) {
    StatReport report;
    check_aligned(coalescing.series, annihilating.series);
    if (coalescing.mode != ReactionMode::coalesce || annihilating.mode != ReactionMode::annihilate)
        report.flags.push_back("series modes must be (coalesce, annihilate)");
    if (coalescing.init != InitKind::full) report.flags.push_back("coalescing run must use full init");
    if (annihilating.init != InitKind::bernoulli_half)
        report.flags.push_back("annihilating run must use bernoulli_half init");
    const double scale = std::ldexp(1.0, N);
    for (std::size_t i = 0; i < coalescing.series.size(); ++i) {
        const double sc = coalescing.series.stderr_at(i);
        const double sa = scale * annihilating.series.stderr_at(i);
        TimeCheck row;
        row.t = coalescing.series.times[i];
        row.lhs = scale * annihilating.series.mean[i];
        row.rhs = coalescing.series.mean[i];
        row.slack = 3.0 * std::sqrt(sc * sc + sa * sa);
        row.pass = std::abs(row.lhs - row.rhs) <= row.slack;
        tally(report, row);
    }
    return report;
}

}  // namespace crw
