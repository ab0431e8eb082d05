#include "crw/table_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "crw/estimate_series.hpp"

namespace crw {
namespace {

constexpr std::array<char, 4> kMagic{'C', 'R', 'W', '2'};

template <typename T>
void put(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    auto bits = std::bit_cast<U>(value);
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<unsigned char>(bits & 0xFF);
        if constexpr (sizeof(T) > 1) bits >>= 8;
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("table cache: truncated record");
    U bits = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) {
        if constexpr (sizeof(T) > 1) bits <<= 8;
        bits |= bytes[i];
    }
    return std::bit_cast<T>(bits);
}

template <typename Table>
void write_csv_impl(std::ostream& os, const Table& table) {
    os << "x,y,prob\n";
    const int r = table.radius;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) os << x << ',' << y << ',' << format_double(table.at({x, y})) << '\n';
}

}  // namespace

void write_table_csv(std::ostream& os, const TransitionTable& table) { write_csv_impl(os, table); }
void write_table_csv(std::ostream& os, const KilledTable& table) { write_csv_impl(os, table); }

void write_table_binary(std::ostream& os, const AnyTable& any) {
    os.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(os, kTableCacheVersion);
    std::visit(
        [&](const auto& table) {
            using T = std::decay_t<decltype(table)>;
            constexpr bool killed = std::is_same_v<T, KilledTable>;
            Site source = kOrigin;
            if constexpr (killed) source = table.source;
            put<std::uint8_t>(os, killed ? 1 : 0);
            put<std::int64_t>(os, source.x);
            put<std::int64_t>(os, source.y);
            put<double>(os, table.time);
            put<std::int32_t>(os, table.radius);
            put<std::uint64_t>(os, table.probs.size());
            for (double p : table.probs) put<double>(os, p);
            if constexpr (killed) {
                put<double>(os, table.survival_mass);
                put<double>(os, table.escaped_mass);
            } else {
                put<double>(os, table.tail_mass);
            }
            put<std::int32_t>(os, table.jump_truncation);
        },
        any);
    if (!os) throw std::runtime_error("table cache: write failed");
}

AnyTable read_table_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("table cache: bad magic");
    if (get<std::uint32_t>(is) != kTableCacheVersion) throw std::runtime_error("table cache: unsupported version");
    const bool killed = get<std::uint8_t>(is) != 0;
    Site source;
    source.x = get<std::int64_t>(is);
    source.y = get<std::int64_t>(is);
    const double time = get<double>(is);
    const int radius = get<std::int32_t>(is);
    const auto count = get<std::uint64_t>(is);
    const auto side = static_cast<std::uint64_t>(2 * radius + 1);
    if (radius < 1 || count != side * side) throw std::runtime_error("table cache: inconsistent size");
    std::vector<double> probs(count);
    for (auto& p : probs) p = get<double>(is);
    if (killed) {
        KilledTable t;
        t.time = time, t.radius = radius, t.source = source, t.probs = std::move(probs);
        t.survival_mass = get<double>(is);
        t.escaped_mass = get<double>(is);
        t.jump_truncation = get<std::int32_t>(is);
        return t;
    }
    TransitionTable t;
    t.time = time, t.radius = radius, t.probs = std::move(probs);
    t.tail_mass = get<double>(is);
    t.jump_truncation = get<std::int32_t>(is);
    return t;
}

TableCache::TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path TableCache::path_for(double t, int radius, bool killed, const Site& source) const {
    const std::string name = std::string(killed ? "killed" : "free") + "_t" + format_double(t) + "_r" +
                             std::to_string(radius) + "_s" + std::to_string(source.x) + "_" +
                             std::to_string(source.y) + ".crw2";
    return dir_ / name;
}

std::optional<AnyTable> TableCache::load(const std::filesystem::path& p) const {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        return read_table_binary(in);
    } catch (const std::runtime_error&) {
        return std::nullopt;  // stale or corrupt entry; rebuild
    }
}

void TableCache::store(const std::filesystem::path& p, const AnyTable& table) const {
    const auto tmp = std::filesystem::path(p).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        write_table_binary(out, table);
    }
    std::filesystem::rename(tmp, p);
}

TransitionTable TableCache::transition(double t, int radius) {
    const auto p = path_for(t, radius, false, kOrigin);
    if (auto hit = load(p); hit && std::holds_alternative<TransitionTable>(*hit))
        return std::get<TransitionTable>(std::move(*hit));
    auto table = build_transition_table(t, radius);
    store(p, table);
    return table;
}

KilledTable TableCache::killed(double t, const Site& source, int radius) {
    if (radius <= 0) radius = default_radius(t, source);
    const auto p = path_for(t, radius, true, source);
    if (auto hit = load(p); hit && std::holds_alternative<KilledTable>(*hit))
        return std::get<KilledTable>(std::move(*hit));
    auto table = build_killed_table(t, source, radius);
    store(p, table);
    return table;
}

}  // namespace crw
