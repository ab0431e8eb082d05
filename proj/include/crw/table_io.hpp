#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>

#include "crw/lattice_walks.hpp"

namespace crw {

/// Columns x,y,prob; one row per box site, y outer.
void write_table_csv(std::ostream& os, const TransitionTable& table);
void write_table_csv(std::ostream& os, const KilledTable& table);

/// Binary cache record, little-endian:
///   "CRW2" | u32 version | u8 killed | i64 source.x | i64 source.y
///   | f64 time | i32 radius | u64 count, f64[count] probs
///   | f64 tail_mass (free) or f64 survival_mass, f64 escaped_mass (killed)
///   | i32 jump_truncation
inline constexpr std::uint32_t kTableCacheVersion = 1;

using AnyTable = std::variant<TransitionTable, KilledTable>;

void write_table_binary(std::ostream& os, const AnyTable& table);
AnyTable read_table_binary(std::istream& is);

/// Directory-backed cache keyed by (t, radius, killed, source).
class TableCache {
public:
    explicit TableCache(std::filesystem::path dir);

    TransitionTable transition(double t, int radius);
    KilledTable killed(double t, const Site& source, int radius);

    [[nodiscard]] std::filesystem::path path_for(double t, int radius, bool killed, const Site& source) const;

private:
    std::optional<AnyTable> load(const std::filesystem::path& p) const;
    void store(const std::filesystem::path& p, const AnyTable& table) const;

    std::filesystem::path dir_;
};

}  // namespace crw
