#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace crw {

/// A point of the square lattice Z^2.
struct Site {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr bool operator==(const Site&, const Site&) = default;
    friend constexpr auto operator<=>(const Site&, const Site&) = default;

    constexpr Site operator+(const Site& o) const { return {x + o.x, y + o.y}; }
    constexpr Site operator-(const Site& o) const { return {x - o.x, y - o.y}; }
    constexpr Site operator-() const { return {-x, -y}; }
};

inline constexpr Site kOrigin{0, 0};
inline constexpr Site kE1{1, 0};
inline constexpr Site kE2{0, 1};

/// Unit steps in the order used by every walker kernel: +x, -x, +y, -y.
inline constexpr Site kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

constexpr std::int64_t sup_norm(const Site& s) {
    const auto ax = s.x < 0 ? -s.x : s.x;
    const auto ay = s.y < 0 ? -s.y : s.y;
    return ax > ay ? ax : ay;
}

constexpr std::int64_t norm2(const Site& s) { return s.x * s.x + s.y * s.y; }

/// Element of the dihedral group of the square, indexed 0..7.
/// Bit 0 flips x, bit 1 flips y, bit 2 swaps the coordinates (applied last).
constexpr Site apply_symmetry(int element, Site s) {
    if (element & 1) s.x = -s.x;
    if (element & 2) s.y = -s.y;
    if (element & 4) s = {s.y, s.x};
    return s;
}

/// Parses "(x,y);(x,y);..." (parentheses and whitespace optional).
std::vector<Site> parse_sites(std::string_view text);
std::string format_sites(const std::vector<Site>& sites);

}  // namespace crw

template <>
struct std::hash<crw::Site> {
    std::size_t operator()(const crw::Site& s) const noexcept {
        return std::hash<std::int64_t>{}(s.x * 0x9E3779B97F4A7C15LL ^ s.y);
    }
};
