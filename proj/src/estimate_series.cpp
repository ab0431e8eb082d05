#include "crw/estimate_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace crw {

EstimateSeries::EstimateSeries(std::vector<double> grid)
    : times(std::move(grid)),
      mean(times.size(), 0.0),
      var_accum(times.size(), 0.0),
      n(times.size(), 0) {}

EstimateSeries EstimateSeries::single(std::vector<double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw std::invalid_argument("single: grid/value length mismatch");
    EstimateSeries s(std::move(grid));
    std::copy(values.begin(), values.end(), s.mean.begin());
    std::fill(s.n.begin(), s.n.end(), 1);
    return s;
}

EstimateSeries EstimateSeries::exact(std::vector<double> grid, std::vector<double> values) {
    return single(std::move(grid), values);
}

bool EstimateSeries::empty_accumulator() const {
    return std::all_of(n.begin(), n.end(), [](auto k) { return k == 0; });
}

double EstimateSeries::variance(std::size_t i) const {
    return n[i] > 1 ? var_accum[i] / static_cast<double>(n[i] - 1) : 0.0;
}

double EstimateSeries::stderr_at(std::size_t i) const {
    return n[i] > 1 ? std::sqrt(variance(i) / static_cast<double>(n[i])) : 0.0;
}

void EstimateSeries::push(std::span<const double> values) {
    merge_into(*this, single(times, values));
}

void EstimateSeries::add_warning(const std::string& w) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
}

void merge_into(EstimateSeries& into, const EstimateSeries& other) {
    if (into.times != other.times) throw std::invalid_argument("merge_estimates: time grids differ");
    for (std::size_t i = 0; i < into.times.size(); ++i) {
        const auto nb = other.n[i];
        if (nb == 0) continue;
        const auto na = into.n[i];
        if (na == 0) {
            into.mean[i] = other.mean[i];
            into.var_accum[i] = other.var_accum[i];
            into.n[i] = nb;
            continue;
        }
        const double total = static_cast<double>(na + nb);
        const double delta = other.mean[i] - into.mean[i];
        const double wa = static_cast<double>(na) / total;
        const double wb = static_cast<double>(nb) / total;
        // Weighted form is symmetric in (a, b), which makes merging commutative
        // to rounding.
        into.mean[i] = wa * into.mean[i] + wb * other.mean[i];
        into.var_accum[i] = into.var_accum[i] + other.var_accum[i] + delta * delta * (static_cast<double>(na) * static_cast<double>(nb) / total);
        into.n[i] = na + nb;
    }
    for (const auto& w : other.warnings) into.add_warning(w);
}

EstimateSeries merge_estimates(const EstimateSeries& a, const EstimateSeries& b) {
    EstimateSeries out = a;
    merge_into(out, b);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_series_csv(std::ostream& os, const EstimateSeries& s,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
    os << "t,mean,stderr,n";
    for (const auto& [name, _] : extra) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << format_double(s.times[i]) << ',' << format_double(s.mean[i]) << ','
           << format_double(s.stderr_at(i)) << ',' << s.n[i];
        for (const auto& [_, value] : extra) os << ',' << value;
        os << '\n';
    }
}

std::string series_csv(const EstimateSeries& s,
                       const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ostringstream os;
    write_series_csv(os, s, extra);
    return os.str();
}

std::vector<double> geometric_grid(double t_min, double t_max, int points) {
    if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
        throw std::invalid_argument("geometric_grid: need 0 < t_min < t_max and points >= 2");
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double ratio = std::log(t_max / t_min);
    for (int k = 0; k < points; ++k) grid[k] = t_min * std::exp(ratio * k / (points - 1));
    grid.front() = t_min;
    grid.back() = t_max;
    return grid;
}

}  // namespace crw
