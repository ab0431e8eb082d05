#include "crw/site.hpp"

#include <charconv>
#include <stdexcept>

namespace crw {

std::vector<Site> parse_sites(std::string_view text) {
    std::vector<Site> out;
    std::vector<std::int64_t> nums;
    std::size_t i = 0;
    auto flush = [&] {
        if (nums.empty()) return;
        if (nums.size() != 2) throw std::invalid_argument("parse_sites: each site needs exactly two coordinates");
        out.push_back({nums[0], nums[1]});
        nums.clear();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '-' || (c >= '0' && c <= '9')) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
            if (ec != std::errc{}) throw std::invalid_argument("parse_sites: bad integer");
            nums.push_back(v);
            i = static_cast<std::size_t>(ptr - text.data());
            continue;
        }
        if (c == ';') flush();
        else if (c != ',' && c != '(' && c != ')' && c != ' ' && c != '\t')
            throw std::invalid_argument(std::string("parse_sites: unexpected character '") + c + "'");
        ++i;
    }
    flush();
    return out;
}

std::string format_sites(const std::vector<Site>& sites) {
    std::string s;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (k) s += ';';
        s += '(' + std::to_string(sites[k].x) + ',' + std::to_string(sites[k].y) + ')';
    }
    return s;
}

}  // namespace crw
