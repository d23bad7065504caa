#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "tabaudit/battery.hpp"

namespace tabaudit::battery::detail {

inline std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

inline std::string ratio(std::size_t k, std::size_t n) { return std::to_string(k) + "/" + std::to_string(n); }

inline std::vector<ParsedSample> parse_all(const TabularDataset& ds, const std::vector<std::string>& responses) {
    std::vector<ParsedSample> out;
    out.reserve(responses.size());
    for (const auto& r : responses) out.push_back(parse_sample(ds, r));
    return out;
}

inline std::size_t count_parseable(const std::vector<ParsedSample>& samples) {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), parseable));
}

/// First n entries of a seeded shuffle of [0, range).
inline std::vector<std::size_t> distinct_draws(std::size_t range, std::size_t n, Rng& rng) {
    std::vector<std::size_t> out(range);
    std::iota(out.begin(), out.end(), std::size_t{0});
    n = std::min(n, range);
    for (std::size_t i = 0; i < n; ++i) std::swap(out[i], out[i + uniform_index(rng, range - i)]);
    out.resize(n);
    return out;
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace tabaudit::battery::detail
