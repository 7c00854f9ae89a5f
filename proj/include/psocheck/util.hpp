#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace psocheck {

inline void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

template <class It>
std::size_t hash_range(It first, It last) {
    std::size_t seed = 0;
    for (; first != last; ++first)
        hash_combine(seed, std::hash<typename std::iterator_traits<It>::value_type>{}(*first));
    return seed;
}

/// Error with source position, thrown by the litmus/outline parsers.
struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                             ": " + msg),
          line(line_), col(col_) {}
};

/// Error for ill-formed semantic requests (bad thread id, value outside domain, ...).
struct SemanticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace psocheck
