#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace lineart {

// std::uniform_int_distribution and std::shuffle are implementation-defined;
// these helpers sit on top of mt19937_64, whose output sequence is fixed by
// the standard, so seeded results match across toolchains.

inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound);
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % bound;
}

template <class T>
void portable_shuffle(std::vector<T>& items, std::mt19937_64& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace lineart
