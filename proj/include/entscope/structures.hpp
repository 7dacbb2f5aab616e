#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "entscope/qsim.hpp"

namespace entscope::structures {

/// Ordered list of block sizes partitioning n qubits. Order is significant:
/// [2,1,1], [1,2,1] and [1,1,2] are distinct classes.
struct Composition {
    std::vector<int> parts;

    int n() const;
    std::vector<qsim::BlockKind> block_kinds() const;

    friend bool operator==(const Composition& a, const Composition& b) {
        return a.parts == b.parts;
    }
    friend bool operator<(const Composition& a, const Composition& b) {
        return a.parts < b.parts;
    }
};

/// Young-diagram statistics: h = number of subsystems (rows),
/// w = entanglement depth (widest row).
struct YoungStats {
    int h = 0;
    int w = 0;
};

/**
 * All 2^(n-1) ordered compositions of n, sorted lexicographically by parts.
 * The index of a composition in this list is its class id when the full
 * enumeration is used. Guarded to 1 <= n <= 24.
 */
std::vector<Composition> enumerate_compositions(int n);

/// Number of ordered compositions of n, i.e. 2^(n-1).
std::uint64_t composition_count(int n);

/**
 * Uniform sample of `count` distinct compositions of n, deterministic given
 * seed, returned in lexicographic order. Always includes [n] (the GME class)
 * and [1,...,1] (fully separable), so count must be >= 2 for n >= 2.
 */
std::vector<Composition> sample_compositions(int n, std::uint64_t count,
                                             std::uint64_t seed);

/// "Bell-One-GHZ_3" style label. Part 1 <-> "One", 2 <-> "Bell", k>=3 <-> "GHZ_k".
std::string composition_label(const Composition& c);

/// Inverse of composition_label. Rejects malformed tokens such as "GHZ_2".
Composition parse_label(std::string_view label);

YoungStats young_stats(const Composition& c);

}  // namespace entscope::structures
