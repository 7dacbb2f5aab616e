#include "entscope/structures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "entscope/rng.hpp"

namespace entscope::structures {

namespace {

constexpr int kMaxN = 24;

void check_n(int n) {
    if (n < 1 || n > kMaxN) {
        throw std::invalid_argument("qubit count out of range [1, 24]");
    }
}

// Compositions of n are in bijection with (n-1)-bit cut masks: bit j (MSB
// first) set means a block boundary after qubit j. Descending mask value
// yields ascending lexicographic part order.
Composition composition_from_cutmask(int n, std::uint64_t mask) {
    Composition c;
    int run = 1;
    for (int j = 0; j < n - 1; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 2 - j);
        if (mask & bit) {
            c.parts.push_back(run);
            run = 1;
        } else {
            ++run;
        }
    }
    c.parts.push_back(run);
    return c;
}

void check_composition(const Composition& c) {
    if (c.parts.empty()) {
        throw std::invalid_argument("empty composition");
    }
    for (int p : c.parts) {
        if (p < 1) {
            throw std::invalid_argument("composition parts must be >= 1");
        }
    }
}

}  // namespace

int Composition::n() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
}

std::vector<qsim::BlockKind> Composition::block_kinds() const {
    std::vector<qsim::BlockKind> kinds;
    kinds.reserve(parts.size());
    for (int p : parts) kinds.push_back(qsim::BlockKind::from_size(p));
    return kinds;
}

std::uint64_t composition_count(int n) {
    check_n(n);
    return std::uint64_t{1} << (n - 1);
}

std::vector<Composition> enumerate_compositions(int n) {
    check_n(n);
    const std::uint64_t total = composition_count(n);
    std::vector<Composition> out;
    out.reserve(total);
    for (std::uint64_t v = total; v-- > 0;) {
        out.push_back(composition_from_cutmask(n, v));
    }
    return out;
}

std::vector<Composition> sample_compositions(int n, std::uint64_t count,
                                             std::uint64_t seed) {
    check_n(n);
    const std::uint64_t total = composition_count(n);
    if (count == 0 || count > total) {
        throw std::invalid_argument("sample count exceeds composition count");
    }
    if (n >= 2 && count < 2) {
        throw std::invalid_argument(
            "sample count must be >= 2 to cover GME and fully separable");
    }

    // Forced boundary classes: [n] is mask 0, [1,...,1] is the all-ones mask.
    std::vector<std::uint64_t> masks{0};
    if (total > 1) masks.push_back(total - 1);

    Rng rng(mix_seed(seed, seed_stream::kClasses));
    if (count > total / 2 && total <= (std::uint64_t{1} << 20)) {
        std::vector<std::uint64_t> rest;
        rest.reserve(total - masks.size());
        for (std::uint64_t v = 1; v + 1 < total; ++v) rest.push_back(v);
        rng.shuffle(rest);
        masks.insert(masks.end(), rest.begin(),
                     rest.begin() + static_cast<std::ptrdiff_t>(count - masks.size()));
    } else {
        std::unordered_set<std::uint64_t> seen(masks.begin(), masks.end());
        while (masks.size() < count) {
            const std::uint64_t v = rng.next_below(total);
            if (seen.insert(v).second) masks.push_back(v);
        }
    }

    // Descending mask = ascending lexicographic parts; class ids follow
    // the same canonical order as the full enumeration.
    std::sort(masks.begin(), masks.end(), std::greater<>());
    std::vector<Composition> out;
    out.reserve(masks.size());
    for (std::uint64_t v : masks) out.push_back(composition_from_cutmask(n, v));
    return out;
}

std::string composition_label(const Composition& c) {
    check_composition(c);
    std::string out;
    for (std::size_t i = 0; i < c.parts.size(); ++i) {
        if (i > 0) out.push_back('-');
        const int p = c.parts[i];
        if (p == 1) {
            out += "One";
        } else if (p == 2) {
            out += "Bell";
        } else {
            out += "GHZ_" + std::to_string(p);
        }
    }
    return out;
}

Composition parse_label(std::string_view label) {
    Composition c;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dash = label.find('-', pos);
        const std::string_view token = label.substr(
            pos, dash == std::string_view::npos ? std::string_view::npos
                                                : dash - pos);
        if (token == "One") {
            c.parts.push_back(1);
        } else if (token == "Bell") {
            c.parts.push_back(2);
        } else if (token.size() > 4 && token.substr(0, 4) == "GHZ_") {
            int k = 0;
            for (char ch : token.substr(4)) {
                if (ch < '0' || ch > '9') {
                    throw std::invalid_argument("invalid block token: " +
                                                std::string(token));
                }
                k = k * 10 + (ch - '0');
                if (k > 1000000) {
                    throw std::invalid_argument("invalid block token: " +
                                                std::string(token));
                }
            }
            if (k < 3) {
                throw std::invalid_argument("invalid block token: " +
                                            std::string(token));
            }
            c.parts.push_back(k);
        } else {
            throw std::invalid_argument("invalid block token: " +
                                        std::string(token));
        }
        if (dash == std::string_view::npos) break;
        pos = dash + 1;
    }
    return c;
}

YoungStats young_stats(const Composition& c) {
    check_composition(c);
    YoungStats s;
    s.h = static_cast<int>(c.parts.size());
    s.w = *std::max_element(c.parts.begin(), c.parts.end());
    return s;
}

}  // namespace entscope::structures
