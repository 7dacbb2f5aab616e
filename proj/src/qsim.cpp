#include "entscope/qsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "entscope/rng.hpp"

namespace entscope::qsim {

namespace {

constexpr int kDenseOracleMaxQubits = 14;
constexpr double kClampThreshold = 1e-15;

// Basis-change unitaries mapping the measurement eigenbasis to the
// computational basis: Z -> identity, X -> H, Y -> H * S^dagger.
using Gate = std::array<cdouble, 4>;  // row-major 2x2

const Gate& basis_change(Axis a) {
    static const double s = 1.0 / std::numbers::sqrt2;
    static const Gate identity{1.0, 0.0, 0.0, 1.0};
    static const Gate hadamard{s, s, s, -s};
    static const Gate y_rot{cdouble(s, 0), cdouble(0, -s),  // H * diag(1, -i)
                            cdouble(s, 0), cdouble(0, s)};
    switch (a) {
        case Axis::X: return hadamard;
        case Axis::Y: return y_rot;
        case Axis::Z: return identity;
    }
    throw std::logic_error("unreachable axis");
}

// Applies a 2x2 gate to qubit q of a 2^n amplitude vector,
// qubit 0 = most significant bit.
void apply_single_qubit_gate(std::vector<cdouble>& amps, int n, int q,
                             const Gate& g) {
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        const cdouble a0 = amps[i];
        const cdouble a1 = amps[i + stride];
        amps[i] = g[0] * a0 + g[1] * a1;
        amps[i + stride] = g[2] * a0 + g[3] * a1;
    }
}

double clamp_roundoff(double p) {
    if (p < 0.0) {
        if (p > -kClampThreshold) return 0.0;
        throw std::logic_error("negative probability beyond round-off");
    }
    return p;
}

std::vector<double> block_distribution(const BlockState& block,
                                       const PauliString& pauli,
                                       int qubit_offset) {
    const int s = block.size();
    std::vector<cdouble> amps = block.amplitudes;
    for (int q = 0; q < s; ++q) {
        apply_single_qubit_gate(amps, s, q,
                                basis_change(pauli.axis(qubit_offset + q)));
    }
    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        probs[i] = clamp_roundoff(std::norm(amps[i]));
    }
    return probs;
}

void check_arity(const ProductState& state, const PauliString& pauli) {
    if (pauli.size() != state.n) {
        throw std::invalid_argument("pauli/state arity mismatch");
    }
}

}  // namespace

BlockKind BlockKind::ghz(int k) {
    if (k < 3) {
        throw std::invalid_argument("GHZ block requires k >= 3");
    }
    return BlockKind(k);
}

BlockKind BlockKind::from_size(int size) {
    if (size < 1) {
        throw std::invalid_argument("block size must be >= 1");
    }
    return BlockKind(size);
}

char axis_letter(Axis a) {
    switch (a) {
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    throw std::logic_error("unreachable axis");
}

PauliString PauliString::from_string(std::string_view letters) {
    if (letters.empty()) {
        throw std::invalid_argument("empty Pauli string");
    }
    std::vector<Axis> axes;
    axes.reserve(letters.size());
    for (char c : letters) {
        switch (c) {
            case 'X': axes.push_back(Axis::X); break;
            case 'Y': axes.push_back(Axis::Y); break;
            case 'Z': axes.push_back(Axis::Z); break;
            default:
                throw std::invalid_argument(
                    std::string("invalid Pauli letter: ") + c);
        }
    }
    return PauliString(std::move(axes));
}

PauliString PauliString::uniform(Axis a, int n) {
    return PauliString(std::vector<Axis>(static_cast<std::size_t>(n), a));
}

std::string PauliString::to_string() const {
    std::string out;
    out.reserve(axes_.size());
    for (Axis a : axes_) out.push_back(axis_letter(a));
    return out;
}

BlockState build_block_state(BlockKind kind, std::uint64_t seed) {
    const std::size_t dim = std::size_t{1} << kind.size();
    std::vector<cdouble> amps(dim, cdouble{0.0, 0.0});
    if (kind.is_one()) {
        Rng rng(seed);
        const double theta = std::acos(2.0 * rng.next_double() - 1.0);
        const double phi = 2.0 * std::numbers::pi * rng.next_double();
        amps[0] = std::cos(theta / 2.0);
        amps[1] = std::polar(std::sin(theta / 2.0), phi);
    } else {
        const double s = 1.0 / std::numbers::sqrt2;
        amps.front() = s;
        amps.back() = s;
    }
    return BlockState{kind, std::move(amps)};
}

ProductState compose_product_state(const std::vector<BlockKind>& block_kinds,
                                   std::uint64_t seed) {
    if (block_kinds.empty()) {
        throw std::invalid_argument("empty composition");
    }
    ProductState state;
    state.blocks.reserve(block_kinds.size());
    for (std::size_t i = 0; i < block_kinds.size(); ++i) {
        state.blocks.push_back(build_block_state(
            block_kinds[i], mix_seed(seed, seed_stream::kBlock, i)));
        state.n += block_kinds[i].size();
    }
    return state;
}

std::vector<double> measurement_distribution(const ProductState& state,
                                             const PauliString& pauli) {
    check_arity(state, pauli);
    std::vector<double> probs{1.0};
    int offset = 0;
    for (const BlockState& block : state.blocks) {
        const std::vector<double> bp = block_distribution(block, pauli, offset);
        std::vector<double> next(probs.size() * bp.size());
        for (std::size_t i = 0; i < probs.size(); ++i) {
            for (std::size_t j = 0; j < bp.size(); ++j) {
                next[i * bp.size() + j] = probs[i] * bp[j];
            }
        }
        probs = std::move(next);
        offset += block.size();
    }
    return probs;
}

std::vector<double> dense_measurement_distribution(const ProductState& state,
                                                   const PauliString& pauli) {
    check_arity(state, pauli);
    if (state.n > kDenseOracleMaxQubits) {
        throw std::invalid_argument("oracle size limit");
    }
    std::vector<cdouble> amps{cdouble{1.0, 0.0}};
    for (const BlockState& block : state.blocks) {
        std::vector<cdouble> next(amps.size() * block.amplitudes.size());
        for (std::size_t i = 0; i < amps.size(); ++i) {
            for (std::size_t j = 0; j < block.amplitudes.size(); ++j) {
                next[i * block.amplitudes.size() + j] =
                    amps[i] * block.amplitudes[j];
            }
        }
        amps = std::move(next);
    }
    for (int q = 0; q < state.n; ++q) {
        apply_single_qubit_gate(amps, state.n, q, basis_change(pauli.axis(q)));
    }
    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        probs[i] = clamp_roundoff(std::norm(amps[i]));
    }
    return probs;
}

std::vector<double> sample_shots(const std::vector<double>& probs,
                                 std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be >= 1");
    }
    std::vector<double> cumulative(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cumulative[i] = acc;
    }
    std::vector<std::uint64_t> counts(probs.size(), 0);
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= counts.size()) idx = counts.size() - 1;
        ++counts[idx];
    }
    std::vector<double> freq(probs.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        freq[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
    }
    return freq;
}

}  // namespace entscope::qsim
