#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace entscope::qsim {

using cdouble = std::complex<double>;

/**
 * Kind of pure block a product state is assembled from.
 *
 * Size 1 is a random single-qubit state ("One"), size 2 a Bell pair,
 * size k >= 3 a k-qubit GHZ state.
 */
class BlockKind {
  public:
    static BlockKind one() { return BlockKind(1); }
    static BlockKind bell() { return BlockKind(2); }
    static BlockKind ghz(int k);
    static BlockKind from_size(int size);

    int size() const { return size_; }
    bool is_one() const { return size_ == 1; }
    bool is_bell() const { return size_ == 2; }
    bool is_ghz() const { return size_ >= 3; }

    friend bool operator==(BlockKind a, BlockKind b) {
        return a.size_ == b.size_;
    }

  private:
    explicit BlockKind(int size) : size_(size) {}
    int size_;
};

/// Pure state of one block, 2^size amplitudes, qubit 0 = most significant bit.
struct BlockState {
    BlockKind kind;
    std::vector<cdouble> amplitudes;

    int size() const { return kind.size(); }
};

/// Ordered tensor product of blocks; qubits are assigned left to right.
struct ProductState {
    std::vector<BlockState> blocks;
    int n = 0;
};

/// Measurement axis for one qubit. No identity letters by construction.
enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_letter(Axis a);

/// Length-n word over {X, Y, Z}; one global measurement operator.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::vector<Axis> axes) : axes_(std::move(axes)) {}
    static PauliString from_string(std::string_view letters);
    static PauliString uniform(Axis a, int n);

    std::string to_string() const;
    int size() const { return static_cast<int>(axes_.size()); }
    Axis axis(int qubit) const { return axes_[static_cast<std::size_t>(qubit)]; }
    const std::vector<Axis>& axes() const { return axes_; }

    friend bool operator==(const PauliString& a, const PauliString& b) {
        return a.axes_ == b.axes_;
    }
    friend bool operator<(const PauliString& a, const PauliString& b) {
        return a.axes_ < b.axes_;
    }

  private:
    std::vector<Axis> axes_;
};

/**
 * Builds one block state.
 *
 * One -> Haar-random single-qubit pure state derived deterministically from
 * the seed (theta = arccos of a uniform variate in [-1, 1], phi uniform in
 * [0, 2pi)). Bell -> (|00> + |11>)/sqrt(2). GHZ(k) -> (|0..0> + |1..1>)/sqrt(2).
 * Bell and GHZ ignore the seed.
 */
BlockState build_block_state(BlockKind kind, std::uint64_t seed);

/**
 * Builds a product state from an ordered block list. Each block gets a
 * per-block seed mix_seed(seed, seed_stream::kBlock, block_index).
 * Throws std::invalid_argument("empty composition") on an empty list.
 */
ProductState compose_product_state(const std::vector<BlockKind>& block_kinds,
                                   std::uint64_t seed);

/**
 * Exact Born probabilities of all 2^n outcome bitstrings when qubit i is
 * measured in the eigenbasis of pauli axis i. Outcome bit 0 is the +1
 * eigenvalue; qubit 0 is the most significant outcome bit. Computed per
 * block and combined with a Kronecker product in block order.
 */
std::vector<double> measurement_distribution(const ProductState& state,
                                             const PauliString& pauli);

/**
 * Brute-force check path: materializes the full 2^n statevector, applies
 * per-qubit basis-change unitaries, returns |amplitude|^2. Guarded to
 * n <= 14 ("oracle size limit").
 */
std::vector<double> dense_measurement_distribution(const ProductState& state,
                                                   const PauliString& pauli);

/**
 * Empirical frequencies of `shots` multinomial draws from probs,
 * deterministic given seed. shots must be >= 1.
 */
std::vector<double> sample_shots(const std::vector<double>& probs,
                                 std::uint64_t shots, std::uint64_t seed);

}  // namespace entscope::qsim
