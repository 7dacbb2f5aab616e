#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "entscope/qsim.hpp"
#include "entscope/rng.hpp"

using namespace entscope;
using qsim::Axis;
using qsim::BlockKind;
using qsim::PauliString;
using cd = std::complex<double>;

namespace {

// Test-local gate-by-gate statevector oracle, independent of qsim's
// construction path. Qubit 0 is the most significant bit.
void oracle_h(std::vector<cd>& amps, int n, int q) {
    const std::size_t mask = std::size_t{1} << (n - 1 - q);
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) continue;
        const cd a0 = amps[i];
        const cd a1 = amps[i | mask];
        amps[i] = s * (a0 + a1);
        amps[i | mask] = s * (a0 - a1);
    }
}

void oracle_cnot(std::vector<cd>& amps, int n, int control, int target) {
    const std::size_t cmask = std::size_t{1} << (n - 1 - control);
    const std::size_t tmask = std::size_t{1} << (n - 1 - target);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amps[i], amps[i | tmask]);
        }
    }
}

std::vector<cd> ghz_circuit(int n) {
    std::vector<cd> amps(std::size_t{1} << n, cd{0.0, 0.0});
    amps[0] = 1.0;
    oracle_h(amps, n, 0);
    for (int q = 1; q < n; ++q) oracle_cnot(amps, n, 0, q);
    return amps;
}

std::vector<BlockKind> random_kinds(int n, Rng& rng) {
    std::vector<BlockKind> kinds;
    int left = n;
    while (left > 0) {
        const int size = 1 + static_cast<int>(rng.next_below(
                                 static_cast<std::uint64_t>(left)));
        kinds.push_back(BlockKind::from_size(size));
        left -= size;
    }
    return kinds;
}

PauliString random_pauli(int n, Rng& rng) {
    std::vector<Axis> axes;
    for (int i = 0; i < n; ++i) {
        axes.push_back(static_cast<Axis>(rng.next_below(3)));
    }
    return PauliString(std::move(axes));
}

}  // namespace

TEST_CASE("GHZ(3) amplitudes") {
    const auto b = qsim::build_block_state(BlockKind::ghz(3), 123);
    REQUIRE(b.amplitudes.size() == 8);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(b.amplitudes[0] - cd{s, 0}) < 1e-15);
    CHECK(std::abs(b.amplitudes[7] - cd{s, 0}) < 1e-15);
    for (int i = 1; i < 7; ++i) CHECK(std::abs(b.amplitudes[i]) == 0.0);
}

TEST_CASE("Bell amplitudes") {
    const auto b = qsim::build_block_state(BlockKind::bell(), 9);
    const double s = 1.0 / std::sqrt(2.0);
    REQUIRE(b.amplitudes.size() == 4);
    CHECK(std::abs(b.amplitudes[0] - cd{s, 0}) < 1e-15);
    CHECK(std::abs(b.amplitudes[3] - cd{s, 0}) < 1e-15);
    CHECK(std::abs(b.amplitudes[1]) == 0.0);
    CHECK(std::abs(b.amplitudes[2]) == 0.0);
}

TEST_CASE("One block is seed-deterministic and normalized") {
    const auto a = qsim::build_block_state(BlockKind::one(), 42);
    const auto b = qsim::build_block_state(BlockKind::one(), 42);
    const auto c = qsim::build_block_state(BlockKind::one(), 43);
    REQUIRE(a.amplitudes.size() == 2);
    CHECK(a.amplitudes == b.amplitudes);
    CHECK(a.amplitudes != c.amplitudes);
    double norm = 0.0;
    for (const cd& amp : a.amplitudes) norm += std::norm(amp);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ghz requires k >= 3") {
    CHECK_THROWS_AS(BlockKind::ghz(2), std::invalid_argument);
    CHECK_THROWS_AS(BlockKind::from_size(0), std::invalid_argument);
}

TEST_CASE("compose Bell-One-GHZ_3") {
    const auto state = qsim::compose_product_state(
        {BlockKind::bell(), BlockKind::one(), BlockKind::ghz(3)}, 7);
    CHECK(state.n == 6);
    REQUIRE(state.blocks.size() == 3);
    CHECK(state.blocks[0].size() == 2);
    CHECK(state.blocks[1].size() == 1);
    CHECK(state.blocks[2].size() == 3);
}

TEST_CASE("compose single One") {
    const auto state = qsim::compose_product_state({BlockKind::one()}, 7);
    CHECK(state.n == 1);
    CHECK(state.blocks.size() == 1);
}

TEST_CASE("compose empty list throws") {
    CHECK_THROWS_WITH_AS(qsim::compose_product_state({}, 1),
                         "empty composition", std::invalid_argument);
}

TEST_CASE("compose is a pure function of the seed") {
    const auto a = qsim::compose_product_state(
        {BlockKind::one(), BlockKind::one(), BlockKind::bell()}, 99);
    const auto b = qsim::compose_product_state(
        {BlockKind::one(), BlockKind::one(), BlockKind::bell()}, 99);
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        CHECK(a.blocks[i].amplitudes == b.blocks[i].amplitudes);
    }
}

TEST_CASE("GHZ(4) equals the dense H + CNOT circuit") {
    const auto state = qsim::compose_product_state({BlockKind::ghz(4)}, 0);
    const auto circuit = ghz_circuit(4);
    REQUIRE(state.blocks[0].amplitudes.size() == circuit.size());
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        CHECK(std::abs(state.blocks[0].amplitudes[i] - circuit[i]) < 1e-12);
    }
}

TEST_CASE("GHZ(3) under ZZZ") {
    const auto state = qsim::compose_product_state({BlockKind::ghz(3)}, 0);
    const auto probs =
        qsim::measurement_distribution(state, PauliString::from_string("ZZZ"));
    REQUIRE(probs.size() == 8);
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[7] == doctest::Approx(0.5).epsilon(1e-12));
    for (int i = 1; i < 7; ++i) CHECK(probs[i] == 0.0);
}

TEST_CASE("Bell under ZX is uniform") {
    const auto state = qsim::compose_product_state({BlockKind::bell()}, 0);
    const auto probs =
        qsim::measurement_distribution(state, PauliString::from_string("ZX"));
    REQUIRE(probs.size() == 4);
    for (double p : probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("GHZ(3) under XXX puts 1/4 on even-parity outcomes") {
    const auto state = qsim::compose_product_state({BlockKind::ghz(3)}, 0);
    const auto probs =
        qsim::measurement_distribution(state, PauliString::from_string("XXX"));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const int parity = __builtin_popcountll(i) & 1;
        if (parity == 0) {
            CHECK(probs[i] == doctest::Approx(0.25).epsilon(1e-12));
        } else {
            CHECK(std::abs(probs[i]) < 1e-12);
        }
    }
    const auto dense = qsim::dense_measurement_distribution(
        state, PauliString::from_string("XXX"));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        CHECK(probs[i] == doctest::Approx(dense[i]).epsilon(1e-12));
    }
}

TEST_CASE("arity mismatch throws") {
    const auto state = qsim::compose_product_state({BlockKind::bell()}, 0);
    CHECK_THROWS_WITH_AS(
        qsim::measurement_distribution(state, PauliString::from_string("ZZZ")),
        "pauli/state arity mismatch", std::invalid_argument);
    CHECK_THROWS_WITH_AS(qsim::dense_measurement_distribution(
                             state, PauliString::from_string("Z")),
                         "pauli/state arity mismatch", std::invalid_argument);
}

TEST_CASE("dense oracle size guard") {
    const auto state = qsim::compose_product_state({BlockKind::ghz(15)}, 0);
    CHECK_THROWS_WITH_AS(
        qsim::dense_measurement_distribution(
            state, PauliString::uniform(Axis::Z, 15)),
        "oracle size limit", std::invalid_argument);
}

TEST_CASE("blockwise equals dense oracle on random states") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(9));  // 2..10
        const auto kinds = random_kinds(n, rng);
        const auto state = qsim::compose_product_state(kinds, rng.next_u64());
        const auto pauli = random_pauli(n, rng);
        const auto fast = qsim::measurement_distribution(state, pauli);
        const auto dense = qsim::dense_measurement_distribution(state, pauli);
        REQUIRE(fast.size() == dense.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) {
            worst = std::max(worst, std::abs(fast[i] - dense[i]));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("distributions are normalized and non-negative") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        const auto state = qsim::compose_product_state(random_kinds(n, rng),
                                                       rng.next_u64());
        const auto probs =
            qsim::measurement_distribution(state, random_pauli(n, rng));
        double sum = 0.0;
        for (double p : probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("product of One blocks factorizes under ZZZ") {
    const auto state = qsim::compose_product_state(
        {BlockKind::one(), BlockKind::one(), BlockKind::one()}, 55);
    const auto probs =
        qsim::measurement_distribution(state, PauliString::from_string("ZZZ"));
    std::vector<std::vector<double>> singles;
    for (const auto& block : state.blocks) {
        singles.push_back({std::norm(block.amplitudes[0]),
                           std::norm(block.amplitudes[1])});
    }
    for (int b0 = 0; b0 < 2; ++b0) {
        for (int b1 = 0; b1 < 2; ++b1) {
            for (int b2 = 0; b2 < 2; ++b2) {
                const double expected =
                    singles[0][b0] * singles[1][b1] * singles[2][b2];
                CHECK(probs[static_cast<std::size_t>(b0 * 4 + b1 * 2 + b2)] ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Bell under XX") {
    const auto state = qsim::compose_product_state({BlockKind::bell()}, 0);
    const auto probs = qsim::dense_measurement_distribution(
        state, PauliString::from_string("XX"));
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(probs[1]) < 1e-15);
    CHECK(std::abs(probs[2]) < 1e-15);
    CHECK(probs[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("GHZ all-X parity law") {
    for (int k = 3; k <= 8; ++k) {
        const auto state =
            qsim::compose_product_state({BlockKind::ghz(k)}, 0);
        const auto probs = qsim::measurement_distribution(
            state, PauliString::uniform(Axis::X, k));
        const double even_mass = 1.0 / static_cast<double>(1 << (k - 1));
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (__builtin_popcountll(i) % 2 == 0) {
                CHECK(std::abs(probs[i] - even_mass) < 1e-12);
            } else {
                CHECK(std::abs(probs[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("swapping adjacent blocks permutes the outcome bit fields") {
    const auto one = qsim::build_block_state(BlockKind::one(), 17);
    const auto bell = qsim::build_block_state(BlockKind::bell(), 0);
    qsim::ProductState ab{{one, bell}, 3};
    qsim::ProductState ba{{bell, one}, 3};
    const auto p_ab = qsim::measurement_distribution(
        ab, PauliString::from_string("YXZ"));
    const auto p_ba = qsim::measurement_distribution(
        ba, PauliString::from_string("XZY"));
    for (std::size_t o = 0; o < 2; ++o) {
        for (std::size_t bb = 0; bb < 4; ++bb) {
            CHECK(p_ab[o * 4 + bb] == p_ba[bb * 2 + o]);
        }
    }
}

TEST_CASE("sample_shots: single shot is one-hot") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto f = qsim::sample_shots(p, 1, 5);
    int ones = 0;
    for (double v : f) {
        if (v == 1.0) ++ones;
        else CHECK(v == 0.0);
    }
    CHECK(ones == 1);
}

TEST_CASE("sample_shots converges to the distribution") {
    const auto state = qsim::compose_product_state({BlockKind::bell()}, 0);
    const auto probs =
        qsim::measurement_distribution(state, PauliString::from_string("ZZ"));
    const auto f = qsim::sample_shots(probs, 1000000, 31);
    CHECK(std::abs(f[0] - 0.5) < 0.002);
    CHECK(std::abs(f[3] - 0.5) < 0.002);
    CHECK(f[1] == 0.0);
    CHECK(f[2] == 0.0);
}

TEST_CASE("sample_shots determinism and zero-shot error") {
    const std::vector<double> p{0.25, 0.75};
    CHECK(qsim::sample_shots(p, 1000, 8) == qsim::sample_shots(p, 1000, 8));
    CHECK(qsim::sample_shots(p, 1000, 8) != qsim::sample_shots(p, 1000, 9));
    CHECK_THROWS_AS(qsim::sample_shots(p, 0, 1), std::invalid_argument);
}

TEST_CASE("pauli string parsing") {
    CHECK(PauliString::from_string("XYZ").to_string() == "XYZ");
    CHECK_THROWS_AS(PauliString::from_string("XIZ"), std::invalid_argument);
    CHECK_THROWS_AS(PauliString::from_string(""), std::invalid_argument);
    CHECK(PauliString::uniform(Axis::Y, 4).to_string() == "YYYY");
}
