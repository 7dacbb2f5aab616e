#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entscope/dataset.hpp"
#include "entscope/mvnet.hpp"

namespace entscope::kplan {

using uint128 = unsigned __int128;

/// Empirical measurement-budget curve k = a * n^b + c.
struct KFormula {
    double a = 8.6e-14;
    double b = 14.31;
    double c = 1.82;
};

double k_formula_raw(int n);

/// ceil(8.6e-14 * n^14.31 + 1.82), evaluated in binary64 via exp(b ln n).
/// Ceiling keeps the budget sufficient rather than merely nearest.
std::uint64_t k_formula(int n);

/// Exact 4^n - 1 for n in [1, 64].
uint128 qst_measurements(int n);

std::string to_decimal_string(uint128 v);

/// Compressed-sensing tomography scaling r * 2^n * ln(2^n), natural log.
/// Reported as a relative curve; r is the state rank, r >= 1.
double cs_qst_measurements(int n, double r);

/// (4^n - 1) / k_formula(n).
double reduction_factor(int n);

/// Model input width 3n + 2^n.
std::uint64_t input_size(int n);

struct SweepEntry {
    int k = 0;
    double test_accuracy = 0.0;
};

struct SweepResult {
    int n = 0;
    double threshold = 0.0;
    std::vector<SweepEntry> entries;       // ascending in k
    std::optional<int> k_min;              // smallest recorded k at threshold
};

struct SweepConfig {
    int n = 4;
    double threshold = 0.975;
    std::vector<int> k_values;             // ascending
    int samples_per_class = 100;
    std::uint64_t pool_size = 0;           // 0 = default for n (at least max k)
    std::uint64_t max_classes = 100;       // cap when 2^(n-1) exceeds it
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    bool stop_at_threshold = false;
    mvnet::TrainConfig train;
    mvnet::LossConfig loss;
};

/**
 * For each requested K: rebuild per-sample views as the first K pool
 * entries, train with seeds derived from (seed, K), record test accuracy.
 * The dataset is generated once at max K; truncating to the first K views
 * is identical to regenerating, since views are always a pool prefix.
 */
SweepResult k_sweep(const SweepConfig& cfg);

struct PowerLawFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double residual_norm = 0.0;
    bool converged = false;  // false = best grid point reported with warning
};

/**
 * Least-squares fit of k = a * n^b + c: coarse grid over (b, c) with the
 * optimal a in closed form, then damped Gauss-Newton refinement in
 * (log a, b, c) from the best grid points. Needs >= 4 points, distinct n.
 */
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct ResourceRow {
    int n = 0;
    std::uint64_t k = 0;
    std::string qst;  // decimal, may exceed 64 bits
    double cs_qst = 0.0;
    double reduction = 0.0;
    std::uint64_t input = 0;
};

std::vector<ResourceRow> resource_table(int n_lo, int n_hi, double cs_rank);

}  // namespace entscope::kplan
