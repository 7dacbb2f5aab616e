#include "entscope/kplan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "entscope/rng.hpp"

namespace entscope::kplan {

namespace {

constexpr std::uint64_t kSweepTrainStream = 0x6b737770;  // per-K train seeds

void check_n_positive(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}

double sum_squared_residual(const std::vector<std::pair<double, double>>& pts,
                            double a, double b, double c) {
    double acc = 0.0;
    for (const auto& [n, k] : pts) {
        const double r = a * std::exp(b * std::log(n)) + c - k;
        acc += r * r;
    }
    return acc;
}

// Solves the 3x3 system m x = rhs by Gaussian elimination with partial
// pivoting; returns false when singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < 1e-300) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * x[c];
        x[r] = acc / m[r][r];
    }
    return true;
}

struct GnResult {
    double alpha, b, c, residual;
    bool converged;
};

// Damped Gauss-Newton on f(n) = exp(alpha) n^b + c.
GnResult gauss_newton(const std::vector<std::pair<double, double>>& pts,
                      double alpha, double b, double c) {
    double residual = sum_squared_residual(pts, std::exp(alpha), b, c);
    double mu = 1e-3;
    bool converged = false;
    for (int iter = 0; iter < 400; ++iter) {
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (const auto& [n, k] : pts) {
            const double nb = std::exp(b * std::log(n));
            const double f = std::exp(alpha) * nb;
            const double r = f + c - k;
            const std::array<double, 3> j{f, f * std::log(n), 1.0};
            for (int p = 0; p < 3; ++p) {
                for (int q = 0; q < 3; ++q) jtj[p][q] += j[p] * j[q];
                jtr[p] += j[p] * r;
            }
        }
        bool stepped = false;
        for (int damp = 0; damp < 25; ++damp) {
            auto m = jtj;
            for (int p = 0; p < 3; ++p) m[p][p] += mu * (1.0 + jtj[p][p]);
            std::array<double, 3> delta{};
            std::array<double, 3> rhs{-jtr[0], -jtr[1], -jtr[2]};
            if (!solve3(m, rhs, delta)) {
                mu *= 10.0;
                continue;
            }
            const double na = alpha + delta[0];
            const double nbv = b + delta[1];
            const double nc = c + delta[2];
            if (!std::isfinite(na) || !std::isfinite(nbv) || !std::isfinite(nc)) {
                mu *= 10.0;
                continue;
            }
            const double nres = sum_squared_residual(pts, std::exp(na), nbv, nc);
            if (std::isfinite(nres) && nres <= residual) {
                const double step = std::abs(delta[0]) + std::abs(delta[1]) +
                                    std::abs(delta[2]);
                const double gain = residual - nres;
                alpha = na;
                b = nbv;
                c = nc;
                residual = nres;
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
                if (step < 1e-13 || gain < 1e-18 * (1.0 + residual)) {
                    converged = true;
                }
                break;
            }
            mu *= 10.0;
        }
        if (converged || !stepped) break;
    }
    // Treat a stationary point as converged when the residual is at noise level.
    if (!converged && residual < 1e-16) converged = true;
    return GnResult{alpha, b, c, residual, converged};
}

}  // namespace

double k_formula_raw(int n) {
    check_n_positive(n);
    const KFormula f;
    return f.a * std::exp(f.b * std::log(static_cast<double>(n))) + f.c;
}

std::uint64_t k_formula(int n) {
    const double raw = k_formula_raw(n);
    if (!std::isfinite(raw) || raw > 9.0e18) {
        throw std::invalid_argument("k_formula overflows for this n");
    }
    return static_cast<std::uint64_t>(std::ceil(raw));
}

uint128 qst_measurements(int n) {
    if (n < 1 || n > 64) {
        throw std::invalid_argument("qst_measurements supports n in [1, 64]");
    }
    if (n == 64) return ~uint128{0};  // 2^128 - 1
    return (uint128{1} << (2 * n)) - 1;
}

std::string to_decimal_string(uint128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

double cs_qst_measurements(int n, double r) {
    check_n_positive(n);
    if (r < 1.0) throw std::invalid_argument("rank r must be >= 1");
    return r * std::exp2(static_cast<double>(n)) * static_cast<double>(n) *
           std::log(2.0);
}

double reduction_factor(int n) {
    const double qst = std::exp2(2.0 * n) - 1.0;
    return qst / static_cast<double>(k_formula(n));
}

std::uint64_t input_size(int n) {
    if (n < 1 || n > 62) {
        throw std::invalid_argument("input_size supports n in [1, 62]");
    }
    return 3ull * static_cast<std::uint64_t>(n) + (std::uint64_t{1} << n);
}

SweepResult k_sweep(const SweepConfig& cfg) {
    if (cfg.k_values.empty()) {
        throw std::invalid_argument("k_sweep needs at least one K value");
    }
    for (std::size_t i = 0; i + 1 < cfg.k_values.size(); ++i) {
        if (cfg.k_values[i] >= cfg.k_values[i + 1]) {
            throw std::invalid_argument("k values must be strictly ascending");
        }
    }
    if (cfg.k_values.front() < 1) {
        throw std::invalid_argument("k values must be >= 1");
    }

    const int k_max = cfg.k_values.back();
    std::uint64_t pool_size =
        cfg.pool_size > 0 ? cfg.pool_size : dataset::default_pool_size(cfg.n);
    pool_size = std::max<std::uint64_t>(
        pool_size, std::max<std::uint64_t>(3, static_cast<std::uint64_t>(k_max)));
    if (pool_size > dataset::pauli_pool_total(cfg.n)) {
        throw std::invalid_argument("K exceeds the number of Pauli strings");
    }

    const auto classes = dataset::default_class_table(
        cfg.n, cfg.max_classes, mix_seed(cfg.seed, seed_stream::kClasses));
    const auto manifest =
        dataset::make_manifest(cfg.n, classes, pool_size, k_max,
                               cfg.samples_per_class, cfg.seed, cfg.shots);
    const auto records = dataset::generate_records(manifest);
    const auto split = dataset::split_dataset(records, manifest.split_ratios,
                                              manifest.master_seed);

    auto views_at_k = [&records](const std::vector<std::size_t>& indices,
                                 int k) {
        std::vector<mvnet::Sample<double>> out;
        out.reserve(indices.size());
        for (std::size_t idx : indices) {
            mvnet::Sample<double> s;
            s.class_id = records[idx].class_id;
            s.views.reserve(static_cast<std::size_t>(k));
            for (int v = 0; v < k; ++v) {
                s.views.push_back(
                    records[idx].views[static_cast<std::size_t>(v)].feature());
            }
            out.push_back(std::move(s));
        }
        return out;
    };

    SweepResult result;
    result.n = cfg.n;
    result.threshold = cfg.threshold;
    for (int k : cfg.k_values) {
        mvnet::TrainConfig tc = cfg.train;
        tc.seed = mix_seed(cfg.seed, kSweepTrainStream,
                           static_cast<std::uint64_t>(k));
        const auto train_set = views_at_k(split.train, k);
        const auto val_set = views_at_k(split.val, k);
        const auto test_set = views_at_k(split.test, k);
        const auto trained = mvnet::train(train_set, val_set, tc, cfg.loss);
        const auto metrics = mvnet::evaluate(trained.best_params, test_set);
        result.entries.push_back(SweepEntry{k, metrics.accuracy});
        if (!result.k_min && metrics.accuracy >= cfg.threshold) {
            result.k_min = k;
            if (cfg.stop_at_threshold) break;
        }
    }
    return result;
}

PowerLawFit fit_power_law(
    const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) {
        throw std::invalid_argument("power-law fit needs at least 4 points");
    }
    std::set<double> distinct;
    for (const auto& [n, k] : points) {
        if (n <= 0.0) throw std::invalid_argument("n values must be positive");
        distinct.insert(n);
    }
    if (distinct.size() != points.size()) {
        throw std::invalid_argument("power-law fit needs distinct n values");
    }

    double min_k = points.front().second;
    for (const auto& [n, k] : points) min_k = std::min(min_k, k);

    struct GridPoint {
        double a, b, c, residual;
    };
    std::vector<GridPoint> grid;
    const double c_hi = std::max(min_k, 0.0);
    for (int bi = 0; bi <= 80; ++bi) {
        const double b = 0.25 * bi;
        for (int ci = 0; ci <= 40; ++ci) {
            const double c = c_hi * ci / 40.0;
            double num = 0.0, den = 0.0;
            for (const auto& [n, k] : points) {
                const double u = std::exp(b * std::log(n));
                num += u * (k - c);
                den += u * u;
            }
            const double a = std::max(num / den, 0.0);
            grid.push_back(GridPoint{a, b, c,
                                     sum_squared_residual(points, a, b, c)});
        }
    }
    std::sort(grid.begin(), grid.end(),
              [](const GridPoint& x, const GridPoint& y) {
                  return x.residual < y.residual;
              });

    PowerLawFit best;
    best.a = grid.front().a;
    best.b = grid.front().b;
    best.c = grid.front().c;
    best.residual_norm = std::sqrt(grid.front().residual);
    best.converged = false;

    double best_res = grid.front().residual;
    const std::size_t starts = std::min<std::size_t>(grid.size(), 6);
    for (std::size_t s = 0; s < starts; ++s) {
        const double a0 = std::max(grid[s].a, 1e-30);
        const GnResult gn =
            gauss_newton(points, std::log(a0), grid[s].b, grid[s].c);
        if (gn.residual <= best_res) {
            best_res = gn.residual;
            best.a = std::exp(gn.alpha);
            best.b = gn.b;
            best.c = gn.c;
            best.residual_norm = std::sqrt(gn.residual);
            best.converged = gn.converged;
        }
    }
    return best;
}

std::vector<ResourceRow> resource_table(int n_lo, int n_hi, double cs_rank) {
    if (n_lo < 1 || n_hi < n_lo) {
        throw std::invalid_argument("malformed n range");
    }
    std::vector<ResourceRow> rows;
    rows.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
    for (int n = n_lo; n <= n_hi; ++n) {
        ResourceRow row;
        row.n = n;
        row.k = k_formula(n);
        row.qst = to_decimal_string(qst_measurements(n));
        row.cs_qst = cs_qst_measurements(n, cs_rank);
        row.reduction = reduction_factor(n);
        row.input = input_size(n);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace entscope::kplan
