#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "entscope/dataset.hpp"
#include "entscope/rng.hpp"

namespace entscope::mvnet {

inline constexpr int kDefaultHidden1 = 256;
inline constexpr int kDefaultHidden2 = 128;

template <class Real>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<Real> data;

    Mat() = default;
    Mat(int r, int c)
        : rows(r), cols(c),
          data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c),
               Real(0)) {}

    Real* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const Real* row(int r) const {
        return data.data() + static_cast<std::size_t>(r) * cols;
    }
    Real& operator()(int r, int c) {
        return data[static_cast<std::size_t>(r) * cols + c];
    }
    Real operator()(int r, int c) const {
        return data[static_cast<std::size_t>(r) * cols + c];
    }
};

template <class Real>
using Vec = std::vector<Real>;

/// Encoder (D -> H1), fusion (H1 -> H2) and classifier (H2 -> C) parameters.
template <class Real>
struct ModelParams {
    int input_dim = 0;
    int hidden1 = 0;
    int hidden2 = 0;
    int n_classes = 0;
    Mat<Real> w1;
    Vec<Real> b1;
    Mat<Real> w2;
    Vec<Real> b2;
    Mat<Real> w3;
    Vec<Real> b3;
};

struct LossConfig {
    double lambda = 0.003;
    double margin = 1.0;
    double epsilon = 1e-8;
};

struct TrainConfig {
    double lr0 = 0.001;
    double clip_norm = 1.0;
    int epochs = 50;
    int batch_size = 64;
    double dropout_rate = 0.5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double scheduler_factor = 0.5;
    int scheduler_patience = 5;  // epochs without val improvement
    double lr_floor = 1e-5;
    std::uint64_t seed = 0;
};

enum class Mode { Train, Eval };

/// Model input: K views of length D each, plus the class id.
template <class Real>
struct Sample {
    std::vector<Vec<Real>> views;
    int class_id = 0;
};

template <class Real>
struct ForwardOutput {
    Vec<Real> logits;
    Vec<Real> representation;  // fusion output r, taken before dropout
};

/// Intermediate activations kept for backprop (and for dropout tests).
template <class Real>
struct ForwardCache {
    std::vector<Vec<Real>> z1;  // K x H1 encoder pre-activations
    std::vector<Vec<Real>> e;   // K x H1 encoder outputs
    Vec<Real> pooled;           // H1
    Vec<Real> z2;               // H2
    Vec<Real> r;                // H2, pre-dropout representation
    Vec<Real> mask;             // H2 inverted-dropout scales; empty in eval
    Vec<Real> rt;               // H2, post-dropout
    Vec<Real> logits;           // C
};

struct Triplet {
    int anchor;
    int positive;
    int negative;
};

/// Anchor/positive/negative representation vectors (one triple per index).
template <class Real>
struct TripletBatch {
    std::vector<Vec<Real>> anchors;
    std::vector<Vec<Real>> positives;
    std::vector<Vec<Real>> negatives;
};

template <class Real>
struct ContrastiveResult {
    Real value = Real(0);
    bool no_valid_triplets = false;
};

template <class Real>
struct LossBreakdown {
    Real total = Real(0);
    Real cross_entropy = Real(0);
    Real contrastive = Real(0);
    int n_triplets = 0;
};

struct Metrics {
    double accuracy = 0.0;
    // TP / (TP + FP); NaN when the class was never predicted.
    std::vector<double> per_class_precision;
    std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double cross_entropy = 0.0;
    double contrastive = 0.0;
    double lr = 0.0;
    double val_accuracy = 0.0;
};

template <class Real>
struct TrainResult {
    ModelParams<Real> best_params;
    int best_epoch = 0;
    double best_val_accuracy = 0.0;
    std::vector<EpochStats> history;
};

// ---------------------------------------------------------------------------
// Initialization

template <class Real>
ModelParams<Real> init_model(int input_dim, int n_classes, std::uint64_t seed,
                             int hidden1 = kDefaultHidden1,
                             int hidden2 = kDefaultHidden2) {
    if (input_dim < 1 || n_classes < 2 || hidden1 < 1 || hidden2 < 1) {
        throw std::invalid_argument("invalid model dimensions");
    }
    ModelParams<Real> p;
    p.input_dim = input_dim;
    p.hidden1 = hidden1;
    p.hidden2 = hidden2;
    p.n_classes = n_classes;
    p.w1 = Mat<Real>(hidden1, input_dim);
    p.b1.assign(static_cast<std::size_t>(hidden1), Real(0));
    p.w2 = Mat<Real>(hidden2, hidden1);
    p.b2.assign(static_cast<std::size_t>(hidden2), Real(0));
    p.w3 = Mat<Real>(n_classes, hidden2);
    p.b3.assign(static_cast<std::size_t>(n_classes), Real(0));

    Rng rng(mix_seed(seed, seed_stream::kInit));
    auto fill = [&rng](Mat<Real>& w, int fan_in) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (Real& v : w.data) {
            v = static_cast<Real>((2.0 * rng.next_double() - 1.0) * bound);
        }
    };
    fill(p.w1, input_dim);
    fill(p.w2, hidden1);
    fill(p.w3, hidden2);
    return p;
}

template <class Real>
ModelParams<Real> zeros_like(const ModelParams<Real>& p) {
    ModelParams<Real> z;
    z.input_dim = p.input_dim;
    z.hidden1 = p.hidden1;
    z.hidden2 = p.hidden2;
    z.n_classes = p.n_classes;
    z.w1 = Mat<Real>(p.w1.rows, p.w1.cols);
    z.b1.assign(p.b1.size(), Real(0));
    z.w2 = Mat<Real>(p.w2.rows, p.w2.cols);
    z.b2.assign(p.b2.size(), Real(0));
    z.w3 = Mat<Real>(p.w3.rows, p.w3.cols);
    z.b3.assign(p.b3.size(), Real(0));
    return z;
}

template <class Real>
using Gradients = ModelParams<Real>;

template <class Real, class F>
void for_each_tensor(ModelParams<Real>& p, F&& f) {
    f(p.w1.data);
    f(p.b1);
    f(p.w2.data);
    f(p.b2);
    f(p.w3.data);
    f(p.b3);
}

template <class Real, class F>
void for_each_tensor(const ModelParams<Real>& p, F&& f) {
    f(p.w1.data);
    f(p.b1);
    f(p.w2.data);
    f(p.b2);
    f(p.w3.data);
    f(p.b3);
}

// ---------------------------------------------------------------------------
// Forward pass

namespace detail {

template <class Real>
void affine(const Mat<Real>& w, const Vec<Real>& b, const Vec<Real>& x,
            Vec<Real>& out) {
    out.resize(b.size());
    for (int r = 0; r < w.rows; ++r) {
        const Real* row = w.row(r);
        Real acc = b[static_cast<std::size_t>(r)];
        for (int c = 0; c < w.cols; ++c) {
            acc += row[c] * x[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = acc;
    }
}

template <class Real>
Vec<Real> dropout_mask(std::size_t size, double rate, std::uint64_t seed) {
    const double keep = 1.0 - rate;
    Vec<Real> mask(size, Real(0));
    if (keep <= 0.0) return mask;
    Rng rng(seed);
    const Real scale = static_cast<Real>(1.0 / keep);
    for (Real& m : mask) {
        if (rng.next_double() < keep) m = scale;
    }
    return mask;
}

}  // namespace detail

/**
 * Shared encoder per view, mean pooling, fused representation, dropout,
 * classifier. Pooled coordinates are summed in sorted value order, which
 * makes the output bitwise invariant under any permutation of the views.
 */
template <class Real>
void forward_cached(const ModelParams<Real>& p,
                    const std::vector<Vec<Real>>& views, Mode mode,
                    double dropout_rate, std::uint64_t dropout_seed,
                    ForwardCache<Real>& cache) {
    const std::size_t k = views.size();
    if (k == 0) throw std::invalid_argument("sample has no views");
    for (const auto& v : views) {
        if (static_cast<int>(v.size()) != p.input_dim) {
            throw std::invalid_argument("view length does not match model input");
        }
    }
    cache.z1.resize(k);
    cache.e.resize(k);
    for (std::size_t v = 0; v < k; ++v) {
        detail::affine(p.w1, p.b1, views[v], cache.z1[v]);
        cache.e[v].resize(cache.z1[v].size());
        for (std::size_t i = 0; i < cache.z1[v].size(); ++i) {
            cache.e[v][i] = cache.z1[v][i] > Real(0) ? cache.z1[v][i] : Real(0);
        }
    }

    cache.pooled.assign(static_cast<std::size_t>(p.hidden1), Real(0));
    Vec<Real> column(k);
    for (std::size_t h = 0; h < cache.pooled.size(); ++h) {
        for (std::size_t v = 0; v < k; ++v) column[v] = cache.e[v][h];
        std::sort(column.begin(), column.end());
        Real acc = Real(0);
        for (Real x : column) acc += x;
        cache.pooled[h] = acc / static_cast<Real>(k);
    }

    detail::affine(p.w2, p.b2, cache.pooled, cache.z2);
    cache.r.resize(cache.z2.size());
    for (std::size_t i = 0; i < cache.z2.size(); ++i) {
        cache.r[i] = cache.z2[i] > Real(0) ? cache.z2[i] : Real(0);
    }

    if (mode == Mode::Train && dropout_rate > 0.0) {
        cache.mask = detail::dropout_mask<Real>(cache.r.size(), dropout_rate,
                                                dropout_seed);
        cache.rt.resize(cache.r.size());
        for (std::size_t i = 0; i < cache.r.size(); ++i) {
            cache.rt[i] = cache.r[i] * cache.mask[i];
        }
    } else {
        cache.mask.clear();
        cache.rt = cache.r;
    }

    detail::affine(p.w3, p.b3, cache.rt, cache.logits);
}

template <class Real>
ForwardOutput<Real> forward(const ModelParams<Real>& p,
                            const std::vector<Vec<Real>>& views, Mode mode,
                            std::uint64_t dropout_seed = 0,
                            double dropout_rate = 0.5) {
    ForwardCache<Real> cache;
    forward_cached(p, views, mode, dropout_rate, dropout_seed, cache);
    return ForwardOutput<Real>{std::move(cache.logits), std::move(cache.r)};
}

// ---------------------------------------------------------------------------
// Losses

template <class Real>
Vec<Real> softmax(const Vec<Real>& logits) {
    Vec<Real> out(logits.size());
    const Real mx = *std::max_element(logits.begin(), logits.end());
    Real sum = Real(0);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (Real& v : out) v /= sum;
    return out;
}

/// -log softmax(logits)[class_id], with max subtraction for stability.
template <class Real>
Real cross_entropy(const Vec<Real>& logits, int class_id) {
    if (class_id < 0 || class_id >= static_cast<int>(logits.size())) {
        throw std::invalid_argument("class id out of range");
    }
    const Real mx = *std::max_element(logits.begin(), logits.end());
    Real sum = Real(0);
    for (Real v : logits) sum += std::exp(v - mx);
    return std::log(sum) - (logits[static_cast<std::size_t>(class_id)] - mx);
}

template <class Real>
Real cosine_similarity(const Vec<Real>& x, const Vec<Real>& y,
                       Real epsilon = Real(1e-8)) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("cosine_similarity length mismatch");
    }
    Real dot = Real(0), nx = Real(0), ny = Real(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    return dot / (std::sqrt(nx) * std::sqrt(ny) + epsilon);
}

/// Mean over triples of max(0, margin - cos(a,p) + cos(a,n)).
template <class Real>
ContrastiveResult<Real> contrastive_loss(const TripletBatch<Real>& batch,
                                         Real margin,
                                         Real epsilon = Real(1e-8)) {
    const std::size_t t = batch.anchors.size();
    if (batch.positives.size() != t || batch.negatives.size() != t) {
        throw std::invalid_argument("triplet batch size mismatch");
    }
    if (t == 0) return ContrastiveResult<Real>{Real(0), true};
    Real acc = Real(0);
    for (std::size_t i = 0; i < t; ++i) {
        const Real sp = cosine_similarity(batch.anchors[i], batch.positives[i],
                                          epsilon);
        const Real sn = cosine_similarity(batch.anchors[i], batch.negatives[i],
                                          epsilon);
        acc += std::max(Real(0), margin - sp + sn);
    }
    return ContrastiveResult<Real>{acc / static_cast<Real>(t), false};
}

/**
 * Within-batch triplet mining: each sample is an anchor; the positive is a
 * uniform same-label other sample and the negative a uniform different-label
 * sample. Anchors lacking either are skipped without consuming draws.
 */
inline std::vector<Triplet> mine_triplets(const std::vector<int>& labels,
                                          std::uint64_t seed) {
    std::vector<Triplet> out;
    Rng rng(mix_seed(seed, seed_stream::kTriplet));
    const int b = static_cast<int>(labels.size());
    for (int i = 0; i < b; ++i) {
        std::vector<int> positives, negatives;
        for (int j = 0; j < b; ++j) {
            if (j == i) continue;
            (labels[static_cast<std::size_t>(j)] ==
                     labels[static_cast<std::size_t>(i)]
                 ? positives
                 : negatives)
                .push_back(j);
        }
        if (positives.empty() || negatives.empty()) continue;
        const int pos = positives[static_cast<std::size_t>(
            rng.next_below(positives.size()))];
        const int neg = negatives[static_cast<std::size_t>(
            rng.next_below(negatives.size()))];
        out.push_back(Triplet{i, pos, neg});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Batch loss and backprop

namespace detail {

// d cos(x,y) / dx = y/D - cos * |y| * x / (D |x|), D = |x||y| + eps.
template <class Real>
void cosine_grad(const Vec<Real>& x, const Vec<Real>& y, Real epsilon,
                 Real scale, Vec<Real>& gx, Vec<Real>& gy) {
    Real dot = Real(0), nx2 = Real(0), ny2 = Real(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx2 += x[i] * x[i];
        ny2 += y[i] * y[i];
    }
    const Real nx = std::sqrt(nx2);
    const Real ny = std::sqrt(ny2);
    const Real d = nx * ny + epsilon;
    const Real s = dot / d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Real g = y[i] / d;
        if (nx > Real(0)) g -= s * ny / d * x[i] / nx;
        gx[i] += scale * g;
        Real h = x[i] / d;
        if (ny > Real(0)) h -= s * nx / d * y[i] / ny;
        gy[i] += scale * h;
    }
}

template <class Real>
struct BatchCaches {
    std::vector<ForwardCache<Real>> caches;
    std::vector<Triplet> triplets;
    LossBreakdown<Real> loss;
};

template <class Real>
BatchCaches<Real> run_batch(const ModelParams<Real>& params,
                            const std::vector<const Sample<Real>*>& batch,
                            const LossConfig& lc, Mode mode,
                            double dropout_rate, std::uint64_t dropout_seed,
                            std::uint64_t triplet_seed) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    BatchCaches<Real> bc;
    bc.caches.resize(batch.size());
    std::vector<int> labels(batch.size());
    Real ce = Real(0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward_cached(params, batch[i]->views, mode, dropout_rate,
                       mix_seed(dropout_seed, i), bc.caches[i]);
        labels[i] = batch[i]->class_id;
        ce += cross_entropy(bc.caches[i].logits, batch[i]->class_id);
    }
    ce /= static_cast<Real>(batch.size());

    bc.triplets = mine_triplets(labels, triplet_seed);
    Real cont = Real(0);
    if (!bc.triplets.empty()) {
        for (const Triplet& t : bc.triplets) {
            const Real sp = cosine_similarity(
                bc.caches[static_cast<std::size_t>(t.anchor)].r,
                bc.caches[static_cast<std::size_t>(t.positive)].r,
                static_cast<Real>(lc.epsilon));
            const Real sn = cosine_similarity(
                bc.caches[static_cast<std::size_t>(t.anchor)].r,
                bc.caches[static_cast<std::size_t>(t.negative)].r,
                static_cast<Real>(lc.epsilon));
            cont += std::max(Real(0),
                             static_cast<Real>(lc.margin) - sp + sn);
        }
        cont /= static_cast<Real>(bc.triplets.size());
    }

    bc.loss.cross_entropy = ce;
    bc.loss.contrastive = cont;
    bc.loss.n_triplets = static_cast<int>(bc.triplets.size());
    bc.loss.total = ce + static_cast<Real>(lc.lambda) * cont;
    return bc;
}

}  // namespace detail

/// Composite loss of a batch: mean CE + lambda * mean triplet hinge.
/// Deterministic given (dropout_seed, triplet_seed).
template <class Real>
LossBreakdown<Real> batch_loss(const ModelParams<Real>& params,
                               const std::vector<const Sample<Real>*>& batch,
                               const LossConfig& lc, Mode mode,
                               double dropout_rate, std::uint64_t dropout_seed,
                               std::uint64_t triplet_seed) {
    return detail::run_batch(params, batch, lc, mode, dropout_rate,
                             dropout_seed, triplet_seed)
        .loss;
}

/**
 * Analytic gradients of the composite loss for one batch, with the same
 * seed conventions as batch_loss. ReLU and hinge use subgradient 0 at the
 * kink; the contrastive term differentiates through the pre-dropout
 * representations.
 */
template <class Real>
LossBreakdown<Real> backward(const ModelParams<Real>& params,
                             const std::vector<const Sample<Real>*>& batch,
                             const LossConfig& lc, double dropout_rate,
                             std::uint64_t dropout_seed,
                             std::uint64_t triplet_seed,
                             Gradients<Real>& grads) {
    auto bc = detail::run_batch(params, batch, lc, Mode::Train, dropout_rate,
                                dropout_seed, triplet_seed);
    grads = zeros_like(params);

    const std::size_t b = batch.size();
    const auto h2 = static_cast<std::size_t>(params.hidden2);

    // dL/dr per sample: contrastive part (pre-dropout path).
    std::vector<Vec<Real>> d_r(b, Vec<Real>(h2, Real(0)));
    if (!bc.triplets.empty()) {
        const Real w = static_cast<Real>(lc.lambda) /
                       static_cast<Real>(bc.triplets.size());
        for (const Triplet& t : bc.triplets) {
            const auto& ra = bc.caches[static_cast<std::size_t>(t.anchor)].r;
            const auto& rp = bc.caches[static_cast<std::size_t>(t.positive)].r;
            const auto& rn = bc.caches[static_cast<std::size_t>(t.negative)].r;
            const Real sp =
                cosine_similarity(ra, rp, static_cast<Real>(lc.epsilon));
            const Real sn =
                cosine_similarity(ra, rn, static_cast<Real>(lc.epsilon));
            if (static_cast<Real>(lc.margin) - sp + sn <= Real(0)) continue;
            detail::cosine_grad(ra, rp, static_cast<Real>(lc.epsilon), -w,
                                d_r[static_cast<std::size_t>(t.anchor)],
                                d_r[static_cast<std::size_t>(t.positive)]);
            detail::cosine_grad(ra, rn, static_cast<Real>(lc.epsilon), w,
                                d_r[static_cast<std::size_t>(t.anchor)],
                                d_r[static_cast<std::size_t>(t.negative)]);
        }
    }

    Vec<Real> d_logits, d_rt(h2), d_z2(h2), d_pooled, d_z1;
    for (std::size_t i = 0; i < b; ++i) {
        const ForwardCache<Real>& cache = bc.caches[i];
        const std::size_t k = cache.e.size();

        // CE path: softmax - onehot, scaled by 1/B.
        d_logits = softmax(cache.logits);
        d_logits[static_cast<std::size_t>(batch[i]->class_id)] -= Real(1);
        for (Real& g : d_logits) g /= static_cast<Real>(b);

        for (int c = 0; c < params.w3.rows; ++c) {
            const Real g = d_logits[static_cast<std::size_t>(c)];
            grads.b3[static_cast<std::size_t>(c)] += g;
            Real* wrow = grads.w3.row(c);
            for (std::size_t j = 0; j < h2; ++j) wrow[j] += g * cache.rt[j];
        }
        std::fill(d_rt.begin(), d_rt.end(), Real(0));
        for (int c = 0; c < params.w3.rows; ++c) {
            const Real g = d_logits[static_cast<std::size_t>(c)];
            const Real* wrow = params.w3.row(c);
            for (std::size_t j = 0; j < h2; ++j) d_rt[j] += g * wrow[j];
        }

        for (std::size_t j = 0; j < h2; ++j) {
            Real dr = d_r[i][j];
            dr += cache.mask.empty() ? d_rt[j] : d_rt[j] * cache.mask[j];
            d_z2[j] = cache.z2[j] > Real(0) ? dr : Real(0);
        }

        for (int h = 0; h < params.w2.rows; ++h) {
            const Real g = d_z2[static_cast<std::size_t>(h)];
            if (g == Real(0)) continue;
            grads.b2[static_cast<std::size_t>(h)] += g;
            Real* wrow = grads.w2.row(h);
            for (int c = 0; c < params.w2.cols; ++c) {
                wrow[c] += g * cache.pooled[static_cast<std::size_t>(c)];
            }
        }
        d_pooled.assign(static_cast<std::size_t>(params.hidden1), Real(0));
        for (int h = 0; h < params.w2.rows; ++h) {
            const Real g = d_z2[static_cast<std::size_t>(h)];
            if (g == Real(0)) continue;
            const Real* wrow = params.w2.row(h);
            for (int c = 0; c < params.w2.cols; ++c) {
                d_pooled[static_cast<std::size_t>(c)] += g * wrow[c];
            }
        }

        const Real inv_k = Real(1) / static_cast<Real>(k);
        for (std::size_t v = 0; v < k; ++v) {
            const Vec<Real>& x = batch[i]->views[v];
            d_z1.resize(cache.z1[v].size());
            bool any = false;
            for (std::size_t h = 0; h < d_z1.size(); ++h) {
                d_z1[h] = cache.z1[v][h] > Real(0) ? d_pooled[h] * inv_k
                                                   : Real(0);
                any = any || d_z1[h] != Real(0);
            }
            if (!any) continue;
            for (int h = 0; h < params.w1.rows; ++h) {
                const Real g = d_z1[static_cast<std::size_t>(h)];
                if (g == Real(0)) continue;
                grads.b1[static_cast<std::size_t>(h)] += g;
                Real* wrow = grads.w1.row(h);
                for (int c = 0; c < params.w1.cols; ++c) {
                    wrow[c] += g * x[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    return bc.loss;
}

// ---------------------------------------------------------------------------
// Optimization

template <class Real>
Real gradient_norm(const Gradients<Real>& grads) {
    double acc = 0.0;
    for_each_tensor(grads, [&acc](const std::vector<Real>& t) {
        for (Real v : t) acc += static_cast<double>(v) * static_cast<double>(v);
    });
    return static_cast<Real>(std::sqrt(acc));
}

/// Scales all gradients by max_norm/|g| when the global L2 norm exceeds it.
template <class Real>
Real clip_gradients(Gradients<Real>& grads, Real max_norm) {
    const Real norm = gradient_norm(grads);
    if (norm > max_norm && norm > Real(0)) {
        const Real scale = max_norm / norm;
        for_each_tensor(grads, [scale](std::vector<Real>& t) {
            for (Real& v : t) v *= scale;
        });
    }
    return norm;
}

template <class Real>
struct AdamState {
    Gradients<Real> m;
    Gradients<Real> v;
    std::int64_t t = 0;
};

template <class Real>
AdamState<Real> make_adam_state(const ModelParams<Real>& params) {
    return AdamState<Real>{zeros_like(params), zeros_like(params), 0};
}

template <class Real>
void adam_step(ModelParams<Real>& params, AdamState<Real>& state,
               const Gradients<Real>& grads, double lr,
               const TrainConfig& tc) {
    state.t += 1;
    const double b1 = tc.adam_beta1;
    const double b2 = tc.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

    auto update = [&](std::vector<Real>& theta, std::vector<Real>& m,
                      std::vector<Real>& v, const std::vector<Real>& g) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
            const double vi =
                b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
            m[i] = static_cast<Real>(mi);
            v[i] = static_cast<Real>(vi);
            const double mhat = mi / c1;
            const double vhat = vi / c2;
            theta[i] = static_cast<Real>(
                static_cast<double>(theta[i]) -
                lr * mhat / (std::sqrt(vhat) + tc.adam_epsilon));
        }
    };
    update(params.w1.data, state.m.w1.data, state.v.w1.data, grads.w1.data);
    update(params.b1, state.m.b1, state.v.b1, grads.b1);
    update(params.w2.data, state.m.w2.data, state.v.w2.data, grads.w2.data);
    update(params.b2, state.m.b2, state.v.b2, grads.b2);
    update(params.w3.data, state.m.w3.data, state.v.w3.data, grads.w3.data);
    update(params.b3, state.m.b3, state.v.b3, grads.b3);
}

// ---------------------------------------------------------------------------
// Evaluation

template <class Real>
int predict_class(const ModelParams<Real>& params, const Sample<Real>& s) {
    const auto out = forward(params, s.views, Mode::Eval);
    int best = 0;
    for (int c = 1; c < static_cast<int>(out.logits.size()); ++c) {
        // Ties break toward the lowest class id.
        if (out.logits[static_cast<std::size_t>(c)] >
            out.logits[static_cast<std::size_t>(best)]) {
            best = c;
        }
    }
    return best;
}

template <class Real>
Metrics evaluate(const ModelParams<Real>& params,
                 const std::vector<Sample<Real>>& samples) {
    if (samples.empty()) throw std::invalid_argument("empty evaluation set");
    const int c = params.n_classes;
    Metrics m;
    m.confusion.assign(static_cast<std::size_t>(c),
                       std::vector<std::int64_t>(static_cast<std::size_t>(c), 0));
    std::int64_t correct = 0;
    for (const Sample<Real>& s : samples) {
        if (s.class_id < 0 || s.class_id >= c) {
            throw std::invalid_argument("sample class id out of range");
        }
        const int pred = predict_class(params, s);
        m.confusion[static_cast<std::size_t>(s.class_id)]
                   [static_cast<std::size_t>(pred)] += 1;
        if (pred == s.class_id) ++correct;
    }
    m.accuracy = static_cast<double>(correct) /
                 static_cast<double>(samples.size());
    m.per_class_precision.assign(static_cast<std::size_t>(c),
                                 std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < c; ++j) {
        std::int64_t predicted = 0;
        for (int i = 0; i < c; ++i) {
            predicted += m.confusion[static_cast<std::size_t>(i)]
                                    [static_cast<std::size_t>(j)];
        }
        if (predicted > 0) {
            m.per_class_precision[static_cast<std::size_t>(j)] =
                static_cast<double>(m.confusion[static_cast<std::size_t>(j)]
                                               [static_cast<std::size_t>(j)]) /
                static_cast<double>(predicted);
        }
    }
    return m;
}

/// Mean of defined per-class precisions; NaN entries are excluded.
double mean_precision(const Metrics& metrics);

// ---------------------------------------------------------------------------
// Training

template <class Real>
TrainResult<Real> train(const std::vector<Sample<Real>>& train_set,
                        const std::vector<Sample<Real>>& val_set,
                        const TrainConfig& tc, const LossConfig& lc) {
    if (train_set.empty() || val_set.empty()) {
        throw std::invalid_argument("train and validation sets must be non-empty");
    }
    int n_classes = 0;
    for (const auto& s : train_set) {
        n_classes = std::max(n_classes, s.class_id + 1);
    }
    n_classes = std::max(n_classes, 2);
    const int input_dim = static_cast<int>(train_set.front().views.front().size());

    ModelParams<Real> params =
        init_model<Real>(input_dim, n_classes, tc.seed);
    AdamState<Real> adam = make_adam_state(params);
    Gradients<Real> grads;

    TrainResult<Real> result;
    result.best_params = params;
    result.best_val_accuracy = -1.0;
    double lr = tc.lr0;
    int epochs_since_improvement = 0;

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(tc.seed, seed_stream::kShuffle,
                                 static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double ce_acc = 0.0, cont_acc = 0.0;
        std::size_t seen = 0;
        const std::uint64_t epoch_dropout =
            mix_seed(tc.seed, seed_stream::kDropout,
                     static_cast<std::uint64_t>(epoch));
        const std::uint64_t epoch_triplet =
            mix_seed(tc.seed, seed_stream::kTriplet,
                     static_cast<std::uint64_t>(epoch));

        std::vector<const Sample<Real>*> batch;
        for (std::size_t start = 0, bi = 0; start < order.size();
             start += static_cast<std::size_t>(tc.batch_size), ++bi) {
            const std::size_t stop = std::min(
                order.size(), start + static_cast<std::size_t>(tc.batch_size));
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(&train_set[order[i]]);
            }
            const auto loss = backward(params, batch, lc, tc.dropout_rate,
                                       mix_seed(epoch_dropout, bi),
                                       mix_seed(epoch_triplet, bi), grads);
            if (!std::isfinite(static_cast<double>(loss.total))) {
                throw std::runtime_error(
                    "training diverged (non-finite loss) at epoch " +
                    std::to_string(epoch + 1) + ", batch " +
                    std::to_string(bi + 1));
            }
            clip_gradients(grads, static_cast<Real>(tc.clip_norm));
            adam_step(params, adam, grads, lr, tc);
            ce_acc += static_cast<double>(loss.cross_entropy) *
                      static_cast<double>(batch.size());
            cont_acc += static_cast<double>(loss.contrastive) *
                        static_cast<double>(batch.size());
            seen += batch.size();
        }

        const Metrics val = evaluate(params, val_set);

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.cross_entropy = ce_acc / static_cast<double>(seen);
        stats.contrastive = cont_acc / static_cast<double>(seen);
        stats.train_loss = stats.cross_entropy + lc.lambda * stats.contrastive;
        stats.lr = lr;
        stats.val_accuracy = val.accuracy;
        result.history.push_back(stats);

        if (val.accuracy > result.best_val_accuracy) {
            result.best_val_accuracy = val.accuracy;
            result.best_epoch = epoch + 1;
            result.best_params = params;
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
            if (epochs_since_improvement >= tc.scheduler_patience) {
                lr = std::max(lr * tc.scheduler_factor, tc.lr_floor);
                epochs_since_improvement = 0;
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Dataset adapters

inline std::vector<Sample<double>> samples_from_records(
    const std::vector<dataset::SampleRecord>& records) {
    std::vector<Sample<double>> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        Sample<double> s;
        s.class_id = rec.class_id;
        s.views.reserve(rec.views.size());
        for (const auto& v : rec.views) s.views.push_back(v.feature());
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<Sample<double>> samples_from_records(
    const std::vector<dataset::SampleRecord>& records,
    const std::vector<std::size_t>& indices) {
    std::vector<Sample<double>> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) {
        const auto& rec = records[idx];
        Sample<double> s;
        s.class_id = rec.class_id;
        s.views.reserve(rec.views.size());
        for (const auto& v : rec.views) s.views.push_back(v.feature());
        out.push_back(std::move(s));
    }
    return out;
}

template <class To, class From>
std::vector<Sample<To>> convert_samples(const std::vector<Sample<From>>& in) {
    std::vector<Sample<To>> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        Sample<To> t;
        t.class_id = s.class_id;
        t.views.reserve(s.views.size());
        for (const auto& v : s.views) {
            t.views.emplace_back(v.begin(), v.end());
        }
        out.push_back(std::move(t));
    }
    return out;
}

template <class To, class From>
ModelParams<To> convert_params(const ModelParams<From>& in) {
    ModelParams<To> out;
    out.input_dim = in.input_dim;
    out.hidden1 = in.hidden1;
    out.hidden2 = in.hidden2;
    out.n_classes = in.n_classes;
    out.w1 = Mat<To>(in.w1.rows, in.w1.cols);
    out.w2 = Mat<To>(in.w2.rows, in.w2.cols);
    out.w3 = Mat<To>(in.w3.rows, in.w3.cols);
    auto cast = [](const auto& src, auto& dst) {
        dst.resize(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = static_cast<To>(src[i]);
        }
    };
    cast(in.w1.data, out.w1.data);
    cast(in.b1, out.b1);
    cast(in.w2.data, out.w2.data);
    cast(in.b2, out.b2);
    cast(in.w3.data, out.w3.data);
    cast(in.b3, out.b3);
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints and reports

struct Checkpoint {
    ModelParams<double> params;
    int n_qubits = 0;
    std::uint64_t class_table_hash = 0;
};

/// Binary checkpoint: versioned header, raw binary64 parameter blocks, and a
/// trailing checksum. Parameters round-trip bit-exactly.
void save_checkpoint(const std::string& path, const ModelParams<double>& params,
                     int n_qubits, std::uint64_t class_table_hash);

Checkpoint load_checkpoint(const std::string& path);

/// Loads and refuses with "class table hash mismatch" when the checkpoint
/// was trained against a different class table.
Checkpoint load_checkpoint(const std::string& path,
                           std::uint64_t expected_class_table_hash);

std::string history_to_csv(const std::vector<EpochStats>& history);

}  // namespace entscope::mvnet
