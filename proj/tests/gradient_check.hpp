// Central finite-difference oracle for the composite loss, shared by the
// mvnet unit tests and the acceptance suite. Kept independent of backward():
// it only perturbs parameters and re-evaluates batch_loss.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "entscope/mvnet.hpp"
#include "entscope/rng.hpp"

namespace entscope::testsupport {

inline std::vector<mvnet::Sample<double>> random_batch(int count, int k,
                                                       int dim, int n_classes,
                                                       Rng& rng) {
    std::vector<mvnet::Sample<double>> out;
    for (int i = 0; i < count; ++i) {
        mvnet::Sample<double> s;
        s.class_id = i % n_classes;
        for (int v = 0; v < k; ++v) {
            std::vector<double> view(static_cast<std::size_t>(dim));
            for (double& x : view) x = 2.0 * rng.next_double() - 1.0;
            s.views.push_back(std::move(view));
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<const mvnet::Sample<double>*> batch_ptrs(
    const std::vector<mvnet::Sample<double>>& samples) {
    std::vector<const mvnet::Sample<double>*> out;
    for (const auto& s : samples) out.push_back(&s);
    return out;
}

// Smallest |preactivation| and hinge slack over the batch; gradient checks
// only run where this clears the finite-difference step by a wide margin.
inline double kink_margin(const mvnet::ModelParams<double>& params,
                          const std::vector<const mvnet::Sample<double>*>& batch,
                          const mvnet::LossConfig& lc,
                          std::uint64_t dropout_seed,
                          std::uint64_t triplet_seed) {
    double margin = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
    std::vector<mvnet::ForwardCache<double>> caches(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward_cached(params, batch[i]->views, mvnet::Mode::Train, 0.5,
                       mix_seed(dropout_seed, i), caches[i]);
        labels.push_back(batch[i]->class_id);
        for (const auto& z : caches[i].z1) {
            for (double v : z) margin = std::min(margin, std::abs(v));
        }
        for (double v : caches[i].z2) margin = std::min(margin, std::abs(v));
    }
    for (const auto& t : mvnet::mine_triplets(labels, triplet_seed)) {
        const double sp = mvnet::cosine_similarity(
            caches[static_cast<std::size_t>(t.anchor)].r,
            caches[static_cast<std::size_t>(t.positive)].r, lc.epsilon);
        const double sn = mvnet::cosine_similarity(
            caches[static_cast<std::size_t>(t.anchor)].r,
            caches[static_cast<std::size_t>(t.negative)].r, lc.epsilon);
        margin = std::min(margin, std::abs(lc.margin - sp + sn));
    }
    return margin;
}

// Worst relative error between analytic gradients and central finite
// differences (step 1e-5) at one random non-kink point.
inline double max_gradient_error(std::uint64_t point_seed) {
    Rng rng(point_seed);
    const int dim = 10, h1 = 8, h2 = 6, n_classes = 3;
    mvnet::LossConfig lc;
    const std::uint64_t dropout_seed = rng.next_u64();
    const std::uint64_t triplet_seed = rng.next_u64();

    mvnet::ModelParams<double> params;
    std::vector<mvnet::Sample<double>> samples;
    std::vector<const mvnet::Sample<double>*> batch;
    while (true) {
        params = mvnet::init_model<double>(dim, n_classes, rng.next_u64(), h1,
                                           h2);
        samples = random_batch(6, 2, dim, n_classes, rng);
        batch = batch_ptrs(samples);
        if (kink_margin(params, batch, lc, dropout_seed, triplet_seed) > 1e-3) {
            break;
        }
    }

    mvnet::Gradients<double> grads;
    mvnet::backward(params, batch, lc, 0.5, dropout_seed, triplet_seed, grads);

    const double step = 1e-5;
    double worst = 0.0;
    auto check_tensor = [&](std::vector<double>& theta,
                            const std::vector<double>& analytic) {
        // Probing every weight is slow; stride through large tensors.
        const std::size_t stride = theta.size() > 64 ? 7 : 1;
        for (std::size_t i = 0; i < theta.size(); i += stride) {
            const double saved = theta[i];
            theta[i] = saved + step;
            const double up =
                mvnet::batch_loss(params, batch, lc, mvnet::Mode::Train, 0.5,
                                  dropout_seed, triplet_seed)
                    .total;
            theta[i] = saved - step;
            const double down =
                mvnet::batch_loss(params, batch, lc, mvnet::Mode::Train, 0.5,
                                  dropout_seed, triplet_seed)
                    .total;
            theta[i] = saved;
            const double fd = (up - down) / (2.0 * step);
            const double denom =
                std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
            worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
        }
    };
    check_tensor(params.w1.data, grads.w1.data);
    check_tensor(params.b1, grads.b1);
    check_tensor(params.w2.data, grads.w2.data);
    check_tensor(params.b2, grads.b2);
    check_tensor(params.w3.data, grads.w3.data);
    check_tensor(params.b3, grads.b3);
    return worst;
}

}  // namespace entscope::testsupport
