#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ffrg/document.hpp"
#include "ffrg/model.hpp"

namespace testing {

inline ffrg::Word word(int id, std::string text, double x0, double y0, double x1, double y1) {
    return {id, std::move(text), {x0, y0, x1, y1}};
}

// Words laid out left to right on one line starting at (x, y).
inline ffrg::Document line_doc(const std::vector<std::string>& texts, double x = 0.1, double y = 0.1,
                               double h = 0.012, double gap = 0.005) {
    ffrg::Document d;
    d.doc_id = "t";
    for (const auto& t : texts) {
        const double w = 0.008 * t.size();
        d.words.push_back(word(static_cast<int>(d.words.size()), t, x, y, x + w, y + h));
        x += w + gap;
    }
    return d;
}

// Random small-box document; heights vary so the line relation is non-trivial.
inline ffrg::Document random_doc(std::mt19937_64& rng, int n, const std::string& id = "r") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ffrg::Document d;
    d.doc_id = id;
    for (int i = 0; i < n; ++i) {
        const double h = 0.008 + 0.01 * u(rng);
        const double w = 0.01 + 0.08 * u(rng);
        const double x0 = 0.9 * u(rng), y0 = 0.95 * u(rng);
        d.words.push_back(word(i, "w" + std::to_string(i), x0, y0, x0 + w, y0 + h));
    }
    return d;
}

// Same words, ids reassigned after applying `perm` (perm[new] = old).
inline ffrg::Document permuted(const ffrg::Document& d, const std::vector<int>& perm) {
    ffrg::Document out = d;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out.words[i] = d.words[perm[i]];
        out.words[i].id = static_cast<int>(i);
    }
    return out;
}

// Largest relative error between analytic and central-difference gradients
// over `samples` random coordinates of a small random model. Every branch gets
// its own objective so every block carries gradient.
inline double gradient_check(std::uint64_t seed, int samples = 100) {
    std::mt19937_64 rng(seed);
    ffrg::ModelDims dims{12, 7, 5, 4, 3};
    auto params = ffrg::init_params(dims, seed);
    std::normal_distribution<double> g(0.0, 0.3);
    for (auto b : params.blocks())
        for (double& w : b) w += g(rng); // biases too, so ReLUs sit away from zero
    const int n = 10;
    ffrg::Matrix x(n, dims.input);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng) * 3;
    std::uniform_int_distribution<int> cls(0, dims.classes - 1);
    std::vector<std::vector<int>> labels(4, std::vector<int>(n));
    for (auto& l : labels)
        for (int& y : l) y = cls(rng);
    std::vector<ffrg::BranchObjective> obj{
        {0, {{labels[0], 1.0}}},
        {1, {{labels[1], 1.0}, {labels[0], 0.7}}},
        {2, {{labels[2], 1.0}, {labels[3], 1.0}, {labels[0], 0.4}}},
    };
    const auto analytic = ffrg::loss_and_grad(params, x, obj);
    auto blocks = params.blocks();
    const auto grads = analytic.grad.blocks();
    std::uniform_int_distribution<std::size_t> pick_block(0, blocks.size() - 1);
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const std::size_t b = pick_block(rng);
        std::uniform_int_distribution<std::size_t> pick(0, blocks[b].size() - 1);
        const std::size_t i = pick(rng);
        const double h = 1e-5, w0 = blocks[b][i];
        blocks[b][i] = w0 + h;
        const double up = ffrg::loss_and_grad(params, x, obj).loss;
        blocks[b][i] = w0 - h;
        const double down = ffrg::loss_and_grad(params, x, obj).loss;
        blocks[b][i] = w0;
        const double numeric = (up - down) / (2 * h);
        const double a = grads[b][i];
        const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4});
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace testing
