#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffrg/document.hpp"
#include "ffrg/features.hpp"

namespace ffrg {

struct ModelDims {
    int input = features::kDim;
    int hidden = 64;        // trunk width
    int branch_hidden = 64; // hidden layer of branches 2..K
    int classes = 8;        // N + 1, background is class 0
    int branches = 3;

    friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Affine map: y = W x + b, W stored (out x in) row-major.
struct Dense {
    Matrix weight;
    Vector bias;

    friend bool operator==(const Dense& a, const Dense& b) {
        return a.weight == b.weight && a.bias == b.bias;
    }
};

struct Branch {
    std::optional<Dense> hidden; // branches after the first
    Dense out;

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct ModelParams {
    ModelDims dims;
    Dense trunk;
    std::vector<Branch> branches;

    /// Zero-valued parameters of the given shape.
    static ModelParams zeros(const ModelDims& dims);

    /// Contiguous weight blocks in checkpoint order: trunk W, b, then per
    /// branch [hidden W, hidden b,] out W, out b.
    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;
    /// Blocks of the trunk (first two) or of branch k (0-based).
    std::vector<std::span<double>> trunk_blocks();
    std::vector<std::span<double>> branch_blocks(int k);
    std::vector<std::span<const double>> branch_blocks(int k) const;
    std::size_t size() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Uniform Glorot-style initialization. Each layer draws from its own stream
/// derived from (seed, layer), so branch 1 is identical for any branch count.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

/// Post-ReLU trunk activations, one row per word.
Matrix trunk_forward(const ModelParams& params, const Matrix& features);

/// Softmax rows of branch k (0-based) given trunk activations.
Matrix branch_forward(const ModelParams& params, int k, const Matrix& hidden);

/// Softmax rows of branch k for raw features.
Matrix forward(const ModelParams& params, const Matrix& features, int k);

void softmax_rows(Matrix& logits);

/// One cross-entropy term: a label per row and a weight.
struct LabelTerm {
    std::span<const int> labels;
    double weight = 1.0;
};

/// Labels that feed one branch's loss.
struct BranchObjective {
    int branch = 0;
    std::vector<LabelTerm> terms;
};

struct LossGrad {
    double loss = 0;
    ModelParams grad;
};

/// Sum over objectives and terms of weight * mean cross-entropy over rows,
/// with the analytic gradient of every parameter. The trunk gradient is
/// skipped (left zero) when `trunk_grad` is false.
LossGrad loss_and_grad(const ModelParams& params, const Matrix& features, std::span<const BranchObjective> objectives,
                       bool trunk_grad = true);

/// Same as loss_and_grad restricted to a single branch over fixed trunk
/// activations. Only the branch blocks of the returned gradient are filled.
double branch_loss_and_grad(const ModelParams& params, const Matrix& hidden, const BranchObjective& objective,
                            Branch& grad);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    long step = 0;
    std::vector<std::vector<double>> m, v;
};

/// In-place Adam update of each block. Moments are allocated on first use.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, double lr, const AdamConfig& cfg = {});

// --- Checkpoint ---------------------------------------------------------------

struct Checkpoint {
    ModelParams params;
    FieldSchema schema;
};

std::string encode_checkpoint(const ModelParams& params, const FieldSchema& schema);
Checkpoint decode_checkpoint(const std::string& bytes);
void save_checkpoint(const std::string& path, const ModelParams& params, const FieldSchema& schema);
Checkpoint load_checkpoint(const std::string& path);

} // namespace ffrg
