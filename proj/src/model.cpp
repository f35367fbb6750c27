#include "ffrg/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "ffrg/errors.hpp"

namespace ffrg {

namespace {

Dense zero_dense(int out, int in) { return {Matrix::Zero(out, in), Vector::Zero(out)}; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void init_dense(Dense& d, std::uint64_t seed, bool relu_input) {
    std::mt19937_64 rng(seed);
    const double fan_in = static_cast<double>(d.weight.cols());
    const double fan_out = static_cast<double>(d.weight.rows());
    const double limit = relu_input ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < d.weight.size(); ++i) d.weight.data()[i] = dist(rng);
    d.bias.setZero();
}

void relu_inplace(Matrix& m) { m = m.cwiseMax(0.0); }

Matrix affine(const Matrix& x, const Dense& d) {
    Matrix y = x * d.weight.transpose();
    y.rowwise() += d.bias.transpose();
    return y;
}

// Adds dY^T X into grad.weight and column sums of dY into grad.bias.
void accumulate_dense_grad(const Matrix& dy, const Matrix& x, Dense& grad) {
    grad.weight.noalias() += dy.transpose() * x;
    grad.bias.noalias() += dy.colwise().sum().transpose();
}

std::span<double> span_of(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

} // namespace

ModelParams ModelParams::zeros(const ModelDims& dims) {
    if (dims.input < 1 || dims.hidden < 1 || dims.branch_hidden < 1 || dims.classes < 2 || dims.branches < 1)
        throw ConfigError("invalid model dimensions");
    ModelParams p;
    p.dims = dims;
    p.trunk = zero_dense(dims.hidden, dims.input);
    for (int k = 0; k < dims.branches; ++k) {
        Branch b;
        if (k == 0) {
            b.out = zero_dense(dims.classes, dims.hidden);
        } else {
            b.hidden = zero_dense(dims.branch_hidden, dims.hidden);
            b.out = zero_dense(dims.classes, dims.branch_hidden);
        }
        p.branches.push_back(std::move(b));
    }
    return p;
}

std::vector<std::span<double>> ModelParams::trunk_blocks() { return {span_of(trunk.weight), span_of(trunk.bias)}; }

std::vector<std::span<double>> ModelParams::branch_blocks(int k) {
    auto& b = branches.at(k);
    std::vector<std::span<double>> out;
    if (b.hidden) {
        out.push_back(span_of(b.hidden->weight));
        out.push_back(span_of(b.hidden->bias));
    }
    out.push_back(span_of(b.out.weight));
    out.push_back(span_of(b.out.bias));
    return out;
}

std::vector<std::span<const double>> ModelParams::branch_blocks(int k) const {
    std::vector<std::span<const double>> out;
    for (auto s : const_cast<ModelParams*>(this)->branch_blocks(k)) out.emplace_back(s.data(), s.size());
    return out;
}

std::vector<std::span<double>> ModelParams::blocks() {
    auto out = trunk_blocks();
    for (int k = 0; k < static_cast<int>(branches.size()); ++k) {
        auto b = branch_blocks(k);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

std::vector<std::span<const double>> ModelParams::blocks() const {
    std::vector<std::span<const double>> out;
    for (auto s : const_cast<ModelParams*>(this)->blocks()) out.emplace_back(s.data(), s.size());
    return out;
}

std::size_t ModelParams::size() const {
    std::size_t n = 0;
    for (auto s : blocks()) n += s.size();
    return n;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
    ModelParams p = ModelParams::zeros(dims);
    std::uint64_t stream = splitmix64(seed);
    init_dense(p.trunk, splitmix64(stream ^ 0x100), false);
    for (int k = 0; k < dims.branches; ++k) {
        const std::uint64_t base = splitmix64(stream ^ (0x200 + static_cast<std::uint64_t>(k)));
        auto& b = p.branches[k];
        if (b.hidden) init_dense(*b.hidden, splitmix64(base ^ 1), true);
        init_dense(b.out, splitmix64(base ^ 2), true);
    }
    return p;
}

void softmax_rows(Matrix& logits) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        auto row = logits.row(i);
        const double mx = row.maxCoeff();
        row = (row.array() - mx).exp();
        row /= row.sum();
    }
}

Matrix trunk_forward(const ModelParams& params, const Matrix& x) {
    if (x.cols() != params.dims.input)
        throw ConfigError("feature width " + std::to_string(x.cols()) + " does not match model input " +
                          std::to_string(params.dims.input));
    Matrix h = affine(x, params.trunk);
    relu_inplace(h);
    return h;
}

namespace {

Matrix branch_logits(const ModelParams& params, int k, const Matrix& hidden, Matrix* pre = nullptr, Matrix* act = nullptr) {
    if (k < 0 || k >= static_cast<int>(params.branches.size())) throw ConfigError("branch index out of range");
    const Branch& b = params.branches[k];
    if (!b.hidden) return affine(hidden, b.out);
    Matrix a = affine(hidden, *b.hidden);
    Matrix z = a.cwiseMax(0.0);
    Matrix logits = affine(z, b.out);
    if (pre) *pre = std::move(a);
    if (act) *act = std::move(z);
    return logits;
}

} // namespace

Matrix branch_forward(const ModelParams& params, int k, const Matrix& hidden) {
    Matrix p = branch_logits(params, k, hidden);
    softmax_rows(p);
    return p;
}

Matrix forward(const ModelParams& params, const Matrix& features, int k) {
    return branch_forward(params, k, trunk_forward(params, features));
}

namespace {

// Loss and d(loss)/d(hidden) for one branch; accumulates branch grads.
double branch_backward(const ModelParams& params, const Matrix& hidden, const BranchObjective& obj, Branch& grad,
                       Matrix* d_hidden) {
    const Eigen::Index n = hidden.rows();
    const int classes = params.dims.classes;
    if (n == 0) {
        if (d_hidden) *d_hidden = Matrix::Zero(0, params.dims.hidden);
        return 0.0;
    }

    Matrix pre, act;
    Matrix logits = branch_logits(params, obj.branch, hidden, &pre, &act);
    Matrix log_probs = logits;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto row = log_probs.row(i);
        const double mx = row.maxCoeff();
        const double lse = mx + std::log((row.array() - mx).exp().sum());
        row.array() -= lse;
    }
    Matrix probs = log_probs.array().exp().matrix();

    double loss = 0;
    double total_weight = 0;
    Matrix d_logits = Matrix::Zero(n, classes);
    for (const auto& term : obj.terms) {
        if (static_cast<Eigen::Index>(term.labels.size()) != n)
            throw ConfigError("label count " + std::to_string(term.labels.size()) + " does not match rows " +
                              std::to_string(n));
        double ce = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int y = term.labels[i];
            if (y < 0 || y >= classes) throw ValidationError("label " + std::to_string(y) + " out of range");
            ce -= log_probs(i, y);
            d_logits(i, y) -= term.weight;
        }
        loss += term.weight * ce / static_cast<double>(n);
        total_weight += term.weight;
    }
    d_logits += total_weight * probs;
    d_logits /= static_cast<double>(n);

    const Branch& b = params.branches[obj.branch];
    if (!b.hidden) {
        accumulate_dense_grad(d_logits, hidden, grad.out);
        if (d_hidden) *d_hidden = d_logits * b.out.weight;
    } else {
        accumulate_dense_grad(d_logits, act, grad.out);
        Matrix d_act = d_logits * b.out.weight;
        Matrix d_pre = d_act.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
        accumulate_dense_grad(d_pre, hidden, *grad.hidden);
        if (d_hidden) *d_hidden = d_pre * b.hidden->weight;
    }
    return loss;
}

} // namespace

double branch_loss_and_grad(const ModelParams& params, const Matrix& hidden, const BranchObjective& objective,
                            Branch& grad) {
    return branch_backward(params, hidden, objective, grad, nullptr);
}

LossGrad loss_and_grad(const ModelParams& params, const Matrix& features, std::span<const BranchObjective> objectives,
                       bool trunk_grad) {
    LossGrad out{0.0, ModelParams::zeros(params.dims)};
    if (features.cols() != params.dims.input) throw ConfigError("feature width does not match model input");
    Matrix pre = affine(features, params.trunk);
    Matrix hidden = pre.cwiseMax(0.0);
    Matrix d_hidden = Matrix::Zero(hidden.rows(), hidden.cols());
    for (const auto& obj : objectives) {
        if (obj.branch < 0 || obj.branch >= params.dims.branches) throw ConfigError("branch index out of range");
        Matrix dh;
        out.loss += branch_backward(params, hidden, obj, out.grad.branches[obj.branch], trunk_grad ? &dh : nullptr);
        if (trunk_grad) d_hidden += dh;
    }
    if (trunk_grad && hidden.rows() > 0) {
        Matrix d_pre = d_hidden.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
        accumulate_dense_grad(d_pre, features, out.grad.trunk);
    }
    return out;
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, double lr, const AdamConfig& cfg) {
    if (params.size() != grads.size()) throw ConfigError("adam_step: parameter/gradient block count mismatch");
    if (state.m.empty()) {
        for (auto p : params) {
            state.m.emplace_back(p.size(), 0.0);
            state.v.emplace_back(p.size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw ConfigError("adam_step: optimizer state shape mismatch");
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = grads[b];
        auto& m = state.m[b];
        auto& v = state.v[b];
        if (g.size() != p.size() || m.size() != p.size()) throw ConfigError("adam_step: block size mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

// --- Checkpoint ----------------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'F', 'F', 'R', 'G', '1'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::string& data) : data_(data) {}

    template <class T>
    T get() {
        if (pos_ + sizeof(T) > data_.size()) throw ValidationError("checkpoint truncated");
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }

    std::string bytes(std::size_t n) {
        if (pos_ + n > data_.size()) throw ValidationError("checkpoint truncated");
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    const std::string& data_;
    std::size_t pos_ = 0;
};

} // namespace

std::string encode_checkpoint(const ModelParams& params, const FieldSchema& schema) {
    if (params.dims.classes != schema.num_classes())
        throw ConfigError("model has " + std::to_string(params.dims.classes) + " classes but schema has " +
                          std::to_string(schema.num_classes()));
    std::string out(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint64_t>(out, schema.hash());
    const std::string schema_json = serialize_schema(schema);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(schema_json.size()));
    out += schema_json;
    const auto& d = params.dims;
    for (int v : {d.input, d.hidden, d.branch_hidden, d.classes - 1, d.branches}) put<std::uint32_t>(out, v);
    for (auto block : params.blocks())
        for (double w : block) put<double>(out, w);
    return out;
}

Checkpoint decode_checkpoint(const std::string& data) {
    Reader r(data);
    if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw ValidationError("not an FFRG1 checkpoint");
    if (auto v = r.get<std::uint32_t>(); v != kFormatVersion)
        throw ValidationError("unsupported checkpoint version " + std::to_string(v));
    const auto hash = r.get<std::uint64_t>();
    const auto schema_len = r.get<std::uint32_t>();
    FieldSchema schema = parse_schema(r.bytes(schema_len));
    if (schema.hash() != hash) throw ValidationError("checkpoint schema hash mismatch");

    ModelDims dims;
    dims.input = static_cast<int>(r.get<std::uint32_t>());
    dims.hidden = static_cast<int>(r.get<std::uint32_t>());
    dims.branch_hidden = static_cast<int>(r.get<std::uint32_t>());
    dims.classes = static_cast<int>(r.get<std::uint32_t>()) + 1;
    dims.branches = static_cast<int>(r.get<std::uint32_t>());
    if (dims.classes != schema.num_classes()) throw ValidationError("checkpoint class count disagrees with its schema");
    if (dims.input != features::kDim)
        throw ValidationError("checkpoint input width " + std::to_string(dims.input) + " != " +
                              std::to_string(features::kDim));

    ModelParams params = ModelParams::zeros(dims);
    for (auto block : params.blocks())
        for (double& w : block) w = r.get<double>();
    if (!r.done()) throw ValidationError("trailing bytes in checkpoint");
    return {std::move(params), std::move(schema)};
}

void save_checkpoint(const std::string& path, const ModelParams& params, const FieldSchema& schema) {
    write_text(path, encode_checkpoint(params, schema));
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
}

} // namespace ffrg
