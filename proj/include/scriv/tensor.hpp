// SPDX-License-Identifier: Apache-2.0
//
// Dense N-d tensors templated on scalar plus a reverse-mode tape. float is
// the training precision; double exists for gradient checking.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "scriv/common.hpp"

namespace scriv {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s);

template <typename S>
struct TensorStorage {
    Shape shape;
    std::vector<S> values;
    std::vector<S> grad;  // empty until backward touches it
    bool requires_grad = false;
    std::string name;
};

template <typename S>
using RowMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using EigenVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Value-semantic handle over shared storage. Copies alias the same buffer;
// ops never mutate their inputs.
template <typename S>
class Tensor {
public:
    using Scalar = S;

    Tensor() : p_(nullptr) {}

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        Tensor t;
        t.p_ = std::make_shared<TensorStorage<S>>();
        t.p_->shape = std::move(shape);
        validate_shape(t.p_->shape);
        t.p_->values.assign(static_cast<size_t>(shape_numel(t.p_->shape)), S(0));
        t.p_->requires_grad = requires_grad;
        return t;
    }

    static Tensor full(Shape shape, S value) {
        Tensor t = zeros(std::move(shape));
        std::fill(t.p_->values.begin(), t.p_->values.end(), value);
        return t;
    }

    static Tensor from(Shape shape, std::vector<S> values, bool requires_grad = false) {
        Tensor t;
        t.p_ = std::make_shared<TensorStorage<S>>();
        validate_shape(shape);
        if (shape_numel(shape) != static_cast<int64_t>(values.size()))
            throw DimensionError("tensor: " + std::to_string(values.size()) + " values for shape " +
                                 shape_str(shape));
        t.p_->shape = std::move(shape);
        t.p_->values = std::move(values);
        t.p_->requires_grad = requires_grad;
        return t;
    }

    static Tensor scalar(S v) { return from({1}, {v}); }

    bool defined() const { return p_ != nullptr; }
    const Shape& shape() const { return p_->shape; }
    int rank() const { return static_cast<int>(p_->shape.size()); }
    int64_t dim(int i) const { return p_->shape[static_cast<size_t>(i)]; }
    int64_t numel() const { return static_cast<int64_t>(p_->values.size()); }
    bool is_scalar() const { return numel() == 1; }

    S* data() { return p_->values.data(); }
    const S* data() const { return p_->values.data(); }
    std::vector<S>& values() { return p_->values; }
    const std::vector<S>& values() const { return p_->values; }
    S item() const {
        if (!is_scalar()) throw ContractError("tensor: item() on non-scalar of shape " + shape_str(shape()));
        return p_->values[0];
    }

    bool requires_grad() const { return p_->requires_grad; }
    Tensor& set_requires_grad(bool b) {
        p_->requires_grad = b;
        return *this;
    }

    bool has_grad() const { return !p_->grad.empty(); }
    std::vector<S>& grad() {
        ensure_grad();
        return p_->grad;
    }
    const std::vector<S>& grad() const {
        if (p_->grad.empty()) throw ContractError("tensor: gradient not populated for '" + p_->name + "'");
        return p_->grad;
    }
    void ensure_grad() {
        if (p_->grad.empty()) p_->grad.assign(p_->values.size(), S(0));
    }
    void zero_grad() {
        if (!p_->grad.empty()) std::fill(p_->grad.begin(), p_->grad.end(), S(0));
    }
    void drop_grad() { p_->grad.clear(); }

    const std::string& name() const { return p_->name; }
    Tensor& set_name(std::string n) {
        p_->name = std::move(n);
        return *this;
    }

    // Eigen views over values/grad. Caller supplies the 2-d factorization.
    Eigen::Map<RowMat<S>> mat(int64_t rows, int64_t cols) {
        check_view(rows * cols);
        return Eigen::Map<RowMat<S>>(data(), rows, cols);
    }
    Eigen::Map<const RowMat<S>> mat(int64_t rows, int64_t cols) const {
        check_view(rows * cols);
        return Eigen::Map<const RowMat<S>>(data(), rows, cols);
    }
    Eigen::Map<RowMat<S>> grad_mat(int64_t rows, int64_t cols) {
        ensure_grad();
        check_view(rows * cols);
        return Eigen::Map<RowMat<S>>(p_->grad.data(), rows, cols);
    }
    Eigen::Map<EigenVec<S>> vec() { return Eigen::Map<EigenVec<S>>(data(), numel()); }
    Eigen::Map<const EigenVec<S>> vec() const { return Eigen::Map<const EigenVec<S>>(data(), numel()); }
    Eigen::Map<EigenVec<S>> grad_vec() {
        ensure_grad();
        return Eigen::Map<EigenVec<S>>(p_->grad.data(), numel());
    }

    // Identity of the underlying buffer; used by the tape and the optimizer.
    const void* id() const { return p_.get(); }
    std::shared_ptr<TensorStorage<S>> storage() const { return p_; }

    Tensor detached_copy() const {
        Tensor t;
        t.p_ = std::make_shared<TensorStorage<S>>();
        t.p_->shape = p_->shape;
        t.p_->values = p_->values;
        t.p_->name = p_->name;
        return t;
    }

    template <typename T>
    Tensor<T> cast() const {
        std::vector<T> v(p_->values.size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<T>(p_->values[i]);
        auto t = Tensor<T>::from(p_->shape, std::move(v), p_->requires_grad);
        t.set_name(p_->name);
        return t;
    }

private:
    static void validate_shape(const Shape& s) {
        for (int64_t d : s)
            if (d <= 0) throw DimensionError("tensor: non-positive extent in shape " + shape_str(s));
    }
    void check_view(int64_t n) const {
        if (n != numel())
            throw DimensionError("tensor: view of " + std::to_string(n) + " elements over shape " +
                                 shape_str(shape()));
    }
    std::shared_ptr<TensorStorage<S>> p_;
};

// Ordered record of op nodes for one forward pass. Constructing a tape makes
// it the active tape for the current thread; ops record themselves onto the
// active tape when any input requires gradients. One tape per training step;
// tapes are not shared across threads.
template <typename S>
class Tape {
public:
    Tape() {
        prev_ = active_;
        active_ = this;
    }
    ~Tape() { active_ = prev_; }
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* active() { return active_; }

    void record(std::string op_name, std::vector<Tensor<S>> inputs, std::function<void()> backward) {
        nodes_.push_back(Node{std::move(op_name), std::move(inputs), std::move(backward)});
    }

    size_t size() const { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = 1 and sweeps the nodes in reverse. Each node's
    // inputs precede it, so one reverse pass visits every node exactly once.
    void backward(Tensor<S> loss) {
        if (!loss.is_scalar())
            throw ContractError("tape: backward needs a scalar loss, got shape " + shape_str(loss.shape()));
        if (used_) throw ContractError("tape: backward called twice without a new tape");
        used_ = true;
        loss.ensure_grad();
        loss.grad()[0] = S(1);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            it->backward();
            for (const auto& in : it->inputs) {
                if (!in.requires_grad() || !in.has_grad()) continue;
                for (S g : in.grad())
                    if (!std::isfinite(static_cast<double>(g)))
                        throw NumericError("tape: non-finite gradient out of op '" + it->op + "'" +
                                           (in.name().empty() ? "" : " into '" + in.name() + "'"));
            }
        }
    }

private:
    struct Node {
        std::string op;
        std::vector<Tensor<S>> inputs;
        std::function<void()> backward;
    };
    std::vector<Node> nodes_;
    bool used_ = false;
    Tape* prev_ = nullptr;
    static thread_local Tape* active_;
};

template <typename S>
thread_local Tape<S>* Tape<S>::active_ = nullptr;

// Free-standing entry point matching the rest of the op vocabulary.
template <typename S>
void backward(Tensor<S> loss) {
    Tape<S>* t = Tape<S>::active();
    if (!t) throw ContractError("backward: no active tape");
    t->backward(std::move(loss));
}

}  // namespace scriv
