#pragma once

#include "argmine/nn/params.hpp"
#include "argmine/nn/rng.hpp"
#include "argmine/nn/tensor.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace argmine::nn {

// Handle to a node on a Tape.
struct Value {
    std::size_t idx = static_cast<std::size_t>(-1);
    bool valid() const { return idx != static_cast<std::size_t>(-1); }
};

// Reverse-mode autodiff over a recorded operation tape. Every op appends a
// node holding its forward value and a closure that scatters the node's
// gradient to its parents; backward() replays the closures in reverse
// creation order (which is a topological order by construction) and finally
// accumulates the gradients of `param` leaves into their ParameterStore.
//
// Tapes are single-use: build a forward pass, call backward once, discard.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // --- leaves ---------------------------------------------------------
    Value constant(Tensor t);                                // no gradient
    Value leaf(Tensor t);                                    // gradient readable after backward
    Value param(ParameterStore& store, const std::string& name);

    // --- elementwise ----------------------------------------------------
    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value scale(Value a, double c);
    Value sigmoid(Value a);
    Value tanh_(Value a);
    Value relu(Value a);

    // --- broadcast over rows (b is 1 x N or rank-1 N) ---------------------
    Value add_rows(Value x, Value b);
    Value mul_rows(Value x, Value b);

    // --- matrix products --------------------------------------------------
    Value matmul(Value a, Value b);     // [M x K] * [K x N]
    Value matmul_nt(Value a, Value b);  // [M x K] * [N x K]^T

    // --- shape surgery ----------------------------------------------------
    Value concat_cols(Value a, Value b);
    Value concat_rows(std::span<const Value> parts);
    Value slice_rows(Value a, std::size_t r0, std::size_t r1);
    Value slice_cols(Value a, std::size_t c0, std::size_t c1);
    Value row(Value a, std::size_t r) { return slice_rows(a, r, r + 1); }
    Value tile_rows(Value r, std::size_t m);

    // --- reductions -------------------------------------------------------
    Value sum_all(Value a);
    Value mean_all(Value a);

    // --- nonlinearities with structure -------------------------------------
    Value softmax_rows(Value a);
    // Mean over rows of -log softmax(logits)[target]; max-subtraction stabilized.
    Value cross_entropy_mean(Value logits, std::vector<int> targets);

    Value layer_norm(Value x, Value gain, Value bias, double eps = 1e-5);

    // Train-mode batch norm over rows; batch statistics are biased (1/B).
    // When running stats are supplied they are updated in place with the
    // given momentum at forward time (pass nullptr to leave them untouched,
    // e.g. under a gradient check).
    Value batch_norm_train(Value x, Value gain, Value bias,
                           Tensor* running_mean, Tensor* running_var,
                           double momentum = 0.1, double eps = 1e-5);
    Value batch_norm_eval(Value x, Value gain, Value bias,
                          const Tensor& running_mean, const Tensor& running_var,
                          double eps = 1e-5);

    // Embedding row gather; gradient scatter-adds into the table.
    Value embedding(Value table, std::vector<int> ids);

    // Inverted-scaling dropout; identity when !train or p == 0.
    Value dropout(Value x, double p, SeededRng& rng, bool train);

    // --- driver -----------------------------------------------------------
    void backward(Value scalar_loss);

    const Tensor& val(Value v) const { return nodes_[v.idx].val; }
    const Tensor& grad(Value v) const;
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor val;
        Tensor grad;
        bool requires_grad = false;
        std::function<void()> back;    // empty for leaves and constants
        ParameterStore* store = nullptr;
        std::string pname;
    };

    Value push(Tensor val, bool requires_grad);
    Node& node(Value v) { return nodes_[v.idx]; }
    const Node& node(Value v) const { return nodes_[v.idx]; }
    bool needs(Value v) const { return nodes_[v.idx].requires_grad; }

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

// y = x * W + b
inline Value linear(Tape& t, Value x, Value w, Value b) {
    return t.add_rows(t.matmul(x, w), b);
}

} // namespace argmine::nn
