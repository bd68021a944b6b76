#pragma once

#include "argmine/nn/tape.hpp"

#include <vector>

namespace argmine::nn {

// Projection weights for one multi-head attention block, already materialized
// on a tape (typically via Tape::param).
struct MhaWeights {
    Value wq, bq, wk, bk, wv, bv, wo, bo;
};

// Scaled dot-product attention with learned projections and `heads` heads.
// Query may come from a different sequence than key/value (cross-attention);
// output has the query's length and the model width.
Value multi_head_attention(Tape& t, Value q_in, Value k_in, Value v_in,
                           const MhaWeights& w, std::size_t heads);

// Attention weights of a single-head unprojected attention, exposed for
// tests that assert the simplex property of attention rows.
Tensor attention_weights(Tape& t, Value q, Value k, std::size_t head_dim);

struct LstmWeights {
    Value wx; // [input x 4*hidden]
    Value wh; // [hidden x 4*hidden]
    Value b;  // [1 x 4*hidden], gate order i, f, g, o
};

struct LstmState {
    Value h;
    Value c;
};

LstmState lstm_cell(Tape& t, Value x_t, const LstmState& prev, const LstmWeights& w,
                    std::size_t hidden);

struct BilstmOut {
    Value hidden_seq;  // [L x 2*hidden], forward states then backward states per step
    Value final_fwd;   // [1 x hidden]
    Value final_bwd;   // [1 x hidden]
};

// Runs the sequence [L x input] through forward and backward LSTMs.
BilstmOut bilstm(Tape& t, Value x, const LstmWeights& fwd, const LstmWeights& bwd,
                 std::size_t hidden);

// Two-layer feed-forward with ReLU.
inline Value ffn(Tape& t, Value x, Value w1, Value b1, Value w2, Value b2) {
    return linear(t, t.relu(linear(t, x, w1, b1)), w2, b2);
}

// Sine/cosine positional vector: pairs (sin, cos) at geometric frequencies
// 10000^(-2j/dim). Position 0 is all (0, 1) pairs.
Tensor sinusoid_position(std::size_t pos, std::size_t dim);

} // namespace argmine::nn
