#include "argmine/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::nn {

Value multi_head_attention(Tape& t, Value q_in, Value k_in, Value v_in,
                           const MhaWeights& w, std::size_t heads) {
    const std::size_t dim = t.val(w.wq).cols();
    if (heads == 0 || dim % heads != 0)
        throw std::invalid_argument("multi_head_attention: model dim not divisible by heads");
    const std::size_t dh = dim / heads;
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Value q = linear(t, q_in, w.wq, w.bq);
    Value k = linear(t, k_in, w.wk, w.bk);
    Value v = linear(t, v_in, w.wv, w.bv);

    Value merged;
    for (std::size_t h = 0; h < heads; ++h) {
        Value qh = t.slice_cols(q, h * dh, (h + 1) * dh);
        Value kh = t.slice_cols(k, h * dh, (h + 1) * dh);
        Value vh = t.slice_cols(v, h * dh, (h + 1) * dh);
        Value scores = t.scale(t.matmul_nt(qh, kh), inv_scale);
        Value probs = t.softmax_rows(scores);
        Value ctx = t.matmul(probs, vh);
        merged = h == 0 ? ctx : t.concat_cols(merged, ctx);
    }
    return linear(t, merged, w.wo, w.bo);
}

Tensor attention_weights(Tape& t, Value q, Value k, std::size_t head_dim) {
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    Value probs = t.softmax_rows(t.scale(t.matmul_nt(q, k), inv_scale));
    return t.val(probs);
}

LstmState lstm_cell(Tape& t, Value x_t, const LstmState& prev, const LstmWeights& w,
                    std::size_t hidden) {
    Value z = t.add_rows(t.add(t.matmul(x_t, w.wx), t.matmul(prev.h, w.wh)), w.b);
    Value i = t.sigmoid(t.slice_cols(z, 0, hidden));
    Value f = t.sigmoid(t.slice_cols(z, hidden, 2 * hidden));
    Value g = t.tanh_(t.slice_cols(z, 2 * hidden, 3 * hidden));
    Value o = t.sigmoid(t.slice_cols(z, 3 * hidden, 4 * hidden));
    Value c = t.add(t.mul(f, prev.c), t.mul(i, g));
    Value h = t.mul(o, t.tanh_(c));
    return {h, c};
}

BilstmOut bilstm(Tape& t, Value x, const LstmWeights& fwd, const LstmWeights& bwd,
                 std::size_t hidden) {
    const std::size_t len = t.val(x).rows();
    if (len == 0) throw std::invalid_argument("bilstm: empty sequence");

    LstmState f{t.constant(Tensor({1, hidden})), t.constant(Tensor({1, hidden}))};
    std::vector<Value> fwd_h(len);
    for (std::size_t i = 0; i < len; ++i) {
        f = lstm_cell(t, t.row(x, i), f, fwd, hidden);
        fwd_h[i] = f.h;
    }

    LstmState b{t.constant(Tensor({1, hidden})), t.constant(Tensor({1, hidden}))};
    std::vector<Value> bwd_h(len);
    for (std::size_t i = len; i-- > 0;) {
        b = lstm_cell(t, t.row(x, i), b, bwd, hidden);
        bwd_h[i] = b.h;
    }

    std::vector<Value> steps(len);
    for (std::size_t i = 0; i < len; ++i) steps[i] = t.concat_cols(fwd_h[i], bwd_h[i]);
    Value seq = t.concat_rows(steps);
    return {seq, fwd_h[len - 1], bwd_h[0]};
}

Tensor sinusoid_position(std::size_t pos, std::size_t dim) {
    if (dim == 0 || dim % 2 != 0)
        throw std::invalid_argument("sinusoid_position: dim must be even and positive");
    Tensor out({1, dim});
    for (std::size_t j = 0; j < dim / 2; ++j) {
        const double freq =
            std::pow(10000.0, -2.0 * static_cast<double>(j) / static_cast<double>(dim));
        const double angle = static_cast<double>(pos) * freq;
        out[2 * j] = std::sin(angle);
        out[2 * j + 1] = std::cos(angle);
    }
    return out;
}

} // namespace argmine::nn
