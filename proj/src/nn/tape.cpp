#include "argmine/nn/tape.hpp"

#include "argmine/nn/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::nn {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
}

// Broadcast operand must be a single row of matching width.
void check_row_operand(const Tensor& x, const Tensor& r, const char* op) {
    if (r.rows() != 1 || r.cols() != x.cols())
        throw std::invalid_argument(std::string(op) + ": row operand " + r.shape_str() +
                                    " does not broadcast over " + x.shape_str());
}

} // namespace

Value Tape::push(Tensor val, bool requires_grad) {
    Node n;
    n.requires_grad = requires_grad;
    if (requires_grad) n.grad = Tensor(val.shape());
    n.val = std::move(val);
    nodes_.push_back(std::move(n));
    return Value{nodes_.size() - 1};
}

const Tensor& Tape::grad(Value v) const {
    const Node& n = node(v);
    if (!n.requires_grad) throw std::logic_error("Tape::grad on a constant node");
    return n.grad;
}

// ---------------------------------------------------------------------------
// leaves
// ---------------------------------------------------------------------------

Value Tape::constant(Tensor t) { return push(std::move(t), false); }

Value Tape::leaf(Tensor t) { return push(std::move(t), true); }

Value Tape::param(ParameterStore& store, const std::string& name) {
    Value v = push(store.value(name), true);
    node(v).store = &store;
    node(v).pname = name;
    return v;
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

Value Tape::add(Value a, Value b) {
    check_same_shape(val(a), val(b), "add");
    Tensor y(val(a).shape());
    kernels::ew_add(val(a).data(), val(b).data(), y.data(), y.size());
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out] {
        const Tensor& g = node(out).grad;
        if (needs(a)) {
            Tensor& ga = node(a).grad;
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
        }
    };
    return out;
}

Value Tape::sub(Value a, Value b) {
    check_same_shape(val(a), val(b), "sub");
    Tensor y(val(a).shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = val(a)[i] - val(b)[i];
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out] {
        const Tensor& g = node(out).grad;
        if (needs(a)) {
            Tensor& ga = node(a).grad;
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
        }
    };
    return out;
}

Value Tape::mul(Value a, Value b) {
    check_same_shape(val(a), val(b), "mul");
    Tensor y(val(a).shape());
    kernels::ew_mul(val(a).data(), val(b).data(), y.data(), y.size());
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out] {
        const Tensor& g = node(out).grad;
        if (needs(a)) {
            Tensor& ga = node(a).grad;
            const Tensor& vb = node(b).val;
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            const Tensor& va = node(a).val;
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
        }
    };
    return out;
}

Value Tape::scale(Value a, double c) {
    Tensor y(val(a).shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = val(a)[i] * c;
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, c, out] {
        const Tensor& g = node(out).grad;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
    };
    return out;
}

Value Tape::sigmoid(Value a) {
    Tensor y(val(a).shape());
    kernels::ew_sigmoid(val(a).data(), y.data(), y.size());
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out] {
        const Tensor& g = node(out).grad;
        const Tensor& y = node(out).val;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    };
    return out;
}

Value Tape::tanh_(Value a) {
    Tensor y(val(a).shape());
    kernels::ew_tanh(val(a).data(), y.data(), y.size());
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out] {
        const Tensor& g = node(out).grad;
        const Tensor& y = node(out).val;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    };
    return out;
}

Value Tape::relu(Value a) {
    Tensor y(val(a).shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = val(a)[i] > 0.0 ? val(a)[i] : 0.0;
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out] {
        const Tensor& g = node(out).grad;
        const Tensor& x = node(a).val;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (x[i] > 0.0) ga[i] += g[i];
    };
    return out;
}

// ---------------------------------------------------------------------------
// broadcasts
// ---------------------------------------------------------------------------

Value Tape::add_rows(Value x, Value b) {
    check_row_operand(val(x), val(b), "add_rows");
    const std::size_t m = val(x).rows(), n = val(x).cols();
    Tensor y(val(x).shape());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = val(x)[i * n + j] + val(b)[j];
    Value out = push(std::move(y), needs(x) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, x, b, out, m, n] {
        const Tensor& g = node(out).grad;
        if (needs(x)) {
            Tensor& gx = node(x).grad;
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
        }
    };
    return out;
}

Value Tape::mul_rows(Value x, Value b) {
    check_row_operand(val(x), val(b), "mul_rows");
    const std::size_t m = val(x).rows(), n = val(x).cols();
    Tensor y(val(x).shape());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = val(x)[i * n + j] * val(b)[j];
    Value out = push(std::move(y), needs(x) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, x, b, out, m, n] {
        const Tensor& g = node(out).grad;
        if (needs(x)) {
            Tensor& gx = node(x).grad;
            const Tensor& vb = node(b).val;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[i * n + j] * vb[j];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            const Tensor& vx = node(x).val;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j] * vx[i * n + j];
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// matrix products
// ---------------------------------------------------------------------------

Value Tape::matmul(Value a, Value b) {
    const Tensor& va = val(a);
    const Tensor& vb = val(b);
    if (va.cols() != vb.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree " + va.shape_str() +
                                    " vs " + vb.shape_str());
    const std::size_t m = va.rows(), k = va.cols(), n = vb.cols();
    Tensor y({m, n});
    kernels::gemm_nn(va.data(), vb.data(), y.data(), m, k, n);
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out, m, k, n] {
        const Tensor& g = node(out).grad;
        if (needs(a)) // ga += g * b^T
            kernels::gemm_nt(g.data(), node(b).val.data(), node(a).grad.data(), m, n, k, true);
        if (needs(b)) // gb += a^T * g
            kernels::gemm_tn(node(a).val.data(), g.data(), node(b).grad.data(), k, m, n, true);
    };
    return out;
}

Value Tape::matmul_nt(Value a, Value b) {
    const Tensor& va = val(a);
    const Tensor& vb = val(b);
    if (va.cols() != vb.cols())
        throw std::invalid_argument("matmul_nt: inner dimensions disagree " + va.shape_str() +
                                    " vs " + vb.shape_str());
    const std::size_t m = va.rows(), k = va.cols(), n = vb.rows();
    Tensor y({m, n});
    kernels::gemm_nt(va.data(), vb.data(), y.data(), m, k, n);
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out, m, k, n] {
        const Tensor& g = node(out).grad; // [m x n]
        if (needs(a)) // ga += g * b
            kernels::gemm_nn(g.data(), node(b).val.data(), node(a).grad.data(), m, n, k, true);
        if (needs(b)) // gb += g^T * a
            kernels::gemm_tn(g.data(), node(a).val.data(), node(b).grad.data(), n, m, k, true);
    };
    return out;
}

// ---------------------------------------------------------------------------
// shape surgery
// ---------------------------------------------------------------------------

Value Tape::concat_cols(Value a, Value b) {
    const Tensor& va = val(a);
    const Tensor& vb = val(b);
    if (va.rows() != vb.rows())
        throw std::invalid_argument("concat_cols: row counts differ");
    const std::size_t m = va.rows(), na = va.cols(), nb = vb.cols();
    Tensor y({m, na + nb});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < na; ++j) y[i * (na + nb) + j] = va[i * na + j];
        for (std::size_t j = 0; j < nb; ++j) y[i * (na + nb) + na + j] = vb[i * nb + j];
    }
    Value out = push(std::move(y), needs(a) || needs(b));
    if (!needs(out)) return out;
    node(out).back = [this, a, b, out, m, na, nb] {
        const Tensor& g = node(out).grad;
        if (needs(a)) {
            Tensor& ga = node(a).grad;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < na; ++j) ga[i * na + j] += g[i * (na + nb) + j];
        }
        if (needs(b)) {
            Tensor& gb = node(b).grad;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < nb; ++j) gb[i * nb + j] += g[i * (na + nb) + na + j];
        }
    };
    return out;
}

Value Tape::concat_rows(std::span<const Value> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
    const std::size_t n = val(parts[0]).cols();
    std::size_t total = 0;
    bool any_grad = false;
    for (Value p : parts) {
        if (val(p).cols() != n) throw std::invalid_argument("concat_rows: column counts differ");
        total += val(p).rows();
        any_grad = any_grad || needs(p);
    }
    Tensor y({total, n});
    std::size_t r = 0;
    for (Value p : parts) {
        const Tensor& vp = val(p);
        for (std::size_t i = 0; i < vp.size(); ++i) y[r * n + i] = vp[i];
        r += vp.rows();
    }
    Value out = push(std::move(y), any_grad);
    if (!needs(out)) return out;
    std::vector<Value> held(parts.begin(), parts.end());
    node(out).back = [this, held = std::move(held), out, n] {
        const Tensor& g = node(out).grad;
        std::size_t r = 0;
        for (Value p : held) {
            const std::size_t rows = node(p).val.rows();
            if (needs(p)) {
                Tensor& gp = node(p).grad;
                for (std::size_t i = 0; i < rows * n; ++i) gp[i] += g[r * n + i];
            }
            r += rows;
        }
    };
    return out;
}

Value Tape::slice_rows(Value a, std::size_t r0, std::size_t r1) {
    const Tensor& va = val(a);
    if (r0 > r1 || r1 > va.rows()) throw std::invalid_argument("slice_rows: bad range");
    const std::size_t n = va.cols();
    Tensor y({r1 - r0, n});
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = va[r0 * n + i];
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out, r0, n] {
        const Tensor& g = node(out).grad;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < g.size(); ++i) ga[r0 * n + i] += g[i];
    };
    return out;
}

Value Tape::slice_cols(Value a, std::size_t c0, std::size_t c1) {
    const Tensor& va = val(a);
    if (c0 > c1 || c1 > va.cols()) throw std::invalid_argument("slice_cols: bad range");
    const std::size_t m = va.rows(), n = va.cols(), w = c1 - c0;
    Tensor y({m, w});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) y[i * w + j] = va[i * n + c0 + j];
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out, c0, m, n, w] {
        const Tensor& g = node(out).grad;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) ga[i * n + c0 + j] += g[i * w + j];
    };
    return out;
}

Value Tape::tile_rows(Value r, std::size_t m) {
    const Tensor& vr = val(r);
    if (vr.rows() != 1) throw std::invalid_argument("tile_rows: operand must be a single row");
    const std::size_t n = vr.cols();
    Tensor y({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i * n + j] = vr[j];
    Value out = push(std::move(y), needs(r));
    if (!needs(out)) return out;
    node(out).back = [this, r, out, m, n] {
        const Tensor& g = node(out).grad;
        Tensor& gr = node(r).grad;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gr[j] += g[i * n + j];
    };
    return out;
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

Value Tape::sum_all(Value a) {
    double s = 0.0;
    for (std::size_t i = 0; i < val(a).size(); ++i) s += val(a)[i];
    Value out = push(Tensor::scalar(s), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out] {
        const double g = node(out).grad[0];
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
    };
    return out;
}

Value Tape::mean_all(Value a) {
    const std::size_t n = val(a).size();
    if (n == 0) throw std::invalid_argument("mean_all: empty tensor");
    return scale(sum_all(a), 1.0 / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// softmax / cross entropy
// ---------------------------------------------------------------------------

Value Tape::softmax_rows(Value a) {
    const Tensor& va = val(a);
    const std::size_t m = va.rows(), n = va.cols();
    if (n == 0) throw std::invalid_argument("softmax_rows: empty rows");
    Tensor y(va.shape());
    kernels::softmax_rows(va.data(), y.data(), m, n);
    Value out = push(std::move(y), needs(a));
    if (!needs(out)) return out;
    node(out).back = [this, a, out, m, n] {
        const Tensor& g = node(out).grad;
        const Tensor& y = node(out).val;
        Tensor& ga = node(a).grad;
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
            for (std::size_t j = 0; j < n; ++j)
                ga[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
        }
    };
    return out;
}

Value Tape::cross_entropy_mean(Value logits, std::vector<int> targets) {
    const Tensor& x = val(logits);
    const std::size_t b = x.rows(), c = x.cols();
    if (targets.size() != b)
        throw std::invalid_argument("cross_entropy_mean: target count != batch rows");
    for (int t : targets)
        if (t < 0 || static_cast<std::size_t>(t) >= c)
            throw std::invalid_argument("cross_entropy_mean: class index out of range");
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const double* xi = x.data() + i * c;
        double mx = xi[0];
        for (std::size_t j = 1; j < c; ++j)
            if (xi[j] > mx) mx = xi[j];
        double lse = 0.0;
        for (std::size_t j = 0; j < c; ++j) lse += std::exp(xi[j] - mx);
        loss += mx + std::log(lse) - xi[targets[i]];
    }
    loss /= static_cast<double>(b);
    Value out = push(Tensor::scalar(loss), needs(logits));
    if (!needs(out)) return out;
    node(out).back = [this, logits, out, b, c, targets = std::move(targets)] {
        const double g = node(out).grad[0] / static_cast<double>(b);
        const Tensor& x = node(logits).val;
        Tensor& gx = node(logits).grad;
        Tensor probs({b, c});
        kernels::softmax_rows(x.data(), probs.data(), b, c);
        for (std::size_t i = 0; i < b; ++i) {
            for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g * probs[i * c + j];
            gx[i * c + targets[i]] -= g;
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

Value Tape::layer_norm(Value x, Value gain, Value bias, double eps) {
    const Tensor& vx = val(x);
    check_row_operand(vx, val(gain), "layer_norm");
    check_row_operand(vx, val(bias), "layer_norm");
    const std::size_t m = vx.rows(), n = vx.cols();
    Tensor xhat({m, n});
    Tensor inv_std({m, 1});
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = vx.data() + i * n;
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += xi[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) var += (xi[j] - mean) * (xi[j] - mean);
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std[i] = inv;
        for (std::size_t j = 0; j < n; ++j) xhat[i * n + j] = (xi[j] - mean) * inv;
    }
    Tensor y({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            y[i * n + j] = xhat[i * n + j] * val(gain)[j] + val(bias)[j];
    Value out = push(std::move(y), needs(x) || needs(gain) || needs(bias));
    if (!needs(out)) return out;
    node(out).back = [this, x, gain, bias, out, m, n,
                      xhat = std::move(xhat), inv_std = std::move(inv_std)] {
        const Tensor& g = node(out).grad;
        if (needs(gain)) {
            Tensor& gg = node(gain).grad;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gg[j] += g[i * n + j] * xhat[i * n + j];
        }
        if (needs(bias)) {
            Tensor& gb = node(bias).grad;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
        }
        if (needs(x)) {
            Tensor& gx = node(x).grad;
            const Tensor& vgain = node(gain).val;
            for (std::size_t i = 0; i < m; ++i) {
                double mean_gh = 0.0, mean_ghx = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double gh = g[i * n + j] * vgain[j];
                    mean_gh += gh;
                    mean_ghx += gh * xhat[i * n + j];
                }
                mean_gh /= static_cast<double>(n);
                mean_ghx /= static_cast<double>(n);
                for (std::size_t j = 0; j < n; ++j) {
                    const double gh = g[i * n + j] * vgain[j];
                    gx[i * n + j] += inv_std[i] * (gh - mean_gh - xhat[i * n + j] * mean_ghx);
                }
            }
        }
    };
    return out;
}

Value Tape::batch_norm_train(Value x, Value gain, Value bias,
                             Tensor* running_mean, Tensor* running_var,
                             double momentum, double eps) {
    const Tensor& vx = val(x);
    check_row_operand(vx, val(gain), "batch_norm");
    check_row_operand(vx, val(bias), "batch_norm");
    const std::size_t b = vx.rows(), n = vx.cols();
    if (b < 2) throw std::invalid_argument("batch_norm_train: batch size must be >= 2");
    Tensor mean({1, n});
    Tensor var({1, n});
    for (std::size_t j = 0; j < n; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < b; ++i) m += vx[i * n + j];
        m /= static_cast<double>(b);
        double v = 0.0;
        for (std::size_t i = 0; i < b; ++i) v += (vx[i * n + j] - m) * (vx[i * n + j] - m);
        v /= static_cast<double>(b);
        mean[j] = m;
        var[j] = v;
    }
    if (running_mean && running_var) {
        for (std::size_t j = 0; j < n; ++j) {
            (*running_mean)[j] = (1.0 - momentum) * (*running_mean)[j] + momentum * mean[j];
            (*running_var)[j] = (1.0 - momentum) * (*running_var)[j] + momentum * var[j];
        }
    }
    Tensor xhat({b, n});
    Tensor inv_std({1, n});
    for (std::size_t j = 0; j < n; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < n; ++j)
            xhat[i * n + j] = (vx[i * n + j] - mean[j]) * inv_std[j];
    Tensor y({b, n});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < n; ++j)
            y[i * n + j] = xhat[i * n + j] * val(gain)[j] + val(bias)[j];
    Value out = push(std::move(y), needs(x) || needs(gain) || needs(bias));
    if (!needs(out)) return out;
    node(out).back = [this, x, gain, bias, out, b, n,
                      xhat = std::move(xhat), inv_std = std::move(inv_std)] {
        const Tensor& g = node(out).grad;
        if (needs(gain)) {
            Tensor& gg = node(gain).grad;
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < n; ++j) gg[j] += g[i * n + j] * xhat[i * n + j];
        }
        if (needs(bias)) {
            Tensor& gb = node(bias).grad;
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
        }
        if (needs(x)) {
            Tensor& gx = node(x).grad;
            const Tensor& vgain = node(gain).val;
            for (std::size_t j = 0; j < n; ++j) {
                double mean_g = 0.0, mean_gx = 0.0;
                for (std::size_t i = 0; i < b; ++i) {
                    mean_g += g[i * n + j];
                    mean_gx += g[i * n + j] * xhat[i * n + j];
                }
                mean_g /= static_cast<double>(b);
                mean_gx /= static_cast<double>(b);
                const double scale = vgain[j] * inv_std[j];
                for (std::size_t i = 0; i < b; ++i)
                    gx[i * n + j] +=
                        scale * (g[i * n + j] - mean_g - xhat[i * n + j] * mean_gx);
            }
        }
    };
    return out;
}

Value Tape::batch_norm_eval(Value x, Value gain, Value bias,
                            const Tensor& running_mean, const Tensor& running_var,
                            double eps) {
    const Tensor& vx = val(x);
    check_row_operand(vx, val(gain), "batch_norm");
    const std::size_t b = vx.rows(), n = vx.cols();
    if (running_mean.size() != n || running_var.size() != n)
        throw std::invalid_argument("batch_norm_eval: running stats shape mismatch");
    Tensor xhat({b, n});
    Tensor inv_std({1, n});
    for (std::size_t j = 0; j < n; ++j) inv_std[j] = 1.0 / std::sqrt(running_var[j] + eps);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < n; ++j)
            xhat[i * n + j] = (vx[i * n + j] - running_mean[j]) * inv_std[j];
    Tensor y({b, n});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < n; ++j)
            y[i * n + j] = xhat[i * n + j] * val(gain)[j] + val(bias)[j];
    Value out = push(std::move(y), needs(x) || needs(gain) || needs(bias));
    if (!needs(out)) return out;
    node(out).back = [this, x, gain, bias, out, b, n,
                      xhat = std::move(xhat), inv_std = std::move(inv_std)] {
        const Tensor& g = node(out).grad;
        if (needs(gain)) {
            Tensor& gg = node(gain).grad;
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < n; ++j) gg[j] += g[i * n + j] * xhat[i * n + j];
        }
        if (needs(bias)) {
            Tensor& gb = node(bias).grad;
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
        }
        if (needs(x)) {
            Tensor& gx = node(x).grad;
            const Tensor& vgain = node(gain).val;
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    gx[i * n + j] += g[i * n + j] * vgain[j] * inv_std[j];
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// embedding / dropout
// ---------------------------------------------------------------------------

Value Tape::embedding(Value table, std::vector<int> ids) {
    const Tensor& tb = val(table);
    const std::size_t v = tb.rows(), d = tb.cols(), l = ids.size();
    for (int id : ids)
        if (id < 0 || static_cast<std::size_t>(id) >= v)
            throw std::invalid_argument("embedding: id out of range");
    Tensor y({l, d});
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < d; ++j) y[i * d + j] = tb[ids[i] * d + j];
    Value out = push(std::move(y), needs(table));
    if (!needs(out)) return out;
    node(out).back = [this, table, out, d, ids = std::move(ids)] {
        const Tensor& g = node(out).grad;
        Tensor& gt = node(table).grad;
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) gt[ids[i] * d + j] += g[i * d + j];
    };
    return out;
}

Value Tape::dropout(Value x, double p, SeededRng& rng, bool train) {
    if (!train || p <= 0.0) return x;
    if (p >= 1.0) throw std::invalid_argument("dropout: p must be < 1");
    const Tensor& vx = val(x);
    Tensor mask(vx.shape());
    const double keep_scale = 1.0 / (1.0 - p);
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
    Tensor y(vx.shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = vx[i] * mask[i];
    Value out = push(std::move(y), needs(x));
    if (!needs(out)) return out;
    node(out).back = [this, x, out, mask = std::move(mask)] {
        const Tensor& g = node(out).grad;
        Tensor& gx = node(x).grad;
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
    };
    return out;
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

void Tape::backward(Value scalar_loss) {
    if (backward_done_) throw std::logic_error("Tape::backward called twice");
    Node& top = node(scalar_loss);
    if (top.val.size() != 1) throw std::logic_error("Tape::backward requires a scalar loss");
    if (!top.requires_grad)
        throw std::logic_error("Tape::backward: loss does not depend on any tracked input");
    backward_done_ = true;
    top.grad[0] = 1.0;
    for (std::size_t i = scalar_loss.idx + 1; i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back();
    }
    for (Node& n : nodes_) {
        if (!n.store) continue;
        Tensor& g = n.store->grad(n.pname);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
}

} // namespace argmine::nn
