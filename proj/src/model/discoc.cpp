#include "argmine/model/discoc.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::model {

using nn::Tape;
using nn::Tensor;
using nn::Value;

std::vector<int> ImpactClassifier::predict(
    const std::vector<const graph::ContextPathInstance*>& batch) {
    Tape t;
    Value logits = batch_logits(t, batch, ForwardMode::eval());
    const Tensor& v = t.val(logits);
    std::vector<int> out(v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (v.at(i, c) > v.at(i, best)) best = c;
        out[i] = best;
    }
    return out;
}

// ---------------------------------------------------------------------------
// sequence assembly
// ---------------------------------------------------------------------------

PairSequence build_pair_sequence(const std::vector<int>& parent_tokens,
                                 const std::vector<int>& child_tokens, graph::Stance stance) {
    if (child_tokens.empty())
        throw std::invalid_argument("build_pair_sequence: empty child text");
    PairSequence seq;
    seq.ids.push_back(Vocabulary::kCtx);
    seq.ids.insert(seq.ids.end(), parent_tokens.begin(), parent_tokens.end());
    seq.ids.push_back(Vocabulary::kSep);
    seq.parent_len = seq.ids.size();
    seq.ids.push_back(Vocabulary::kCls);
    seq.ids.push_back(Vocabulary::stance_token(stance));
    seq.ids.insert(seq.ids.end(), child_tokens.begin(), child_tokens.end());
    seq.ids.push_back(Vocabulary::kSep);
    seq.child_len = seq.ids.size() - seq.parent_len;
    return seq;
}

std::vector<int> build_standalone_sequence(const std::vector<int>& claim_tokens,
                                           StandaloneRole role) {
    std::vector<int> ids;
    ids.push_back(role == StandaloneRole::ParentLike ? Vocabulary::kCtx : Vocabulary::kCls);
    ids.insert(ids.end(), claim_tokens.begin(), claim_tokens.end());
    ids.push_back(Vocabulary::kSep);
    return ids;
}

// ---------------------------------------------------------------------------
// shared head
// ---------------------------------------------------------------------------

void init_mlp_bn_head(nn::ParameterStore& store, std::size_t in_dim, std::size_t hidden,
                      nn::SeededRng& rng) {
    store.create_normal("head.fc1.w", {in_dim, hidden}, rng, 0.02);
    store.create("head.fc1.b", {1, hidden});
    store.create("head.bn.gain", {1, hidden}).fill(1.0);
    store.create("head.bn.bias", {1, hidden});
    store.create("head.bn.running_mean", {1, hidden}, /*trainable=*/false);
    store.create("head.bn.running_var", {1, hidden}, /*trainable=*/false).fill(1.0);
    store.create_normal("head.fc2.w", {hidden, 3}, rng, 0.02);
    store.create("head.fc2.b", {1, 3});
}

nn::Value mlp_bn_head(Tape& t, nn::ParameterStore& store,
                      const std::function<Value(const std::string&)>& bound,
                      Value features, double dropout, const ForwardMode& mode) {
    Value h = nn::linear(t, features, bound("head.fc1.w"), bound("head.fc1.b"));
    if (mode.train) {
        Tensor* rm = mode.update_running_stats ? &store.value("head.bn.running_mean") : nullptr;
        Tensor* rv = mode.update_running_stats ? &store.value("head.bn.running_var") : nullptr;
        h = t.batch_norm_train(h, bound("head.bn.gain"), bound("head.bn.bias"), rm, rv);
    } else {
        h = t.batch_norm_eval(h, bound("head.bn.gain"), bound("head.bn.bias"),
                              store.value("head.bn.running_mean"),
                              store.value("head.bn.running_var"));
    }
    h = t.relu(h);
    if (mode.dropout_rng) h = t.dropout(h, dropout, *mode.dropout_rng, mode.train);
    return nn::linear(t, h, bound("head.fc2.w"), bound("head.fc2.b"));
}

// ---------------------------------------------------------------------------
// DiscocModel
// ---------------------------------------------------------------------------

DiscocModel::DiscocModel(DiscocConfig config, Vocabulary vocab, std::size_t n_senses,
                         nn::SeededRng& init_rng)
    : config_(std::move(config)), vocab_(std::move(vocab)), n_senses_(n_senses) {
    const auto& e = config_.encoder;
    if (e.dim % e.heads != 0)
        throw std::invalid_argument("DiscocModel: dim not divisible by heads");
    const std::size_t max_pair = 2 * e.max_tokens + 4;

    params_.create_normal("embed.token", {vocab_.size(), e.dim}, init_rng, 0.02);
    params_.create_normal("embed.position", {max_pair, e.dim}, init_rng, 0.02);
    params_.create_normal("embed.segment", {2, e.dim}, init_rng, 0.02);
    // [CTX] starts as a copy of [CLS] and trains independently afterwards.
    {
        Tensor& tok = params_.value("embed.token");
        for (std::size_t j = 0; j < e.dim; ++j)
            tok.at(Vocabulary::kCtx, j) = tok.at(Vocabulary::kCls, j);
    }
    params_.create_normal("sense.parent", {n_senses_, e.dim}, init_rng, 0.02);
    params_.create_normal("sense.child", {n_senses_, e.dim}, init_rng, 0.02);

    auto make_attn = [&](const std::string& prefix, std::size_t dim) {
        params_.create_normal(prefix + ".wq", {dim, dim}, init_rng, 0.02);
        params_.create(prefix + ".bq", {1, dim});
        params_.create_normal(prefix + ".wk", {dim, dim}, init_rng, 0.02);
        params_.create(prefix + ".bk", {1, dim});
        params_.create_normal(prefix + ".wv", {dim, dim}, init_rng, 0.02);
        params_.create(prefix + ".bv", {1, dim});
        params_.create_normal(prefix + ".wo", {dim, dim}, init_rng, 0.02);
        params_.create(prefix + ".bo", {1, dim});
    };

    for (std::size_t i = 0; i < e.layers; ++i) {
        const std::string p = "enc" + std::to_string(i);
        make_attn(p + ".attn", e.dim);
        params_.create(p + ".ln1.gain", {1, e.dim}).fill(1.0);
        params_.create(p + ".ln1.bias", {1, e.dim});
        params_.create_normal(p + ".ffn.w1", {e.dim, e.ffn_dim}, init_rng, 0.02);
        params_.create(p + ".ffn.b1", {1, e.ffn_dim});
        params_.create_normal(p + ".ffn.w2", {e.ffn_dim, e.dim}, init_rng, 0.02);
        params_.create(p + ".ffn.b2", {1, e.dim});
        params_.create(p + ".ln2.gain", {1, e.dim}).fill(1.0);
        params_.create(p + ".ln2.bias", {1, e.dim});
    }

    make_attn("fusion.attn", e.dim);
    params_.create_normal("fusion.gate.w", {2 * e.dim, e.dim}, init_rng, 0.02);
    params_.create("fusion.gate.b", {1, e.dim});

    make_attn("gather.attn", e.dim);
    params_.create_normal("gather.gate.w", {2 * e.dim, e.dim}, init_rng, 0.02);
    params_.create("gather.gate.b", {1, e.dim});
    params_.create_normal("gather.ffn.w1", {e.dim, e.ffn_dim}, init_rng, 0.02);
    params_.create("gather.ffn.b1", {1, e.ffn_dim});
    params_.create_normal("gather.ffn.w2", {e.ffn_dim, e.dim}, init_rng, 0.02);
    params_.create("gather.ffn.b2", {1, e.dim});
    params_.create("gather.ln.gain", {1, e.dim}).fill(1.0);
    params_.create("gather.ln.bias", {1, e.dim});

    init_mlp_bn_head(params_, e.dim, config_.head_hidden, init_rng);
}

Value DiscocModel::bound(Tape& t, const std::string& name) {
    if (bound_tape_ != &t) {
        bound_tape_ = &t;
        bound_.clear();
    }
    auto it = bound_.find(name);
    if (it != bound_.end()) return it->second;
    Value v = t.param(params_, name);
    bound_.emplace(name, v);
    return v;
}

Value DiscocModel::encode_sequence(Tape& t, const std::vector<int>& ids,
                                   const std::vector<int>& segments,
                                   const std::vector<double>* sense_dist,
                                   std::size_t parent_len, std::size_t child_len,
                                   const ForwardMode& mode) {
    const auto& e = config_.encoder;
    const std::size_t len = ids.size();
    std::vector<int> positions(len);
    for (std::size_t i = 0; i < len; ++i) positions[i] = static_cast<int>(i);

    Value x = t.add(t.add(t.embedding(bound(t, "embed.token"), ids),
                          t.embedding(bound(t, "embed.position"), positions)),
                    t.embedding(bound(t, "embed.segment"), segments));

    if (sense_dist) {
        if (sense_dist->size() != n_senses_)
            throw std::invalid_argument("encode_sequence: distribution dimension mismatch");
        Value d = t.constant(Tensor::row(*sense_dist));
        Value s_parent = t.matmul(d, bound(t, "sense.parent"));
        Value s_child = t.matmul(d, bound(t, "sense.child"));
        std::vector<Value> rows;
        if (config_.sense_on_specials) {
            rows = {t.tile_rows(s_parent, parent_len), t.tile_rows(s_child, child_len)};
        } else {
            // word positions only: skip [CTX] / [SEP] / [CLS] / stance tokens
            Value zero1 = t.constant(Tensor({1, e.dim}));
            Value zero2 = t.constant(Tensor({2, e.dim}));
            rows = {zero1};
            if (parent_len > 2) rows.push_back(t.tile_rows(s_parent, parent_len - 2));
            rows.push_back(zero1);
            rows.push_back(zero2);
            if (child_len > 3) rows.push_back(t.tile_rows(s_child, child_len - 3));
            rows.push_back(zero1);
        }
        x = t.add(x, t.concat_rows(rows));
    }

    if (mode.dropout_rng) x = t.dropout(x, e.dropout, *mode.dropout_rng, mode.train);

    for (std::size_t i = 0; i < e.layers; ++i) {
        const std::string p = "enc" + std::to_string(i);
        nn::MhaWeights w{bound(t, p + ".attn.wq"), bound(t, p + ".attn.bq"),
                         bound(t, p + ".attn.wk"), bound(t, p + ".attn.bk"),
                         bound(t, p + ".attn.wv"), bound(t, p + ".attn.bv"),
                         bound(t, p + ".attn.wo"), bound(t, p + ".attn.bo")};
        Value attn = nn::multi_head_attention(t, x, x, x, w, e.heads);
        if (mode.dropout_rng) attn = t.dropout(attn, e.dropout, *mode.dropout_rng, mode.train);
        x = t.layer_norm(t.add(x, attn), bound(t, p + ".ln1.gain"), bound(t, p + ".ln1.bias"));
        Value f = nn::ffn(t, x, bound(t, p + ".ffn.w1"), bound(t, p + ".ffn.b1"),
                          bound(t, p + ".ffn.w2"), bound(t, p + ".ffn.b2"));
        if (mode.dropout_rng) f = t.dropout(f, e.dropout, *mode.dropout_rng, mode.train);
        x = t.layer_norm(t.add(x, f), bound(t, p + ".ln2.gain"), bound(t, p + ".ln2.bias"));
    }
    return x;
}

DiscocModel::ClaimViews DiscocModel::encode_views(Tape& t,
                                                  const graph::ContextPathInstance& inst,
                                                  const ForwardMode& mode) {
    const auto& e = config_.encoder;
    const std::size_t l = inst.path_length();
    if (!mode.zero_discourse && inst.distributions.size() != l)
        throw std::invalid_argument(
            "discoc forward: instance lacks attached distributions (and no ablation flag)");

    std::vector<std::vector<int>> tokens(l + 1);
    for (std::size_t i = 0; i <= l; ++i)
        tokens[i] = vocab_.encode(inst.claim_texts[i], e.max_tokens);

    ClaimViews views;
    views.parent_view.resize(l + 1);
    views.child_view.resize(l + 1);

    // ->H^0: the root of the path encoded with no context.
    {
        auto ids = build_standalone_sequence(tokens[0], StandaloneRole::ChildLike);
        std::vector<int> segs(ids.size(), 0);
        views.child_view[0] = encode_sequence(t, ids, segs, nullptr, ids.size(), 0, mode);
    }
    // Pair phases i = 1..l give <-H^{i-1} and ->H^i.
    for (std::size_t i = 1; i <= l; ++i) {
        PairSequence seq = build_pair_sequence(tokens[i - 1], tokens[i], inst.stances[i - 1]);
        std::vector<int> segs(seq.ids.size(), 0);
        for (std::size_t j = seq.parent_len; j < seq.ids.size(); ++j) segs[j] = 1;
        const std::vector<double>* dist =
            mode.zero_discourse ? nullptr : &inst.distributions[i - 1];
        Value h = encode_sequence(t, seq.ids, segs, dist, seq.parent_len, seq.child_len, mode);
        views.parent_view[i - 1] = t.slice_rows(h, 0, seq.parent_len);
        views.child_view[i] = t.slice_rows(h, seq.parent_len, seq.ids.size());
    }
    // <-H^l: the classified claim encoded with no context.
    {
        auto ids = build_standalone_sequence(tokens[l], StandaloneRole::ParentLike);
        std::vector<int> segs(ids.size(), 0);
        views.parent_view[l] = encode_sequence(t, ids, segs, nullptr, ids.size(), 0, mode);
    }
    return views;
}

DiscocModel::FusionOut DiscocModel::gated_fusion(Tape& t, Value parent_view, Value child_view,
                                                 const ForwardMode& mode) {
    Value query = config_.swap_fusion_views ? child_view : parent_view;
    Value keyval = config_.swap_fusion_views ? parent_view : child_view;
    nn::MhaWeights w{bound(t, "fusion.attn.wq"), bound(t, "fusion.attn.bq"),
                     bound(t, "fusion.attn.wk"), bound(t, "fusion.attn.bk"),
                     bound(t, "fusion.attn.wv"), bound(t, "fusion.attn.bv"),
                     bound(t, "fusion.attn.wo"), bound(t, "fusion.attn.bo")};
    Value hhat = nn::multi_head_attention(t, query, keyval, keyval, w, config_.encoder.heads);
    if (mode.dropout_rng)
        hhat = t.dropout(hhat, config_.encoder.dropout, *mode.dropout_rng, mode.train);
    Value gate = t.sigmoid(nn::linear(t, t.concat_cols(query, hhat), bound(t, "fusion.gate.w"),
                                      bound(t, "fusion.gate.b")));
    Value ones = t.constant(Tensor::full(t.val(gate).shape(), 1.0));
    Value fused = t.add(t.mul(gate, hhat), t.mul(t.sub(ones, gate), query));
    return {fused, t.row(fused, 0)};
}

Value DiscocModel::gated_transformer(Tape& t, const std::vector<Value>& claim_vecs,
                                     const ForwardMode& mode) {
    const auto& e = config_.encoder;
    const std::size_t len = claim_vecs.size();
    Value z = t.concat_rows(claim_vecs);

    // Position ids run in reverse: the classified claim always sits at 0.
    Tensor pos({len, e.dim});
    for (std::size_t i = 0; i < len; ++i) {
        Tensor p = nn::sinusoid_position(len - 1 - i, e.dim);
        for (std::size_t j = 0; j < e.dim; ++j) pos.at(i, j) = p[j];
    }
    z = t.add(z, t.constant(std::move(pos)));

    nn::MhaWeights w{bound(t, "gather.attn.wq"), bound(t, "gather.attn.bq"),
                     bound(t, "gather.attn.wk"), bound(t, "gather.attn.bk"),
                     bound(t, "gather.attn.wv"), bound(t, "gather.attn.bv"),
                     bound(t, "gather.attn.wo"), bound(t, "gather.attn.bo")};
    Value hhat = nn::multi_head_attention(t, z, z, z, w, e.heads);
    if (mode.dropout_rng) hhat = t.dropout(hhat, e.dropout, *mode.dropout_rng, mode.train);

    // Gate carries scale instead of a residual connection.
    Value gate = t.sigmoid(nn::linear(t, t.concat_cols(z, hhat), bound(t, "gather.gate.w"),
                                      bound(t, "gather.gate.b")));
    Value ones = t.constant(Tensor::full(t.val(gate).shape(), 1.0));
    Value u = t.add(t.mul(gate, hhat), t.mul(t.sub(ones, gate), z));

    Value f = nn::ffn(t, u, bound(t, "gather.ffn.w1"), bound(t, "gather.ffn.b1"),
                      bound(t, "gather.ffn.w2"), bound(t, "gather.ffn.b2"));
    if (mode.dropout_rng) f = t.dropout(f, e.dropout, *mode.dropout_rng, mode.train);
    return t.layer_norm(f, bound(t, "gather.ln.gain"), bound(t, "gather.ln.bias"));
}

Value DiscocModel::path_features(Tape& t, const graph::ContextPathInstance& inst,
                                 const ForwardMode& mode) {
    ClaimViews views = encode_views(t, inst, mode);
    std::vector<Value> u(views.parent_view.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = gated_fusion(t, views.parent_view[i], views.child_view[i], mode).claim_vec;
    return gated_transformer(t, u, mode);
}

Value DiscocModel::head_forward(Tape& t, Value features, const ForwardMode& mode) {
    auto b = [this, &t](const std::string& name) { return bound(t, name); };
    return mlp_bn_head(t, params_, b, features, config_.encoder.dropout, mode);
}

Value DiscocModel::batch_logits(Tape& t,
                                const std::vector<const graph::ContextPathInstance*>& batch,
                                const ForwardMode& mode) {
    if (batch.empty()) throw std::invalid_argument("batch_logits: empty batch");
    std::vector<Value> feats;
    feats.reserve(batch.size());
    for (const auto* inst : batch) {
        Value v = path_features(t, *inst, mode);
        feats.push_back(t.row(v, t.val(v).rows() - 1)); // v^l
    }
    return head_forward(t, t.concat_rows(feats), mode);
}

} // namespace argmine::model
