#include "argmine/model/baselines.hpp"

#include <stdexcept>

namespace argmine::model {

using nn::Tape;
using nn::Tensor;
using nn::Value;

namespace {

nn::LstmWeights bind_lstm(Tape& t, nn::ParameterStore& store, const std::string& prefix) {
    return {t.param(store, prefix + ".wx"), t.param(store, prefix + ".wh"),
            t.param(store, prefix + ".b")};
}

void init_lstm(nn::ParameterStore& store, const std::string& prefix, std::size_t input,
               std::size_t hidden, nn::SeededRng& rng) {
    store.create_normal(prefix + ".wx", {input, 4 * hidden}, rng, 0.1);
    store.create_normal(prefix + ".wh", {hidden, 4 * hidden}, rng, 0.1);
    store.create(prefix + ".b", {1, 4 * hidden});
}

} // namespace

// ---------------------------------------------------------------------------
// BilstmRelationModel
// ---------------------------------------------------------------------------

BilstmRelationModel::BilstmRelationModel(std::size_t n_senses, std::size_t hidden,
                                         std::size_t head_hidden, nn::SeededRng& init_rng,
                                         double dropout)
    : n_senses_(n_senses), hidden_(hidden), dropout_(dropout) {
    init_lstm(params_, "lstm.fwd", n_senses_, hidden_, init_rng);
    init_lstm(params_, "lstm.bwd", n_senses_, hidden_, init_rng);
    init_mlp_bn_head(params_, 2 * hidden_, head_hidden, init_rng);
}

Value BilstmRelationModel::batch_logits(
    Tape& t, const std::vector<const graph::ContextPathInstance*>& batch,
    const ForwardMode& mode) {
    if (batch.empty()) throw std::invalid_argument("batch_logits: empty batch");
    auto fwd = bind_lstm(t, params_, "lstm.fwd");
    auto bwd = bind_lstm(t, params_, "lstm.bwd");
    std::vector<Value> feats;
    feats.reserve(batch.size());
    for (const auto* instp : batch) {
        const auto& inst = *instp;
        const std::size_t l = inst.path_length();
        if (l == 0)
            throw std::invalid_argument(
                "bilstm_relation_forward: no relation path exists (l = 0)");
        if (inst.distributions.size() != l)
            throw std::invalid_argument("bilstm_relation_forward: missing distributions");
        Tensor x({l, n_senses_});
        for (std::size_t i = 0; i < l; ++i) {
            if (inst.distributions[i].size() != n_senses_)
                throw std::invalid_argument("bilstm_relation_forward: |R| mismatch");
            for (std::size_t j = 0; j < n_senses_; ++j) x.at(i, j) = inst.distributions[i][j];
        }
        nn::BilstmOut out = nn::bilstm(t, t.constant(std::move(x)), fwd, bwd, hidden_);
        feats.push_back(t.concat_cols(out.final_fwd, out.final_bwd));
    }
    auto b = [this, &t](const std::string& name) { return t.param(params_, name); };
    return mlp_bn_head(t, params_, b, t.concat_rows(feats), dropout_, mode);
}

// ---------------------------------------------------------------------------
// BilstmTextModel
// ---------------------------------------------------------------------------

BilstmTextModel::BilstmTextModel(Vocabulary vocab, std::size_t embed_dim, std::size_t hidden,
                                 std::size_t head_hidden, std::size_t max_tokens,
                                 nn::SeededRng& init_rng, double dropout)
    : vocab_(std::move(vocab)),
      embed_dim_(embed_dim),
      hidden_(hidden),
      max_tokens_(max_tokens),
      dropout_(dropout) {
    // Word embeddings stay fixed for the whole life of the model.
    params_.create_normal("embed.frozen", {vocab_.size(), embed_dim_}, init_rng, 0.1,
                          /*trainable=*/false);
    init_lstm(params_, "lstm.fwd", embed_dim_, hidden_, init_rng);
    init_lstm(params_, "lstm.bwd", embed_dim_, hidden_, init_rng);
    init_mlp_bn_head(params_, 2 * hidden_, head_hidden, init_rng);
}

Value BilstmTextModel::batch_logits(Tape& t,
                                    const std::vector<const graph::ContextPathInstance*>& batch,
                                    const ForwardMode& mode) {
    if (batch.empty()) throw std::invalid_argument("batch_logits: empty batch");
    // The table enters the tape as a constant: no gradient ever reaches it.
    Value table = t.constant(params_.value("embed.frozen"));
    auto fwd = bind_lstm(t, params_, "lstm.fwd");
    auto bwd = bind_lstm(t, params_, "lstm.bwd");
    std::vector<Value> feats;
    feats.reserve(batch.size());
    for (const auto* inst : batch) {
        std::vector<int> ids;
        for (const auto& text : inst->claim_texts) {
            ids.push_back(Vocabulary::kBos);
            for (int id : vocab_.encode(text, max_tokens_)) ids.push_back(id);
            ids.push_back(Vocabulary::kEos);
        }
        Value x = t.embedding(table, ids);
        nn::BilstmOut out = nn::bilstm(t, x, fwd, bwd, hidden_);
        feats.push_back(t.concat_cols(out.final_fwd, out.final_bwd));
    }
    auto b = [this, &t](const std::string& name) { return t.param(params_, name); };
    return mlp_bn_head(t, params_, b, t.concat_rows(feats), dropout_, mode);
}

} // namespace argmine::model
