#pragma once

#include "argmine/model/discoc.hpp"

namespace argmine::model {

// Constant baseline: everything is Impactful.
inline graph::ImpactLabel majority_predict() { return graph::ImpactLabel::Impactful; }

// Single-layer BiLSTM over the distributed discourse relation path
// (d^1..d^l), final states into the shared batch-norm MLP head. Requires
// l >= 1: an empty path has no relation sequence.
class BilstmRelationModel : public ImpactClassifier {
public:
    BilstmRelationModel(std::size_t n_senses, std::size_t hidden, std::size_t head_hidden,
                        nn::SeededRng& init_rng, double dropout = 0.1);

    nn::Value batch_logits(nn::Tape& t,
                           const std::vector<const graph::ContextPathInstance*>& batch,
                           const ForwardMode& mode) override;
    nn::ParameterStore& params() override { return params_; }
    const nn::ParameterStore& params() const override { return params_; }

    std::size_t hidden() const { return hidden_; }

private:
    std::size_t n_senses_;
    std::size_t hidden_;
    double dropout_;
    nn::ParameterStore params_;
};

// BiLSTM over the raw token sequence of the whole path; each claim is
// wrapped in [BOS]/[EOS]. Word embeddings are fixed at initialization and
// never trained.
class BilstmTextModel : public ImpactClassifier {
public:
    BilstmTextModel(Vocabulary vocab, std::size_t embed_dim, std::size_t hidden,
                    std::size_t head_hidden, std::size_t max_tokens, nn::SeededRng& init_rng,
                    double dropout = 0.1);

    nn::Value batch_logits(nn::Tape& t,
                           const std::vector<const graph::ContextPathInstance*>& batch,
                           const ForwardMode& mode) override;
    nn::ParameterStore& params() override { return params_; }
    const nn::ParameterStore& params() const override { return params_; }

    const Vocabulary& vocab() const { return vocab_; }

private:
    Vocabulary vocab_;
    std::size_t embed_dim_;
    std::size_t hidden_;
    std::size_t max_tokens_;
    double dropout_;
    nn::ParameterStore params_;
};

} // namespace argmine::model
