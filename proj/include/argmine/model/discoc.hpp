#pragma once

#include "argmine/graph/instances.hpp"
#include "argmine/model/vocab.hpp"
#include "argmine/nn/layers.hpp"
#include "argmine/nn/tape.hpp"

#include <memory>
#include <vector>

namespace argmine::model {

struct EncoderConfig {
    std::size_t layers = 2;
    std::size_t dim = 64;
    std::size_t heads = 4;
    std::size_t ffn_dim = 128;
    std::size_t max_tokens = 64; // per claim, before assembly
    double dropout = 0.1;
};

struct DiscocConfig {
    EncoderConfig encoder;
    std::size_t head_hidden = 64;
    // Whether the additive sense term covers a claim's special tokens or
    // only its word positions.
    bool sense_on_specials = true;
    // Swap query/key roles in the fusion attention (comparison flag).
    bool swap_fusion_views = false;
};

// Forward-pass mode. Gradient checks run with train-mode math but frozen
// running statistics and no dropout randomness.
struct ForwardMode {
    bool train = false;
    bool update_running_stats = true;
    nn::SeededRng* dropout_rng = nullptr;
    bool zero_discourse = false; // ablation: ignore attached distributions

    static ForwardMode eval() { return {false, false, nullptr, false}; }
    static ForwardMode training(nn::SeededRng& rng) { return {true, true, &rng, false}; }
    static ForwardMode grad_check() { return {true, false, nullptr, false}; }
};

// Common surface the trainer drives. batch_logits returns a [B x 3] value.
class ImpactClassifier {
public:
    virtual ~ImpactClassifier() = default;
    virtual nn::Value batch_logits(nn::Tape& t,
                                   const std::vector<const graph::ContextPathInstance*>& batch,
                                   const ForwardMode& mode) = 0;
    virtual nn::ParameterStore& params() = 0;
    virtual const nn::ParameterStore& params() const = 0;

    // Eval-mode argmax labels.
    std::vector<int> predict(const std::vector<const graph::ContextPathInstance*>& batch);
};

// Token-id layout of one encoded pair: [CTX] parent [SEP] [CLS] stance child [SEP].
// Span bounds include each claim's special tokens.
struct PairSequence {
    std::vector<int> ids;
    std::size_t parent_len = 0; // rows [0, parent_len) belong to the parent
    std::size_t child_len = 0;  // rows [parent_len, parent_len+child_len) to the child
};

PairSequence build_pair_sequence(const std::vector<int>& parent_tokens,
                                 const std::vector<int>& child_tokens, graph::Stance stance);

enum class StandaloneRole { ParentLike, ChildLike }; // [CTX] c [SEP] / [CLS] c [SEP]

std::vector<int> build_standalone_sequence(const std::vector<int>& claim_tokens,
                                           StandaloneRole role);

// The DisCOC architecture: pair-wise claim encoding with additive sense
// embeddings, bidirectional view fusion through a gated cross-attention,
// and a gated transformer over fused claim vectors with reversed position
// ids, topped by a 2-layer batch-norm MLP.
class DiscocModel : public ImpactClassifier {
public:
    DiscocModel(DiscocConfig config, Vocabulary vocab, std::size_t n_senses,
                nn::SeededRng& init_rng);

    nn::Value batch_logits(nn::Tape& t,
                           const std::vector<const graph::ContextPathInstance*>& batch,
                           const ForwardMode& mode) override;
    nn::ParameterStore& params() override { return params_; }
    const nn::ParameterStore& params() const override { return params_; }

    const DiscocConfig& config() const { return config_; }
    const Vocabulary& vocab() const { return vocab_; }
    std::size_t n_senses() const { return n_senses_; }

    // Fused claim vector sequence v^0..v^l for one instance ([l+1 x dim]);
    // exposed for tests of the reversed-position and gathering behavior.
    nn::Value path_features(nn::Tape& t, const graph::ContextPathInstance& inst,
                            const ForwardMode& mode);

    // Both encoded views of every claim on the path (parent view, child view).
    struct ClaimViews {
        std::vector<nn::Value> parent_view; // index i holds <-H^i
        std::vector<nn::Value> child_view;  // index i holds ->H^i
    };
    ClaimViews encode_views(nn::Tape& t, const graph::ContextPathInstance& inst,
                            const ForwardMode& mode);

    struct FusionOut {
        nn::Value fused_seq;   // U^i, query-view length x dim
        nn::Value claim_vec;   // u^i, 1 x dim (leading special-token row)
    };
    FusionOut gated_fusion(nn::Tape& t, nn::Value parent_view, nn::Value child_view,
                           const ForwardMode& mode);

    nn::Value gated_transformer(nn::Tape& t, const std::vector<nn::Value>& claim_vecs,
                                const ForwardMode& mode);

private:
    friend struct DiscocTestAccess;

    nn::Value encode_sequence(nn::Tape& t, const std::vector<int>& ids,
                              const std::vector<int>& segments,
                              const std::vector<double>* sense_dist, std::size_t parent_len,
                              std::size_t child_len, const ForwardMode& mode);
    nn::Value head_forward(nn::Tape& t, nn::Value features, const ForwardMode& mode);
    nn::Value bound(nn::Tape& t, const std::string& name);

    DiscocConfig config_;
    Vocabulary vocab_;
    std::size_t n_senses_;
    nn::ParameterStore params_;

    // per-tape parameter binding cache
    nn::Tape* bound_tape_ = nullptr;
    std::unordered_map<std::string, nn::Value> bound_;
};

// Shared 2-layer MLP + batch-norm head builder used by DisCOC and the
// BiLSTM baselines. Running stats live in `store` as non-trainable entries
// "head.bn.running_mean" / "head.bn.running_var".
nn::Value mlp_bn_head(nn::Tape& t, nn::ParameterStore& store,
                      const std::function<nn::Value(const std::string&)>& bound,
                      nn::Value features, double dropout, const ForwardMode& mode);

void init_mlp_bn_head(nn::ParameterStore& store, std::size_t in_dim, std::size_t hidden,
                      nn::SeededRng& rng);

} // namespace argmine::model
