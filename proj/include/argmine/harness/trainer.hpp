#pragma once

#include "argmine/discourse/discourse.hpp"
#include "argmine/graph/instances.hpp"
#include "argmine/harness/metrics.hpp"
#include "argmine/model/baselines.hpp"
#include "argmine/model/discoc.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace argmine::harness {

enum class ModelKind { Discoc, BilstmRelations, BilstmText, Majority };

std::string to_string(ModelKind k);
std::optional<ModelKind> model_kind_from_string(const std::string& s);

// A parsed corpus plus its annotation source; datasets at any path length
// derive from this.
struct Corpus {
    graph::Forest forest;
    discourse::SenseInventory inventory;
    discourse::AnnotationStore store; // consulted when use_stub is false
    bool use_stub = true;
    std::uint64_t stub_seed = 7;
    std::uint64_t content_hash = 0; // input content identity, embedded in reports
};

struct Dataset {
    std::vector<graph::ContextPathInstance> train;
    std::vector<graph::ContextPathInstance> validation;
    std::vector<graph::ContextPathInstance> test;
    std::size_t n_senses = 0;
};

// Extracts one instance per labeled node at the given maximum context path
// length and attaches discourse distributions from the corpus source.
Dataset make_dataset(const Corpus& corpus, std::size_t max_len);

struct TrainConfig {
    ModelKind kind = ModelKind::Discoc;
    std::size_t max_path_len = 5; // grid-searched in [0, 5]
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    double peak_lr = 1e-3; // all models here train from scratch
    double warmup_frac = 0.06;
    std::uint64_t seed = 0;
    std::size_t repeats = 5;

    model::DiscocConfig discoc;
    std::size_t lstm_hidden = 32;
    std::size_t embed_dim = 64; // frozen text embeddings
    std::size_t head_hidden = 64;
};

struct EvalResult {
    Confusion confusion{};
    MacroPrf metrics;
};

struct RunResult {
    std::vector<double> epoch_losses;  // mean batch loss per epoch
    std::vector<double> val_f1_curve;  // validation macro-F1 per epoch
    std::vector<double> lr_trace;      // learning rate at every step
    std::size_t best_epoch = 0;        // 0-based; ties go to the earlier epoch
    std::size_t total_steps = 0;
    EvalResult validation;             // at the selected epoch
    EvalResult test;                   // at the selected epoch
};

struct TrainedModel {
    std::unique_ptr<model::ImpactClassifier> model; // null for Majority
    std::uint64_t vocab_hash = 0;                   // 0 for models without a vocabulary
    RunResult result;
};

// Cross-entropy training with Adam under the warmup/decay schedule;
// checkpoint selection by validation macro-F1. Deterministic given
// (config, dataset): all randomness comes from named streams of the seed.
TrainedModel train(const TrainConfig& config, const Dataset& dataset);

EvalResult evaluate_model(model::ImpactClassifier& model,
                          const std::vector<graph::ContextPathInstance>& instances);

struct RepeatReport {
    std::vector<RunResult> runs; // seeds seed+0 .. seed+n-1
    MeanStd precision;           // over test metrics
    MeanStd recall;
    MeanStd f1;
    bool single_run = false; // n == 1: std is reported as 0 by convention
};

RepeatReport repeat_runs(const TrainConfig& config, const Dataset& dataset, std::size_t n);

struct GridResult {
    std::vector<std::size_t> lengths;
    std::vector<double> val_f1_by_length; // mean validation F1 (the Figure-5-style curve)
    std::size_t best_length = 0;          // ties go to the shorter length
    RepeatReport best_report;             // test metrics at the chosen length only
};

GridResult grid_search(const TrainConfig& config, const Corpus& corpus,
                       const std::vector<std::size_t>& lengths);

} // namespace argmine::harness
