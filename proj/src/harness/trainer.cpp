#include "argmine/harness/trainer.hpp"

#include "argmine/nn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace argmine::harness {

using graph::ContextPathInstance;

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Discoc: return "discoc";
        case ModelKind::BilstmRelations: return "bilstm_relations";
        case ModelKind::BilstmText: return "bilstm_text";
        case ModelKind::Majority: return "majority";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& s) {
    if (s == "discoc") return ModelKind::Discoc;
    if (s == "bilstm_relations") return ModelKind::BilstmRelations;
    if (s == "bilstm_text") return ModelKind::BilstmText;
    if (s == "majority") return ModelKind::Majority;
    return std::nullopt;
}

Dataset make_dataset(const Corpus& corpus, std::size_t max_len) {
    graph::SplitInstances split = graph::split_instances(corpus.forest, max_len);
    Dataset ds;
    ds.n_senses = corpus.inventory.size();
    auto attach = [&](std::vector<ContextPathInstance>& dst,
                      std::vector<ContextPathInstance>& src) {
        dst.reserve(src.size());
        for (auto& inst : src) {
            dst.push_back(corpus.use_stub
                              ? discourse::attach_stub_distributions(
                                    std::move(inst), corpus.inventory, corpus.stub_seed)
                              : discourse::attach_distributions(std::move(inst), corpus.store));
        }
    };
    attach(ds.train, split.train);
    attach(ds.validation, split.validation);
    attach(ds.test, split.test);
    return ds;
}

namespace {

std::vector<const ContextPathInstance*> pointers(const std::vector<ContextPathInstance>& v) {
    std::vector<const ContextPathInstance*> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = &v[i];
    return out;
}

// Drops instances a relation-only model cannot consume.
std::vector<ContextPathInstance> drop_empty_paths(const std::vector<ContextPathInstance>& v) {
    std::vector<ContextPathInstance> out;
    out.reserve(v.size());
    for (const auto& inst : v)
        if (inst.path_length() > 0) out.push_back(inst);
    return out;
}

std::unique_ptr<model::ImpactClassifier> build_model(const TrainConfig& cfg,
                                                     const Dataset& ds, nn::SeededRng& init,
                                                     std::uint64_t* vocab_hash) {
    switch (cfg.kind) {
        case ModelKind::Discoc: {
            model::Vocabulary vocab = model::Vocabulary::build(ds.train);
            if (vocab_hash) *vocab_hash = vocab.hash();
            return std::make_unique<model::DiscocModel>(cfg.discoc, std::move(vocab),
                                                        ds.n_senses, init);
        }
        case ModelKind::BilstmRelations:
            return std::make_unique<model::BilstmRelationModel>(
                ds.n_senses, cfg.lstm_hidden, cfg.head_hidden, init,
                cfg.discoc.encoder.dropout);
        case ModelKind::BilstmText: {
            model::Vocabulary vocab = model::Vocabulary::build(ds.train);
            if (vocab_hash) *vocab_hash = vocab.hash();
            return std::make_unique<model::BilstmTextModel>(
                std::move(vocab), cfg.embed_dim, cfg.lstm_hidden, cfg.head_hidden,
                cfg.discoc.encoder.max_tokens, init, cfg.discoc.encoder.dropout);
        }
        case ModelKind::Majority:
            return nullptr;
    }
    throw std::logic_error("build_model: bad kind");
}

// Epoch batches of `batch` indices; a trailing singleton is merged into the
// previous batch so train-mode batch norm always sees >= 2 rows.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    for (std::size_t i = 0; i < n; ++i) {
        cur.push_back(i);
        if (cur.size() == batch) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        if (cur.size() == 1 && !out.empty()) {
            out.back().push_back(cur.front());
        } else {
            out.push_back(std::move(cur));
        }
    }
    return out;
}

} // namespace

EvalResult evaluate_model(model::ImpactClassifier& model,
                          const std::vector<ContextPathInstance>& instances) {
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(instances.size());
    predicted.reserve(instances.size());
    constexpr std::size_t kEvalChunk = 64;
    for (std::size_t begin = 0; begin < instances.size(); begin += kEvalChunk) {
        const std::size_t end = std::min(begin + kEvalChunk, instances.size());
        std::vector<const ContextPathInstance*> chunk;
        for (std::size_t i = begin; i < end; ++i) chunk.push_back(&instances[i]);
        for (int p : model.predict(chunk)) predicted.push_back(p);
    }
    for (const auto& inst : instances) truth.push_back(static_cast<int>(inst.label));
    EvalResult out;
    out.confusion = make_confusion(truth, predicted);
    out.metrics = macro_prf(out.confusion);
    return out;
}

namespace {

EvalResult evaluate_majority(const std::vector<ContextPathInstance>& instances) {
    std::vector<int> truth, predicted;
    for (const auto& inst : instances) {
        truth.push_back(static_cast<int>(inst.label));
        predicted.push_back(static_cast<int>(model::majority_predict()));
    }
    EvalResult out;
    out.confusion = make_confusion(truth, predicted);
    out.metrics = macro_prf(out.confusion);
    return out;
}

} // namespace

TrainedModel train(const TrainConfig& config, const Dataset& dataset) {
    TrainedModel out;

    if (config.kind == ModelKind::Majority) {
        out.result.validation = evaluate_majority(dataset.validation);
        out.result.test = evaluate_majority(dataset.test);
        return out;
    }

    const Dataset* ds = &dataset;
    Dataset filtered;
    if (config.kind == ModelKind::BilstmRelations) {
        filtered.train = drop_empty_paths(dataset.train);
        filtered.validation = drop_empty_paths(dataset.validation);
        filtered.test = drop_empty_paths(dataset.test);
        filtered.n_senses = dataset.n_senses;
        ds = &filtered;
    }
    if (ds->train.empty() || ds->validation.empty())
        throw std::invalid_argument("train: empty train or validation split");
    if (ds->train.size() == 1)
        throw std::invalid_argument("train: at least 2 training instances required");

    nn::SeededRng init_rng = nn::SeededRng::stream(config.seed, "init");
    nn::SeededRng shuffle_rng = nn::SeededRng::stream(config.seed, "shuffle");
    nn::SeededRng dropout_rng = nn::SeededRng::stream(config.seed, "dropout");

    out.model = build_model(config, *ds, init_rng, &out.vocab_hash);
    model::ImpactClassifier& model = *out.model;

    const auto batches_template = make_batches(ds->train.size(), config.batch_size);
    const std::size_t steps_per_epoch = batches_template.size();
    nn::LrSchedule schedule{config.peak_lr, config.epochs * steps_per_epoch,
                            config.warmup_frac};
    nn::Adam adam;

    RunResult& result = out.result;
    result.total_steps = schedule.total_steps;

    double best_f1 = -1.0;
    std::unique_ptr<nn::ParameterStore> best_params;
    std::size_t step = 0;

    std::vector<std::size_t> order(ds->train.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (const auto& batch_slots : batches_template) {
            std::vector<const ContextPathInstance*> batch;
            std::vector<int> targets;
            batch.reserve(batch_slots.size());
            for (std::size_t slot : batch_slots) {
                const ContextPathInstance& inst = ds->train[order[slot]];
                batch.push_back(&inst);
                targets.push_back(static_cast<int>(inst.label));
            }
            model.params().zero_grads();
            nn::Tape t;
            auto mode = model::ForwardMode::training(dropout_rng);
            nn::Value logits = model.batch_logits(t, batch, mode);
            nn::Value loss = t.cross_entropy_mean(logits, targets);
            const double loss_value = t.val(loss).item();
            if (!std::isfinite(loss_value)) {
                std::ostringstream os;
                os << "train: non-finite loss at epoch " << epoch << " step " << step
                   << " (kind " << to_string(config.kind) << ", seed " << config.seed << ")";
                throw std::runtime_error(os.str());
            }
            loss_sum += loss_value;
            t.backward(loss);
            ++step;
            const double lr = schedule.at(step);
            result.lr_trace.push_back(lr);
            adam.step(model.params(), lr);
        }
        result.epoch_losses.push_back(loss_sum / static_cast<double>(steps_per_epoch));

        EvalResult val = evaluate_model(model, ds->validation);
        result.val_f1_curve.push_back(val.metrics.f1);
        if (val.metrics.f1 > best_f1) {
            best_f1 = val.metrics.f1;
            result.best_epoch = epoch;
            result.validation = val;
            best_params = std::make_unique<nn::ParameterStore>(model.params());
        }
    }

    if (best_params) model.params() = *best_params;
    result.test = evaluate_model(model, ds->test);
    return out;
}

RepeatReport repeat_runs(const TrainConfig& config, const Dataset& dataset, std::size_t n) {
    if (n == 0) throw std::invalid_argument("repeat_runs: n must be >= 1");
    RepeatReport report;
    report.single_run = n == 1;
    std::vector<double> p, r, f;
    for (std::size_t i = 0; i < n; ++i) {
        TrainConfig cfg = config;
        cfg.seed = config.seed + i;
        TrainedModel tm = train(cfg, dataset);
        p.push_back(tm.result.test.metrics.precision);
        r.push_back(tm.result.test.metrics.recall);
        f.push_back(tm.result.test.metrics.f1);
        report.runs.push_back(std::move(tm.result));
    }
    report.precision = mean_std(p);
    report.recall = mean_std(r);
    report.f1 = mean_std(f);
    return report;
}

GridResult grid_search(const TrainConfig& config, const Corpus& corpus,
                       const std::vector<std::size_t>& lengths) {
    if (lengths.empty()) throw std::invalid_argument("grid_search: no lengths");
    GridResult out;
    out.lengths = lengths;
    double best_val = -1.0;
    std::size_t best_idx = 0;
    std::vector<RepeatReport> reports;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        TrainConfig cfg = config;
        cfg.max_path_len = lengths[li];
        Dataset ds = make_dataset(corpus, lengths[li]);
        RepeatReport rep = repeat_runs(cfg, ds, config.repeats);
        std::vector<double> val_f1;
        for (const auto& run : rep.runs) val_f1.push_back(run.validation.metrics.f1);
        const double mean_val = mean_std(val_f1).mean;
        out.val_f1_by_length.push_back(mean_val);
        if (mean_val > best_val) {
            best_val = mean_val;
            best_idx = li;
        }
        reports.push_back(std::move(rep));
    }
    out.best_length = lengths[best_idx];
    out.best_report = std::move(reports[best_idx]);
    return out;
}

} // namespace argmine::harness
