#pragma once

#include "argmine/nn/rng.hpp"
#include "argmine/nn/tensor.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace argmine::nn {

// Named parameter tensors and their gradient accumulators. Entries are kept
// in name order so every traversal (optimizer, checkpoint, gradient check)
// is deterministic. Non-trainable entries hold model state that must be
// checkpointed but never optimized (running statistics, frozen embeddings).
class ParameterStore {
public:
    struct Entry {
        Tensor value;
        Tensor grad;
        bool trainable = true;
    };

    Tensor& create(const std::string& name, std::vector<std::size_t> shape, bool trainable = true) {
        if (entries_.count(name)) throw std::logic_error("duplicate parameter: " + name);
        Entry e;
        e.value = Tensor(shape);
        e.grad = Tensor(shape);
        e.trainable = trainable;
        return entries_.emplace(name, std::move(e)).first->second.value;
    }

    Tensor& create_normal(const std::string& name, std::vector<std::size_t> shape,
                          SeededRng& rng, double stddev, bool trainable = true) {
        Tensor& t = create(name, std::move(shape), trainable);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
        return t;
    }

    bool has(const std::string& name) const { return entries_.count(name) != 0; }

    Tensor& value(const std::string& name) { return at(name).value; }
    const Tensor& value(const std::string& name) const { return at(name).value; }
    Tensor& grad(const std::string& name) { return at(name).grad; }
    const Tensor& grad(const std::string& name) const { return at(name).grad; }
    bool trainable(const std::string& name) const { return at(name).trainable; }

    void zero_grads() {
        for (auto& [_, e] : entries_) e.grad.fill(0.0);
    }

    std::size_t size() const { return entries_.size(); }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    Entry& at(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::out_of_range("unknown parameter: " + name);
        return it->second;
    }
    const Entry& at(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::out_of_range("unknown parameter: " + name);
        return it->second;
    }

    std::map<std::string, Entry> entries_;
};

} // namespace argmine::nn
