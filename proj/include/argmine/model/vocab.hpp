#pragma once

#include "argmine/graph/instances.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace argmine::model {

// Whitespace-token vocabulary built from training text. Special ids are
// fixed and disjoint from word ids; word ids are assigned in sorted token
// order, so the mapping is independent of instance order.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;
    static constexpr int kCtx = 4;
    static constexpr int kPro = 5;
    static constexpr int kCon = 6;
    static constexpr int kBos = 7;
    static constexpr int kEos = 8;
    static constexpr int kNumSpecials = 9;

    static Vocabulary build(const std::vector<graph::ContextPathInstance>& train_instances);
    static Vocabulary from_tokens(std::vector<std::string> tokens);

    static std::vector<std::string> tokenize(std::string_view text);

    int id(const std::string& token) const; // kUnk when absent

    // Tokenized, truncated (head truncation) word ids of a claim text.
    std::vector<int> encode(std::string_view text, std::size_t max_tokens) const;

    std::size_t size() const { return kNumSpecials + words_.size(); }
    std::uint64_t hash() const;
    static int stance_token(graph::Stance s) {
        return s == graph::Stance::Pro ? kPro : kCon;
    }

private:
    std::vector<std::string> words_; // sorted
    std::unordered_map<std::string, int> ids_;
};

} // namespace argmine::model
