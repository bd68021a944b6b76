#include "argmine/model/vocab.hpp"

#include "argmine/nn/rng.hpp"

#include <algorithm>
#include <set>

namespace argmine::model {

std::vector<std::string> Vocabulary::tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

Vocabulary Vocabulary::build(const std::vector<graph::ContextPathInstance>& train_instances) {
    std::set<std::string> tokens;
    for (const auto& inst : train_instances)
        for (const auto& text : inst.claim_texts)
            for (auto& tok : tokenize(text)) tokens.insert(std::move(tok));
    return from_tokens({tokens.begin(), tokens.end()});
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    Vocabulary v;
    v.words_ = std::move(tokens);
    for (std::size_t i = 0; i < v.words_.size(); ++i)
        v.ids_[v.words_[i]] = kNumSpecials + static_cast<int>(i);
    return v;
}

int Vocabulary::id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text, std::size_t max_tokens) const {
    std::vector<int> out;
    for (const auto& tok : tokenize(text)) {
        if (out.size() >= max_tokens) break;
        out.push_back(id(tok));
    }
    return out;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& w : words_) {
        h = nn::fnv1a64(w, h);
        h = nn::fnv1a64("\x1f", h);
    }
    return h;
}

} // namespace argmine::model
