#include "argmine/harness/config.hpp"

#include "argmine/nn/rng.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace argmine::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

KeyValues parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::uint64_t config_hash(const KeyValues& kv) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& [k, v] : kv) { // std::map: sorted
        h = nn::fnv1a64(k, h);
        h = nn::fnv1a64("=", h);
        h = nn::fnv1a64(v, h);
        h = nn::fnv1a64("\n", h);
    }
    return h;
}

namespace {

const std::set<std::string> kTrainKeys = {
    "model",      "max_path_len", "batch_size",  "epochs",     "peak_lr",
    "warmup",     "seed",         "repeats",     "enc_layers", "enc_dim",
    "enc_heads",  "enc_ffn_dim",  "max_tokens",  "dropout",    "head_hidden",
    "lstm_hidden", "embed_dim",   "sense_on_specials", "swap_fusion_views",
};

std::size_t to_size(const std::string& key, const std::string& v) {
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (...) {
        throw std::runtime_error("config key '" + key + "': bad integer '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return std::stod(v);
    } catch (...) {
        throw std::runtime_error("config key '" + key + "': bad number '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config key '" + key + "': bad boolean '" + v + "'");
}

} // namespace

TrainConfig train_config_from(const KeyValues& kv) {
    for (const auto& [k, _] : kv)
        if (!kTrainKeys.count(k))
            throw std::runtime_error("unknown config key '" + k + "'");

    TrainConfig c;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* v = get("model")) {
        auto kind = model_kind_from_string(*v);
        if (!kind) throw std::runtime_error("unknown model kind '" + *v + "'");
        c.kind = *kind;
    }
    if (auto* v = get("max_path_len")) {
        c.max_path_len = to_size("max_path_len", *v);
        if (c.max_path_len > 5)
            throw std::runtime_error("max_path_len must be within [0, 5]");
    }
    if (auto* v = get("batch_size")) c.batch_size = to_size("batch_size", *v);
    if (auto* v = get("epochs")) c.epochs = to_size("epochs", *v);
    if (auto* v = get("peak_lr")) c.peak_lr = to_double("peak_lr", *v);
    if (auto* v = get("warmup")) c.warmup_frac = to_double("warmup", *v);
    if (auto* v = get("seed")) c.seed = to_size("seed", *v);
    if (auto* v = get("repeats")) c.repeats = to_size("repeats", *v);
    if (auto* v = get("enc_layers")) c.discoc.encoder.layers = to_size("enc_layers", *v);
    if (auto* v = get("enc_dim")) c.discoc.encoder.dim = to_size("enc_dim", *v);
    if (auto* v = get("enc_heads")) c.discoc.encoder.heads = to_size("enc_heads", *v);
    if (auto* v = get("enc_ffn_dim")) c.discoc.encoder.ffn_dim = to_size("enc_ffn_dim", *v);
    if (auto* v = get("max_tokens")) c.discoc.encoder.max_tokens = to_size("max_tokens", *v);
    if (auto* v = get("dropout")) c.discoc.encoder.dropout = to_double("dropout", *v);
    if (auto* v = get("head_hidden")) c.head_hidden = to_size("head_hidden", *v);
    if (auto* v = get("lstm_hidden")) c.lstm_hidden = to_size("lstm_hidden", *v);
    if (auto* v = get("embed_dim")) c.embed_dim = to_size("embed_dim", *v);
    if (auto* v = get("sense_on_specials"))
        c.discoc.sense_on_specials = to_bool("sense_on_specials", *v);
    if (auto* v = get("swap_fusion_views"))
        c.discoc.swap_fusion_views = to_bool("swap_fusion_views", *v);
    c.discoc.head_hidden = c.head_hidden;
    return c;
}

KeyValues to_key_values(const TrainConfig& c) {
    KeyValues kv;
    auto put_size = [&](const char* k, std::size_t v) { kv[k] = std::to_string(v); };
    auto put_double = [&](const char* k, double v) {
        std::ostringstream os;
        os << v;
        kv[k] = os.str();
    };
    kv["model"] = to_string(c.kind);
    put_size("max_path_len", c.max_path_len);
    put_size("batch_size", c.batch_size);
    put_size("epochs", c.epochs);
    put_double("peak_lr", c.peak_lr);
    put_double("warmup", c.warmup_frac);
    put_size("seed", c.seed);
    put_size("repeats", c.repeats);
    put_size("enc_layers", c.discoc.encoder.layers);
    put_size("enc_dim", c.discoc.encoder.dim);
    put_size("enc_heads", c.discoc.encoder.heads);
    put_size("enc_ffn_dim", c.discoc.encoder.ffn_dim);
    put_size("max_tokens", c.discoc.encoder.max_tokens);
    put_double("dropout", c.discoc.encoder.dropout);
    put_size("head_hidden", c.head_hidden);
    put_size("lstm_hidden", c.lstm_hidden);
    put_size("embed_dim", c.embed_dim);
    kv["sense_on_specials"] = c.discoc.sense_on_specials ? "true" : "false";
    kv["swap_fusion_views"] = c.discoc.swap_fusion_views ? "true" : "false";
    return kv;
}

} // namespace argmine::harness
