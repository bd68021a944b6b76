#include "argmine/model/manifest.hpp"

#include <json.hpp>

#include <fstream>

namespace argmine::model {

using nlohmann::json;

void ModelManifest::save(const std::filesystem::path& path) const {
    json j;
    j["model_kind"] = model_kind;
    j["encoder"] = {{"layers", encoder.layers},   {"dim", encoder.dim},
                    {"heads", encoder.heads},     {"ffn_dim", encoder.ffn_dim},
                    {"max_tokens", encoder.max_tokens}, {"dropout", encoder.dropout}};
    j["head_hidden"] = head_hidden;
    j["lstm_hidden"] = lstm_hidden;
    j["embed_dim"] = embed_dim;
    j["vocab_hash"] = vocab_hash;
    j["inventory_hash"] = inventory_hash;
    j["max_path_len"] = max_path_len;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write manifest: " + path.string());
    os << j.dump(2) << '\n';
}

ModelManifest ModelManifest::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open manifest: " + path.string());
    json j = json::parse(is);
    ModelManifest m;
    m.model_kind = j.at("model_kind").get<std::string>();
    const auto& e = j.at("encoder");
    m.encoder.layers = e.at("layers").get<std::size_t>();
    m.encoder.dim = e.at("dim").get<std::size_t>();
    m.encoder.heads = e.at("heads").get<std::size_t>();
    m.encoder.ffn_dim = e.at("ffn_dim").get<std::size_t>();
    m.encoder.max_tokens = e.at("max_tokens").get<std::size_t>();
    m.encoder.dropout = e.at("dropout").get<double>();
    m.head_hidden = j.at("head_hidden").get<std::size_t>();
    m.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
    m.embed_dim = j.at("embed_dim").get<std::size_t>();
    m.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
    m.inventory_hash = j.at("inventory_hash").get<std::uint64_t>();
    m.max_path_len = j.at("max_path_len").get<std::size_t>();
    return m;
}

void check_manifest(const ModelManifest& expected, const ModelManifest& actual) {
    auto fail = [](const std::string& field) {
        throw std::runtime_error("manifest mismatch: " + field);
    };
    if (expected.model_kind != actual.model_kind) fail("model_kind");
    if (expected.vocab_hash != actual.vocab_hash) fail("vocab_hash");
    if (expected.inventory_hash != actual.inventory_hash) fail("inventory_hash");
    if (expected.max_path_len != actual.max_path_len) fail("max_path_len");
    if (expected.encoder.layers != actual.encoder.layers ||
        expected.encoder.dim != actual.encoder.dim ||
        expected.encoder.heads != actual.encoder.heads ||
        expected.encoder.ffn_dim != actual.encoder.ffn_dim ||
        expected.encoder.max_tokens != actual.encoder.max_tokens)
        fail("encoder");
    if (expected.head_hidden != actual.head_hidden) fail("head_hidden");
    if (expected.lstm_hidden != actual.lstm_hidden) fail("lstm_hidden");
    if (expected.embed_dim != actual.embed_dim) fail("embed_dim");
}

} // namespace argmine::model
