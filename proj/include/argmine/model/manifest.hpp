#pragma once

#include "argmine/model/discoc.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace argmine::model {

// Sidecar for a checkpoint: records everything evaluation must agree on.
// Loading refuses mismatched vocabularies, inventories, or settings.
struct ModelManifest {
    std::string model_kind; // "discoc" | "bilstm_relations" | "bilstm_text" | "majority"
    EncoderConfig encoder;
    std::size_t head_hidden = 64;
    std::size_t lstm_hidden = 32;
    std::size_t embed_dim = 64;
    std::uint64_t vocab_hash = 0;
    std::uint64_t inventory_hash = 0;
    std::size_t max_path_len = 0;

    void save(const std::filesystem::path& path) const;
    static ModelManifest load(const std::filesystem::path& path);
};

// Throws std::runtime_error naming the first mismatching field.
void check_manifest(const ModelManifest& expected, const ModelManifest& actual);

} // namespace argmine::model
