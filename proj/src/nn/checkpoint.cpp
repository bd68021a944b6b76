#include "argmine/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace argmine::nn {

namespace {

constexpr char kMagic[4] = {'A', 'R', 'G', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF64 = 0;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

} // namespace

void save_checkpoint(const ParameterStore& store, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, store.size());
    for (const auto& [name, entry] : store) {
        put_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        os.put(static_cast<char>(kDtypeF64));
        os.put(entry.trainable ? 1 : 0);
        const auto& shape = entry.value.shape();
        put_u32(os, static_cast<std::uint32_t>(shape.size()));
        for (auto d : shape) put_u64(os, d);
        for (std::size_t i = 0; i < entry.value.size(); ++i) put_f64(os, entry.value[i]);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path.string());
}

ParameterStore load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path.string());
    const std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    const std::uint64_t count = get_u64(is);
    ParameterStore store;
    for (std::uint64_t e = 0; e < count; ++e) {
        const std::uint32_t name_len = get_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const int dtype = is.get();
        if (dtype != kDtypeF64)
            throw std::runtime_error("unsupported dtype tag in checkpoint");
        const int trainable = is.get();
        const std::uint32_t rank = get_u32(is);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(get_u64(is));
        Tensor& t = store.create(name, shape, trainable != 0);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = get_f64(is);
        if (!is) throw std::runtime_error("truncated checkpoint: " + path.string());
    }
    return store;
}

} // namespace argmine::nn
