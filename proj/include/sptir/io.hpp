#pragma once

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "sptir/nn.hpp"

namespace sptir {

using Json = nlohmann::ordered_json; // insertion order kept so dumps are reproducible

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);
std::uint64_t fnv1a_bytes(const void* data, std::size_t n);

namespace detail {

inline void put_bytes(std::string& buf, const void* p, std::size_t n) {
    buf.append(reinterpret_cast<const char*>(p), n);
}
template <class U>
void put_scalar(std::string& buf, U v) {
    put_bytes(buf, &v, sizeof(U));
}
template <class U>
U get_scalar(const char*& p, const char* end) {
    if (p + sizeof(U) > end) throw std::runtime_error("tensor file truncated");
    U v;
    std::memcpy(&v, p, sizeof(U));
    p += sizeof(U);
    return v;
}

template <class T>
constexpr std::uint8_t dtype_code() {
    return std::is_same_v<T, float> ? 0 : 1;
}

} // namespace detail

inline constexpr std::uint32_t kTensorFormatVersion = 1;

// "SPTT" record: magic, version u32, dtype u8 (0=f32, 1=f64), rank u32,
// dims u64 each, then raw little-endian row-major values.
template <class T>
void write_tensor_record(std::string& buf, const Tensor<T>& t) {
    detail::put_bytes(buf, "SPTT", 4);
    detail::put_scalar<std::uint32_t>(buf, kTensorFormatVersion);
    detail::put_scalar<std::uint8_t>(buf, detail::dtype_code<T>());
    detail::put_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape) detail::put_scalar<std::uint64_t>(buf, static_cast<std::uint64_t>(d));
    detail::put_bytes(buf, t.data.data(), t.data.size() * sizeof(T));
}

template <class T>
Tensor<T> read_tensor_record(const char*& p, const char* end) {
    if (p + 4 > end || std::memcmp(p, "SPTT", 4) != 0)
        throw std::runtime_error("not a tensor record: bad magic");
    p += 4;
    const auto version = detail::get_scalar<std::uint32_t>(p, end);
    if (version != kTensorFormatVersion)
        throw std::runtime_error("unsupported tensor format version " + std::to_string(version));
    const auto dtype = detail::get_scalar<std::uint8_t>(p, end);
    if (dtype != detail::dtype_code<T>())
        throw std::runtime_error("tensor dtype mismatch: file has code " + std::to_string(dtype));
    const auto rank = detail::get_scalar<std::uint32_t>(p, end);
    if (rank == 0 || rank > 8) throw std::runtime_error("tensor rank out of range");
    std::vector<std::int64_t> shape(rank);
    for (auto& d : shape) {
        d = static_cast<std::int64_t>(detail::get_scalar<std::uint64_t>(p, end));
        if (d < 1) throw std::runtime_error("tensor dimension < 1 in file");
    }
    const std::int64_t n = shape_numel(shape);
    if (p + n * static_cast<std::int64_t>(sizeof(T)) > end)
        throw std::runtime_error("tensor file truncated");
    Tensor<T> t(shape);
    std::memcpy(t.data.data(), p, static_cast<std::size_t>(n) * sizeof(T));
    p += n * sizeof(T);
    return t;
}

template <class T>
void save_tensor(const std::string& path, const Tensor<T>& t) {
    std::string buf;
    write_tensor_record(buf, t);
    write_file(path, buf);
}

template <class T>
Tensor<T> load_tensor(const std::string& path) {
    const std::string buf = read_file(path);
    const char* p = buf.data();
    const char* end = p + buf.size();
    Tensor<T> t = read_tensor_record<T>(p, end);
    if (p != end) throw std::runtime_error("trailing bytes in tensor file " + path);
    return t;
}

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

// Checkpoint container: "SPTC", version u32, header length u64, JSON header
// (names/shapes/trainable flags + caller metadata + payload hash), then the
// tensors as SPTT records in registration order.
template <class T>
void save_checkpoint(const std::string& path, const ParamSet<T>& ps, const Json& meta) {
    std::string payload;
    Json tensors = Json::array();
    for (const auto& e : ps.entries()) {
        Json jt;
        jt["name"] = e.name;
        jt["shape"] = e.param.tensor().shape;
        jt["trainable"] = e.trainable;
        tensors.push_back(jt);
        write_tensor_record(payload, e.param.tensor());
    }
    Json header;
    header["format_version"] = kCheckpointFormatVersion;
    header["dtype"] = detail::dtype_code<T>();
    header["tensors"] = tensors;
    header["payload_fnv1a"] = fnv1a_bytes(payload.data(), payload.size());
    header["meta"] = meta;
    const std::string hj = header.dump();

    std::string buf;
    detail::put_bytes(buf, "SPTC", 4);
    detail::put_scalar<std::uint32_t>(buf, kCheckpointFormatVersion);
    detail::put_scalar<std::uint64_t>(buf, hj.size());
    buf += hj;
    buf += payload;
    write_file(path, buf);
}

inline Json read_checkpoint_header(const std::string& bytes, const char** payload_out) {
    const char* p = bytes.data();
    const char* end = p + bytes.size();
    if (bytes.size() < 4 || std::memcmp(p, "SPTC", 4) != 0)
        throw std::runtime_error("not a checkpoint: bad magic");
    p += 4;
    const auto version = detail::get_scalar<std::uint32_t>(p, end);
    if (version != kCheckpointFormatVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    const auto hlen = detail::get_scalar<std::uint64_t>(p, end);
    if (p + hlen > end) throw std::runtime_error("checkpoint truncated");
    Json header = Json::parse(std::string(p, p + hlen));
    *payload_out = p + hlen;
    return header;
}

inline Json load_checkpoint_meta(const std::string& path) {
    const std::string bytes = read_file(path);
    const char* payload = nullptr;
    Json header = read_checkpoint_header(bytes, &payload);
    return header.at("meta");
}

// The ParamSet must already hold the matching architecture; values and
// trainable flags are restored by name. Name sets must match exactly.
// verify_hash guards against payload corruption or mismatched files.
template <class T>
Json load_checkpoint(const std::string& path, ParamSet<T>& ps, bool verify_hash = true) {
    const std::string bytes = read_file(path);
    const char* payload = nullptr;
    Json header = read_checkpoint_header(bytes, &payload);
    if (header.at("dtype").get<int>() != detail::dtype_code<T>())
        throw std::runtime_error("checkpoint dtype mismatch");
    const char* end = bytes.data() + bytes.size();
    if (verify_hash) {
        const std::uint64_t want = header.at("payload_fnv1a").get<std::uint64_t>();
        const std::uint64_t got = fnv1a_bytes(payload, static_cast<std::size_t>(end - payload));
        if (want != got)
            throw std::runtime_error("checkpoint payload hash mismatch in " + path);
    }
    const Json& tensors = header.at("tensors");
    if (tensors.size() != ps.entries().size())
        throw std::runtime_error("checkpoint holds " + std::to_string(tensors.size()) +
                                 " tensors, model expects " + std::to_string(ps.entries().size()));
    const char* p = payload;
    for (const auto& jt : tensors) {
        const std::string name = jt.at("name").get<std::string>();
        Tensor<T> t = read_tensor_record<T>(p, end);
        if (!ps.has(name)) throw std::runtime_error("checkpoint has unknown parameter " + name);
        auto& e = ps.at(name);
        if (e.param.tensor().shape != t.shape)
            throw std::runtime_error("checkpoint shape mismatch for " + name);
        e.param.tensor_mut() = std::move(t);
        const bool trainable = jt.at("trainable").get<bool>();
        e.trainable = trainable;
        e.param.node()->requires_grad = trainable;
    }
    return header.at("meta");
}

inline std::uint64_t checkpoint_payload_hash(const std::string& path) {
    const std::string bytes = read_file(path);
    const char* payload = nullptr;
    Json header = read_checkpoint_header(bytes, &payload);
    return header.at("payload_fnv1a").get<std::uint64_t>();
}

// Binary PPM (P6, 8-bit) import/export for human inspection of [3,H,W]
// images in [0,1].
void write_ppm(const std::string& path, const Tensor<float>& img);
Tensor<float> read_ppm(const std::string& path);

} // namespace sptir
