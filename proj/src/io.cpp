#include "sptir/io.hpp"

#include <cstdio>
#include <fstream>

namespace sptir {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

std::uint64_t fnv1a_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_ppm(const std::string& path, const Tensor<float>& img) {
    if (img.rank() != 3 || img.dim(0) != 3)
        throw std::invalid_argument("write_ppm: image must be [3,H,W]");
    const std::int64_t h = img.dim(1), w = img.dim(2), hw = h * w;
    std::string buf = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    buf.reserve(buf.size() + static_cast<std::size_t>(3 * hw));
    for (std::int64_t i = 0; i < hw; ++i)
        for (int c = 0; c < 3; ++c) {
            const double v = std::lround(static_cast<double>(img[c * hw + i]) * 255.0);
            buf.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0.0, 255.0))));
        }
    write_file(path, buf);
}

namespace {

// next whitespace-delimited token, skipping '#' comment lines
std::string next_ppm_token(const std::string& s, std::size_t& pos) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw std::runtime_error("malformed PPM header");
    return s.substr(start, pos - start);
}

} // namespace

Tensor<float> read_ppm(const std::string& path) {
    const std::string bytes = read_file(path);
    std::size_t pos = 0;
    if (next_ppm_token(bytes, pos) != "P6") throw std::runtime_error("not a P6 PPM: " + path);
    const std::int64_t w = std::stoll(next_ppm_token(bytes, pos));
    const std::int64_t h = std::stoll(next_ppm_token(bytes, pos));
    const std::int64_t maxval = std::stoll(next_ppm_token(bytes, pos));
    if (w < 1 || h < 1 || maxval != 255) throw std::runtime_error("unsupported PPM header in " + path);
    ++pos; // single whitespace after maxval
    const std::int64_t hw = h * w;
    if (pos + static_cast<std::size_t>(3 * hw) > bytes.size())
        throw std::runtime_error("PPM pixel data truncated in " + path);
    Tensor<float> img({3, h, w});
    for (std::int64_t i = 0; i < hw; ++i)
        for (int c = 0; c < 3; ++c)
            img[c * hw + i] =
                static_cast<float>(static_cast<unsigned char>(bytes[pos + 3 * i + c])) / 255.0f;
    return img;
}

} // namespace sptir
