#include "sptir/mask_prior.hpp"

#include <deque>

namespace sptir {

std::vector<std::vector<std::uint8_t>> grid_prompt_masks(const LabelMap& lm, int g) {
    if (g < 1) throw std::invalid_argument("grid_prompt_masks: grid size must be >= 1");
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(lm.num_regions()), 0);
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const int y = static_cast<int>((i + 0.5) * lm.h / g);
            const int x = static_cast<int>((j + 0.5) * lm.w / g);
            const std::int32_t region = lm.at(y, x);
            if (seen[static_cast<std::size_t>(region)]) continue;
            seen[static_cast<std::size_t>(region)] = 1;
            std::vector<std::uint8_t> mask(lm.labels.size());
            for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = lm.labels[k] == region ? 1 : 0;
            out.push_back(std::move(mask));
        }
    }
    return out;
}

MaskStack normalize_mask_count(const std::vector<std::vector<std::uint8_t>>& masks, int nc, int h,
                               int w) {
    if (nc < 1) throw std::invalid_argument("normalize_mask_count: N_c must be >= 1");
    MaskStack out;
    out.nc = nc;
    out.h = h;
    out.w = w;
    out.count_before_normalization = static_cast<int>(masks.size());
    out.masks.assign(static_cast<std::size_t>(nc) * h * w, 0);
    const int keep = std::min<int>(nc, static_cast<int>(masks.size()));
    for (int c = 0; c < keep; ++c) {
        if (masks[static_cast<std::size_t>(c)].size() != static_cast<std::size_t>(h) * w)
            throw std::invalid_argument("normalize_mask_count: mask size mismatch");
        std::copy(masks[static_cast<std::size_t>(c)].begin(), masks[static_cast<std::size_t>(c)].end(),
                  out.masks.begin() + static_cast<std::size_t>(c) * h * w);
    }
    return out;
}

LabelMap oracle_segment(const Tensor<float>& img, int q_levels) {
    if (img.rank() != 3 || img.dim(0) != 3)
        throw std::invalid_argument("oracle_segment: image must be [3,H,W]");
    const int h = static_cast<int>(img.dim(1));
    const int w = static_cast<int>(img.dim(2));
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;

    // quantized color key per pixel
    std::vector<std::int32_t> key(static_cast<std::size_t>(hw));
    for (std::int64_t i = 0; i < hw; ++i) {
        std::int32_t k = 0;
        for (int c = 0; c < 3; ++c) {
            const float v = img[c * hw + i];
            int q = static_cast<int>(v * q_levels);
            q = std::clamp(q, 0, q_levels - 1);
            k = k * q_levels + q;
        }
        key[static_cast<std::size_t>(i)] = k;
    }

    LabelMap lm;
    lm.h = h;
    lm.w = w;
    lm.labels.assign(static_cast<std::size_t>(hw), -1);
    std::int32_t next = 0;
    std::deque<std::int64_t> queue;
    for (std::int64_t start = 0; start < hw; ++start) {
        if (lm.labels[static_cast<std::size_t>(start)] >= 0) continue;
        const std::int32_t id = next++;
        lm.labels[static_cast<std::size_t>(start)] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::int64_t cur = queue.front();
            queue.pop_front();
            const int y = static_cast<int>(cur / w), x = static_cast<int>(cur % w);
            const int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                const int ny = y + dy[d], nx = x + dx[d];
                if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                const std::int64_t ni = static_cast<std::int64_t>(ny) * w + nx;
                if (lm.labels[static_cast<std::size_t>(ni)] >= 0) continue;
                if (key[static_cast<std::size_t>(ni)] != key[static_cast<std::size_t>(cur)]) continue;
                lm.labels[static_cast<std::size_t>(ni)] = id;
                queue.push_back(ni);
            }
        }
    }
    return lm;
}

namespace {
constexpr std::uint32_t kMaskFormatVersion = 1;
}

void save_masks(const std::string& path, const MaskStack& m) {
    for (auto v : m.masks)
        if (v != 0 && v != 1) throw std::invalid_argument("save_masks: mask values must be 0 or 1");
    std::string buf;
    detail::put_bytes(buf, "SPTM", 4);
    detail::put_scalar<std::uint32_t>(buf, kMaskFormatVersion);
    detail::put_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(m.nc));
    detail::put_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(m.h));
    detail::put_scalar<std::uint32_t>(buf, static_cast<std::uint32_t>(m.w));
    detail::put_bytes(buf, m.masks.data(), m.masks.size());
    write_file(path, buf);
}

MaskStack load_masks(const std::string& path) {
    const std::string bytes = read_file(path);
    const char* p = bytes.data();
    const char* end = p + bytes.size();
    if (bytes.size() < 4 || std::memcmp(p, "SPTM", 4) != 0)
        throw std::runtime_error("not a mask file: bad magic in " + path);
    p += 4;
    const auto version = detail::get_scalar<std::uint32_t>(p, end);
    if (version != kMaskFormatVersion)
        throw std::runtime_error("unsupported mask format version " + std::to_string(version));
    MaskStack m;
    m.nc = static_cast<int>(detail::get_scalar<std::uint32_t>(p, end));
    m.h = static_cast<int>(detail::get_scalar<std::uint32_t>(p, end));
    m.w = static_cast<int>(detail::get_scalar<std::uint32_t>(p, end));
    if (m.nc < 1 || m.h < 1 || m.w < 1) throw std::runtime_error("bad mask header in " + path);
    const std::size_t n = static_cast<std::size_t>(m.nc) * m.h * m.w;
    if (static_cast<std::size_t>(end - p) != n)
        throw std::runtime_error("mask channel data does not match header N_c in " + path);
    m.masks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::uint8_t>(p[i]);
        if (v != 0 && v != 1)
            throw std::runtime_error("non-binary mask value in " + path);
        m.masks[i] = v;
    }
    m.count_before_normalization = m.nc;
    return m;
}

} // namespace sptir
