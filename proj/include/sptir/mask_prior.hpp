#pragma once

#include <cstdint>
#include <vector>

#include "sptir/io.hpp"
#include "sptir/nn.hpp"

namespace sptir {

// Full partition of an image into region ids 0..K-1. Stand-in for a
// segmentation model's view of a scene.
struct LabelMap {
    int h = 0, w = 0;
    std::vector<std::int32_t> labels; // row-major

    std::int32_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * w + x]; }
    std::int32_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * w + x]; }

    std::int32_t num_regions() const {
        std::int32_t m = -1;
        for (auto v : labels) m = std::max(m, v);
        return m + 1;
    }
};

// Fixed-channel stack of hard binary masks at image resolution.
struct MaskStack {
    int nc = 0, h = 0, w = 0;
    std::vector<std::uint8_t> masks; // [nc, h, w], values 0/1
    int count_before_normalization = 0;

    std::uint8_t at(int c, int y, int x) const {
        return masks[(static_cast<std::size_t>(c) * h + y) * w + x];
    }

    template <class T>
    Tensor<T> as_tensor() const {
        Tensor<T> t({nc, h, w});
        for (std::size_t i = 0; i < masks.size(); ++i) t.data[i] = static_cast<T>(masks[i]);
        return t;
    }

    // [N, nc, h, w] constant graph leaf replicated over the batch dimension
    template <class T>
    Tensor<T> as_batched_tensor(std::int64_t n) const {
        Tensor<T> t({n, nc, h, w});
        for (std::int64_t b = 0; b < n; ++b)
            for (std::size_t i = 0; i < masks.size(); ++i)
                t.data[static_cast<std::size_t>(b) * masks.size() + i] = static_cast<T>(masks[i]);
        return t;
    }
};

// Simulated grid prompting: g x g foreground points at the centers of a
// regular grid; each point emits the binary mask of its region. Duplicate
// regions are emitted once, ordered by first hit in row-major scan.
std::vector<std::vector<std::uint8_t>> grid_prompt_masks(const LabelMap& lm, int g);

// Zero-pad to exactly nc channels, or keep the first nc in emission order.
MaskStack normalize_mask_count(const std::vector<std::vector<std::uint8_t>>& masks, int nc, int h,
                               int w);

// Desk-scale segmenter: per-channel quantization to q_levels, then
// 4-connected component labeling of the quantized color field. Region ids
// follow first encounter in row-major scan order.
LabelMap oracle_segment(const Tensor<float>& img, int q_levels = 8);

// Prompt-grid granularity to mask budget: 8x8 -> 64 (Coarse),
// 16x16 -> 128 (Medium), 24x24 -> 256 (Fine).
inline int granularity_mask_count(int grid) {
    switch (grid) {
        case 8: return 64;
        case 16: return 128;
        case 24: return 256;
    }
    throw std::invalid_argument("granularity grids are 8, 16 or 24, got " + std::to_string(grid));
}

// "SPTM" file: magic, version u32, N_c u32, H u32, W u32, N_c*H*W bytes of {0,1}.
void save_masks(const std::string& path, const MaskStack& m);
MaskStack load_masks(const std::string& path);

template <class T>
struct PriorState {
    Value<T> p; // [N, C, H, W]
};

// Prior representation: channel-concatenate the LQ input with the mask
// stack and encode through f(.) to the backbone feature width.
template <class T>
PriorState<T> prior_encode(const Value<T>& lq, const Value<T>& masks, const FBlock<T>& enc) {
    const auto& ls = lq.tensor();
    const auto& ms = masks.tensor();
    if (ls.rank() != 4 || ms.rank() != 4 || ls.dim(0) != ms.dim(0) || ls.dim(2) != ms.dim(2) ||
        ls.dim(3) != ms.dim(3))
        throw std::invalid_argument("prior_encode: image/mask spatial mismatch " +
                                    shape_str(ls.shape) + " vs " + shape_str(ms.shape));
    return PriorState<T>{f_block(concat_channels<T>({lq, masks}), enc)};
}

} // namespace sptir
