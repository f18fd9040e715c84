#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sptir/mask_prior.hpp"

using namespace sptir;

namespace {

LabelMap uniform_map(int h, int w) {
    LabelMap lm;
    lm.h = h;
    lm.w = w;
    lm.labels.assign(static_cast<std::size_t>(h) * w, 0);
    return lm;
}

LabelMap halves_map(int h, int w) {
    LabelMap lm = uniform_map(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = w / 2; x < w; ++x) lm.at(y, x) = 1;
    return lm;
}

LabelMap random_map(int h, int w, int regions, std::uint64_t seed) {
    // random rectangle stamps, then compaction to scan-order ids
    LabelMap lm = uniform_map(h, w);
    Rng rng(seed);
    for (int k = 1; k < regions; ++k) {
        const int y0 = static_cast<int>(rng.uniform_int(h - 2));
        const int x0 = static_cast<int>(rng.uniform_int(w - 2));
        const int bh = 1 + static_cast<int>(rng.uniform_int(h - y0 - 1));
        const int bw = 1 + static_cast<int>(rng.uniform_int(w - x0 - 1));
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) lm.at(y, x) = k;
    }
    std::map<std::int32_t, std::int32_t> remap;
    std::int32_t next = 0;
    for (auto& v : lm.labels) {
        auto it = remap.find(v);
        if (it == remap.end()) it = remap.emplace(v, next++).first;
        v = it->second;
    }
    return lm;
}

} // namespace

TEST_CASE("grid prompting: single region gives one full mask") {
    const auto lm = uniform_map(16, 16);
    const auto masks = grid_prompt_masks(lm, 8);
    REQUIRE(masks.size() == 1);
    for (auto v : masks[0]) CHECK(v == 1);
}

TEST_CASE("grid prompting: left/right halves partition under an 8x8 grid") {
    const auto lm = halves_map(32, 32);
    const auto masks = grid_prompt_masks(lm, 8);
    REQUIRE(masks.size() == 2);
    // enumerate the 64 grid points: x = (j+0.5)*32/8 in {2,6,...,30};
    // points with x < 16 hit region 0 first (row-major scan), so mask 0 is the left half
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            CHECK(masks[0][static_cast<std::size_t>(y) * 32 + x] == (x < 16 ? 1 : 0));
            CHECK(masks[1][static_cast<std::size_t>(y) * 32 + x] == (x < 16 ? 0 : 1));
        }
}

TEST_CASE("grid prompting: masks disjoint, contain a grid point, bounded count") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto lm = random_map(24, 20, 6, seed);
        for (int g : {1, 2, 4, 8}) {
            const auto masks = grid_prompt_masks(lm, g);
            CHECK(masks.size() <=
                  static_cast<std::size_t>(std::min<int>(g * g, lm.num_regions())));
            std::vector<int> cover(lm.labels.size(), 0);
            for (const auto& m : masks) {
                bool contains_point = false;
                for (int i = 0; i < g; ++i)
                    for (int j = 0; j < g; ++j) {
                        const int y = static_cast<int>((i + 0.5) * lm.h / g);
                        const int x = static_cast<int>((j + 0.5) * lm.w / g);
                        if (m[static_cast<std::size_t>(y) * lm.w + x]) contains_point = true;
                    }
                CHECK(contains_point);
                for (std::size_t i = 0; i < m.size(); ++i) cover[i] += m[i];
            }
            for (auto c : cover) CHECK(c <= 1); // pairwise disjoint
        }
    }
}

TEST_CASE("grid prompting: nested grids are monotone in mask count") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto lm = random_map(48, 48, 9, seed + 100);
        // (g, 3g) grids are nested: (i+0.5)/g == (3i+1.5)/(3g)
        for (int g : {2, 4, 8}) {
            CHECK(grid_prompt_masks(lm, g).size() <= grid_prompt_masks(lm, 3 * g).size());
        }
    }
}

TEST_CASE("normalize_mask_count pads and truncates to exactly N_c") {
    const int h = 4, w = 4;
    auto make_masks = [&](int count) {
        std::vector<std::vector<std::uint8_t>> ms;
        for (int i = 0; i < count; ++i)
            ms.emplace_back(static_cast<std::size_t>(h) * w, static_cast<std::uint8_t>(1));
        return ms;
    };
    for (int count : {0, 1, 63, 64, 65, 256}) {
        const auto st = normalize_mask_count(make_masks(count), 64, h, w);
        CHECK(st.nc == 64);
        CHECK(st.masks.size() == static_cast<std::size_t>(64) * h * w);
        CHECK(st.count_before_normalization == count);
        // padded channels are all-zero
        for (int c = count; c < 64; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) CHECK(st.at(c, y, x) == 0);
        // kept channels preserved in emission order
        for (int c = 0; c < std::min(count, 64); ++c) CHECK(st.at(c, 0, 0) == 1);
    }

    // 40 masks with N_c=64: last 24 channels all zero
    const auto st40 = normalize_mask_count(make_masks(40), 64, h, w);
    for (int c = 40; c < 64; ++c) CHECK(st40.at(c, 2, 2) == 0);

    CHECK_THROWS_AS(normalize_mask_count(make_masks(1), 0, h, w), std::invalid_argument);
}

TEST_CASE("oracle_segment: constant, halves, determinism") {
    Tensor<float> flat({3, 8, 8}, 0.4f);
    CHECK(oracle_segment(flat).num_regions() == 1);

    Tensor<float> halves({3, 8, 8}, 0.1f);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 4; x < 8; ++x) halves[(c * 8 + y) * 8 + x] = 0.9f;
    const auto lm = oracle_segment(halves);
    CHECK(lm.num_regions() == 2);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(lm.at(y, x) == (x < 4 ? 0 : 1));

    const auto img = Tensor<float>::seeded_uniform({3, 12, 12}, 5, 0.0f, 1.0f);
    CHECK(oracle_segment(img).labels == oracle_segment(img).labels);
}

TEST_CASE("prior_encode: shape contract, zero-mask degeneracy, composition oracle") {
    ParamSet<float> ps;
    Rng rng(9);
    const int nc = 64;
    auto enc = make_f_block(ps, "spt.prior_enc", 3 + nc, 8, 8, 3, rng);

    auto lq = Value<float>::leaf(Tensor<float>::seeded_uniform({1, 3, 6, 6}, 10, 0.0f, 1.0f));
    MaskStack st;
    st.nc = nc;
    st.h = 6;
    st.w = 6;
    st.masks.assign(static_cast<std::size_t>(nc) * 36, 0);
    for (std::size_t i = 0; i < 36; ++i) st.masks[i] = 1; // one real mask channel
    auto masks = Value<float>::leaf(st.as_batched_tensor<float>(1));

    auto prior = prior_encode(lq, masks, enc);
    CHECK(prior.p.shape() == std::vector<std::int64_t>{1, 8, 6, 6});

    // equals concat -> conv -> relu -> conv straight-line composition
    const auto want = oracle::f_block_ref(
        oracle::concat_ref<float>({lq.tensor(), masks.tensor()}), enc.conv1.weight.tensor(),
        enc.conv1.bias.tensor(), enc.conv2.weight.tensor(), enc.conv2.bias.tensor());
    for (std::size_t i = 0; i < want.data.size(); ++i)
        CHECK(std::abs(prior.p.tensor().data[i] - want.data[i]) < 1e-5);

    // all-zero mask stack equals f([I_LQ, 0])
    MaskStack zero = st;
    std::fill(zero.masks.begin(), zero.masks.end(), std::uint8_t(0));
    auto masks0 = Value<float>::leaf(zero.as_batched_tensor<float>(1));
    auto z = Value<float>::leaf(Tensor<float>::zeros({1, nc, 6, 6}));
    auto direct = f_block(concat_channels<float>({lq, z}), enc);
    CHECK(prior_encode(lq, masks0, enc).p.tensor().data == direct.tensor().data);

    // spatial mismatch rejected
    auto bad = Value<float>::leaf(Tensor<float>::zeros({1, nc, 5, 6}));
    CHECK_THROWS_AS(prior_encode(lq, bad, enc), std::invalid_argument);
}

TEST_CASE("prior_encode: gradient reaches the image but not the mask constant") {
    ParamSet<double> ps;
    Rng rng(11);
    auto enc = make_f_block(ps, "spt.prior_enc", 3 + 4, 6, 6, 3, rng);
    auto lq = Value<double>::leaf(Tensor<double>::seeded_uniform({1, 3, 5, 5}, 12, 0.0, 1.0), true);
    auto masks = Value<double>::leaf(Tensor<double>::seeded_uniform({1, 4, 5, 5}, 13, 0.0, 1.0));
    auto prior = prior_encode(lq, masks, enc);
    backward(sum(prior.p));
    CHECK(lq.has_grad());
    CHECK(!masks.has_grad());
}

TEST_CASE("mask file round trip and validation") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "sptir_test_masks";
    fs::create_directories(dir);
    const auto path = (dir / "m.sptm").string();

    MaskStack st;
    st.nc = 3;
    st.h = 4;
    st.w = 5;
    st.masks.assign(60, 0);
    Rng rng(14);
    for (auto& v : st.masks) v = rng.uniform() < 0.5 ? 1 : 0;
    save_masks(path, st);
    const auto back = load_masks(path);
    CHECK(back.nc == 3);
    CHECK(back.h == 4);
    CHECK(back.w == 5);
    CHECK(back.masks == st.masks);

    // non-binary byte rejected
    std::string bytes = read_file(path);
    bytes[bytes.size() - 1] = 0x05;
    write_file(path, bytes);
    CHECK_THROWS_AS(load_masks(path), std::runtime_error);

    // channel count not matching the header rejected
    save_masks(path, st);
    bytes = read_file(path);
    bytes.resize(bytes.size() - st.h * st.w); // drop one channel of data
    write_file(path, bytes);
    CHECK_THROWS_AS(load_masks(path), std::runtime_error);

    // in-memory validation on save
    MaskStack badv = st;
    badv.masks[0] = 2;
    CHECK_THROWS_AS(save_masks(path, badv), std::invalid_argument);
}
