#include <doctest.h>

#include "oracles.hpp"
#include "sptir/io.hpp"
#include "sptir/nn.hpp"

#include <filesystem>

using namespace sptir;

namespace {

template <class T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i])));
    return m;
}

} // namespace

TEST_CASE("conv2d: identity 1x1 kernel") {
    ParamSet<float> ps;
    Rng rng(1);
    auto p = make_conv(ps, "c", 1, 1, 1, rng);
    p.weight.tensor_mut()[0] = 1.0f;
    auto x = Value<float>::leaf(Tensor<float>::seeded_uniform({1, 1, 5, 5}, 2, -1.0f, 1.0f));
    CHECK(conv2d(x, p).tensor().data == x.tensor().data);
}

TEST_CASE("conv2d: zero weight gives constant bias") {
    ParamSet<float> ps;
    Rng rng(1);
    auto p = make_conv(ps, "c", 2, 3, 3, rng);
    std::fill(p.weight.tensor_mut().data.begin(), p.weight.tensor_mut().data.end(), 0.0f);
    p.bias.tensor_mut().data = {0.5f, -1.0f, 2.0f};
    auto x = Value<float>::leaf(Tensor<float>::seeded_uniform({2, 2, 4, 4}, 3, -1.0f, 1.0f));
    auto y = conv2d(x, p).tensor();
    for (std::int64_t n = 0; n < 2; ++n)
        for (std::int64_t c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < 16; ++i)
                CHECK(y[(n * 3 + c) * 16 + i] == p.bias.tensor()[c]);
}

TEST_CASE("conv2d: channel mismatch rejected") {
    ParamSet<float> ps;
    Rng rng(1);
    auto p = make_conv(ps, "c", 4, 2, 3, rng);
    auto x = Value<float>::leaf(Tensor<float>({1, 3, 4, 4}, 0.0f));
    CHECK_THROWS_AS(conv2d(x, p), std::invalid_argument);
}

TEST_CASE("conv2d matches the nested-loop oracle on >= 50 randomized cases") {
    int case_id = 0;
    for (int k : {1, 3, 5}) {
        for (int rep = 0; rep < 17; ++rep) {
            Rng shape_rng(derive_seed(100, "case", static_cast<std::uint64_t>(case_id)));
            const int n = 1 + static_cast<int>(shape_rng.uniform_int(2));
            const int cin = 1 + static_cast<int>(shape_rng.uniform_int(3));
            const int cout = 1 + static_cast<int>(shape_rng.uniform_int(3));
            const int h = k + static_cast<int>(shape_rng.uniform_int(6));
            const int w = k + static_cast<int>(shape_rng.uniform_int(6));
            ParamSet<float> ps;
            Rng rng(derive_seed(101, "init", static_cast<std::uint64_t>(case_id)));
            auto p = make_conv(ps, "c", cin, cout, k, rng);
            auto x = Value<float>::leaf(Tensor<float>::seeded_uniform(
                {n, cin, h, w}, derive_seed(102, "x", static_cast<std::uint64_t>(case_id)), -0.5f,
                0.5f));
            const auto got = conv2d(x, p).tensor();
            const auto want = oracle::conv_ref(x.tensor(), p.weight.tensor(), p.bias.tensor());
            CHECK(max_abs_diff(got, want) < 1e-6);
            ++case_id;
        }
    }
    CHECK(case_id >= 50);
}

TEST_CASE("conv2d gradients pass the finite-difference check") {
    ParamSet<double> ps;
    Rng rng(7);
    auto p = make_conv(ps, "c", 2, 3, 3, rng);
    const auto x0 = Tensor<double>::seeded_uniform({1, 2, 5, 5}, 8, -1.0, 1.0);

    const double ex = grad_check(
        [&](const Value<double>& x) {
            return sum(mul(conv2d(x, p), Value<double>::leaf(Tensor<double>::seeded_uniform(
                                             {1, 3, 5, 5}, 9, -1.0, 1.0))));
        },
        x0);
    CHECK(ex < 1e-6);

    // wrt weight and bias: rebind the parameter as the checked input
    const double ew = grad_check(
        [&](const Value<double>& w) {
            ParamSet<double> ps2;
            ConvParams<double> p2;
            p2.cin = 2;
            p2.cout = 3;
            p2.k = 3;
            p2.weight = w;
            p2.bias = Value<double>::leaf(p.bias.tensor());
            return sum(mul(conv2d(Value<double>::leaf(x0), p2),
                           Value<double>::leaf(
                               Tensor<double>::seeded_uniform({1, 3, 5, 5}, 9, -1.0, 1.0))));
        },
        p.weight.tensor());
    CHECK(ew < 1e-6);

    const double eb = grad_check(
        [&](const Value<double>& b) {
            ConvParams<double> p2;
            p2.cin = 2;
            p2.cout = 3;
            p2.k = 3;
            p2.weight = Value<double>::leaf(p.weight.tensor());
            p2.bias = b;
            return sum(mul(conv2d(Value<double>::leaf(x0), p2),
                           Value<double>::leaf(
                               Tensor<double>::seeded_uniform({1, 3, 5, 5}, 9, -1.0, 1.0))));
        },
        p.bias.tensor());
    CHECK(eb < 1e-6);
}

TEST_CASE("relu definition and gradient mask") {
    auto x = Value<double>::leaf(Tensor<double>({3}, {-1.0, 0.0, 2.0}));
    CHECK(relu(x).tensor().data == std::vector<double>{0.0, 0.0, 2.0});

    auto nn = Value<double>::leaf(Tensor<double>({3}, {0.5, 0.0, 7.0}));
    CHECK(relu(nn).tensor().data == nn.tensor().data);

    // finite differences away from the kink (|x| > 1e-3)
    Tensor<double> far({8});
    Rng rng(31);
    for (auto& v : far.data) {
        do {
            v = rng.uniform(-1.0, 1.0);
        } while (std::abs(v) <= 1e-3);
    }
    const double err = grad_check(
        [](const Value<double>& v) {
            return sum(mul(relu(v), Value<double>::leaf(Tensor<double>::seeded_uniform({8}, 32,
                                                                                       -1.0, 1.0))));
        },
        far);
    CHECK(err < 1e-6);
}

TEST_CASE("pixel_shuffle: r=1 identity, r=2 index formula, permutation property") {
    auto x = Value<float>::leaf(Tensor<float>::seeded_uniform({1, 4, 2, 2}, 40, -1.0f, 1.0f));
    CHECK(pixel_shuffle(x, 1).tensor().data == x.tensor().data);

    // enumerate all 16 indices of the r=2 formula by hand:
    // out[0, 0, y, x] = in[0, 2*(y%2) + (x%2), y/2, x/2]
    const auto out = pixel_shuffle(x, 2).tensor();
    CHECK(out.shape == std::vector<std::int64_t>{1, 1, 4, 4});
    const auto& in = x.tensor();
    for (int y = 0; y < 4; ++y)
        for (int xx = 0; xx < 4; ++xx) {
            const int ci = 2 * (y % 2) + (xx % 2);
            CHECK(out[y * 4 + xx] == in[(ci * 2 + y / 2) * 2 + xx / 2]);
        }

    // multiset of values preserved
    auto a = in.data;
    auto b = out.data;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);

    CHECK_THROWS_AS(pixel_shuffle(x, 3), std::invalid_argument); // 4 % 9 != 0
}

TEST_CASE("pixel_shuffle: inverse shuffle restores the input") {
    const auto in = Tensor<float>::seeded_uniform({2, 12, 3, 5}, 41, -1.0f, 1.0f);
    const auto out = pixel_shuffle(Value<float>::leaf(in), 2).tensor();
    Tensor<float> back(in.shape);
    for (std::int64_t n = 0; n < 2; ++n)
        for (std::int64_t c = 0; c < 3; ++c)
            for (std::int64_t y = 0; y < 6; ++y)
                for (std::int64_t xx = 0; xx < 10; ++xx) {
                    const std::int64_t ci = c * 4 + 2 * (y % 2) + (xx % 2);
                    back[((n * 12 + ci) * 3 + y / 2) * 5 + xx / 2] =
                        out[((n * 3 + c) * 6 + y) * 10 + xx];
                }
    CHECK(back.data == in.data);

    const double err = grad_check(
        [](const Value<double>& v) {
            return sum(mul(pixel_shuffle(v, 2),
                           Value<double>::leaf(
                               Tensor<double>::seeded_uniform({1, 1, 6, 6}, 42, -1.0, 1.0))));
        },
        Tensor<double>::seeded_uniform({1, 4, 3, 3}, 43, -1.0, 1.0));
    CHECK(err < 1e-7);
}

TEST_CASE("f_block: zero second conv, composition oracle, channel contract") {
    ParamSet<float> ps;
    Rng rng(50);
    auto f = make_f_block(ps, "f", 3, 5, 4, 3, rng);

    auto x = Value<float>::leaf(Tensor<float>::seeded_uniform({1, 3, 6, 6}, 51, -1.0f, 1.0f));

    // zero second conv weight -> constant output at its bias
    auto f0 = f;
    ParamSet<float> ps2;
    Rng rng2(50);
    auto fz = make_f_block(ps2, "f", 3, 5, 4, 3, rng2);
    std::fill(fz.conv2.weight.tensor_mut().data.begin(), fz.conv2.weight.tensor_mut().data.end(),
              0.0f);
    fz.conv2.bias.tensor_mut().data = {1.0f, 2.0f, 3.0f, 4.0f};
    const auto yz = f_block(x, fz).tensor();
    for (std::int64_t c = 0; c < 4; ++c)
        for (std::int64_t i = 0; i < 36; ++i) CHECK(yz[c * 36 + i] == fz.conv2.bias.tensor()[c]);

    // equals manual conv-relu-conv composition
    const auto got = f_block(x, f).tensor();
    const auto want = oracle::f_block_ref(x.tensor(), f.conv1.weight.tensor(), f.conv1.bias.tensor(),
                                          f.conv2.weight.tensor(), f.conv2.bias.tensor());
    CHECK(max_abs_diff(got, want) < 1e-6);
    CHECK(got.dim(1) == 4);
}

TEST_CASE("init: determinism, zero biases, weight variance") {
    ParamSet<float> a, b;
    Rng ra(60), rb(60);
    auto ca = make_conv(a, "c", 8, 8, 3, ra);
    auto cb = make_conv(b, "c", 8, 8, 3, rb);
    CHECK(ca.weight.tensor().data == cb.weight.tensor().data); // bitwise

    for (auto v : ca.bias.tensor().data) CHECK(v == 0.0f);

    // fan-in uniform: empirical variance within 10% of a^2/3 over >= 1e4 draws
    ParamSet<float> big;
    Rng rbig(61);
    auto cbig = make_conv(big, "c", 32, 40, 3, rbig); // 40*32*9 = 11520 samples
    const double bound = std::sqrt(6.0 / (32 * 9));
    double mean = 0.0, var = 0.0;
    for (auto v : cbig.weight.tensor().data) mean += v;
    mean /= static_cast<double>(cbig.weight.tensor().numel());
    for (auto v : cbig.weight.tensor().data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(cbig.weight.tensor().numel());
    const double expected = bound * bound / 3.0;
    CHECK(var > 0.9 * expected);
    CHECK(var < 1.1 * expected);
}

TEST_CASE("set_trainable patterns and freeze behavior") {
    ParamSet<float> ps;
    Rng rng(70);
    make_conv(ps, "backbone.enc", 3, 4, 3, rng);
    make_conv(ps, "spt.unit1.enh", 4, 4, 3, rng);

    CHECK_THROWS_AS(ps.set_trainable("nonexistent.*", false), std::invalid_argument);

    CHECK(ps.set_trainable("backbone.*", false) == 2);
    CHECK(!ps.at("backbone.enc.weight").trainable);
    CHECK(!ps.at("backbone.enc.weight").param.requires_grad());
    CHECK(ps.at("spt.unit1.enh.weight").trainable);

    CHECK(ps.set_trainable("spt.*", true) == 2);
    int trainable = 0;
    for (auto& e : ps.entries())
        if (e.trainable) ++trainable;
    CHECK(trainable == 2);
}

TEST_CASE("duplicate parameter registration rejected") {
    ParamSet<float> ps;
    ps.add("w", Tensor<float>({1}, 0.0f));
    CHECK_THROWS_AS(ps.add("w", Tensor<float>({1}, 0.0f)), std::invalid_argument);
}

TEST_CASE("checkpoint round-trips bitwise") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "sptir_test_ckpt";
    fs::create_directories(dir);
    const auto path = (dir / "model.ckpt").string();

    ParamSet<float> ps;
    Rng rng(80);
    make_conv(ps, "backbone.enc", 3, 4, 3, rng);
    make_f_block(ps, "spt.unit1.enh", 4, 4, 4, 3, rng);
    ps.set_trainable("backbone.*", false);

    Json meta;
    meta["kind"] = "test";
    save_checkpoint(path, ps, meta);

    ParamSet<float> ps2;
    Rng rng2(81); // different init; loading must overwrite it
    make_conv(ps2, "backbone.enc", 3, 4, 3, rng2);
    make_f_block(ps2, "spt.unit1.enh", 4, 4, 4, 3, rng2);
    const Json meta2 = load_checkpoint(path, ps2);
    CHECK(meta2.at("kind") == "test");
    for (std::size_t i = 0; i < ps.entries().size(); ++i) {
        CHECK(ps2.entries()[i].param.tensor().data == ps.entries()[i].param.tensor().data);
        CHECK(ps2.entries()[i].trainable == ps.entries()[i].trainable);
    }

    // corrupting the payload trips the hash check
    std::string bytes = read_file(path);
    bytes[bytes.size() - 3] ^= 0x40;
    const auto bad = (dir / "bad.ckpt").string();
    write_file(bad, bytes);
    ParamSet<float> ps3;
    Rng rng3(80);
    make_conv(ps3, "backbone.enc", 3, 4, 3, rng3);
    make_f_block(ps3, "spt.unit1.enh", 4, 4, 4, 3, rng3);
    CHECK_THROWS_AS(load_checkpoint(bad, ps3), std::runtime_error);
}

TEST_CASE("tensor file round-trips bitwise and validates dtype") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "sptir_test_tensor";
    fs::create_directories(dir);
    const auto path = (dir / "t.sptt").string();

    const auto t = Tensor<float>::seeded_uniform({2, 3, 4}, 90, -1.0f, 1.0f);
    save_tensor(path, t);
    const auto u = load_tensor<float>(path);
    CHECK(u.shape == t.shape);
    CHECK(u.data == t.data);
    CHECK_THROWS_AS(load_tensor<double>(path), std::runtime_error);

    const auto d = Tensor<double>::seeded_uniform({5}, 91, -1.0, 1.0);
    save_tensor(path, d);
    CHECK(load_tensor<double>(path).data == d.data);
}

TEST_CASE("glob matching") {
    CHECK(glob_match("backbone.*", "backbone.enc.weight"));
    CHECK(!glob_match("backbone.*", "spt.unit1.enh.weight"));
    CHECK(glob_match("*.bias", "backbone.enc.bias"));
    CHECK(glob_match("*", "anything"));
    CHECK(glob_match("spt.unit*.enh.*", "spt.unit12.enh.conv1.weight"));
    CHECK(!glob_match("spt.unit*.enh", "spt.unit12.enh.conv1.weight"));
}
