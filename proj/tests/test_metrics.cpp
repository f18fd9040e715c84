#include <doctest.h>

#include "oracles.hpp"
#include "sptir/metrics.hpp"

using namespace sptir;

TEST_CASE("rgb_to_y: endpoints and closed-form values") {
    Tensor<float> black({3, 2, 2}, 0.0f);
    const auto yb = rgb_to_y(black);
    for (auto v : yb.data) CHECK(v == 16.0f);

    Tensor<float> white({3, 2, 2}, 1.0f);
    const auto yw = rgb_to_y(white);
    for (auto v : yw.data) CHECK(v == 235.0f); // 16 + 219

    Tensor<float> gray({3, 2, 2}, 0.5f);
    const auto yg = rgb_to_y(gray);
    for (auto v : yg.data) CHECK(v == doctest::Approx(125.5).epsilon(1e-7));

    Tensor<float> two({2, 2, 2}, 0.0f);
    CHECK_THROWS_AS(rgb_to_y(two), std::invalid_argument);
}

TEST_CASE("rgb_to_y bounded in [16, 235] for inputs in [0,1]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto img = Tensor<float>::seeded_uniform({3, 6, 6}, seed, 0.0f, 1.0f);
        const auto y = rgb_to_y(img);
        for (auto v : y.data) {
            CHECK(v >= 16.0f);
            CHECK(v <= 235.0f);
        }
    }
}

TEST_CASE("psnr: closed-form uniform difference and infinity sentinel") {
    Tensor<float> a({3, 8, 8}, 100.0f / 255.0f);
    Tensor<float> b({3, 8, 8}, 110.0f / 255.0f);
    // quantized difference of 10 per pixel: 10*log10(65025/100) = 28.1308
    CHECK(psnr(a, b, MetricMode::kRgb) == doctest::Approx(28.130803).epsilon(1e-6));

    CHECK(std::isinf(psnr(a, a, MetricMode::kRgb)));
    CHECK(std::isinf(psnr(a, a, MetricMode::kYChannel)));

    Tensor<float> c({3, 8, 9}, 0.0f);
    CHECK_THROWS_AS(psnr(a, c, MetricMode::kRgb), std::invalid_argument);
}

TEST_CASE("psnr matches the reference implementation within 1e-4 dB on 20 random pairs") {
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto a = Tensor<float>::seeded_uniform({3, 12, 14}, 2 * i, 0.0f, 1.0f);
        auto b = a;
        Rng rng(1000 + i);
        for (auto& v : b.data) v = static_cast<float>(v + 0.05 * rng.normal());
        CHECK(psnr(a, b, MetricMode::kRgb) ==
              doctest::Approx(oracle::psnr_ref(a, b, false)).epsilon(1e-9));
        CHECK(std::abs(psnr(a, b, MetricMode::kYChannel) - oracle::psnr_ref(a, b, true)) < 1e-4);
    }
}

TEST_CASE("psnr strictly decreases as noise grows") {
    const auto img = Tensor<float>::seeded_uniform({3, 16, 16}, 7, 0.2f, 0.8f);
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {5.0, 10.0, 20.0}) {
        auto noisy = add_gaussian_noise(img, sigma, 99);
        const double p = psnr(img, noisy, MetricMode::kRgb);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("ssim: self-similarity, symmetry, reference agreement") {
    const auto a = Tensor<float>::seeded_uniform({3, 16, 18}, 20, 0.0f, 1.0f);
    CHECK(ssim(a, a, MetricMode::kRgb) == doctest::Approx(1.0).epsilon(1e-9));

    auto b = a;
    Rng rng(21);
    for (auto& v : b.data) v = static_cast<float>(v + 0.08 * rng.normal());
    CHECK(ssim(a, b, MetricMode::kRgb) == doctest::Approx(ssim(b, a, MetricMode::kRgb)).epsilon(1e-12));
    CHECK(ssim(a, b, MetricMode::kRgb) < 1.0);

    // against the direct per-window reference
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto x = Tensor<float>::seeded_uniform({3, 13, 15}, 30 + i, 0.0f, 1.0f);
        auto y = x;
        Rng r2(60 + i);
        for (auto& v : y.data) v = static_cast<float>(v + 0.06 * r2.normal());
        // reference on the quantized Y plane
        const std::int64_t hw = 13 * 15;
        auto q8 = [](float v) {
            const double q = std::nearbyint(static_cast<double>(v) * 255.0);
            return q < 0.0 ? 0.0 : (q > 255.0 ? 255.0 : q);
        };
        std::vector<double> ya(static_cast<std::size_t>(hw)), yb2(static_cast<std::size_t>(hw));
        for (std::int64_t k = 0; k < hw; ++k) {
            ya[static_cast<std::size_t>(k)] = 16.0 + (65.481 * q8(x[k]) + 128.553 * q8(x[hw + k]) +
                                                      24.966 * q8(x[2 * hw + k])) / 255.0;
            yb2[static_cast<std::size_t>(k)] = 16.0 + (65.481 * q8(y[k]) + 128.553 * q8(y[hw + k]) +
                                                       24.966 * q8(y[2 * hw + k])) / 255.0;
        }
        const double want = oracle::ssim_ref_plane(ya, yb2, 13, 15);
        CHECK(ssim(x, y, MetricMode::kYChannel) == doctest::Approx(want).epsilon(1e-6));
    }

    Tensor<float> small({3, 8, 8}, 0.5f);
    CHECK_THROWS_AS(ssim(small, small, MetricMode::kRgb), std::invalid_argument);
}

TEST_CASE("evaluate: self-delta zero, dataset average, paper rows attached") {
    DataConfig cfg;
    cfg.task = Task::kDenoise;
    cfg.r = 1;
    cfg.sigma = 25.0;
    cfg.n = 3;
    cfg.height = 24;
    cfg.width = 24;
    cfg.k_shapes = 2;
    cfg.grid = 4;
    cfg.nc = 8;
    cfg.seed = 40;
    const auto data = make_dataset(cfg);

    ModelFn identity = [](const DatasetPair& p) { return p.lq; };
    const auto report = evaluate(identity, "identity", data, "synthetic-val", &identity, "identity-base");

    REQUIRE(report.rows.size() >= 2);
    CHECK(report.rows[0].method == "identity-base");
    CHECK(report.rows[0].delta_db == 0.0); // self-delta exactly zero
    CHECK(report.rows[1].delta_db == 0.0); // same model as baseline
    CHECK(report.rows[0].n_images == 3);

    // dataset average equals the arithmetic mean of per-image psnr
    double acc = 0.0;
    for (const auto& p : data) acc += psnr(p.lq, p.gt, MetricMode::kRgb);
    CHECK(report.rows[0].psnr_db == doctest::Approx(acc / 3.0).epsilon(1e-12));

    // paper-reported context rows for sigma = 25 include the +0.0642 average
    bool found_avg = false;
    for (const auto& row : report.rows)
        if (row.source == "paper-reported" && row.dataset == "Average")
            found_avg = row.delta_db == doctest::Approx(0.0642);
    CHECK(found_avg);

    // csv layout
    const std::string csv = report_csv(report);
    CHECK(csv.rfind("method,task,param,dataset,n_images,psnr_db,ssim,delta_db,source\n", 0) == 0);
    CHECK(csv.find("paper-reported") != std::string::npos);
    CHECK(report_markdown(report).find("| identity |") != std::string::npos);
    CHECK(report_text(report).find("identity") != std::string::npos);
}

TEST_CASE("paper reference rows cover the documented anchors") {
    const auto sr4 = paper_reference_rows(Task::kSr, 4);
    bool urban = false;
    for (const auto& r : sr4)
        if (r.dataset == "Urban100")
            urban = r.psnr_db == doctest::Approx(27.7747) && r.delta_db == doctest::Approx(0.3970);
    CHECK(urban);
    CHECK(paper_reference_rows(Task::kSr, 2).size() == 6);
    CHECK(paper_reference_rows(Task::kDenoise, 25).size() == 5);
    CHECK(paper_reference_rows(Task::kDenoise, 99).empty());
}

TEST_CASE("float-domain psnr is available and differs from the quantized one") {
    const auto a = Tensor<float>::seeded_uniform({3, 8, 8}, 50, 0.0f, 1.0f);
    auto b = a;
    for (auto& v : b.data) v += 0.001f; // below the quantization step for many pixels
    const double q = psnr(a, b, MetricMode::kRgb, true);
    const double f = psnr(a, b, MetricMode::kRgb, false);
    CHECK(std::isfinite(f));
    CHECK(q != doctest::Approx(f).epsilon(1e-3));
}

TEST_CASE("ablation table layouts") {
    std::vector<AblationRow> rows = {{"alpha=0.5", 30.1, 0.10}, {"alpha=1", 30.3, 0.30}};
    const auto md = ablation_markdown("alpha", rows, {"sample note"});
    CHECK(md.find("Impact of different alpha values") != std::string::npos);
    CHECK(md.find("| alpha=1 | 30.3000 (+0.3000) |") != std::string::npos);
    CHECK(md.find("note: sample note") != std::string::npos);
    const auto csv = ablation_csv("alpha", rows);
    CHECK(csv.rfind("sweep,label,psnr_db,delta_db\n", 0) == 0);
    CHECK_THROWS_AS(ablation_markdown("bogus", rows, {}), std::invalid_argument);
}
