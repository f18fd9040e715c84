#include "sptir/metrics.hpp"

#include <limits>

namespace sptir {

namespace {

// clamp(round(v*255), 0, 255) as float
std::vector<float> quantize8(const Tensor<float>& img) {
    std::vector<float> out(img.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double q = std::nearbyint(static_cast<double>(img.data[i]) * 255.0);
        out[i] = static_cast<float>(std::clamp(q, 0.0, 255.0));
    }
    return out;
}

// luma on the 0-255 scale from 0-255 RGB planes
std::vector<double> y_plane(const std::vector<float>& rgb255, std::int64_t hw) {
    std::vector<double> y(static_cast<std::size_t>(hw));
    for (std::int64_t i = 0; i < hw; ++i) {
        const double r = rgb255[static_cast<std::size_t>(i)] / 255.0;
        const double g = rgb255[static_cast<std::size_t>(hw + i)] / 255.0;
        const double b = rgb255[static_cast<std::size_t>(2 * hw + i)] / 255.0;
        y[static_cast<std::size_t>(i)] = 16.0 + 65.481 * r + 128.553 * g + 24.966 * b;
    }
    return y;
}

void check_pair(const Tensor<float>& a, const Tensor<float>& b) {
    if (a.rank() != 3 || a.dim(0) != 3)
        throw std::invalid_argument("metrics: images must be [3,H,W]");
    if (!a.same_shape(b)) throw std::invalid_argument("metrics: shape mismatch");
}

} // namespace

Tensor<float> rgb_to_y(const Tensor<float>& img) {
    if (img.rank() != 3 || img.dim(0) != 3)
        throw std::invalid_argument("rgb_to_y: image must be [3,H,W]");
    const std::int64_t hw = img.dim(1) * img.dim(2);
    Tensor<float> y({1, img.dim(1), img.dim(2)});
    for (std::int64_t i = 0; i < hw; ++i)
        y[i] = static_cast<float>(16.0 + 65.481 * static_cast<double>(img[i]) +
                                  128.553 * static_cast<double>(img[hw + i]) +
                                  24.966 * static_cast<double>(img[2 * hw + i]));
    return y;
}

double psnr(const Tensor<float>& a, const Tensor<float>& b, MetricMode mode, bool quantize) {
    check_pair(a, b);
    const std::int64_t hw = a.dim(1) * a.dim(2);
    std::vector<float> qa, qb;
    if (quantize) {
        qa = quantize8(a);
        qb = quantize8(b);
    } else {
        // float-domain variant: values scaled to 0-255 without rounding
        qa.resize(a.data.size());
        qb.resize(b.data.size());
        for (std::size_t i = 0; i < qa.size(); ++i) {
            qa[i] = a.data[i] * 255.0f;
            qb[i] = b.data[i] * 255.0f;
        }
    }
    double se = 0.0;
    std::int64_t n = 0;
    if (mode == MetricMode::kYChannel) {
        const auto ya = y_plane(qa, hw);
        const auto yb = y_plane(qb, hw);
        for (std::int64_t i = 0; i < hw; ++i) {
            const double d = ya[static_cast<std::size_t>(i)] - yb[static_cast<std::size_t>(i)];
            se += d * d;
        }
        n = hw;
    } else {
        for (std::size_t i = 0; i < qa.size(); ++i) {
            const double d = static_cast<double>(qa[i]) - static_cast<double>(qb[i]);
            se += d * d;
        }
        n = 3 * hw;
    }
    const double mse = se / static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

// normalized 1-D Gaussian taps; the 2-D window is their outer product
std::vector<double> ssim_kernel() {
    std::vector<double> g(kSsimWindow);
    double s = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - (kSsimWindow - 1) / 2.0;
        g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        s += g[static_cast<std::size_t>(i)];
    }
    for (auto& v : g) v /= s;
    return g;
}

// valid-mode separable filter: [h,w] -> [h-10, w-10]
std::vector<double> gauss_valid(const std::vector<double>& p, int h, int w) {
    const auto g = ssim_kernel();
    const int wo = w - kSsimWindow + 1, ho = h - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * wo);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kSsimWindow; ++k)
                acc += g[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(y) * w + x + k];
            tmp[static_cast<std::size_t>(y) * wo + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(ho) * wo);
    for (int y = 0; y < ho; ++y)
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kSsimWindow; ++k)
                acc += g[static_cast<std::size_t>(k)] * tmp[static_cast<std::size_t>(y + k) * wo + x];
            out[static_cast<std::size_t>(y) * wo + x] = acc;
        }
    return out;
}

double ssim_plane(const std::vector<double>& x, const std::vector<double>& y, int h, int w) {
    if (h < kSsimWindow || w < kSsimWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const std::size_t n = x.size();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mu_x = gauss_valid(x, h, w);
    const auto mu_y = gauss_valid(y, h, w);
    const auto e_xx = gauss_valid(xx, h, w);
    const auto e_yy = gauss_valid(yy, h, w);
    const auto e_xy = gauss_valid(xy, h, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double sxx = e_xx[i] - mu_x[i] * mu_x[i];
        const double syy = e_yy[i] - mu_y[i] * mu_y[i];
        const double sxy = e_xy[i] - mu_x[i] * mu_y[i];
        acc += ((2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * sxy + c2)) /
               ((mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (sxx + syy + c2));
    }
    return acc / static_cast<double>(mu_x.size());
}

} // namespace

double ssim(const Tensor<float>& a, const Tensor<float>& b, MetricMode mode) {
    check_pair(a, b);
    const int h = static_cast<int>(a.dim(1)), w = static_cast<int>(a.dim(2));
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    const auto qa = quantize8(a);
    const auto qb = quantize8(b);
    if (mode == MetricMode::kYChannel) return ssim_plane(y_plane(qa, hw), y_plane(qb, hw), h, w);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> pa(static_cast<std::size_t>(hw)), pb(static_cast<std::size_t>(hw));
        for (std::int64_t i = 0; i < hw; ++i) {
            pa[static_cast<std::size_t>(i)] = qa[static_cast<std::size_t>(c * hw + i)];
            pb[static_cast<std::size_t>(i)] = qb[static_cast<std::size_t>(c * hw + i)];
        }
        acc += ssim_plane(pa, pb, h, w);
    }
    return acc / 3.0;
}

EvalReport evaluate(const ModelFn& model, const std::string& method_name,
                    const std::vector<DatasetPair>& data, const std::string& dataset_name,
                    const ModelFn* baseline, const std::string& baseline_name) {
    if (data.empty()) throw std::invalid_argument("evaluate: dataset is empty");
    const Task task = data[0].degradation.task;
    const MetricMode mode = metric_mode_for(task);
    const double param =
        task == Task::kSr ? data[0].degradation.r : data[0].degradation.sigma;

    auto run = [&](const ModelFn& fn) {
        double psnr_acc = 0.0, ssim_acc = 0.0;
        for (const auto& pair : data) {
            Tensor<float> out = fn(pair);
            psnr_acc += psnr(out, pair.gt, mode);
            ssim_acc += ssim(out, pair.gt, mode);
        }
        const double n = static_cast<double>(data.size());
        return std::pair<double, double>(psnr_acc / n, ssim_acc / n);
    };

    EvalReport report;
    double base_psnr = 0.0;
    if (baseline) {
        auto [bp, bs] = run(*baseline);
        base_psnr = bp;
        EvalRow row;
        row.method = baseline_name;
        row.task = task;
        row.param = param;
        row.dataset = dataset_name;
        row.n_images = static_cast<int>(data.size());
        row.psnr_db = bp;
        row.ssim_v = bs;
        row.delta_db = 0.0; // against itself, exactly zero
        row.has_delta = true;
        report.rows.push_back(row);
    }
    auto [mp, ms] = run(model);
    EvalRow row;
    row.method = method_name;
    row.task = task;
    row.param = param;
    row.dataset = dataset_name;
    row.n_images = static_cast<int>(data.size());
    row.psnr_db = mp;
    row.ssim_v = ms;
    if (baseline) {
        row.delta_db = mp - base_psnr;
        row.has_delta = true;
    }
    report.rows.push_back(row);
    for (auto& ref : paper_reference_rows(task, param)) report.rows.push_back(ref);
    return report;
}

} // namespace sptir
