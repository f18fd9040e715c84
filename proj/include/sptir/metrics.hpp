#pragma once

#include <functional>

#include "sptir/data.hpp"

namespace sptir {

// BT.601 studio-swing luma on the 0-255 scale from [0,1] RGB.
Tensor<float> rgb_to_y(const Tensor<float>& img);

enum class MetricMode { kYChannel, kRgb };

inline MetricMode metric_mode_for(Task task) {
    return task == Task::kSr ? MetricMode::kYChannel : MetricMode::kRgb;
}

// 8-bit-quantized PSNR (peak 255). Identical images return +inf. The
// float-domain variant (quantize=false) is not comparable with benchmark
// numbers and is only exposed behind the eval --float-psnr flag.
double psnr(const Tensor<float>& a, const Tensor<float>& b, MetricMode mode, bool quantize = true);

// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5) on the quantized
// 0-255 scale. Y plane for kYChannel, per-channel mean for kRgb.
double ssim(const Tensor<float>& a, const Tensor<float>& b, MetricMode mode);

struct EvalRow {
    std::string method;
    Task task = Task::kSr;
    double param = 0.0; // r for SR, sigma for denoising
    std::string dataset;
    int n_images = 0;
    double psnr_db = 0.0;
    double ssim_v = 0.0;
    bool has_ssim = true;
    double delta_db = 0.0;
    bool has_delta = false;
    std::string source = "measured"; // or "paper-reported"
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string border_crop = "none"; // no boundary shaving before metrics
};

using ModelFn = std::function<Tensor<float>(const DatasetPair&)>;

// Per-image metrics averaged over the dataset; delta columns against the
// baseline when one is given; paper-reported reference rows appended for
// context.
EvalReport evaluate(const ModelFn& model, const std::string& method_name,
                    const std::vector<DatasetPair>& data, const std::string& dataset_name,
                    const ModelFn* baseline = nullptr,
                    const std::string& baseline_name = "baseline");

std::vector<EvalRow> paper_reference_rows(Task task, double param);

std::string report_csv(const EvalReport& report);
std::string report_markdown(const EvalReport& report);
std::string report_text(const EvalReport& report);

struct AblationRow {
    std::string label;
    double psnr_db = 0.0;
    double delta_db = 0.0;
};

std::string ablation_markdown(const std::string& sweep, const std::vector<AblationRow>& rows,
                              const std::vector<std::string>& notes);
std::string ablation_csv(const std::string& sweep, const std::vector<AblationRow>& rows);

} // namespace sptir
