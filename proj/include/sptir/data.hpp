#pragma once

#include "sptir/common.hpp"
#include "sptir/io.hpp"
#include "sptir/mask_prior.hpp"

namespace sptir {

// Synthetic flat-color scene with exact ground-truth segmentation. Shape
// colors sit at distinct quantization-cell centers and the background
// gradient stays inside one cell, so oracle_segment recovers the labels
// bit-exactly on the clean image.
struct Scene {
    Tensor<float> hq; // [3,H,W] in [0,1]
    LabelMap labels;
    std::uint64_t seed = 0;
};

Scene make_scene(std::uint64_t seed, int h, int w, int k_shapes);

enum class ResizeDir { kDown, kUp };

// Separable 4-tap Keys cubic (a = -0.5), edge-clamped, centers aligned:
// src = (dst + 0.5) * scale - 0.5. Downscale requires divisible dims.
Tensor<float> bicubic_resize(const Tensor<float>& img, int r, ResizeDir dir);

// i.i.d. N(0, (sigma/255)^2) in [0,1] space, unclipped.
Tensor<float> add_gaussian_noise(const Tensor<float>& img, double sigma, std::uint64_t seed);

struct Degradation {
    Task task = Task::kSr;
    int r = 1;
    double sigma = 0.0;
};

struct DatasetPair {
    Tensor<float> lq, gt; // [3,h,w] / [3,r*h,r*w]
    MaskStack masks;      // at LQ resolution
    Degradation degradation;
};

struct DataConfig {
    Task task = Task::kSr;
    int r = 2;
    double sigma = 25.0;
    int n = 16;
    int height = 96, width = 96; // GT dimensions
    int k_shapes = 6;
    int grid = 8;
    int nc = 64;
    std::uint64_t seed = 0;

    void validate() const;
    Json to_json() const;
    static DataConfig from_json(const Json& j);
};

// Nearest-label downsampling with the bicubic center-alignment convention.
LabelMap downsample_labels(const LabelMap& lm, int r);

// Masks come from the generator's ground-truth labels (the trustworthy
// stand-in for a degradation-robust segmenter), prompted on the LQ grid.
DatasetPair make_pair(const Scene& scene, const DataConfig& cfg);
std::vector<DatasetPair> make_dataset(const DataConfig& cfg);

void write_dataset(const std::string& dir, const std::vector<DatasetPair>& pairs,
                   const DataConfig& cfg, bool export_ppm = false);
std::vector<DatasetPair> read_dataset(const std::string& dir);
DataConfig read_dataset_config(const std::string& dir);

// Aligned crop: LQ size x size at (oy, ox); GT (r*size) x (r*size) at the
// r-scaled offset; mask channels cropped identically to LQ.
DatasetPair crop_pair(const DatasetPair& pair, int oy, int ox, int size);
DatasetPair sample_patch(const DatasetPair& pair, int size, std::uint64_t seed);

enum class AugmentOp { kHflip, kRot90, kRot180, kRot270 };

DatasetPair augment(const DatasetPair& pair, AugmentOp op);

} // namespace sptir
