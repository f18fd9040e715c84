#include "sptir/data.hpp"

#include <deque>
#include <filesystem>
#include <set>

namespace fs = std::filesystem;

namespace sptir {

namespace {

constexpr int kQuantLevels = 8; // matches oracle_segment default

struct PixelSet {
    std::vector<std::int64_t> pixels; // y*w + x
};

bool pixels_connected(const std::vector<std::int64_t>& pixels, int h, int w) {
    if (pixels.empty()) return false;
    std::set<std::int64_t> todo(pixels.begin(), pixels.end());
    std::deque<std::int64_t> queue{pixels[0]};
    todo.erase(pixels[0]);
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::int64_t cur = queue.front();
        queue.pop_front();
        const int y = static_cast<int>(cur / w), x = static_cast<int>(cur % w);
        const int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
            const int ny = y + dy[d], nx = x + dx[d];
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            const std::int64_t ni = static_cast<std::int64_t>(ny) * w + nx;
            auto it = todo.find(ni);
            if (it != todo.end()) {
                todo.erase(it);
                queue.push_back(ni);
                ++reached;
            }
        }
    }
    return reached == pixels.size();
}

// candidate shape pixels; empty result means the sample is unusable
std::vector<std::int64_t> sample_shape_pixels(Rng& rng, int h, int w) {
    const int margin = 2;
    const double mind = std::min(h, w);
    std::vector<std::int64_t> px;
    const int kind = static_cast<int>(rng.uniform_int(3));
    if (kind == 0) { // axis-aligned rectangle
        const int bw = std::max(4, static_cast<int>(rng.uniform(0.10, 0.40) * mind));
        const int bh = std::max(4, static_cast<int>(rng.uniform(0.10, 0.40) * mind));
        if (w - 2 * margin - bw < 1 || h - 2 * margin - bh < 1) return px;
        const int x0 = margin + static_cast<int>(rng.uniform_int(w - 2 * margin - bw));
        const int y0 = margin + static_cast<int>(rng.uniform_int(h - 2 * margin - bh));
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) px.push_back(static_cast<std::int64_t>(y) * w + x);
    } else if (kind == 1) { // ellipse
        const double ra = rng.uniform(0.06, 0.22) * mind;
        const double rb = rng.uniform(0.06, 0.22) * mind;
        if (ra < 2.5 || rb < 2.5) return px;
        const double cx = rng.uniform(margin + ra + 1, w - margin - ra - 1);
        const double cy = rng.uniform(margin + rb + 1, h - margin - rb - 1);
        if (cx != std::clamp(cx, ra + margin, w - 1.0 - ra - margin)) return px;
        for (int y = margin; y < h - margin; ++y)
            for (int x = margin; x < w - margin; ++x) {
                const double u = (x - cx) / ra, v = (y - cy) / rb;
                if (u * u + v * v <= 1.0) px.push_back(static_cast<std::int64_t>(y) * w + x);
            }
    } else { // rotated band segment (stripe)
        const double cx = rng.uniform(0.25 * w, 0.75 * w);
        const double cy = rng.uniform(0.25 * h, 0.75 * h);
        const double theta = rng.uniform(0.0, 3.14159265358979323846);
        const double half_w = rng.uniform(2.5, 0.10 * mind + 2.5);
        const double half_l = rng.uniform(0.15 * mind, 0.42 * mind);
        const double dx = std::cos(theta), dy = std::sin(theta);
        for (int y = margin; y < h - margin; ++y)
            for (int x = margin; x < w - margin; ++x) {
                const double px_ = x - cx, py_ = y - cy;
                const double along = px_ * dx + py_ * dy;
                const double perp = -px_ * dy + py_ * dx;
                if (std::abs(along) <= half_l && std::abs(perp) <= half_w)
                    px.push_back(static_cast<std::int64_t>(y) * w + x);
            }
    }
    return px;
}

// distinct quantization cell triple, reproducibly
std::array<int, 3> sample_unused_cell(Rng& rng, std::set<std::array<int, 3>>& used) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::array<int, 3> cell = {static_cast<int>(rng.uniform_int(kQuantLevels)),
                                   static_cast<int>(rng.uniform_int(kQuantLevels)),
                                   static_cast<int>(rng.uniform_int(kQuantLevels))};
        if (used.insert(cell).second) return cell;
    }
    throw std::logic_error("cell palette exhausted");
}

} // namespace

Scene make_scene(std::uint64_t seed, int h, int w, int k_shapes) {
    if (h < 16 || w < 16) throw std::invalid_argument("make_scene: dimensions must be >= 16");
    if (k_shapes < 0) throw std::invalid_argument("make_scene: k_shapes must be >= 0");
    Rng rng(derive_seed(seed, "scene.render"));
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;

    std::set<std::array<int, 3>> used_cells;
    const auto bg_cell = sample_unused_cell(rng, used_cells);

    // background: gentle gradient confined to one quantization cell
    const double cell_w = 1.0 / kQuantLevels;
    double c0[3], c1[3];
    for (int c = 0; c < 3; ++c) {
        const double lo = bg_cell[static_cast<std::size_t>(c)] * cell_w;
        c0[c] = lo + rng.uniform(0.15, 0.45) * cell_w;
        c1[c] = lo + rng.uniform(0.55, 0.85) * cell_w;
    }
    const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double gx = std::cos(theta), gy = std::sin(theta);

    Scene scene;
    scene.seed = seed;
    scene.hq = Tensor<float>({3, h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double t =
                0.5 + 0.5 * ((x - 0.5 * w) / w * gx + (y - 0.5 * h) / h * gy);
            for (int c = 0; c < 3; ++c)
                scene.hq[static_cast<std::int64_t>(c) * hw + static_cast<std::int64_t>(y) * w + x] =
                    static_cast<float>(c0[c] + (c1[c] - c0[c]) * std::clamp(t, 0.0, 1.0));
        }

    std::vector<std::int32_t> occ(static_cast<std::size_t>(hw), 0); // 0 = background
    std::int32_t next_id = 1;
    for (int s = 0; s < k_shapes; ++s) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            auto px = sample_shape_pixels(rng, h, w);
            if (px.size() < 12) continue;
            bool clear = true;
            for (auto p : px) {
                // keep a 1px gap to other shapes so regions never touch
                const int y = static_cast<int>(p / w), x = static_cast<int>(p % w);
                for (int dy = -1; dy <= 1 && clear; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                        if (occ[static_cast<std::size_t>(ny) * w + nx] != 0) {
                            clear = false;
                            break;
                        }
                    }
                if (!clear) break;
            }
            if (!clear || !pixels_connected(px, h, w)) continue;
            const auto cell = sample_unused_cell(rng, used_cells);
            const std::int32_t id = next_id++;
            for (auto p : px) {
                occ[static_cast<std::size_t>(p)] = id;
                for (int c = 0; c < 3; ++c)
                    scene.hq[static_cast<std::int64_t>(c) * hw + p] =
                        static_cast<float>((cell[static_cast<std::size_t>(c)] + 0.5) * cell_w);
            }
            break;
        }
    }

    // drop shapes (most recent first) if they ever disconnect the background
    while (true) {
        std::vector<std::int64_t> bg;
        for (std::int64_t i = 0; i < hw; ++i)
            if (occ[static_cast<std::size_t>(i)] == 0) bg.push_back(i);
        if (pixels_connected(bg, h, w)) break;
        const std::int32_t drop = next_id - 1;
        --next_id;
        for (std::int64_t i = 0; i < hw; ++i)
            if (occ[static_cast<std::size_t>(i)] == drop) {
                occ[static_cast<std::size_t>(i)] = 0;
                const int y = static_cast<int>(i / w), x = static_cast<int>(i % w);
                const double t =
                    0.5 + 0.5 * ((x - 0.5 * w) / w * gx + (y - 0.5 * h) / h * gy);
                for (int c = 0; c < 3; ++c)
                    scene.hq[static_cast<std::int64_t>(c) * hw + i] =
                        static_cast<float>(c0[c] + (c1[c] - c0[c]) * std::clamp(t, 0.0, 1.0));
            }
    }

    // relabel occupancy ids by first appearance in row-major scan order,
    // matching the id convention of oracle_segment
    scene.labels.h = h;
    scene.labels.w = w;
    scene.labels.labels.assign(static_cast<std::size_t>(hw), -1);
    std::map<std::int32_t, std::int32_t> remap;
    std::int32_t next_label = 0;
    for (std::int64_t i = 0; i < hw; ++i) {
        const std::int32_t o = occ[static_cast<std::size_t>(i)];
        auto it = remap.find(o);
        if (it == remap.end()) it = remap.emplace(o, next_label++).first;
        scene.labels.labels[static_cast<std::size_t>(i)] = it->second;
    }
    return scene;
}

namespace {

double keys_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

// one separable pass along the last axis; planes = product of leading dims
void resample_axis(const float* src, std::int64_t planes, std::int64_t in_len, float* dst,
                   std::int64_t out_len, double scale) {
    for (std::int64_t pl = 0; pl < planes; ++pl) {
        const float* s = src + pl * in_len;
        float* d = dst + pl * out_len;
        for (std::int64_t i = 0; i < out_len; ++i) {
            const double pos = (i + 0.5) * scale - 0.5;
            const std::int64_t base = static_cast<std::int64_t>(std::floor(pos));
            double acc = 0.0;
            for (std::int64_t j = base - 1; j <= base + 2; ++j) {
                const double wt = keys_weight(pos - static_cast<double>(j));
                const std::int64_t jc = std::clamp<std::int64_t>(j, 0, in_len - 1);
                acc += wt * static_cast<double>(s[jc]);
            }
            d[i] = static_cast<float>(acc);
        }
    }
}

} // namespace

Tensor<float> bicubic_resize(const Tensor<float>& img, int r, ResizeDir dir) {
    if (img.rank() != 3) throw std::invalid_argument("bicubic_resize: image must be [C,H,W]");
    if (r < 1 || r > 4) throw std::invalid_argument("bicubic_resize: r must be in {1,2,3,4}");
    if (r == 1) return img;
    const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
    std::int64_t ho, wo;
    double scale;
    if (dir == ResizeDir::kDown) {
        if (h % r != 0 || w % r != 0)
            throw std::invalid_argument("bicubic_resize: dimensions not divisible by r");
        ho = h / r;
        wo = w / r;
        scale = static_cast<double>(r);
    } else {
        ho = h * r;
        wo = w * r;
        scale = 1.0 / r;
    }
    // horizontal pass, then vertical on the transposed view
    Tensor<float> tmp({c, h, wo});
    resample_axis(img.data.data(), c * h, w, tmp.data.data(), wo, scale);
    Tensor<float> tmp_t({c, wo, h});
    for (std::int64_t ci = 0; ci < c; ++ci)
        for (std::int64_t y = 0; y < h; ++y)
            for (std::int64_t x = 0; x < wo; ++x)
                tmp_t[(ci * wo + x) * h + y] = tmp[(ci * h + y) * wo + x];
    Tensor<float> out_t({c, wo, ho});
    resample_axis(tmp_t.data.data(), c * wo, h, out_t.data.data(), ho, scale);
    Tensor<float> out({c, ho, wo});
    for (std::int64_t ci = 0; ci < c; ++ci)
        for (std::int64_t x = 0; x < wo; ++x)
            for (std::int64_t y = 0; y < ho; ++y)
                out[(ci * ho + y) * wo + x] = out_t[(ci * wo + x) * ho + y];
    return out;
}

Tensor<float> add_gaussian_noise(const Tensor<float>& img, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return img;
    Tensor<float> out = img;
    Rng rng(seed);
    const double s = sigma / 255.0;
    for (auto& v : out.data) v = static_cast<float>(v + s * rng.normal());
    return out;
}

void DataConfig::validate() const {
    if (n < 1) throw std::invalid_argument("data: n must be >= 1");
    if (height < 16 || width < 16) throw std::invalid_argument("data: size must be >= 16x16");
    if (k_shapes < 0) throw std::invalid_argument("data: k_shapes must be >= 0");
    if (grid < 1 || nc < 1) throw std::invalid_argument("data: grid and nc must be >= 1");
    if (task == Task::kSr) {
        if (r < 2 || r > 4) throw std::invalid_argument("data: SR requires r in {2,3,4}");
        if (height % r != 0 || width % r != 0)
            throw std::invalid_argument("data: SR size must be divisible by r");
    } else {
        if (sigma < 0.0) throw std::invalid_argument("data: sigma must be >= 0");
    }
}

Json DataConfig::to_json() const {
    return Json{{"task", to_string(task)},
                {"r", r},
                {"sigma", sigma},
                {"n", n},
                {"height", height},
                {"width", width},
                {"k_shapes", k_shapes},
                {"grid", grid},
                {"nc", nc},
                {"seed", seed}};
}

DataConfig DataConfig::from_json(const Json& j) {
    DataConfig c;
    c.task = task_from_string(j.at("task").get<std::string>());
    c.r = j.at("r").get<int>();
    c.sigma = j.at("sigma").get<double>();
    c.n = j.at("n").get<int>();
    c.height = j.at("height").get<int>();
    c.width = j.at("width").get<int>();
    c.k_shapes = j.at("k_shapes").get<int>();
    c.grid = j.at("grid").get<int>();
    c.nc = j.at("nc").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

LabelMap downsample_labels(const LabelMap& lm, int r) {
    if (r == 1) return lm;
    LabelMap out;
    out.h = lm.h / r;
    out.w = lm.w / r;
    out.labels.resize(static_cast<std::size_t>(out.h) * out.w);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            const int sy = std::min(lm.h - 1, static_cast<int>((y + 0.5) * r));
            const int sx = std::min(lm.w - 1, static_cast<int>((x + 0.5) * r));
            out.at(y, x) = lm.at(sy, sx);
        }
    // recompact ids in scan order (regions may vanish under downsampling)
    std::map<std::int32_t, std::int32_t> remap;
    std::int32_t next = 0;
    for (auto& v : out.labels) {
        auto it = remap.find(v);
        if (it == remap.end()) it = remap.emplace(v, next++).first;
        v = it->second;
    }
    return out;
}

DatasetPair make_pair(const Scene& scene, const DataConfig& cfg) {
    DatasetPair pair;
    pair.gt = scene.hq;
    pair.degradation.task = cfg.task;
    LabelMap lq_labels;
    if (cfg.task == Task::kSr) {
        pair.degradation.r = cfg.r;
        pair.lq = bicubic_resize(scene.hq, cfg.r, ResizeDir::kDown);
        lq_labels = downsample_labels(scene.labels, cfg.r);
    } else {
        pair.degradation.r = 1;
        pair.degradation.sigma = cfg.sigma;
        pair.lq = add_gaussian_noise(scene.hq, cfg.sigma, derive_seed(scene.seed, "noise"));
        lq_labels = scene.labels;
    }
    pair.masks =
        normalize_mask_count(grid_prompt_masks(lq_labels, cfg.grid), cfg.nc, lq_labels.h, lq_labels.w);
    return pair;
}

std::vector<DatasetPair> make_dataset(const DataConfig& cfg) {
    cfg.validate();
    std::vector<DatasetPair> pairs;
    pairs.reserve(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        const Scene scene =
            make_scene(derive_seed(cfg.seed, "scene", static_cast<std::uint64_t>(i)), cfg.height,
                       cfg.width, cfg.k_shapes);
        pairs.push_back(make_pair(scene, cfg));
    }
    return pairs;
}

namespace {
std::string pair_stem(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%05d", i);
    return buf;
}
} // namespace

void write_dataset(const std::string& dir, const std::vector<DatasetPair>& pairs,
                   const DataConfig& cfg, bool export_ppm) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string stem = (fs::path(dir) / pair_stem(static_cast<int>(i))).string();
        save_tensor(stem + ".hq.sptt", pairs[i].gt);
        save_tensor(stem + ".lq.sptt", pairs[i].lq);
        save_masks(stem + ".masks.sptm", pairs[i].masks);
        if (export_ppm) {
            write_ppm(stem + ".hq.ppm", pairs[i].gt);
            write_ppm(stem + ".lq.ppm", pairs[i].lq);
        }
    }
    Json manifest;
    manifest["format_versions"] = Json{{"tensor", kTensorFormatVersion}, {"mask", 1}, {"manifest", 1}};
    manifest["config"] = cfg.to_json();
    Json seeds = Json::array();
    for (int i = 0; i < cfg.n; ++i)
        seeds.push_back(derive_seed(cfg.seed, "scene", static_cast<std::uint64_t>(i)));
    manifest["seeds"] = seeds;
    manifest["n"] = pairs.size();
    write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

DataConfig read_dataset_config(const std::string& dir) {
    const Json manifest = Json::parse(read_file((fs::path(dir) / "manifest.json").string()));
    return DataConfig::from_json(manifest.at("config"));
}

std::vector<DatasetPair> read_dataset(const std::string& dir) {
    const Json manifest = Json::parse(read_file((fs::path(dir) / "manifest.json").string()));
    const DataConfig cfg = DataConfig::from_json(manifest.at("config"));
    const int n = manifest.at("n").get<int>();
    std::vector<DatasetPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::string stem = (fs::path(dir) / pair_stem(i)).string();
        DatasetPair p;
        p.gt = load_tensor<float>(stem + ".hq.sptt");
        p.lq = load_tensor<float>(stem + ".lq.sptt");
        p.masks = load_masks(stem + ".masks.sptm");
        p.degradation.task = cfg.task;
        p.degradation.r = cfg.task == Task::kSr ? cfg.r : 1;
        p.degradation.sigma = cfg.task == Task::kDenoise ? cfg.sigma : 0.0;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

DatasetPair crop_pair(const DatasetPair& pair, int oy, int ox, int size) {
    const int lh = static_cast<int>(pair.lq.dim(1)), lw = static_cast<int>(pair.lq.dim(2));
    if (size < 1 || size > lh || size > lw)
        throw std::invalid_argument("crop: patch size " + std::to_string(size) +
                                    " exceeds LQ dims " + std::to_string(lh) + "x" + std::to_string(lw));
    if (oy < 0 || ox < 0 || oy + size > lh || ox + size > lw)
        throw std::invalid_argument("crop: offset out of range");
    const int r = pair.degradation.task == Task::kSr ? pair.degradation.r : 1;

    auto crop_img = [](const Tensor<float>& img, int oy_, int ox_, int s) {
        const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
        (void)h;
        Tensor<float> out({c, s, s});
        for (std::int64_t ci = 0; ci < c; ++ci)
            for (int y = 0; y < s; ++y)
                std::copy(img.data.begin() + (ci * img.dim(1) + oy_ + y) * w + ox_,
                          img.data.begin() + (ci * img.dim(1) + oy_ + y) * w + ox_ + s,
                          out.data.begin() + (ci * s + y) * s);
        return out;
    };

    DatasetPair out;
    out.degradation = pair.degradation;
    out.lq = crop_img(pair.lq, oy, ox, size);
    out.gt = crop_img(pair.gt, r * oy, r * ox, r * size);
    out.masks.nc = pair.masks.nc;
    out.masks.h = size;
    out.masks.w = size;
    out.masks.count_before_normalization = pair.masks.count_before_normalization;
    out.masks.masks.resize(static_cast<std::size_t>(pair.masks.nc) * size * size);
    for (int c = 0; c < pair.masks.nc; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                out.masks.masks[(static_cast<std::size_t>(c) * size + y) * size + x] =
                    pair.masks.at(c, oy + y, ox + x);
    return out;
}

DatasetPair sample_patch(const DatasetPair& pair, int size, std::uint64_t seed) {
    const int lh = static_cast<int>(pair.lq.dim(1)), lw = static_cast<int>(pair.lq.dim(2));
    if (size > lh || size > lw)
        throw std::invalid_argument("sample_patch: size exceeds LQ dims");
    Rng rng(seed);
    const int oy = static_cast<int>(rng.uniform_int(lh - size + 1));
    const int ox = static_cast<int>(rng.uniform_int(lw - size + 1));
    return crop_pair(pair, oy, ox, size);
}

namespace {

// dst dims: hflip/rot180 keep (h,w); rot90/rot270 swap them
template <class T>
void transform_plane(const T* src, T* dst, int h, int w, AugmentOp op) {
    switch (op) {
        case AugmentOp::kHflip:
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) dst[y * w + x] = src[y * w + (w - 1 - x)];
            break;
        case AugmentOp::kRot90: // clockwise
            for (int y = 0; y < w; ++y)
                for (int x = 0; x < h; ++x) dst[y * h + x] = src[(h - 1 - x) * w + y];
            break;
        case AugmentOp::kRot180:
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) dst[y * w + x] = src[(h - 1 - y) * w + (w - 1 - x)];
            break;
        case AugmentOp::kRot270:
            for (int y = 0; y < w; ++y)
                for (int x = 0; x < h; ++x) dst[y * h + x] = src[x * w + (w - 1 - y)];
            break;
    }
}

Tensor<float> transform_image(const Tensor<float>& img, AugmentOp op) {
    const int c = static_cast<int>(img.dim(0));
    const int h = static_cast<int>(img.dim(1)), w = static_cast<int>(img.dim(2));
    const bool swap = op == AugmentOp::kRot90 || op == AugmentOp::kRot270;
    Tensor<float> out({c, swap ? w : h, swap ? h : w});
    for (int ci = 0; ci < c; ++ci)
        transform_plane(img.data.data() + static_cast<std::int64_t>(ci) * h * w,
                        out.data.data() + static_cast<std::int64_t>(ci) * h * w, h, w, op);
    return out;
}

} // namespace

DatasetPair augment(const DatasetPair& pair, AugmentOp op) {
    const bool rotation = op != AugmentOp::kHflip;
    if (rotation && (pair.lq.dim(1) != pair.lq.dim(2) || pair.gt.dim(1) != pair.gt.dim(2)))
        throw std::invalid_argument("augment: rotations require square patches");
    DatasetPair out;
    out.degradation = pair.degradation;
    out.lq = transform_image(pair.lq, op);
    out.gt = transform_image(pair.gt, op);
    out.masks.nc = pair.masks.nc;
    out.masks.count_before_normalization = pair.masks.count_before_normalization;
    const int h = pair.masks.h, w = pair.masks.w;
    const bool swap = op == AugmentOp::kRot90 || op == AugmentOp::kRot270;
    out.masks.h = swap ? w : h;
    out.masks.w = swap ? h : w;
    out.masks.masks.resize(pair.masks.masks.size());
    for (int c = 0; c < pair.masks.nc; ++c)
        transform_plane(pair.masks.masks.data() + static_cast<std::size_t>(c) * h * w,
                        out.masks.masks.data() + static_cast<std::size_t>(c) * h * w, h, w, op);
    return out;
}

} // namespace sptir
