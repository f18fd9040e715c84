#pragma once

#include <functional>

#include "sptir/common.hpp"
#include "sptir/io.hpp"
#include "sptir/nn.hpp"

namespace sptir {

struct BackboneConfig {
    Task task = Task::kSr;
    int r = 2;      // upscale factor, 1 for denoising
    int feat = 16;  // feature width C
    int n1 = 4;     // number of building blocks
    int c_in = 3;
    int c_out = 3;

    void validate() const {
        if (r < 1 || r > 4) throw std::invalid_argument("backbone: r must be in {1,2,3,4}");
        if (task == Task::kDenoise && r != 1)
            throw std::invalid_argument("backbone: denoise requires r=1");
        if (n1 < 1) throw std::invalid_argument("backbone: N1 must be >= 1");
        if (feat < 1) throw std::invalid_argument("backbone: feature width must be >= 1");
        if (c_in < 1 || c_out < 1) throw std::invalid_argument("backbone: image channels must be >= 1");
    }

    Json to_json() const {
        return Json{{"task", to_string(task)}, {"r", r},       {"feat", feat},
                    {"n1", n1},                {"c_in", c_in}, {"c_out", c_out}};
    }
    static BackboneConfig from_json(const Json& j) {
        BackboneConfig c;
        c.task = task_from_string(j.at("task").get<std::string>());
        c.r = j.at("r").get<int>();
        c.feat = j.at("feat").get<int>();
        c.n1 = j.at("n1").get<int>();
        c.c_in = j.value("c_in", 3);
        c.c_out = j.value("c_out", 3);
        c.validate();
        return c;
    }
};

// Shallow extractor Enc (one conv), N1 shape-preserving residual building
// blocks with a post-block injection hook slot each, and a task-specific
// reconstruction head. Without hooks this is the plain pretrained network.
//
// The building block is a single residual f(.) stand-in: the adapter
// mechanism only needs shape-preserving blocks, so the heavyweight baseline
// architectures are deliberately not reproduced here.
template <class T>
class Backbone {
public:
    // hook(i, F_i) -> replacement for F_i, applied after block i (1-based)
    using Hook = std::function<Value<T>(int, const Value<T>&)>;

    Backbone(const BackboneConfig& cfg, ParamSet<T>& ps, std::uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        Rng rng(derive_seed(seed, "backbone.init"));
        enc_ = make_conv(ps, "backbone.enc", cfg_.c_in, cfg_.feat, 3, rng);
        for (int i = 1; i <= cfg_.n1; ++i)
            blocks_.push_back(make_f_block(ps, "backbone.block" + std::to_string(i), cfg_.feat,
                                           cfg_.feat, cfg_.feat, 3, rng));
        if (cfg_.task == Task::kSr) {
            rec_pre_ = make_conv(ps, "backbone.rec.pre", cfg_.feat, cfg_.c_out * cfg_.r * cfg_.r, 3,
                                 rng);
            rec_post_ = make_conv(ps, "backbone.rec.post", cfg_.c_out, cfg_.c_out, 3, rng);
        } else {
            rec_pre_ = make_conv(ps, "backbone.rec.conv", cfg_.feat, cfg_.c_out, 3, rng);
        }
    }

    const BackboneConfig& config() const { return cfg_; }

    Value<T> enc(const Value<T>& lq) const { return conv2d(lq, enc_); }

    Value<T> building_block(int i, const Value<T>& f) const {
        return add(f, f_block(f, blocks_[static_cast<std::size_t>(i - 1)]));
    }

    Value<T> forward(const Value<T>& lq, const Hook* hook = nullptr) const {
        Value<T> f = enc(lq);
        for (int i = 1; i <= cfg_.n1; ++i) {
            f = building_block(i, f);
            if (hook) {
                Value<T> replaced = (*hook)(i, f);
                if (!replaced.tensor().same_shape(f.tensor()))
                    throw std::invalid_argument("hook at block " + std::to_string(i) +
                                                " returned shape " + shape_str(replaced.shape()) +
                                                ", expected " + shape_str(f.shape()));
                f = replaced;
            }
        }
        if (cfg_.task == Task::kSr) {
            // conv -> sub-pixel shuffle -> conv around the upsample
            return conv2d(pixel_shuffle(conv2d(f, rec_pre_), cfg_.r), rec_post_);
        }
        // single conv back to image channels, residual add in [0,1] image space
        return add(conv2d(f, rec_pre_), lq);
    }

private:
    BackboneConfig cfg_;
    ConvParams<T> enc_;
    std::vector<FBlock<T>> blocks_;
    ConvParams<T> rec_pre_;
    ConvParams<T> rec_post_;
};

} // namespace sptir
