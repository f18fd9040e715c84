#pragma once

#include <optional>

#include "sptir/backbone.hpp"
#include "sptir/mask_prior.hpp"

namespace sptir {

enum class SptVariant { kFull, kNoFeatConcat, kNoPrior, kCat };

inline std::string to_string(SptVariant v) {
    switch (v) {
        case SptVariant::kFull: return "full";
        case SptVariant::kNoFeatConcat: return "spt-f";
        case SptVariant::kNoPrior: return "spt-p";
        case SptVariant::kCat: return "spt-cat";
    }
    throw std::invalid_argument("bad variant");
}

inline SptVariant spt_variant_from_string(const std::string& s) {
    if (s == "full") return SptVariant::kFull;
    if (s == "spt-f") return SptVariant::kNoFeatConcat;
    if (s == "spt-p") return SptVariant::kNoPrior;
    if (s == "spt-cat") return SptVariant::kCat;
    throw std::invalid_argument("unknown SPT variant: " + s);
}

struct SptConfig {
    SptVariant variant = SptVariant::kFull;
    double alpha = 1.0;
    std::vector<int> positions; // 1-based block indices, ascending
    int nc = 64;
    int grid = 8;

    void validate(int n1) const {
        if (alpha < 0.0) throw std::invalid_argument("spt: alpha must be >= 0");
        if (positions.empty()) throw std::invalid_argument("spt: positions must be non-empty");
        int prev = 0;
        for (int p : positions) {
            if (p < 1 || p > n1)
                throw std::invalid_argument("spt: position " + std::to_string(p) +
                                            " out of range 1.." + std::to_string(n1));
            if (p <= prev) throw std::invalid_argument("spt: positions must be strictly ascending");
            prev = p;
        }
        if (nc < 1) throw std::invalid_argument("spt: nc must be >= 1");
        if (grid < 1) throw std::invalid_argument("spt: grid must be >= 1");
    }

    Json to_json() const {
        return Json{{"variant", to_string(variant)},
                    {"alpha", alpha},
                    {"positions", positions},
                    {"nc", nc},
                    {"grid", grid}};
    }
    static SptConfig from_json(const Json& j) {
        SptConfig c;
        c.variant = spt_variant_from_string(j.at("variant").get<std::string>());
        c.alpha = j.at("alpha").get<double>();
        c.positions = j.at("positions").get<std::vector<int>>();
        c.nc = j.value("nc", 64);
        c.grid = j.value("grid", 8);
        return c;
    }
};

// One adapter unit. Only the branches a variant actually evaluates are
// allocated, so every registered parameter receives gradients.
template <class T>
struct SptUnit {
    SptVariant variant = SptVariant::kFull;
    std::optional<FBlock<T>> enhance;     // F_i' = f([F_i, M]) (or f(M) for spt-f)
    std::optional<FBlock<T>> feat_branch; // f applied to F_i'
    std::optional<FBlock<T>> prior_branch; // f applied to P_i; output reused for the chain update
    std::optional<FBlock<T>> cat_block;   // spt-cat single block over [M, F_i, P_i]
};

// zero_init_output zeroes the weight of the conv that produces F_i^spt's
// additive base (the enhance/cat second conv). With zero biases everywhere
// this makes a freshly installed unit emit F_i^spt = 0, so the tuned model
// starts exactly at the frozen baseline instead of perturbing it.
template <class T>
SptUnit<T> make_spt_unit(ParamSet<T>& ps, const std::string& prefix, SptVariant variant, int feat,
                         int nc, Rng& rng, bool zero_init_output = true) {
    SptUnit<T> u;
    u.variant = variant;
    switch (variant) {
        case SptVariant::kFull:
            u.enhance = make_f_block(ps, prefix + ".enh", feat + nc, feat, feat, 3, rng);
            u.feat_branch = make_f_block(ps, prefix + ".feat", feat, feat, feat, 3, rng);
            u.prior_branch = make_f_block(ps, prefix + ".prior", feat, feat, feat, 3, rng);
            break;
        case SptVariant::kNoFeatConcat:
            u.enhance = make_f_block(ps, prefix + ".enh", nc, feat, feat, 3, rng);
            u.feat_branch = make_f_block(ps, prefix + ".feat", feat, feat, feat, 3, rng);
            u.prior_branch = make_f_block(ps, prefix + ".prior", feat, feat, feat, 3, rng);
            break;
        case SptVariant::kNoPrior:
            u.enhance = make_f_block(ps, prefix + ".enh", feat + nc, feat, feat, 3, rng);
            u.feat_branch = make_f_block(ps, prefix + ".feat", feat, feat, feat, 3, rng);
            break;
        case SptVariant::kCat:
            u.cat_block = make_f_block(ps, prefix + ".cat", nc + 2 * feat, feat, feat, 3, rng);
            break;
    }
    if (zero_init_output) {
        auto& out_conv = variant == SptVariant::kCat ? u.cat_block->conv2 : u.enhance->conv2;
        auto& w = out_conv.weight.tensor_mut();
        std::fill(w.data.begin(), w.data.end(), T(0));
    }
    return u;
}

// The SPT unit body. Full variant:
//   F_i'    = f_enh([F_i, M])
//   q       = f_prior(P_i)         (one prior branch per unit; q feeds both
//   P_{i+1} = q + P_i               the chain update and the correlation)
//   F_i^spt = f_feat(F_i') * q + F_i'
template <class T>
std::pair<Value<T>, PriorState<T>> spt_forward(const SptUnit<T>& u, const Value<T>& f_i,
                                               const PriorState<T>& prior, const Value<T>& masks) {
    const auto& fs = f_i.tensor();
    const auto& ms = masks.tensor();
    if (fs.rank() != 4 || ms.rank() != 4 || fs.dim(0) != ms.dim(0) || fs.dim(2) != ms.dim(2) ||
        fs.dim(3) != ms.dim(3))
        throw std::invalid_argument("spt_forward: feature/mask spatial mismatch " +
                                    shape_str(fs.shape) + " vs " + shape_str(ms.shape));
    if (u.variant != SptVariant::kNoPrior) {
        const auto& prs = prior.p.tensor();
        if (!prs.same_shape(fs))
            throw std::invalid_argument("spt_forward: prior/feature shape mismatch " +
                                        shape_str(prs.shape) + " vs " + shape_str(fs.shape));
    }

    switch (u.variant) {
        case SptVariant::kFull: {
            Value<T> enhanced = f_block(concat_channels<T>({f_i, masks}), *u.enhance);
            Value<T> q = f_block(prior.p, *u.prior_branch);
            Value<T> next_p = add(q, prior.p);
            Value<T> out = add(mul(f_block(enhanced, *u.feat_branch), q), enhanced);
            return {out, PriorState<T>{next_p}};
        }
        case SptVariant::kNoFeatConcat: {
            Value<T> enhanced = f_block(masks, *u.enhance);
            Value<T> q = f_block(prior.p, *u.prior_branch);
            Value<T> next_p = add(q, prior.p);
            Value<T> out = add(mul(f_block(enhanced, *u.feat_branch), q), enhanced);
            return {out, PriorState<T>{next_p}};
        }
        case SptVariant::kNoPrior: {
            Value<T> enhanced = f_block(concat_channels<T>({f_i, masks}), *u.enhance);
            Value<T> out = add(f_block(enhanced, *u.feat_branch), enhanced);
            return {out, prior};
        }
        case SptVariant::kCat: {
            Value<T> out = f_block(concat_channels<T>({masks, f_i, prior.p}), *u.cat_block);
            return {out, prior};
        }
    }
    throw std::invalid_argument("spt_forward: unknown variant");
}

// Eq.-style alpha-weighted residual injection of the adapter output.
template <class T>
Value<T> inject(const Value<T>& f_i, const Value<T>& f_spt, double alpha) {
    if (!f_i.tensor().same_shape(f_spt.tensor()))
        throw std::invalid_argument("inject: shape mismatch");
    return add(f_i, scalar_scale(f_spt, alpha));
}

// A frozen backbone plus SPT units installed at the configured positions.
// The prior state threads through installed units in ascending position
// order, starting from the prior encoder. Only "spt.*" parameters are new.
template <class T>
class TunedModel {
public:
    TunedModel(const Backbone<T>& bb, const SptConfig& cfg, ParamSet<T>& ps, std::uint64_t seed)
        : bb_(&bb), cfg_(cfg) {
        cfg_.validate(bb.config().n1);
        Rng rng(derive_seed(seed, "spt.init"));
        const int feat = bb.config().feat;
        // kNoPrior never evaluates the prior representation, so the encoder
        // would receive no gradient; skip it for that variant.
        if (cfg_.variant != SptVariant::kNoPrior)
            prior_enc_ = make_f_block(ps, "spt.prior_enc", bb.config().c_in + cfg_.nc, feat, feat,
                                      3, rng);
        for (int pos : cfg_.positions)
            units_.emplace(pos, make_spt_unit(ps, "spt.unit" + std::to_string(pos), cfg_.variant,
                                              feat, cfg_.nc, rng));
    }

    const SptConfig& config() const { return cfg_; }
    const Backbone<T>& backbone() const { return *bb_; }

    Value<T> forward(const Value<T>& lq, const Value<T>& masks) const {
        PriorState<T> prior;
        if (prior_enc_) prior = prior_encode(lq, masks, *prior_enc_);
        typename Backbone<T>::Hook hook = [&](int i, const Value<T>& f) -> Value<T> {
            auto it = units_.find(i);
            if (it == units_.end()) return f;
            auto [f_spt, next] = spt_forward(it->second, f, prior, masks);
            prior = next;
            return inject(f, f_spt, cfg_.alpha);
        };
        return bb_->forward(lq, &hook);
    }

private:
    const Backbone<T>* bb_;
    SptConfig cfg_;
    std::optional<FBlock<T>> prior_enc_;
    std::map<int, SptUnit<T>> units_;
};

} // namespace sptir
