#pragma once

#include "sptir/data.hpp"
#include "sptir/spt_unit.hpp"

namespace sptir {

struct TrainConfig {
    double lr0 = 1e-4;
    double beta1 = 0.9, beta2 = 0.999;
    double weight_decay = 0.0;
    double eps = 1e-8;
    int batch = 4;
    std::int64_t iters = 1000;
    std::int64_t halve_every = 5000;
    std::uint64_t seed = 0;
    int patch = 64; // LQ-side patch size: 64 for SR, 128 for denoising
    enum class Loss { kL1, kL2 };
    Loss loss = Loss::kL1;
    std::int64_t log_every = 50;
    // early stopping on validation PSNR; 0 disables. With patience p, training
    // stops after p consecutive evaluations without improvement.
    std::int64_t val_every = 0;
    int patience = 0;

    void validate() const {
        if (lr0 <= 0 || beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1 || eps <= 0)
            throw std::invalid_argument("train: rates must be positive, betas in (0,1)");
        if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");
        if (iters < 0 || halve_every < 1) throw std::invalid_argument("train: bad schedule");
        if (patch < 1) throw std::invalid_argument("train: patch must be >= 1");
    }

    Json to_json() const {
        return Json{{"lr0", lr0},
                    {"beta1", beta1},
                    {"beta2", beta2},
                    {"weight_decay", weight_decay},
                    {"eps", eps},
                    {"batch", batch},
                    {"iters", iters},
                    {"halve_every", halve_every},
                    {"patch", patch},
                    {"loss", loss == Loss::kL1 ? "l1" : "l2"},
                    {"log_every", log_every},
                    {"val_every", val_every},
                    {"patience", patience}};
    }
    static TrainConfig from_json(const Json& j) {
        TrainConfig c;
        c.lr0 = j.value("lr0", 1e-4);
        c.beta1 = j.value("beta1", 0.9);
        c.beta2 = j.value("beta2", 0.999);
        c.weight_decay = j.value("weight_decay", 0.0);
        c.eps = j.value("eps", 1e-8);
        c.batch = j.value("batch", 4);
        c.iters = j.value("iters", std::int64_t(1000));
        c.halve_every = j.value("halve_every", std::int64_t(5000));
        c.patch = j.value("patch", 64);
        const std::string loss = j.value("loss", std::string("l1"));
        if (loss == "l1")
            c.loss = Loss::kL1;
        else if (loss == "l2")
            c.loss = Loss::kL2;
        else
            throw std::invalid_argument("train: unknown loss " + loss);
        c.log_every = j.value("log_every", std::int64_t(50));
        c.val_every = j.value("val_every", std::int64_t(0));
        c.patience = j.value("patience", 0);
        c.validate();
        return c;
    }
};

struct AdamState {
    std::int64_t t = 0;
};

// lr0 * 2^-floor(iter / halve_every): halves exactly at schedule boundaries.
inline double lr_at(std::int64_t iter, const TrainConfig& cfg) {
    if (iter < 0) throw std::invalid_argument("lr_at: iter must be >= 0");
    return std::ldexp(cfg.lr0, static_cast<int>(-(iter / cfg.halve_every)));
}

// Bias-corrected Adam over the trainable subset of the ParamSet. Frozen
// parameters are never touched.
template <class T>
void adam_step(ParamSet<T>& ps, AdamState& st, const TrainConfig& cfg, double lr) {
    ++st.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    for (auto& e : ps.entries()) {
        if (!e.trainable) continue;
        if (!e.param.has_grad())
            throw std::invalid_argument("adam_step: missing gradient for trainable parameter " +
                                        e.name);
        const Tensor<T>& g = e.param.grad();
        Tensor<T>& theta = e.param.tensor_mut();
        if (e.adam_m.data.empty()) {
            e.adam_m = Tensor<T>::zeros(theta.shape);
            e.adam_v = Tensor<T>::zeros(theta.shape);
        }
        for (std::size_t i = 0; i < theta.data.size(); ++i) {
            double gi = static_cast<double>(g.data[i]);
            if (cfg.weight_decay != 0.0) gi += cfg.weight_decay * static_cast<double>(theta.data[i]);
            const double m = cfg.beta1 * static_cast<double>(e.adam_m.data[i]) + (1.0 - cfg.beta1) * gi;
            const double v =
                cfg.beta2 * static_cast<double>(e.adam_v.data[i]) + (1.0 - cfg.beta2) * gi * gi;
            e.adam_m.data[i] = static_cast<T>(m);
            e.adam_v.data[i] = static_cast<T>(v);
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            theta.data[i] = static_cast<T>(static_cast<double>(theta.data[i]) -
                                           lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

struct TrainLogRow {
    std::int64_t iter = 0;
    double lr = 0.0;
    double loss = 0.0;
};

struct TrainOutcome {
    std::vector<TrainLogRow> log;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::int64_t iters_run = 0;
    bool stopped_early = false;
    double best_val_psnr = 0.0; // meaningful only when validation ran
};

std::string train_log_csv(const std::vector<TrainLogRow>& log);

// Mini-batch of aligned patches; masks stacked per-sample.
struct Batch {
    Tensor<float> lq, gt, masks;
};

Batch assemble_batch(const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                     std::int64_t iter);

// Full-network training of the backbone on (LQ, GT) pairs. val_data enables
// the patience-on-validation-PSNR stop when the config asks for it.
TrainOutcome pretrain(const Backbone<float>& bb, ParamSet<float>& ps,
                      const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                      const std::vector<DatasetPair>* val_data = nullptr);

// Parameter-efficient tuning: freezes backbone.*, trains spt.* only.
TrainOutcome spt_tune(const TunedModel<float>& model, ParamSet<float>& ps,
                      const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                      const std::vector<DatasetPair>* val_data = nullptr);

// Run configuration shared by the CLI commands.
struct RunConfig {
    Task task = Task::kSr;
    int r = 2;
    double sigma = 25.0;
    int feat = 16, n1 = 3, c_in = 3, c_out = 3;
    SptConfig spt;
    TrainConfig train;
    std::string data, eval_data;
    std::uint64_t seed = 0;

    BackboneConfig backbone_config() const {
        BackboneConfig b;
        b.task = task;
        b.r = task == Task::kSr ? r : 1;
        b.feat = feat;
        b.n1 = n1;
        b.c_in = c_in;
        b.c_out = c_out;
        return b;
    }

    void validate() const {
        backbone_config().validate();
        train.validate();
        spt.validate(n1);
    }

    Json to_json() const;
    static RunConfig from_json(const Json& j);
};

} // namespace sptir
