#include "sptir/optim.hpp"

#include <cstdio>
#include <functional>

#include "sptir/metrics.hpp"

namespace sptir {

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
    std::string out = "iter,lr,loss\n";
    char buf[96];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%lld,%.10g,%.10g\n", static_cast<long long>(row.iter),
                      row.lr, row.loss);
        out += buf;
    }
    return out;
}

Batch assemble_batch(const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                     std::int64_t iter) {
    const int b = cfg.batch;
    const int s = cfg.patch;
    Batch batch;
    for (int bi = 0; bi < b; ++bi) {
        Rng rng(derive_seed(cfg.seed, "batch",
                            static_cast<std::uint64_t>(iter) * static_cast<std::uint64_t>(b) +
                                static_cast<std::uint64_t>(bi)));
        const auto& src = data[static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(data.size())))];
        DatasetPair p = sample_patch(src, s, rng.next_u64());
        if (rng.uniform() < 0.5) p = augment(p, AugmentOp::kHflip);
        switch (rng.uniform_int(4)) {
            case 1: p = augment(p, AugmentOp::kRot90); break;
            case 2: p = augment(p, AugmentOp::kRot180); break;
            case 3: p = augment(p, AugmentOp::kRot270); break;
            default: break;
        }
        if (bi == 0) {
            batch.lq = Tensor<float>({b, p.lq.dim(0), p.lq.dim(1), p.lq.dim(2)});
            batch.gt = Tensor<float>({b, p.gt.dim(0), p.gt.dim(1), p.gt.dim(2)});
            batch.masks = Tensor<float>({b, p.masks.nc, p.masks.h, p.masks.w});
        }
        std::copy(p.lq.data.begin(), p.lq.data.end(),
                  batch.lq.data.begin() + static_cast<std::int64_t>(bi) * p.lq.numel());
        std::copy(p.gt.data.begin(), p.gt.data.end(),
                  batch.gt.data.begin() + static_cast<std::int64_t>(bi) * p.gt.numel());
        const std::int64_t msz = static_cast<std::int64_t>(p.masks.masks.size());
        for (std::int64_t i = 0; i < msz; ++i)
            batch.masks.data[static_cast<std::size_t>(bi * msz + i)] =
                static_cast<float>(p.masks.masks[static_cast<std::size_t>(i)]);
    }
    return batch;
}

namespace {

using ForwardFn = std::function<Value<float>(const Value<float>& lq, const Value<float>& masks)>;

double validation_psnr(const std::vector<DatasetPair>& val, const ForwardFn& forward) {
    const MetricMode mode = metric_mode_for(val[0].degradation.task);
    double acc = 0.0;
    for (const auto& pair : val) {
        auto lq = Value<float>::leaf(
            Tensor<float>({1, pair.lq.dim(0), pair.lq.dim(1), pair.lq.dim(2)}, pair.lq.data));
        auto masks = Value<float>::leaf(pair.masks.as_batched_tensor<float>(1));
        const Value<float> pred = forward(lq, masks);
        const auto& out = pred.tensor();
        acc += psnr(Tensor<float>({out.dim(1), out.dim(2), out.dim(3)}, out.data), pair.gt, mode);
    }
    return acc / static_cast<double>(val.size());
}

TrainOutcome train_loop(ParamSet<float>& ps, const std::vector<DatasetPair>& data,
                        const TrainConfig& cfg, const ForwardFn& forward,
                        const std::vector<DatasetPair>* val_data) {
    if (data.empty()) throw std::invalid_argument("training dataset is empty");
    cfg.validate();
    const bool use_patience =
        cfg.val_every > 0 && cfg.patience > 0 && val_data && !val_data->empty();
    TrainOutcome out;
    AdamState st;
    double best_val = -std::numeric_limits<double>::infinity();
    int bad_evals = 0;
    for (std::int64_t iter = 0; iter < cfg.iters; ++iter) {
        const double lr = lr_at(iter, cfg);
        Batch batch = assemble_batch(data, cfg, iter);
        auto lq = Value<float>::leaf(std::move(batch.lq), false);
        auto masks = Value<float>::leaf(std::move(batch.masks), false);
        double loss_v = 0.0;
        try {
            Value<float> pred = forward(lq, masks);
            Value<float> loss = cfg.loss == TrainConfig::Loss::kL1 ? l1_loss(pred, batch.gt)
                                                                   : l2_loss(pred, batch.gt);
            loss_v = static_cast<double>(loss.tensor()[0]);
            backward(loss);
        } catch (const NumericError& e) {
            throw NumericError("training diverged at iteration " + std::to_string(iter) + ": " +
                               e.what());
        }
        adam_step(ps, st, cfg, lr);
        ps.zero_grad();
        if (iter == 0) out.initial_loss = loss_v;
        out.final_loss = loss_v;
        out.iters_run = iter + 1;
        if (iter % cfg.log_every == 0 || iter == cfg.iters - 1)
            out.log.push_back({iter, lr, loss_v});
        if (use_patience && (iter + 1) % cfg.val_every == 0) {
            const double v = validation_psnr(*val_data, forward);
            if (v > best_val) {
                best_val = v;
                bad_evals = 0;
            } else if (++bad_evals >= cfg.patience) {
                out.stopped_early = true;
                break;
            }
        }
    }
    if (use_patience) out.best_val_psnr = best_val;
    return out;
}

} // namespace

TrainOutcome pretrain(const Backbone<float>& bb, ParamSet<float>& ps,
                      const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                      const std::vector<DatasetPair>* val_data) {
    return train_loop(ps, data, cfg,
                      [&](const Value<float>& lq, const Value<float>&) { return bb.forward(lq); },
                      val_data);
}

TrainOutcome spt_tune(const TunedModel<float>& model, ParamSet<float>& ps,
                      const std::vector<DatasetPair>& data, const TrainConfig& cfg,
                      const std::vector<DatasetPair>* val_data) {
    for (const auto& p : data)
        if (p.masks.nc < 1 || p.masks.masks.empty())
            throw std::invalid_argument("spt_tune: dataset has pairs without masks");
    ps.set_trainable("backbone.*", false);
    ps.set_trainable("spt.*", true);
    return train_loop(
        ps, data, cfg,
        [&](const Value<float>& lq, const Value<float>& masks) {
            return model.forward(lq, masks);
        },
        val_data);
}

Json RunConfig::to_json() const {
    Json j;
    j["task"] = to_string(task);
    if (task == Task::kSr)
        j["r"] = r;
    else
        j["sigma"] = sigma;
    j["backbone"] = Json{{"feat", feat}, {"n1", n1}, {"c_in", c_in}, {"c_out", c_out}};
    j["spt"] = spt.to_json();
    j["train"] = train.to_json();
    j["data"] = data;
    j["eval_data"] = eval_data;
    j["seed"] = seed;
    return j;
}

RunConfig RunConfig::from_json(const Json& j) {
    RunConfig c;
    c.task = task_from_string(j.at("task").get<std::string>());
    if (c.task == Task::kSr) {
        c.r = j.at("r").get<int>();
        if (j.contains("sigma")) throw std::invalid_argument("run config: sr takes r, not sigma");
    } else {
        c.sigma = j.at("sigma").get<double>();
        if (j.contains("r")) throw std::invalid_argument("run config: denoise takes sigma, not r");
        c.r = 1;
    }
    const Json& b = j.at("backbone");
    c.feat = b.at("feat").get<int>();
    c.n1 = b.at("n1").get<int>();
    c.c_in = b.value("c_in", 3);
    c.c_out = b.value("c_out", 3);
    c.spt = SptConfig::from_json(j.at("spt"));
    c.train = TrainConfig::from_json(j.at("train"));
    c.data = j.value("data", std::string());
    c.eval_data = j.value("eval_data", std::string());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.train.seed = c.seed;
    c.validate();
    return c;
}

} // namespace sptir
