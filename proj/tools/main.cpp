#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gradcheck_suite.hpp"
#include "sptir/metrics.hpp"
#include "sptir/optim.hpp"

namespace fs = std::filesystem;
using namespace sptir;

namespace {

// exit codes: 0 ok, 2 config error, 3 numeric failure, 4 acceptance-check failure
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;
constexpr int kCheckFailure = 4;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_run_meta(const std::string& out_dir, const std::string& command, const Json& config,
                    std::uint64_t seed, double wall_s) {
    Json meta;
    meta["command"] = command;
    const std::string dump = config.dump();
    meta["config_hash"] = fnv1a_bytes(dump.data(), dump.size());
    meta["seed"] = seed;
    meta["versions"] = Json{{"app", "0.1.0"},
                            {"tensor_format", kTensorFormatVersion},
                            {"checkpoint_format", kCheckpointFormatVersion}};
    meta["wall_time_s"] = wall_s;
    write_file((fs::path(out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

RunConfig load_run_config(const std::string& path) {
    return RunConfig::from_json(Json::parse(read_file(path)));
}

std::pair<int, int> parse_size(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= s.size())
        throw std::invalid_argument("--size must be HxW, got " + s);
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

// ---------------------------------------------------------------------------
// model loading for eval/ablate

struct LoadedModel {
    ParamSet<float> ps;
    BackboneConfig bcfg;
    std::unique_ptr<Backbone<float>> bb;
    SptConfig scfg;
    bool is_tuned = false;
    std::unique_ptr<TunedModel<float>> tuned;
};

std::unique_ptr<LoadedModel> load_model(const std::string& ckpt_path) {
    const Json meta = load_checkpoint_meta(ckpt_path);
    auto m = std::make_unique<LoadedModel>();
    m->bcfg = BackboneConfig::from_json(meta.at("backbone"));
    m->bb = std::make_unique<Backbone<float>>(m->bcfg, m->ps, 0);
    if (meta.at("kind") == "tuned") {
        m->is_tuned = true;
        m->scfg = SptConfig::from_json(meta.at("spt"));
        m->tuned = std::make_unique<TunedModel<float>>(*m->bb, m->scfg, m->ps, 0);
    }
    load_checkpoint(ckpt_path, m->ps);
    return m;
}

Tensor<float> unsqueeze(const Tensor<float>& img) {
    return Tensor<float>({1, img.dim(0), img.dim(1), img.dim(2)}, img.data);
}

Tensor<float> squeeze(const Tensor<float>& batch) {
    return Tensor<float>({batch.dim(1), batch.dim(2), batch.dim(3)}, batch.data);
}

ModelFn model_fn(const LoadedModel& m) {
    return [&m](const DatasetPair& pair) {
        auto lq = Value<float>::leaf(unsqueeze(pair.lq), false);
        if (!m.is_tuned) return squeeze(m.bb->forward(lq).tensor());
        if (pair.masks.nc != m.scfg.nc || pair.masks.masks.empty())
            throw std::invalid_argument(
                "eval: model has SPT units expecting " + std::to_string(m.scfg.nc) +
                " mask channels, dataset pair has " + std::to_string(pair.masks.nc));
        auto masks = Value<float>::leaf(pair.masks.as_batched_tensor<float>(1), false);
        return squeeze(m.tuned->forward(lq, masks).tensor());
    };
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_make_data(const std::string& task_s, int r, double sigma, bool has_r, bool has_sigma,
                  int n, const std::string& size, int k_shapes, int grid, int nc,
                  std::uint64_t seed, const std::string& out, bool ppm) {
    Stopwatch watch;
    DataConfig cfg;
    cfg.task = task_from_string(task_s);
    if (cfg.task == Task::kSr) {
        if (!has_r || has_sigma)
            throw std::invalid_argument("make-data: sr takes --r (and no --sigma)");
        cfg.r = r;
    } else {
        if (!has_sigma || has_r)
            throw std::invalid_argument("make-data: denoise takes --sigma (and no --r)");
        cfg.r = 1;
        cfg.sigma = sigma;
    }
    cfg.n = n;
    std::tie(cfg.height, cfg.width) = parse_size(size);
    cfg.k_shapes = k_shapes;
    cfg.grid = grid;
    cfg.nc = nc;
    cfg.seed = seed;
    cfg.validate();

    const auto pairs = make_dataset(cfg);
    write_dataset(out, pairs, cfg, ppm);
    write_run_meta(out, "make-data", cfg.to_json(), seed, watch.seconds());
    std::printf("wrote %d pairs to %s\n", cfg.n, out.c_str());
    return kOk;
}

int cmd_make_masks(const std::string& image, std::uint64_t scene_seed, const std::string& size,
                   int k_shapes, int grid, int nc, const std::string& out) {
    LabelMap lm;
    if (!image.empty()) {
        lm = oracle_segment(read_ppm(image));
    } else {
        const auto [h, w] = parse_size(size);
        lm = make_scene(scene_seed, h, w, k_shapes).labels;
    }
    const auto stack = normalize_mask_count(grid_prompt_masks(lm, grid), nc, lm.h, lm.w);
    save_masks(out, stack);
    std::printf("wrote %d/%d masks (%dx%d) to %s\n", stack.count_before_normalization, nc, lm.h,
                lm.w, out.c_str());
    return kOk;
}

int cmd_pretrain(const std::string& config_path, const std::string& out) {
    Stopwatch watch;
    RunConfig rc = load_run_config(config_path);
    const auto data = read_dataset(rc.data);
    if (data.empty() || data[0].degradation.task != rc.task)
        throw std::invalid_argument("pretrain: dataset task does not match run config");
    fs::create_directories(out);

    std::vector<DatasetPair> val_data;
    const bool use_val = rc.train.val_every > 0 && rc.train.patience > 0 && !rc.eval_data.empty();
    if (use_val) val_data = read_dataset(rc.eval_data);

    ParamSet<float> ps;
    Backbone<float> bb(rc.backbone_config(), ps, rc.seed);
    const auto outcome = pretrain(bb, ps, data, rc.train, use_val ? &val_data : nullptr);

    Json meta;
    meta["kind"] = "backbone";
    meta["backbone"] = rc.backbone_config().to_json();
    meta["seed"] = rc.seed;
    meta["iters"] = outcome.iters_run;
    const std::string ckpt = (fs::path(out) / "backbone.ckpt").string();
    save_checkpoint(ckpt, ps, meta);
    write_file((fs::path(out) / "train_log.csv").string(), train_log_csv(outcome.log));
    write_run_meta(out, "pretrain", rc.to_json(), rc.seed, watch.seconds());
    std::printf("pretrain: %lld/%lld iters%s, loss %.6f -> %.6f, checkpoint %s\n",
                static_cast<long long>(outcome.iters_run),
                static_cast<long long>(rc.train.iters),
                outcome.stopped_early ? " (patience stop)" : "", outcome.initial_loss,
                outcome.final_loss, ckpt.c_str());
    if (use_val) std::printf("pretrain: best validation psnr %.4f dB\n", outcome.best_val_psnr);
    return kOk;
}

int cmd_tune(const std::string& config_path, const std::string& backbone_ckpt,
             const std::string& out, bool force) {
    Stopwatch watch;
    RunConfig rc = load_run_config(config_path);
    const auto data = read_dataset(rc.data);
    if (data.empty() || data[0].degradation.task != rc.task)
        throw std::invalid_argument("tune: dataset task does not match run config");
    fs::create_directories(out);

    const Json ckpt_meta = load_checkpoint_meta(backbone_ckpt);
    if (ckpt_meta.at("kind") != "backbone")
        throw std::invalid_argument("tune: --backbone must point at a backbone checkpoint");
    if (BackboneConfig::from_json(ckpt_meta.at("backbone")).to_json() !=
        rc.backbone_config().to_json())
        throw std::invalid_argument("tune: run config backbone differs from the checkpoint");

    ParamSet<float> ps;
    Backbone<float> bb(rc.backbone_config(), ps, rc.seed);
    // hash recorded at pretrain time guards the payload; --force skips it
    load_checkpoint(backbone_ckpt, ps, /*verify_hash=*/!force);

    std::vector<DatasetPair> val_data;
    const bool use_val = rc.train.val_every > 0 && rc.train.patience > 0 && !rc.eval_data.empty();
    if (use_val) val_data = read_dataset(rc.eval_data);

    TunedModel<float> model(bb, rc.spt, ps, rc.seed);
    const auto outcome = spt_tune(model, ps, data, rc.train, use_val ? &val_data : nullptr);

    Json meta;
    meta["kind"] = "tuned";
    meta["backbone"] = rc.backbone_config().to_json();
    meta["spt"] = rc.spt.to_json();
    meta["seed"] = rc.seed;
    meta["iters"] = outcome.iters_run;
    meta["backbone_ckpt_fnv1a"] = checkpoint_payload_hash(backbone_ckpt);
    const std::string ckpt = (fs::path(out) / "tuned.ckpt").string();
    save_checkpoint(ckpt, ps, meta);
    write_file((fs::path(out) / "train_log.csv").string(), train_log_csv(outcome.log));
    write_run_meta(out, "tune", rc.to_json(), rc.seed, watch.seconds());
    std::printf("tune: %lld/%lld iters%s, loss %.6f -> %.6f, trainable %lld of %lld scalars, "
                "checkpoint %s\n",
                static_cast<long long>(outcome.iters_run),
                static_cast<long long>(rc.train.iters),
                outcome.stopped_early ? " (patience stop)" : "", outcome.initial_loss,
                outcome.final_loss, static_cast<long long>(ps.n_trainable_scalars()),
                static_cast<long long>(ps.n_scalars()), ckpt.c_str());
    if (use_val) std::printf("tune: best validation psnr %.4f dB\n", outcome.best_val_psnr);
    return kOk;
}

int cmd_eval(const std::string& model_ckpt, const std::string& baseline_ckpt,
             const std::string& data_dir, const std::string& dataset_name, const std::string& out,
             bool float_psnr) {
    Stopwatch watch;
    const auto data = read_dataset(data_dir);
    auto model = load_model(model_ckpt);
    std::unique_ptr<LoadedModel> baseline;
    ModelFn base_fn;
    if (!baseline_ckpt.empty()) {
        baseline = load_model(baseline_ckpt);
        base_fn = model_fn(*baseline);
    }
    fs::create_directories(out);

    const std::string method = model->is_tuned ? "backbone+spt (tuned)" : "backbone";
    auto report = evaluate(model_fn(*model), method, data, dataset_name,
                           baseline ? &base_fn : nullptr, "backbone (frozen baseline)");
    report.seed = 0;

    if (float_psnr) {
        // labeled non-comparable: float-domain psnr of the evaluated model
        const MetricMode mode = metric_mode_for(data[0].degradation.task);
        double acc = 0.0;
        auto fn = model_fn(*model);
        for (const auto& pair : data) acc += psnr(fn(pair), pair.gt, mode, /*quantize=*/false);
        std::printf("float-domain psnr (non-comparable with 8-bit benchmarks): %.4f dB\n",
                    acc / static_cast<double>(data.size()));
    }

    write_file((fs::path(out) / "report.csv").string(), report_csv(report));
    write_file((fs::path(out) / "report.md").string(), report_markdown(report));
    write_run_meta(out, "eval", Json{{"model", model_ckpt}, {"baseline", baseline_ckpt}}, 0,
                   watch.seconds());
    std::fputs(report_text(report).c_str(), stdout);
    return kOk;
}

// one tune+eval leg of a sweep; the backbone checkpoint provides the frozen base
AblationRow ablate_leg(const RunConfig& rc, const SptConfig& scfg, const std::string& label,
                       const std::string& backbone_ckpt, const std::vector<DatasetPair>& train_data,
                       const std::vector<DatasetPair>& eval_data, double baseline_psnr) {
    ParamSet<float> ps;
    Backbone<float> bb(rc.backbone_config(), ps, rc.seed);
    load_checkpoint(backbone_ckpt, ps);
    TunedModel<float> model(bb, scfg, ps, rc.seed);
    spt_tune(model, ps, train_data, rc.train);

    const MetricMode mode = metric_mode_for(rc.task);
    double acc = 0.0;
    for (const auto& pair : eval_data) {
        auto lq = Value<float>::leaf(unsqueeze(pair.lq), false);
        auto masks = Value<float>::leaf(pair.masks.as_batched_tensor<float>(1), false);
        acc += psnr(squeeze(model.forward(lq, masks).tensor()), pair.gt, mode);
    }
    const double tuned_psnr = acc / static_cast<double>(eval_data.size());
    std::printf("  %-12s psnr %.4f (%+.4f)\n", label.c_str(), tuned_psnr,
                tuned_psnr - baseline_psnr);
    return {label, tuned_psnr, tuned_psnr - baseline_psnr};
}

int cmd_ablate(const std::string& sweep, const std::string& base_config,
               const std::string& backbone_ckpt_in, const std::string& out) {
    Stopwatch watch;
    RunConfig rc = load_run_config(base_config);
    if (sweep != "variants" && sweep != "positions" && sweep != "alpha" && sweep != "granularity")
        throw std::invalid_argument("ablate: unknown sweep " + sweep);
    fs::create_directories(out);

    DataConfig train_cfg = read_dataset_config(rc.data);
    DataConfig eval_cfg = read_dataset_config(rc.eval_data);

    auto train_data = read_dataset(rc.data);
    auto eval_data = read_dataset(rc.eval_data);

    // frozen baseline: reuse a provided checkpoint or pretrain one here
    std::string backbone_ckpt = backbone_ckpt_in;
    ParamSet<float> base_ps;
    Backbone<float> base_bb(rc.backbone_config(), base_ps, rc.seed);
    if (backbone_ckpt.empty()) {
        std::printf("ablate: pretraining the shared baseline (%lld iters)\n",
                    static_cast<long long>(rc.train.iters));
        pretrain(base_bb, base_ps, train_data, rc.train);
        Json meta;
        meta["kind"] = "backbone";
        meta["backbone"] = rc.backbone_config().to_json();
        meta["seed"] = rc.seed;
        backbone_ckpt = (fs::path(out) / "backbone.ckpt").string();
        save_checkpoint(backbone_ckpt, base_ps, meta);
    } else {
        load_checkpoint(backbone_ckpt, base_ps);
    }

    const MetricMode mode = metric_mode_for(rc.task);
    double base_acc = 0.0;
    for (const auto& pair : eval_data) {
        auto lq = Value<float>::leaf(unsqueeze(pair.lq), false);
        base_acc += psnr(squeeze(base_bb.forward(lq).tensor()), pair.gt, mode);
    }
    const double baseline_psnr = base_acc / static_cast<double>(eval_data.size());
    std::printf("ablate %s: baseline psnr %.4f over %zu images\n", sweep.c_str(), baseline_psnr,
                eval_data.size());

    std::vector<AblationRow> rows;
    std::vector<std::string> notes;
    if (sweep == "variants") {
        for (SptVariant v : {SptVariant::kFull, SptVariant::kNoFeatConcat, SptVariant::kNoPrior,
                             SptVariant::kCat}) {
            SptConfig scfg = rc.spt;
            scfg.variant = v;
            rows.push_back(ablate_leg(rc, scfg, to_string(v), backbone_ckpt, train_data, eval_data,
                                      baseline_psnr));
        }
    } else if (sweep == "positions") {
        for (int last = 1; last <= rc.n1; ++last) {
            SptConfig scfg = rc.spt;
            scfg.positions.clear();
            for (int i = 1; i <= last; ++i) scfg.positions.push_back(i);
            rows.push_back(ablate_leg(rc, scfg, "B" + std::to_string(last), backbone_ckpt,
                                      train_data, eval_data, baseline_psnr));
        }
        for (std::size_t i = 1; i + 1 < rows.size(); ++i)
            if (rows[i].psnr_db > rows[i + 1].psnr_db)
                notes.push_back("non-monotonic at " + rows[i].label + " -> " + rows[i + 1].label +
                                " (report-only)");
    } else if (sweep == "alpha") {
        for (double a : {0.5, 1.0, 1.5, 2.0}) {
            SptConfig scfg = rc.spt;
            scfg.alpha = a;
            char label[32];
            std::snprintf(label, sizeof(label), "alpha=%g", a);
            rows.push_back(
                ablate_leg(rc, scfg, label, backbone_ckpt, train_data, eval_data, baseline_psnr));
        }
    } else { // granularity
        const int grids[] = {8, 16, 24};
        const char* labels[] = {"Coarse", "Medium", "Fine"};
        for (int i = 0; i < 3; ++i) {
            // regenerate both datasets at this granularity from their manifests
            DataConfig tc = train_cfg, ec = eval_cfg;
            tc.grid = ec.grid = grids[i];
            tc.nc = ec.nc = granularity_mask_count(grids[i]);
            auto train_g = make_dataset(tc);
            auto eval_g = make_dataset(ec);
            SptConfig scfg = rc.spt;
            scfg.grid = tc.grid;
            scfg.nc = tc.nc;
            rows.push_back(
                ablate_leg(rc, scfg, labels[i], backbone_ckpt, train_g, eval_g, baseline_psnr));
        }
    }

    const std::string md = ablation_markdown(sweep, rows, notes);
    write_file((fs::path(out) / ("ablation_" + sweep + ".md")).string(), md);
    write_file((fs::path(out) / ("ablation_" + sweep + ".csv")).string(),
               ablation_csv(sweep, rows));
    write_run_meta(out, "ablate", rc.to_json(), rc.seed, watch.seconds());
    std::fputs(md.c_str(), stdout);
    for (const auto& n : notes) std::printf("note: %s\n", n.c_str());
    return kOk;
}

int cmd_gradcheck(bool inject_bug, double tol) {
    Stopwatch watch;
    const auto results = run_gradcheck_suite(inject_bug);
    bool ok = true;
    for (const auto& r : results) {
        const bool pass = r.max_rel_err <= tol;
        ok = ok && pass;
        std::printf("gradcheck %-34s max_rel_err %.3e  %s\n", r.component.c_str(), r.max_rel_err,
                    pass ? "ok" : "FAIL");
    }
    std::printf("gradcheck: %zu components in %.1f s, tolerance %.1e: %s\n", results.size(),
                watch.seconds(), tol, ok ? "all ok" : "FAILURES");
    return ok ? kOk : kCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segmentation-prior adapter tuning for image restoration"};
    app.require_subcommand(1);

    // make-data
    auto* mk = app.add_subcommand("make-data", "generate a synthetic degraded dataset");
    std::string md_task, md_size = "96x96", md_out;
    int md_r = 0, md_n = 16, md_k = 6, md_grid = 8, md_nc = 64;
    double md_sigma = -1.0;
    std::uint64_t md_seed = 0;
    bool md_ppm = false;
    mk->add_option("--task", md_task, "sr|denoise")->required();
    auto* mk_r = mk->add_option("--r", md_r, "SR scale in {2,3,4}");
    auto* mk_sigma = mk->add_option("--sigma", md_sigma, "noise sigma on the 0-255 scale");
    mk->add_option("--n", md_n, "number of scenes");
    mk->add_option("--size", md_size, "GT size HxW");
    mk->add_option("--k-shapes", md_k, "shapes per scene");
    mk->add_option("--grid", md_grid, "prompt grid size");
    mk->add_option("--nc", md_nc, "mask channel count");
    mk->add_option("--seed", md_seed, "master seed");
    mk->add_option("--out", md_out, "output directory")->required();
    mk->add_flag("--ppm", md_ppm, "also export PPM previews");

    // make-masks
    auto* mm = app.add_subcommand("make-masks", "emit a mask file from an image or a scene");
    std::string mm_image, mm_size = "96x96", mm_out;
    std::uint64_t mm_scene_seed = 0;
    int mm_k = 6, mm_grid = 8, mm_nc = 64;
    bool mm_has_scene = false;
    mm->add_option("--image", mm_image, "P6 PPM input image");
    mm->add_flag("--scene", mm_has_scene, "use a synthetic scene instead of an image");
    mm->add_option("--scene-seed", mm_scene_seed, "scene seed");
    mm->add_option("--size", mm_size, "scene size HxW");
    mm->add_option("--k-shapes", mm_k, "shapes per scene");
    mm->add_option("--grid", mm_grid, "prompt grid size")
        ->check(CLI::IsMember({8, 16, 24}));
    mm->add_option("--nc", mm_nc, "mask channel count");
    mm->add_option("--out", mm_out, "output .sptm path")->required();

    // pretrain
    auto* pt = app.add_subcommand("pretrain", "train a backbone from scratch");
    std::string pt_config, pt_out;
    pt->add_option("--config", pt_config, "run config JSON")->required();
    pt->add_option("--out", pt_out, "output directory")->required();

    // tune
    auto* tn = app.add_subcommand("tune", "adapter-tune a frozen pretrained backbone");
    std::string tn_config, tn_backbone, tn_out;
    bool tn_force = false;
    tn->add_option("--config", tn_config, "run config JSON")->required();
    tn->add_option("--backbone", tn_backbone, "backbone checkpoint")->required();
    tn->add_option("--out", tn_out, "output directory")->required();
    tn->add_flag("--force", tn_force, "skip the checkpoint hash verification");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string ev_model, ev_baseline, ev_data, ev_name = "synthetic-val", ev_out;
    bool ev_float = false;
    ev->add_option("--model", ev_model, "checkpoint to evaluate")->required();
    ev->add_option("--baseline", ev_baseline, "baseline checkpoint for delta columns");
    ev->add_option("--data", ev_data, "dataset directory")->required();
    ev->add_option("--dataset-name", ev_name, "dataset label in the report");
    ev->add_option("--out", ev_out, "output directory")->required();
    ev->add_flag("--float-psnr", ev_float, "also print float-domain psnr (non-comparable)");

    // ablate
    auto* ab = app.add_subcommand("ablate", "run an ablation sweep");
    std::string ab_sweep, ab_base, ab_backbone, ab_out;
    ab->add_option("--sweep", ab_sweep, "variants|positions|alpha|granularity")->required();
    ab->add_option("--base", ab_base, "base run config JSON")->required();
    ab->add_option("--backbone", ab_backbone, "reuse this pretrained backbone checkpoint");
    ab->add_option("--out", ab_out, "output directory")->required();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    bool gc_bug = false;
    double gc_tol = 1e-4;
    gc->add_flag("--inject-bug", gc_bug, "add a deliberately broken component (test fixture)");
    gc->add_option("--tol", gc_tol, "max relative error tolerance");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(mk))
            return cmd_make_data(md_task, md_r, md_sigma, !mk_r->empty(), !mk_sigma->empty(), md_n,
                                 md_size, md_k, md_grid, md_nc, md_seed, md_out, md_ppm);
        if (app.got_subcommand(mm)) {
            if (mm_image.empty() == !mm_has_scene)
                throw std::invalid_argument("make-masks: pass exactly one of --image or --scene");
            return cmd_make_masks(mm_image, mm_scene_seed, mm_size, mm_k, mm_grid, mm_nc, mm_out);
        }
        if (app.got_subcommand(pt)) return cmd_pretrain(pt_config, pt_out);
        if (app.got_subcommand(tn)) return cmd_tune(tn_config, tn_backbone, tn_out, tn_force);
        if (app.got_subcommand(ev))
            return cmd_eval(ev_model, ev_baseline, ev_data, ev_name, ev_out, ev_float);
        if (app.got_subcommand(ab)) return cmd_ablate(ab_sweep, ab_base, ab_backbone, ab_out);
        if (app.got_subcommand(gc)) return cmd_gradcheck(gc_bug, gc_tol);
        return kConfigError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kNumericError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
}
