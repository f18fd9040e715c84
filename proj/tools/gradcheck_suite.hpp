// 64-bit finite-difference verification of every differentiable component,
// shared by the `gradcheck` CLI command and the acceptance suite.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "sptir/optim.hpp"

namespace sptir {

struct GradCheckEntry {
    std::string component;
    double max_rel_err = 0.0;
};

// Every layer, the SPT unit in all four variants, and an end-to-end tiny
// tuned model (N1=2, C=4, 8x8 input). h = 1e-5 central differences.
inline std::vector<GradCheckEntry> run_gradcheck_suite(bool inject_bug = false) {
    constexpr double kH = 1e-5;
    std::vector<GradCheckEntry> out;
    auto record = [&](const std::string& name, double err) { out.push_back({name, err}); };

    auto weigh = [](const Value<double>& v, std::uint64_t seed) {
        return sum(mul(v, Value<double>::leaf(
                              Tensor<double>::seeded_uniform(v.shape(), seed, -1.0, 1.0))));
    };

    {
        ParamSet<double> ps;
        Rng rng(101);
        auto conv = make_conv(ps, "c", 2, 3, 3, rng);
        const auto x0 = Tensor<double>::seeded_uniform({1, 2, 6, 6}, 102, -1.0, 1.0);
        record("conv2d/input", grad_check(
                                   [&](const Value<double>& x) {
                                       return weigh(conv2d(x, conv), 103);
                                   },
                                   x0, kH));
        record("conv2d/weight",
               grad_check(
                   [&](const Value<double>& w) {
                       ConvParams<double> p;
                       p.cin = 2;
                       p.cout = 3;
                       p.k = 3;
                       p.weight = w;
                       p.bias = Value<double>::leaf(conv.bias.tensor());
                       return weigh(conv2d(Value<double>::leaf(x0), p), 103);
                   },
                   conv.weight.tensor(), kH));
        record("conv2d/bias",
               grad_check(
                   [&](const Value<double>& b) {
                       ConvParams<double> p;
                       p.cin = 2;
                       p.cout = 3;
                       p.k = 3;
                       p.weight = Value<double>::leaf(conv.weight.tensor());
                       p.bias = b;
                       return weigh(conv2d(Value<double>::leaf(x0), p), 103);
                   },
                   conv.bias.tensor(), kH));
    }

    {
        ParamSet<double> ps;
        Rng rng(111);
        auto conv = make_conv(ps, "c", 2, 2, 3, rng);
        record("relu_composite",
               grad_check(
                   [&](const Value<double>& x) {
                       return weigh(relu(conv2d(x, conv)), 112);
                   },
                   Tensor<double>::seeded_uniform({1, 2, 6, 6}, 113, -1.0, 1.0), kH));
    }

    record("pixel_shuffle",
           grad_check(
               [&](const Value<double>& x) {
                   return sum(mul(pixel_shuffle(x, 2),
                                  Value<double>::leaf(Tensor<double>::seeded_uniform(
                                      {1, 2, 8, 8}, 121, -1.0, 1.0))));
               },
               Tensor<double>::seeded_uniform({1, 8, 4, 4}, 122, -1.0, 1.0), kH));

    {
        ParamSet<double> ps;
        Rng rng(131);
        auto fb = make_f_block(ps, "f", 3, 4, 3, 3, rng);
        const auto x0 = Tensor<double>::seeded_uniform({1, 3, 6, 6}, 132, -1.0, 1.0);
        record("f_block/input", grad_check(
                                    [&](const Value<double>& x) {
                                        return weigh(f_block(x, fb), 133);
                                    },
                                    x0, kH));
        record("f_block/weight",
               grad_check(
                   [&](const Value<double>& w) {
                       FBlock<double> fb2 = fb;
                       fb2.conv1.weight = w;
                       return weigh(f_block(Value<double>::leaf(x0), fb2), 133);
                   },
                   fb.conv1.weight.tensor(), kH));
    }

    for (SptVariant v : {SptVariant::kFull, SptVariant::kNoFeatConcat, SptVariant::kNoPrior,
                         SptVariant::kCat}) {
        const int c = 4, nc = 4;
        ParamSet<double> ps;
        Rng rng(141);
        auto unit = make_spt_unit(ps, "spt.unit1", v, c, nc, rng, /*zero_init_output=*/false);
        const auto f0 = Tensor<double>::seeded_uniform({1, c, 6, 6}, 142, -1.0, 1.0);
        const auto p0 = Tensor<double>::seeded_uniform({1, c, 6, 6}, 143, -1.0, 1.0);
        auto masks =
            Value<double>::leaf(Tensor<double>::seeded_uniform({1, nc, 6, 6}, 144, 0.0, 1.0));
        auto scalarize = [&](std::pair<Value<double>, PriorState<double>> r) {
            return add(weigh(r.first, 145), weigh(r.second.p, 146));
        };
        record("spt_unit/" + to_string(v) + "/feature",
               grad_check(
                   [&](const Value<double>& f) {
                       return scalarize(
                           spt_forward(unit, f, PriorState<double>{Value<double>::leaf(p0)}, masks));
                   },
                   f0, kH));
        if (v != SptVariant::kNoPrior) {
            record("spt_unit/" + to_string(v) + "/prior",
                   grad_check(
                       [&](const Value<double>& p) {
                           return scalarize(spt_forward(unit, Value<double>::leaf(f0),
                                                        PriorState<double>{p}, masks));
                       },
                       p0, kH));
        }
        if (v == SptVariant::kFull) {
            record("spt_unit/full/enh_weight",
                   grad_check(
                       [&](const Value<double>& w) {
                           SptUnit<double> u2 = unit;
                           u2.enhance->conv1.weight = w;
                           return scalarize(spt_forward(u2, Value<double>::leaf(f0),
                                                        PriorState<double>{Value<double>::leaf(p0)},
                                                        masks));
                       },
                       unit.enhance->conv1.weight.tensor(), kH));
        }
    }

    {
        // end-to-end: tiny tuned model, N1=2, C=4, 8x8 input
        ParamSet<double> ps;
        BackboneConfig bcfg;
        bcfg.task = Task::kSr;
        bcfg.r = 2;
        bcfg.feat = 4;
        bcfg.n1 = 2;
        Backbone<double> bb(bcfg, ps, 151);
        SptConfig scfg;
        scfg.positions = {1, 2};
        scfg.nc = 4;
        TunedModel<double> model(bb, scfg, ps, 152);
        // give the zero-initialized output projections arbitrary values so the
        // end-to-end check exercises every SPT path
        {
            Rng rr(156);
            for (auto& e : ps.entries())
                if (e.name.rfind("spt.", 0) == 0 &&
                    e.name.find(".enh.conv2.weight") != std::string::npos)
                    for (auto& v : e.param.tensor_mut().data)
                        v = rr.uniform(-0.3, 0.3);
        }
        auto masks =
            Value<double>::leaf(Tensor<double>::seeded_uniform({1, 4, 8, 8}, 153, 0.0, 1.0));
        const auto target = Tensor<double>::seeded_uniform({1, 3, 16, 16}, 154, 0.0, 1.0);
        record("tuned_model/e2e_input",
               grad_check(
                   [&](const Value<double>& x) {
                       return l2_loss(model.forward(x, masks), target);
                   },
                   Tensor<double>::seeded_uniform({1, 3, 8, 8}, 155, 0.0, 1.0), kH));
    }

    if (inject_bug) {
        // mutation fixture: forward x^2 whose backward claims d/dx = 3x
        record("corrupted_backward(fixture)",
               grad_check(
                   [](const Value<double>& x) {
                       Tensor<double> sq = x.tensor();
                       for (auto& v : sq.data) v = v * v;
                       auto y = detail::make_op<double>(
                           "corrupted_square", std::move(sq), {x.node()}, [](Node<double>& self) {
                               Tensor<double> g = self.grad;
                               for (std::size_t i = 0; i < g.data.size(); ++i)
                                   g.data[i] *= 3.0 * self.parents[0]->value.data[i];
                               self.parents[0]->accumulate(g);
                           });
                       return sum(y);
                   },
                   Tensor<double>::seeded_uniform({8}, 161, 0.5, 1.5), kH));
    }

    return out;
}

} // namespace sptir
