#include "rlgan/translate/gan.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::translate {

using namespace numerics;

namespace {

using G = Graph<float>;

Gradients subset(const Gradients& all, bool (*keep)(const std::string&)) {
  Gradients out;
  for (const auto& [name, g] : all)
    if (keep(name)) out.emplace(name, g);
  return out;
}

void check_batch(const Tensor& b, const char* which) {
  if (b.rank() != 4 || b.dim(0) != 1 || b.dim(1) != 3)
    throw ContractViolation(std::string("gan_update expects a (1, 3, H, W) ") + which + " batch, got " +
                            shape_string(b.shape()));
}

// mean((x - target)^2)
G::Var lsq(G& g, G::Var x, float target) { return g.mean(g.square(g.add_scalar(x, -target))); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw NumericalError(name, std::string("non-finite GAN loss ") + name);
}

struct GeneratorPass {
  G::Var fake_t, fake_s, adversarial, cycle, total;
};

// Generator objective inside `g`. Discriminator params are read when this is
// called, so call it after the discriminator step.
GeneratorPass generator_pass(G& g, const TranslatorPair& pair, G::Var s, G::Var t, G::Var fake_t, G::Var fake_s,
                             double lambda) {
  const auto& p = pair.params;
  const auto& c = pair.config;
  GeneratorPass r{fake_t, fake_s, {}, {}, {}};
  r.adversarial = g.add(lsq(g, discriminator_forward(g, p, c, 1, fake_t), 1.0f),
                        lsq(g, discriminator_forward(g, p, c, 2, fake_s), 1.0f));
  auto rec_s = generator_forward(g, p, c, 1, fake_t);
  auto rec_t = generator_forward(g, p, c, 2, fake_s);
  r.cycle = g.add(g.mean(g.abs(g.sub(rec_t, t))), g.mean(g.abs(g.sub(rec_s, s))));
  r.total = g.add(r.adversarial, g.scale(r.cycle, static_cast<float>(lambda)));
  return r;
}

}  // namespace

GanOptimizers make_gan_optimizers(const TranslatorPair& pair, const OptimizerConfig& config) {
  return {make_optimizer(config, pair.params), make_optimizer(config, pair.params)};
}

GanLosses generator_losses(const TranslatorPair& pair, const Tensor& batch_s, const Tensor& batch_t,
                           double lambda_cyc) {
  check_batch(batch_s, "source");
  check_batch(batch_t, "target");
  G g(false);
  auto s = g.constant(batch_s);
  auto t = g.constant(batch_t);
  auto fake_t = generator_forward(g, pair.params, pair.config, 2, s);
  auto fake_s = generator_forward(g, pair.params, pair.config, 1, t);
  const auto r = generator_pass(g, pair, s, t, fake_t, fake_s, lambda_cyc);
  GanLosses l;
  l.adversarial = g.value(r.adversarial).item();
  l.cycle = g.value(r.cycle).item();
  l.generator = g.value(r.total).item();
  return l;
}

GanLosses gan_update(TranslatorPair& pair, const Tensor& batch_s, const Tensor& batch_t, GanOptimizers& opt,
                     double lambda_cyc) {
  check_batch(batch_s, "source");
  check_batch(batch_t, "target");
  const auto& c = pair.config;
  GanLosses l;

  // Generator forward first; its graph is reused for the generator step.
  G gg;
  auto s = gg.constant(batch_s);
  auto t = gg.constant(batch_t);
  auto fake_t = generator_forward(gg, pair.params, c, 2, s);
  auto fake_s = generator_forward(gg, pair.params, c, 1, t);

  {
    G gd;
    auto real_s = gd.constant(batch_s);
    auto real_t = gd.constant(batch_t);
    auto ft = gd.constant(gg.value(fake_t));
    auto fs = gd.constant(gg.value(fake_s));
    auto d1 = gd.add(lsq(gd, discriminator_forward(gd, pair.params, c, 1, real_t), 1.0f),
                     lsq(gd, discriminator_forward(gd, pair.params, c, 1, ft), 0.0f));
    auto d2 = gd.add(lsq(gd, discriminator_forward(gd, pair.params, c, 2, real_s), 1.0f),
                     lsq(gd, discriminator_forward(gd, pair.params, c, 2, fs), 0.0f));
    auto total = gd.add(d1, d2);
    l.d1 = gd.value(d1).item();
    l.d2 = gd.value(d2).item();
    require_finite(l.d1, "d1");
    require_finite(l.d2, "d2");
    gd.backward(total);
    optimizer_step(pair.params, subset(gd.param_grads(pair.params), is_discriminator_param), opt.discriminators);
  }

  const auto r = generator_pass(gg, pair, s, t, fake_t, fake_s, lambda_cyc);
  l.adversarial = gg.value(r.adversarial).item();
  l.cycle = gg.value(r.cycle).item();
  l.generator = gg.value(r.total).item();
  require_finite(l.generator, "generator");
  gg.backward(r.total);
  optimizer_step(pair.params, subset(gg.param_grads(pair.params), is_generator_param), opt.generators);
  return l;
}

std::vector<TranslatorCheckpoint> train_translator(TranslatorPair pair, const FrameDataset& source,
                                                   const FrameDataset& target, const GanTrainConfig& config,
                                                   const CheckpointSink& sink) {
  source.validate();
  target.validate();
  if (config.checkpoint_interval == 0) throw ConfigError("checkpoint interval must be positive");
  auto opt = make_gan_optimizers(pair, config.optimizer);
  Rng rng(derive_seed(config.seed, 7));
  std::uniform_int_distribution<std::size_t> pick_s(0, source.size() - 1), pick_t(0, target.size() - 1);
  auto batch = [](const envs::Frame& f) {
    return f.reshaped({1, f.dim(0), f.dim(1), f.dim(2)});
  };
  std::vector<TranslatorCheckpoint> out;
  for (std::uint64_t it = 1; it <= config.iterations; ++it) {
    const auto& s = source.frames[pick_s(rng)];
    const auto& t = target.frames[pick_t(rng)];
    const auto losses = gan_update(pair, batch(s), batch(t), opt, config.lambda_cyc);
    if (it % config.checkpoint_interval == 0) {
      out.push_back({it, pair});
      if (sink) sink(out.back(), losses);
    }
  }
  return out;
}

}  // namespace rlgan::translate
