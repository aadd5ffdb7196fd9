#pragma once

#include <functional>
#include <vector>

#include "rlgan/numerics/optimizer.hpp"
#include "rlgan/translate/collect.hpp"
#include "rlgan/translate/translator.hpp"

namespace rlgan::translate {

// Adam(2e-4, beta1 0.5): at (1e-4, 0.9) the const-rect translator was still
// copying the rectangle after 5k iterations.
inline numerics::OptimizerConfig gan_optimizer() { return numerics::OptimizerConfig::adam(2e-4, 0.5); }

struct GanOptimizers {
  numerics::OptimizerState generators;
  numerics::OptimizerState discriminators;
};

GanOptimizers make_gan_optimizers(const TranslatorPair& pair,
                                  const numerics::OptimizerConfig& config = gan_optimizer());

struct GanLosses {
  double d1 = 0, d2 = 0;      // least-squares discriminator losses
  double adversarial = 0;     // generator adversarial terms, both directions
  double cycle = 0;           // mean |G2(G1(t)) - t| + mean |G1(G2(s)) - s|
  double generator = 0;       // adversarial + lambda * cycle
};

// Losses of the generator objective without updating anything.
GanLosses generator_losses(const TranslatorPair& pair, const Tensor& batch_s, const Tensor& batch_t,
                           double lambda_cyc);

// One discriminator step on detached fakes, then one generator step.
// Batches are (1, 3, H, W).
GanLosses gan_update(TranslatorPair& pair, const Tensor& batch_s, const Tensor& batch_t, GanOptimizers& opt,
                     double lambda_cyc);

struct TranslatorCheckpoint {
  std::uint64_t iteration = 0;
  TranslatorPair pair;
};

struct GanTrainConfig {
  std::uint64_t iterations = 20000;
  std::uint64_t checkpoint_interval = 1000;
  double lambda_cyc = 10.0;
  numerics::OptimizerConfig optimizer = gan_optimizer();
  std::uint64_t seed = 1;
};

using CheckpointSink = std::function<void(const TranslatorCheckpoint&, const GanLosses&)>;

// Uniformly sampled singleton batches from each dataset; a checkpoint after
// every checkpoint_interval iterations, passed to `sink` and returned.
std::vector<TranslatorCheckpoint> train_translator(TranslatorPair pair, const FrameDataset& source,
                                                   const FrameDataset& target, const GanTrainConfig& config,
                                                   const CheckpointSink& sink = {});

}  // namespace rlgan::translate
