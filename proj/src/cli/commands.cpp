#include "rlgan/cli/commands.hpp"

#include <CLI11.hpp>
#include <optional>

#include "rlgan/agent/finetune.hpp"
#include "rlgan/cli/checkpoint.hpp"
#include "rlgan/cli/config.hpp"
#include "rlgan/cli/metrics.hpp"
#include "rlgan/envs/frame_dataset.hpp"
#include "rlgan/errors.hpp"
#include "rlgan/imitation/il.hpp"
#include "rlgan/transfer/selection.hpp"
#include "rlgan/translate/collect.hpp"

namespace rlgan::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string metrics;

  RunConfig load() const {
    const fs::path file(config_file);
    return load_run_config(config_file.empty() ? nullptr : &file, overrides);
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "override one config key: --set 'discount rate=0.99'");
  app->add_option("--metrics", c.metrics, "append training metrics to this CSV");
}

numerics::ArchSpec arch_for(const RunConfig& c) { return agent::policy_arch(c.a2c.preprocess.observation_shape()); }

// identity, oracle, or a translator checkpoint path.
struct TranslatorChoice {
  transfer::Translator translator;
  std::optional<translate::TranslatorPair> pair;
};

TranslatorChoice resolve_translator(const std::string& spec, const envs::EnvConfig& env) {
  TranslatorChoice t;
  if (spec == "identity") {
    t.translator = transfer::Translator::identity();
  } else if (spec == "oracle") {
    t.translator = transfer::Translator::oracle(transfer::source_skin_of(env));
  } else {
    t.pair = load_translator(spec);
    t.translator = transfer::Translator::learned(*t.pair);
  }
  return t;
}

agent::EvalOptions eval_options(const RunConfig& c, std::size_t episodes) {
  agent::EvalOptions o;
  o.episodes = episodes;
  o.seed = numerics::derive_seed(c.seed, 0xE7A1);
  o.preprocess = c.a2c.preprocess;
  return o;
}

struct TrainOutcome {
  numerics::NetworkParams params;
  std::uint64_t frames = 0, updates = 0;
  double running_mean = 0;
  std::optional<std::uint64_t> frames_at_target;
};

TrainOutcome train(const RunConfig& c, numerics::NetworkParams start, const std::string& metrics) {
  const auto arch = arch_for(c);
  agent::A2CTrainer trainer(arch, std::move(start), c.env, c.a2c);
  if (!metrics.empty()) {
    write_metrics({}, metrics);
    trainer.set_metrics_sink([&](const agent::MetricsRecord& m) { write_metrics({&m, 1}, metrics); });
  }
  trainer.run();
  return {trainer.params(), trainer.frames(), trainer.updates(), trainer.running_mean(), trainer.frames_at_target()};
}

void print_training(std::ostream& out, const TrainOutcome& t) {
  out << "frames " << t.frames << " updates " << t.updates << " running_mean " << t.running_mean;
  if (t.frames_at_target) out << " frames_to_target " << *t.frames_at_target;
  out << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual transfer for reinforcement learning: A2C agents, unaligned GAN translators, imitation", "rlgan"};
  app.require_subcommand(1);
  Common common;

  std::string out_path, policy, translator = "identity", setting, report, domain = "source";
  std::string source_frames, target_frames, demos_path;
  std::size_t count = 0;

  auto* train_source = app.add_subcommand("train-source", "train an A2C agent from scratch on the configured game");
  auto* finetune = app.add_subcommand("finetune", "continue training a source policy under a fine-tuning setting");
  auto* baseline = app.add_subcommand("baseline-scratch", "from-scratch A2C reporting frames to the target score");
  auto* collect = app.add_subcommand("collect-frames", "record random-policy frames as an RLGF dataset");
  auto* train_gan = app.add_subcommand("train-gan", "train a translator and checkpoint it periodically");
  auto* eval = app.add_subcommand("eval-transfer", "score a policy on the configured game through a translator");
  auto* demos = app.add_subcommand("collect-demos", "collect filtered demonstrations through a translator");
  auto* train_il = app.add_subcommand("train-il", "pretrain on demonstrations, then gated A2C with imitation");

  for (auto* sub : {train_source, finetune, baseline, collect, train_gan, eval, demos, train_il}) add_common(sub, common);
  for (auto* sub : {train_source, finetune, baseline, collect, demos, train_il})
    sub->add_option("--out", out_path, "output file")->required();
  finetune->add_option("--policy", policy, "source policy checkpoint")->required()->check(CLI::ExistingFile);
  finetune->add_option("--setting", setting, "from-scratch | full-ft | random-output | partial-ft | partial-random-ft")
      ->required();
  collect->add_option("--count", count, "frames to record (default: frames per domain)");
  collect->add_option("--domain", domain, "source | target")->check(CLI::IsMember({"source", "target"}));
  train_gan->add_option("--source-frames", source_frames, "RLGF source dataset")->required()->check(CLI::ExistingFile);
  train_gan->add_option("--target-frames", target_frames, "RLGF target dataset")->required()->check(CLI::ExistingFile);
  train_gan->add_option("--out-dir", out_path, "checkpoint directory")->required();
  train_gan->add_option("--policy", policy, "score checkpoints with this policy on the configured game")
      ->check(CLI::ExistingFile);
  for (auto* sub : {eval, demos}) {
    sub->add_option("--policy", policy, "policy checkpoint")->required()->check(CLI::ExistingFile);
    sub->add_option("--translator", translator, "identity | oracle | translator checkpoint");
  }
  eval->add_option("--report", report, "append the evaluation report to this CSV");
  train_il->add_option("--demos", demos_path, "demo buffer checkpoint")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  RunConfig c;
  try {
    c = common.load();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const auto arch = arch_for(c);
    if (train_source->parsed()) {
      const auto t = train(c, agent::init_policy(arch, c.seed), common.metrics);
      save_checkpoint(t.params, out_path);
      print_training(out, t);
      const auto r = agent::evaluate(arch, t.params, c.env, eval_options(c, c.eval_episodes));
      out << "evaluation mean " << r.mean << " over " << r.episodes << " episodes\n";
    } else if (finetune->parsed() || baseline->parsed()) {
      numerics::NetworkParams start;
      if (finetune->parsed()) {
        const auto s = agent::parse_finetune_setting(setting);
        start = agent::apply_finetune_setting(arch, load_params(policy), s, c.seed);
      } else {
        start = agent::init_policy(arch, c.seed);
      }
      const auto t = train(c, std::move(start), common.metrics);
      save_checkpoint(t.params, out_path);
      print_training(out, t);
      if (baseline->parsed() && !t.frames_at_target) out << "target score not reached\n";
    } else if (collect->parsed()) {
      const auto ds = translate::collect_frames(c.env, count ? count : c.frames_per_domain, c.seed,
                                                domain == "source" ? translate::Domain::source
                                                                   : translate::Domain::target);
      envs::write_frames(out_path, ds.frames);
      out << "wrote " << ds.size() << " frames of " << envs::describe(c.env) << '\n';
    } else if (train_gan->parsed()) {
      translate::FrameDataset s, t;
      s.frames = envs::read_frames(source_frames);
      t.frames = envs::read_frames(target_frames);
      t.domain = translate::Domain::target;
      fs::create_directories(out_path);
      std::optional<numerics::NetworkParams> scorer;
      std::optional<transfer::CheckpointSelector> selector;
      if (!policy.empty()) {
        scorer = load_params(policy);
        selector.emplace(c.eval_every, transfer::translation_evaluator(arch, *scorer, c.env,
                                                                       eval_options(c, c.selection_episodes)));
      }
      const auto pair = translate::make_translator(c.translator, c.seed);
      translate::train_translator(pair, s, t, c.gan, [&](const translate::TranslatorCheckpoint& cp, const auto& l) {
        save_checkpoint(cp.pair, fs::path(out_path) / ("translator-" + std::to_string(cp.iteration) + ".rlgn"));
        out << "iteration " << cp.iteration << " cycle " << l.cycle << " adversarial " << l.adversarial;
        if (selector && selector->offer(cp)) out << " score " << selector->selection().reports.back().mean;
        out << '\n';
      });
      if (selector && selector->selection().best) {
        const auto& sel = selector->selection();
        save_checkpoint(*sel.best, fs::path(out_path) / "best.rlgn");
        write_reports(sel.reports, fs::path(out_path) / "selection.csv");
        out << "selected iteration " << sel.best_iteration << '\n';
      }
    } else if (eval->parsed()) {
      const auto params = load_params(policy);
      const auto t = resolve_translator(translator, c.env);
      auto r = transfer::eval_with_translation(arch, params, t.translator, c.env, eval_options(c, c.eval_episodes));
      r.checkpoint = translator;
      if (!report.empty()) write_reports({&r, 1}, report);
      out << "mean " << r.mean << " episodes " << r.episodes << " frames " << r.frames << '\n';
    } else if (demos->parsed()) {
      const auto params = load_params(policy);
      const auto t = resolve_translator(translator, c.env);
      auto gate = c.gate;
      gate.reference = imitation::measure_reference_score(arch, params, t.translator, c.env,
                                                          numerics::derive_seed(c.seed, 0xA7), c.a2c.preprocess);
      imitation::CollectOptions o;
      o.trajectories = c.trajectories;
      o.gamma = c.a2c.gamma;
      o.seed = numerics::derive_seed(c.seed, 0xD3);
      o.preprocess = c.a2c.preprocess;
      const auto r = imitation::collect_demonstrations(arch, params, t.translator, c.env, gate, o);
      save_demos(r.buffer, out_path);
      out << "reference score " << gate.reference << " kept " << r.kept << " of " << r.scores.size()
          << " trajectories, " << r.buffer.size() << " triples\n";
      if (r.empty_warning) err << "warning: every trajectory was filtered out; the demo buffer is empty\n";
    } else if (train_il->parsed()) {
      const auto buffer = load_demos(demos_path);
      imitation::PretrainConfig p;
      p.iterations = c.supervised_iterations;
      p.batch = c.il_batch;
      p.optimizer = c.il_optimizer;
      p.seed = c.seed;
      auto start = imitation::pretrain(arch, agent::init_policy(arch, c.seed), buffer, p);
      auto gate = c.gate;
      gate.reference = buffer.reference;
      imitation::ILConfig ic;
      ic.a2c = c.a2c;
      ic.batch = c.il_batch;
      ic.optimizer = c.il_optimizer;
      if (!common.metrics.empty()) write_metrics({}, common.metrics);
      const auto r = imitation::train_il(arch, std::move(start), c.env, buffer, gate, ic,
                                         [&](const agent::MetricsRecord& m) {
                                           if (!common.metrics.empty()) write_metrics({&m, 1}, common.metrics);
                                         });
      save_checkpoint(r.params, out_path);
      out << "frames " << r.frames << " off-policy updates " << r.offpolicy_updates;
      if (r.frames_at_target) out << " frames_to_target " << *r.frames_at_target;
      out << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rlgan::cli
