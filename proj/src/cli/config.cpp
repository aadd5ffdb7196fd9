#include "rlgan/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "rlgan/errors.hpp"

namespace rlgan::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <typename F>
Setter custom(F f) {
  return f;
}

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> s = {
      // run level
      {"game", custom([](RunConfig& c, const auto&, const auto& v) { c.env.game = envs::parse_game(v); })},
      {"variant", custom([](RunConfig& c, const auto&, const auto& v) { c.env.variant = envs::parse_variant(v); })},
      {"level", custom([](RunConfig& c, const auto& k, const auto& v) { c.env.level = int(to_uint(k, v)); })},
      {"render level",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.env.render_level = int(to_uint(k, v)); })},
      {"frame skip", custom([](RunConfig& c, const auto& k, const auto& v) { c.env.frame_skip = int(to_uint(k, v)); })},
      {"max episode frames", custom([](RunConfig& c, const auto& k, const auto& v) { c.env.max_steps = to_uint(k, v); })},
      {"seed", custom([](RunConfig& c, const auto& k, const auto& v) { c.seed = to_uint(k, v); })},
      {"max frames", custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.max_frames = to_uint(k, v); })},
      {"target score", custom([](RunConfig& c, const auto& k, const auto& v) {
         c.a2c.stop_at_mean_reward = to_double(k, v);
       })},
      {"log every", custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.log_every = to_uint(k, v); })},
      {"reward window",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.reward_window = to_uint(k, v); })},
      {"evaluation episodes",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.eval_episodes = to_uint(k, v); })},
      // A2C table
      {"state size", custom([](RunConfig&, const auto& k, const auto& v) {
         if (v != "4x84x84") throw ConfigError("'" + k + "' is fixed at 4x84x84, got '" + v + "'");
       })},
      {"# actor learners", custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.workers = to_uint(k, v); })},
      {"discount rate", custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.gamma = to_double(k, v); })},
      {"RMSprop learning rate", custom([](RunConfig& c, const auto& k, const auto& v) {
         c.a2c.optimizer.learning_rate = to_double(k, v);
       })},
      {"RMSprop decay",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.optimizer.decay = to_double(k, v); })},
      {"RMSprop epsilon",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.optimizer.epsilon = to_double(k, v); })},
      {"step-returns", custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.n_steps = to_uint(k, v); })},
      {"entropy regularization weight", custom([](RunConfig& c, const auto& k, const auto& v) {
         c.a2c.loss.entropy_weight = to_double(k, v);
       })},
      {"value loss weight",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.loss.value_weight = to_double(k, v); })},
      {"max grad norm",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.a2c.loss.max_grad_norm = to_double(k, v); })},
      // translator
      {"Adam learning rate", custom([](RunConfig& c, const auto& k, const auto& v) {
         c.gan.optimizer.learning_rate = to_double(k, v);
       })},
      {"Adam beta1", custom([](RunConfig& c, const auto& k, const auto& v) { c.gan.optimizer.decay = to_double(k, v); })},
      {"GAN iterations", custom([](RunConfig& c, const auto& k, const auto& v) { c.gan.iterations = to_uint(k, v); })},
      {"checkpoint interval",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.gan.checkpoint_interval = to_uint(k, v); })},
      {"cycle weight", custom([](RunConfig& c, const auto& k, const auto& v) { c.gan.lambda_cyc = to_double(k, v); })},
      {"sharing mode",
       custom([](RunConfig& c, const auto&, const auto& v) { c.translator.sharing = translate::parse_sharing_mode(v); })},
      {"translator init", custom([](RunConfig& c, const auto& k, const auto& v) {
         if (v == "xavier")
           c.translator.init = numerics::InitScheme::xavier();
         else if (v == "orthogonal")
           c.translator.init = numerics::InitScheme::orthogonal();
         else
           throw ConfigError("'" + k + "' expects xavier or orthogonal, got '" + v + "'");
       })},
      {"translator channels",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.translator.base_channels = to_uint(k, v); })},
      {"residual blocks",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.translator.res_blocks = to_uint(k, v); })},
      {"eval every", custom([](RunConfig& c, const auto& k, const auto& v) { c.eval_every = to_uint(k, v); })},
      {"selection episodes",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.selection_episodes = to_uint(k, v); })},
      {"frames per domain",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.frames_per_domain = to_uint(k, v); })},
      // imitation table
      {"trajectories", custom([](RunConfig& c, const auto& k, const auto& v) { c.trajectories = to_uint(k, v); })},
      {"beta1", custom([](RunConfig& c, const auto& k, const auto& v) { c.gate.beta1 = to_double(k, v); })},
      {"beta2", custom([](RunConfig& c, const auto& k, const auto& v) { c.gate.beta2 = to_double(k, v); })},
      {"Supervised_Iterations",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.supervised_iterations = to_uint(k, v); })},
      {"SGD learning rate",
       custom([](RunConfig& c, const auto& k, const auto& v) { c.il_optimizer.learning_rate = to_double(k, v); })},
      {"SGD momentum", custom([](RunConfig& c, const auto& k, const auto& v) { c.il_optimizer.decay = to_double(k, v); })},
      {"b", custom([](RunConfig& c, const auto& k, const auto& v) { c.il_batch = to_uint(k, v); })},
      {"op_interval", custom([](RunConfig& c, const auto& k, const auto& v) { c.gate.op_interval = to_uint(k, v); })},
  };
  return s;
}

}  // namespace

std::vector<std::string> schema_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : schema()) keys.push_back(k);
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second(config, key, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    // '#' only starts a comment at the line start or after whitespace, so
    // "# actor learners" works as a key.
    const std::string stripped = trim(line);
    if (stripped.empty() || (stripped[0] == '#' && stripped.find('=') == std::string::npos)) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + " is not 'key = value': " + stripped);
    std::string value = stripped.substr(eq + 1);
    if (const auto hash = value.find(" #"); hash != std::string::npos) value.resize(hash);
    out.emplace_back(trim(stripped.substr(0, eq)), trim(value));
  }
  return out;
}

RunConfig load_run_config(const std::filesystem::path* file, const std::vector<std::string>& overrides) {
  RunConfig config;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(ss.str())) apply_setting(config, k, v);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value, got '" + o + "'");
    apply_setting(config, trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  config.env.validate();
  config.a2c.validate();
  config.gate.validate();
  config.a2c.seed = config.seed;
  config.gan.seed = config.seed;
  return config;
}

}  // namespace rlgan::cli
