#include "arnnsci/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace arnnsci {

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys{
      "fcidump",    "seed_kind",  "n_gs_samples", "n_network_samples", "n_unique_cap",       "beta_schedule",
      "beta_auto_iterations",     "beta0",        "stages",            "activation",         "warm_start",
      "max_iterations",           "epsilon_ha",   "patience",          "rng_seed",           "fci_guard",
      "chem_acc",   "stop_below_delta_e",         "output_dir",        "write_loss_trace"};
  return keys;
}

const std::vector<std::string>& stage_keys() {
  static const std::vector<std::string> keys{"n_layers", "features_per_bit", "dropout_rate", "n_train",
                                             "epochs",   "minibatch_size",   "learning_rate"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, text));
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string v = trim(text);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<std::string> split_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void set_stage_count(RunConfig& cfg, std::size_t n) {
  if (n < 1) throw ConfigError("stages: at least one stage is required");
  const auto defaults = default_stages();
  while (cfg.stages.size() < n)
    cfg.stages.push_back(cfg.stages.size() < defaults.size() ? defaults[cfg.stages.size()] : cfg.stages.back());
  cfg.stages.resize(n);
}

void set_run_key(RunConfig& cfg, const std::string& key, const std::string& value,
                 const std::filesystem::path& base_dir) {
  const std::string v = trim(value);
  if (key == "fcidump") {
    std::filesystem::path p(v);
    cfg.fcidump_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (key == "seed_kind") {
    try {
      cfg.seed_kind = seed_kind_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "n_gs_samples") {
    cfg.n_gs_samples = parse_number<std::uint64_t>(key, v);
  } else if (key == "n_network_samples") {
    cfg.n_network_samples = parse_number<std::uint64_t>(key, v);
  } else if (key == "n_unique_cap") {
    cfg.n_unique_cap = parse_number<std::size_t>(key, v);
  } else if (key == "beta_schedule") {
    auto& b = cfg.beta_schedule;
    b.values.clear();
    b.automatic = false;
    b.use_seed_default = false;
    if (v == "default") {
      b.use_seed_default = true;
    } else if (v == "auto") {
      b.automatic = true;
    } else if (v != "none") {
      for (const auto& w : split_list(v)) b.values.push_back(parse_number<double>(key, w));
    }
  } else if (key == "beta_auto_iterations") {
    cfg.beta_schedule.automatic_iterations = parse_number<int>(key, v);
  } else if (key == "beta0") {
    cfg.beta0 = parse_number<double>(key, v);
  } else if (key == "stages") {
    set_stage_count(cfg, parse_number<std::size_t>(key, v));
  } else if (key == "activation") {
    try {
      cfg.activation = activation_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "warm_start") {
    cfg.warm_start = parse_bool(key, v);
  } else if (key == "max_iterations") {
    cfg.max_iterations = parse_number<int>(key, v);
  } else if (key == "epsilon_ha") {
    cfg.epsilon_ha = parse_number<double>(key, v);
  } else if (key == "patience") {
    cfg.patience = parse_number<int>(key, v);
  } else if (key == "rng_seed") {
    cfg.rng_seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "fci_guard") {
    cfg.fci_guard = parse_number<std::uint64_t>(key, v);
  } else if (key == "chem_acc") {
    cfg.chem_acc = parse_number<double>(key, v);
  } else if (key == "stop_below_delta_e") {
    if (v == "none" || v.empty())
      cfg.stop_below_delta_e.reset();
    else
      cfg.stop_below_delta_e = parse_number<double>(key, v);
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "write_loss_trace") {
    cfg.write_loss_trace = parse_bool(key, v);
  } else {
    throw ConfigError(fmt::format("unknown key '{}' in [run]", key));
  }
}

void set_stage_key(StageConfig& s, const std::string& key, const std::string& value) {
  if (key == "n_layers") {
    s.n_layers = parse_number<int>(key, value);
  } else if (key == "features_per_bit") {
    s.features_per_bit = parse_number<int>(key, value);
  } else if (key == "dropout_rate") {
    s.dropout_rate = parse_number<double>(key, value);
  } else if (key == "n_train") {
    s.n_train = parse_number<std::uint64_t>(key, value);
  } else if (key == "epochs") {
    s.epochs = parse_number<int>(key, value);
  } else if (key == "minibatch_size") {
    s.minibatch_size = parse_number<int>(key, value);
  } else if (key == "learning_rate") {
    s.learning_rate = parse_number<double>(key, value);
  } else {
    throw ConfigError(fmt::format("unknown stage key '{}'", key));
  }
}

std::size_t stage_index(const std::string& text) {
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(fmt::format("bad stage index '{}'", text));
  return k;
}

void set_stage(RunConfig& cfg, std::size_t k, const std::string& key, const std::string& value) {
  if (k >= cfg.stages.size()) {
    if (k > cfg.stages.size()) throw ConfigError(fmt::format("stage.{} given before stage.{}", k, cfg.stages.size()));
    set_stage_count(cfg, k + 1);
  }
  set_stage_key(cfg.stages[k], key, value);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

void validate(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(e.what());
  }
  RunConfig cfg;
  // [run] first so that 'stages' sizes the list before any stage section
  std::vector<const CLI::ConfigItem*> stage_items;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const auto& p = item.parents;
    if (p.empty() || (p.size() == 1 && p[0] == "run")) {
      set_run_key(cfg, item.name, join(item.inputs), base_dir);
    } else if (p.size() == 2 && p[0] == "stage") {
      stage_items.push_back(&item);
    } else {
      std::string section;
      for (const auto& s : p) section += (section.empty() ? "" : ".") + s;
      throw ConfigError(fmt::format("unknown section [{}]", section));
    }
  }
  std::map<std::size_t, std::vector<const CLI::ConfigItem*>> by_stage;
  for (const auto* item : stage_items) by_stage[stage_index(item->parents[1])].push_back(item);
  for (const auto& [k, list] : by_stage)
    for (const auto* item : list) set_stage(cfg, k, item->name, join(item->inputs));
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  return parse_config(in, path.parent_path());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.rfind("run.", 0) == 0) key = key.substr(4);
  if (key.rfind("stage.", 0) == 0) {
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) throw ConfigError(fmt::format("override '{}' needs stage.<k>.<key>", key));
    set_stage(cfg, stage_index(key.substr(6, dot - 6)), key.substr(dot + 1), value);
  } else {
    set_run_key(cfg, key, value, {});
  }
  validate(cfg);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  const auto path = cfg.fcidump_path.empty() ? std::string() : std::filesystem::absolute(cfg.fcidump_path).string();
  std::string beta;
  const auto& b = cfg.beta_schedule;
  if (b.automatic) {
    beta = "auto";
  } else if (!b.values.empty()) {
    for (double x : b.values) beta += (beta.empty() ? "" : " ") + fmt::format("{:.17g}", x);
  } else {
    beta = b.use_seed_default ? "default" : "none";
  }
  out << "[run]\n";
  out << fmt::format("fcidump = \"{}\"\n", path);
  out << fmt::format("seed_kind = {}\n", to_string(cfg.seed_kind));
  out << fmt::format("n_gs_samples = {}\n", cfg.n_gs_samples);
  out << fmt::format("n_network_samples = {}\n", cfg.n_network_samples);
  out << fmt::format("n_unique_cap = {}\n", cfg.n_unique_cap);
  out << fmt::format("beta_schedule = {}\n", beta);
  out << fmt::format("beta_auto_iterations = {}\n", b.automatic_iterations);
  out << fmt::format("beta0 = {:.17g}\n", cfg.beta0);
  out << fmt::format("stages = {}\n", cfg.stages.size());
  out << fmt::format("activation = {}\n", to_string(cfg.activation));
  out << fmt::format("warm_start = {}\n", cfg.warm_start);
  out << fmt::format("max_iterations = {}\n", cfg.max_iterations);
  out << fmt::format("epsilon_ha = {:.17g}\n", cfg.epsilon_ha);
  out << fmt::format("patience = {}\n", cfg.patience);
  out << fmt::format("rng_seed = {}\n", cfg.rng_seed);
  out << fmt::format("fci_guard = {}\n", cfg.fci_guard);
  out << fmt::format("chem_acc = {:.17g}\n", cfg.chem_acc);
  out << fmt::format("stop_below_delta_e = {}\n",
                     cfg.stop_below_delta_e ? fmt::format("{:.17g}", *cfg.stop_below_delta_e) : "none");
  out << fmt::format("output_dir = \"{}\"\n", cfg.output_dir.string());
  out << fmt::format("write_loss_trace = {}\n", cfg.write_loss_trace);
  for (std::size_t k = 0; k < cfg.stages.size(); ++k) {
    const auto& s = cfg.stages[k];
    out << fmt::format("\n[stage.{}]\n", k);
    out << fmt::format("n_layers = {}\n", s.n_layers);
    out << fmt::format("features_per_bit = {}\n", s.features_per_bit);
    out << fmt::format("dropout_rate = {:.17g}\n", s.dropout_rate);
    out << fmt::format("n_train = {}\n", s.n_train);
    out << fmt::format("epochs = {}\n", s.epochs);
    out << fmt::format("minibatch_size = {}\n", s.minibatch_size);
    out << fmt::format("learning_rate = {:.17g}\n", s.learning_rate);
  }
}

}  // namespace arnnsci
