#pragma once

/**
 * @file config.hpp
 * @brief Plain-text run configuration.
 *
 *   # comments start with '#' or ';'
 *   [run]
 *   fcidump = h4_sto3g.fcidump      # relative to the config file
 *   seed_kind = hf
 *   beta_schedule = default         # default | auto | list, e.g. 0.1 0.6
 *   stages = 2
 *   [stage.1]
 *   n_train = 100000
 *
 * Keys before the first section belong to [run]. Unknown keys and sections
 * are errors. Overrides use the same keys, with stage keys written as
 * stage.<k>.<key>.
 */

#include "arnnsci/driver.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace arnnsci {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a config; a relative fcidump path is resolved against base_dir.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Applies one "key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Writes every key, so the output parses back to an identical RunConfig.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Every key accepted in [run].
[[nodiscard]] const std::vector<std::string>& run_keys();
/// Every key accepted in [stage.k].
[[nodiscard]] const std::vector<std::string>& stage_keys();

}  // namespace arnnsci
