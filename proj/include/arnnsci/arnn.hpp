#pragma once

/**
 * @file arnn.hpp
 * @brief Masked-dense auto-regressive network over M occupation bits.
 *
 * Layer l maps M*F_in features to M*F_out features; unit (q, f) lives at
 * index q*F + f. Output bit q may read
 *   layer 0:  inputs of bits  < q   (strict)
 *   layer >0: features of bits <= q
 * so the allowed inputs of every row form a column prefix and the mask is
 * just a per-row prefix length. Weights are stored dense with masked entries
 * held at zero. Hidden layers use SELU; the last layer has two features per
 * bit that are log-softmaxed into log P_q(n_q | n_<q).
 *
 * Inputs enter as 2n - 1 (so an empty orbital is -1, not a silent zero).
 */

#include "arnnsci/determinant.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arnnsci {

enum class Activation { selu, tanh };

[[nodiscard]] std::string to_string(Activation a);
[[nodiscard]] Activation activation_from_string(const std::string& name);

struct ArnnConfig {
  int n_bits = 0;
  int n_layers = 2;
  int features_per_bit = 4;  // hidden width; the last layer always has 2
  double dropout_rate = 0.0;
  Activation activation = Activation::selu;
  std::uint64_t seed = 0;
  double init_scale = 1.0;  // 0 gives the uniform distribution

  void validate() const;
};

struct LayerLayout {
  int in_features = 0;
  int out_features = 0;
  bool strict = false;
  std::size_t weight_offset = 0;  // rows x cols, row-major
  std::size_t bias_offset = 0;
  [[nodiscard]] std::size_t rows(int m) const { return static_cast<std::size_t>(m * out_features); }
  [[nodiscard]] std::size_t cols(int m) const { return static_cast<std::size_t>(m * in_features); }
  /// Number of leading input columns row r may read.
  [[nodiscard]] std::size_t allowed(std::size_t r) const {
    const auto q = r / static_cast<std::size_t>(out_features);
    return (strict ? q : q + 1) * static_cast<std::size_t>(in_features);
  }
};

struct ArnnModel {
  ArnnConfig config;
  std::vector<LayerLayout> layout;
  std::vector<double> params;

  [[nodiscard]] int n_bits() const noexcept { return config.n_bits; }
  [[nodiscard]] std::size_t n_params() const noexcept { return params.size(); }
  /// True for weights the mask pins to zero; they never receive gradient.
  [[nodiscard]] bool is_masked(std::size_t index) const;
  /// Size of the per-prefix activation cache used by extend_prefix.
  [[nodiscard]] std::size_t cache_size() const;
};

/// Fresh model; weights ~ U(-s, s), s = init_scale * sqrt(3 / fan_in), biases zero.
[[nodiscard]] ArnnModel init_model(const ArnnConfig& cfg);

/// Row q holds {log P_q(0|prefix), log P_q(1|prefix)}. Dropout is active only
/// in train mode and its mask is a pure function of dropout_seed.
[[nodiscard]] std::vector<std::array<double, 2>> conditional_log_probs(
    const ArnnModel& m, const Configuration& c, bool train_mode = false,
    std::uint64_t dropout_seed = 0);

/// log P(n) = sum_q log P_q(n_q | n_<q), evaluation mode.
[[nodiscard]] double log_prob(const ArnnModel& m, const Configuration& c);

/// Parallel batch of log_prob; bit-identical to single calls.
[[nodiscard]] std::vector<double> log_prob_batch(const ArnnModel& m, std::span<const Configuration> batch);

struct WeightedConfiguration {
  Configuration config;
  double weight = 1.0;
};

struct Gradient {
  double value = 0.0;          // sum_i w_i log P(n_i)
  std::vector<double> grad;    // d value / d params
};

inline constexpr std::size_t kGradientChunk = 16;

/// Reverse-mode gradient of sum_i w_i log P(n_i). Entries are processed in
/// fixed chunks reduced in chunk order, so the result does not depend on the
/// number of threads. In train mode sample i uses dropout stream (seed, i).
[[nodiscard]] Gradient log_prob_grad(const ArnnModel& m, std::span<const WeightedConfiguration> batch,
                                     bool train_mode = false, std::uint64_t dropout_seed = 0);

/// Sampler support: cache holds the hidden activations of bits < q for one
/// prefix. Computes the units of bit q in every layer (appending them to the
/// cache) and returns {log P_q(0), log P_q(1)} for that prefix.
std::array<double, 2> extend_prefix(const ArnnModel& m, std::span<double> cache, u64 prefix_bits, int q);

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary checkpoint: magic "ARNNSCI1", version, config block, parameter
/// count, little-endian doubles.
void write_checkpoint(std::ostream& out, const ArnnModel& m);
[[nodiscard]] ArnnModel read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const ArnnModel& m);
[[nodiscard]] ArnnModel load_checkpoint(const std::filesystem::path& path);

namespace detail {
/// One masked-dense layer over rows [row_begin, row_end).
void layer_rows(const ArnnModel& m, std::size_t layer, std::span<const double> in, std::span<double> out,
                std::size_t row_begin, std::size_t row_end);
double activate(Activation a, double z) noexcept;
double activate_derivative(Activation a, double z) noexcept;
bool dropout_keep(std::uint64_t stream, std::size_t layer, std::size_t unit, double rate) noexcept;
}  // namespace detail

}  // namespace arnnsci
