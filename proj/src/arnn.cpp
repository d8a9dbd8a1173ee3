#include "arnnsci/arnn.hpp"

#include "arnnsci/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace arnnsci {

namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

int out_features(const ArnnConfig& cfg, int layer) {
  return layer == cfg.n_layers - 1 ? 2 : cfg.features_per_bit;
}

std::vector<double> input_vector(const Configuration& c) {
  std::vector<double> x(static_cast<std::size_t>(c.n_spin_orbitals));
  for (int q = 0; q < c.n_spin_orbitals; ++q) x[static_cast<std::size_t>(q)] = c.occupied(q) ? 1.0 : -1.0;
  return x;
}

void check_dims(const ArnnModel& m, const Configuration& c) {
  if (c.n_spin_orbitals != m.n_bits())
    throw DimensionError(
        fmt::format("configuration has {} bits, model expects {}", c.n_spin_orbitals, m.n_bits()));
}

// Activations of one forward pass, kept for backprop.
struct Trace {
  std::vector<double> x;
  std::vector<std::vector<double>> z;  // pre-activations per layer
  std::vector<std::vector<double>> h;  // post-activation (after dropout) per hidden layer
  std::vector<std::array<double, 2>> logp;
};

void forward(const ArnnModel& m, const Configuration& c, bool train_mode, std::uint64_t stream, Trace& t) {
  const int mb = m.n_bits();
  const auto n_layers = m.layout.size();
  t.x = input_vector(c);
  t.z.resize(n_layers);
  t.h.resize(n_layers - 1);
  const double rate = m.config.dropout_rate;
  const bool drop = train_mode && rate > 0.0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& lay = m.layout[l];
    const std::span<const double> in = l == 0 ? std::span<const double>(t.x) : std::span<const double>(t.h[l - 1]);
    t.z[l].assign(lay.rows(mb), 0.0);
    detail::layer_rows(m, l, in, t.z[l], 0, lay.rows(mb));
    if (l + 1 < n_layers) {
      t.h[l].resize(t.z[l].size());
      for (std::size_t r = 0; r < t.z[l].size(); ++r) {
        double a = detail::activate(m.config.activation, t.z[l][r]);
        if (drop) a = detail::dropout_keep(stream, l, r, rate) ? a / (1.0 - rate) : 0.0;
        t.h[l][r] = a;
      }
    }
  }
  const auto& logits = t.z.back();
  t.logp.resize(static_cast<std::size_t>(mb));
  for (int q = 0; q < mb; ++q) {
    const double z0 = logits[2 * static_cast<std::size_t>(q)];
    const double z1 = logits[2 * static_cast<std::size_t>(q) + 1];
    const double mx = std::max(z0, z1);
    const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
    t.logp[static_cast<std::size_t>(q)] = {z0 - lse, z1 - lse};
  }
}

double sum_log_prob(const Trace& t, const Configuration& c) {
  double s = 0.0;
  for (std::size_t q = 0; q < t.logp.size(); ++q) s += t.logp[q][c.occupied(static_cast<int>(q)) ? 1 : 0];
  return s;
}

void backward(const ArnnModel& m, const Configuration& c, const Trace& t, double w, bool train_mode,
              std::uint64_t stream, std::vector<double>& grad) {
  const int mb = m.n_bits();
  const auto n_layers = m.layout.size();
  const double rate = m.config.dropout_rate;
  const bool drop = train_mode && rate > 0.0;

  std::vector<double> dz(t.z.back().size());
  for (int q = 0; q < mb; ++q) {
    const auto qq = static_cast<std::size_t>(q);
    const int v = c.occupied(q) ? 1 : 0;
    for (int k = 0; k < 2; ++k) dz[2 * qq + static_cast<std::size_t>(k)] = w * ((k == v ? 1.0 : 0.0) - std::exp(t.logp[qq][static_cast<std::size_t>(k)]));
  }
  std::vector<double> da;
  for (std::size_t l = n_layers; l-- > 0;) {
    const auto& lay = m.layout[l];
    const std::span<const double> in = l == 0 ? std::span<const double>(t.x) : std::span<const double>(t.h[l - 1]);
    const std::size_t rows = lay.rows(mb);
    const std::size_t cols = lay.cols(mb);
    const double* wts = m.params.data() + lay.weight_offset;
    double* gw = grad.data() + lay.weight_offset;
    double* gb = grad.data() + lay.bias_offset;
    const bool need_input_grad = l > 0;
    if (need_input_grad) da.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = dz[r];
      if (g == 0.0) continue;
      gb[r] += g;
      const std::size_t allowed = lay.allowed(r);
      double* gw_row = gw + r * cols;
      const double* w_row = wts + r * cols;
      for (std::size_t col = 0; col < allowed; ++col) gw_row[col] += g * in[col];
      if (need_input_grad)
        for (std::size_t col = 0; col < allowed; ++col) da[col] += w_row[col] * g;
    }
    if (need_input_grad) {
      const auto& zprev = t.z[l - 1];
      dz.assign(cols, 0.0);
      for (std::size_t col = 0; col < cols; ++col) {
        double g = da[col];
        if (drop) g = detail::dropout_keep(stream, l - 1, col, rate) ? g / (1.0 - rate) : 0.0;
        dz[col] = g * detail::activate_derivative(m.config.activation, zprev[col]);
      }
    }
  }
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::selu ? "selu" : "tanh"; }

Activation activation_from_string(const std::string& name) {
  if (name == "selu") return Activation::selu;
  if (name == "tanh") return Activation::tanh;
  throw std::invalid_argument(fmt::format("unknown activation '{}' (expected selu or tanh)", name));
}

void ArnnConfig::validate() const {
  if (n_bits < 1 || n_bits > kMaxSpinOrbitals)
    throw std::invalid_argument(fmt::format("n_bits = {} outside 1..{}", n_bits, kMaxSpinOrbitals));
  if (n_layers < 1) throw std::invalid_argument("n_layers must be at least 1");
  if (features_per_bit < 1) throw std::invalid_argument("features_per_bit must be at least 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw std::invalid_argument(fmt::format("dropout_rate = {} outside [0, 1)", dropout_rate));
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be non-negative");
}

bool ArnnModel::is_masked(std::size_t index) const {
  const int mb = n_bits();
  for (const auto& lay : layout) {
    const std::size_t size = lay.rows(mb) * lay.cols(mb);
    if (index >= lay.weight_offset && index < lay.weight_offset + size) {
      const std::size_t off = index - lay.weight_offset;
      return off % lay.cols(mb) >= lay.allowed(off / lay.cols(mb));
    }
  }
  return false;
}

std::size_t ArnnModel::cache_size() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layout.size(); ++l) n += layout[l].rows(n_bits());
  return n;
}

ArnnModel init_model(const ArnnConfig& cfg) {
  cfg.validate();
  ArnnModel m;
  m.config = cfg;
  std::size_t offset = 0;
  for (int l = 0; l < cfg.n_layers; ++l) {
    LayerLayout lay;
    lay.in_features = l == 0 ? 1 : cfg.features_per_bit;
    lay.out_features = out_features(cfg, l);
    lay.strict = l == 0;
    lay.weight_offset = offset;
    offset += lay.rows(cfg.n_bits) * lay.cols(cfg.n_bits);
    lay.bias_offset = offset;
    offset += lay.rows(cfg.n_bits);
    m.layout.push_back(lay);
  }
  m.params.assign(offset, 0.0);
  SplitMix64 rng(derive_stream(cfg.seed, "init"));
  for (const auto& lay : m.layout) {
    const std::size_t cols = lay.cols(cfg.n_bits);
    for (std::size_t r = 0; r < lay.rows(cfg.n_bits); ++r) {
      const std::size_t fan = lay.allowed(r);
      const double bound = cfg.init_scale * std::sqrt(3.0 / static_cast<double>(std::max<std::size_t>(fan, 1)));
      for (std::size_t c = 0; c < fan; ++c)
        m.params[lay.weight_offset + r * cols + c] = (2.0 * rng.uniform() - 1.0) * bound;
    }
  }
  return m;
}

namespace detail {

void layer_rows(const ArnnModel& m, std::size_t layer, std::span<const double> in, std::span<double> out,
                std::size_t row_begin, std::size_t row_end) {
  const auto& lay = m.layout[layer];
  const std::size_t cols = lay.cols(m.n_bits());
  const double* w = m.params.data() + lay.weight_offset;
  const double* b = m.params.data() + lay.bias_offset;
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const double* row = w + r * cols;
    const std::size_t allowed = lay.allowed(r);
    double acc = b[r];
    for (std::size_t c = 0; c < allowed; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

double activate(Activation a, double z) noexcept {
  if (a == Activation::tanh) return std::tanh(z);
  return z > 0.0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * std::expm1(z);
}

double activate_derivative(Activation a, double z) noexcept {
  if (a == Activation::tanh) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  }
  return z > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
}

bool dropout_keep(std::uint64_t stream, std::size_t layer, std::size_t unit, double rate) noexcept {
  const std::uint64_t h = derive_seed(stream, layer, unit);
  return static_cast<double>(h >> 11) * 0x1.0p-53 >= rate;
}

}  // namespace detail

std::vector<std::array<double, 2>> conditional_log_probs(const ArnnModel& m, const Configuration& c,
                                                         bool train_mode, std::uint64_t dropout_seed) {
  check_dims(m, c);
  Trace t;
  forward(m, c, train_mode, dropout_seed, t);
  return t.logp;
}

double log_prob(const ArnnModel& m, const Configuration& c) {
  check_dims(m, c);
  Trace t;
  forward(m, c, false, 0, t);
  return sum_log_prob(t, c);
}

std::vector<double> log_prob_batch(const ArnnModel& m, std::span<const Configuration> batch) {
  for (const auto& c : batch) check_dims(m, c);
  std::vector<double> out(batch.size());
#pragma omp parallel
  {
    Trace t;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(batch.size()); ++i) {
      const auto& c = batch[static_cast<std::size_t>(i)];
      forward(m, c, false, 0, t);
      out[static_cast<std::size_t>(i)] = sum_log_prob(t, c);
    }
  }
  return out;
}

Gradient log_prob_grad(const ArnnModel& m, std::span<const WeightedConfiguration> batch, bool train_mode,
                       std::uint64_t dropout_seed) {
  if (batch.empty()) throw std::invalid_argument("log_prob_grad needs a nonempty batch");
  for (const auto& e : batch) {
    check_dims(m, e.config);
    if (!(e.weight >= 0.0)) throw std::invalid_argument("log_prob_grad weights must be non-negative");
  }
  Gradient out;
  out.grad.assign(m.n_params(), 0.0);
  const std::size_t n_chunks = (batch.size() + kGradientChunk - 1) / kGradientChunk;
  constexpr std::size_t kWave = 64;  // chunks held in memory at once
  std::vector<std::vector<double>> chunk_grad(std::min(n_chunks, kWave));
  std::vector<double> chunk_value(chunk_grad.size());
  for (std::size_t wave = 0; wave < n_chunks; wave += kWave) {
    const std::size_t n_here = std::min(kWave, n_chunks - wave);
#pragma omp parallel
    {
      Trace t;
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_here); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        auto& g = chunk_grad[kk];
        g.assign(m.n_params(), 0.0);
        double value = 0.0;
        const std::size_t begin = (wave + kk) * kGradientChunk;
        const std::size_t end = std::min(batch.size(), begin + kGradientChunk);
        for (std::size_t i = begin; i < end; ++i) {
          const auto& e = batch[i];
          if (e.weight == 0.0) continue;
          const std::uint64_t stream = derive_seed(dropout_seed, i);
          forward(m, e.config, train_mode, stream, t);
          value += e.weight * sum_log_prob(t, e.config);
          backward(m, e.config, t, e.weight, train_mode, stream, g);
        }
        chunk_value[kk] = value;
      }
    }
    for (std::size_t k = 0; k < n_here; ++k) {
      out.value += chunk_value[k];
      for (std::size_t p = 0; p < out.grad.size(); ++p) out.grad[p] += chunk_grad[k][p];
    }
  }
  return out;
}

std::array<double, 2> extend_prefix(const ArnnModel& m, std::span<double> cache, u64 prefix_bits, int q) {
  const int mb = m.n_bits();
  if (q < 0 || q >= mb) throw std::out_of_range("extend_prefix bit index out of range");
  if (cache.size() != m.cache_size()) throw std::invalid_argument("extend_prefix cache has the wrong size");
  std::vector<double> x(static_cast<std::size_t>(mb), -1.0);
  for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j)] = ((prefix_bits >> j) & 1U) ? 1.0 : -1.0;
  const auto n_layers = m.layout.size();
  std::size_t offset = 0;
  std::span<const double> in(x);
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const auto& lay = m.layout[l];
    const std::size_t rows = lay.rows(mb);
    auto block = cache.subspan(offset, rows);
    const std::size_t f = static_cast<std::size_t>(lay.out_features);
    const std::size_t rb = static_cast<std::size_t>(q) * f;
    detail::layer_rows(m, l, in, block, rb, rb + f);
    for (std::size_t r = rb; r < rb + f; ++r) block[r] = detail::activate(m.config.activation, block[r]);
    in = block;
    offset += rows;
  }
  // the final layer's two rows of bit q; layer_rows indexes by absolute row
  std::vector<double> logits(m.layout.back().rows(mb));
  const std::size_t rb = 2 * static_cast<std::size_t>(q);
  detail::layer_rows(m, n_layers - 1, in, logits, rb, rb + 2);
  const double z0 = logits[rb];
  const double z1 = logits[rb + 1];
  const double mx = std::max(z0, z1);
  const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
  return {z0 - lse, z1 - lse};
}

namespace {

constexpr char kMagic[8] = {'A', 'R', 'N', 'N', 'S', 'C', 'I', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw CheckpointError("checkpoint is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ArnnModel& m) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int32_t>(out, m.config.n_bits);
  put<std::int32_t>(out, m.config.n_layers);
  put<std::int32_t>(out, m.config.features_per_bit);
  put<std::int32_t>(out, m.config.activation == Activation::selu ? 0 : 1);
  put<double>(out, m.config.dropout_rate);
  put<double>(out, m.config.init_scale);
  put<std::uint64_t>(out, m.config.seed);
  put<std::uint64_t>(out, m.params.size());
  for (double v : m.params) put<double>(out, v);
  if (!out) throw CheckpointError("failed to write checkpoint");
}

ArnnModel read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic))
    throw CheckpointError("not an arnnsci checkpoint (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw CheckpointError(fmt::format("unsupported checkpoint version {}", version));
  ArnnConfig cfg;
  cfg.n_bits = get<std::int32_t>(in);
  cfg.n_layers = get<std::int32_t>(in);
  cfg.features_per_bit = get<std::int32_t>(in);
  cfg.activation = get<std::int32_t>(in) == 0 ? Activation::selu : Activation::tanh;
  cfg.dropout_rate = get<double>(in);
  cfg.init_scale = get<double>(in);
  cfg.seed = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  ArnnModel m = init_model(cfg);
  if (n != m.params.size())
    throw CheckpointError(fmt::format("checkpoint has {} parameters, architecture needs {}", n, m.params.size()));
  for (auto& v : m.params) v = get<double>(in);
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const ArnnModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError(fmt::format("cannot write '{}'", path.string()));
  write_checkpoint(out, m);
}

ArnnModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(fmt::format("cannot open '{}'", path.string()));
  return read_checkpoint(in);
}

}  // namespace arnnsci
