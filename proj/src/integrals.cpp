#include "arnnsci/integrals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci {

IntegralTable::IntegralTable(int n_spatial_, int n_electrons_)
    : n_spatial(n_spatial_),
      n_electrons(n_electrons_),
      h1(static_cast<std::size_t>(n_spatial_) * static_cast<std::size_t>(n_spatial_), 0.0),
      h2(h1.size() * h1.size(), 0.0),
      orbital_irreps(static_cast<std::size_t>(n_spatial_), 0) {}

void IntegralTable::set_one_body(int p, int q, double v) {
  h1[static_cast<std::size_t>(p * n_spatial + q)] = v;
  h1[static_cast<std::size_t>(q * n_spatial + p)] = v;
}

void IntegralTable::set_two_body(int p, int q, int r, int s, double v) {
  const auto n = static_cast<std::size_t>(n_spatial);
  auto put = [&](int i, int j, int k, int l) {
    h2[((static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
        static_cast<std::size_t>(k)) * n + static_cast<std::size_t>(l)] = v;
  };
  put(p, q, r, s);
  put(q, p, r, s);
  put(p, q, s, r);
  put(q, p, s, r);
  put(r, s, p, q);
  put(s, r, p, q);
  put(r, s, q, p);
  put(s, r, q, p);
}

double IntegralTable::symmetry_violation() const {
  double worst = 0.0;
  const int n = n_spatial;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) worst = std::max(worst, std::abs(one_body(p, q) - one_body(q, p)));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = two_body(p, q, r, s);
          for (double w : {two_body(q, p, r, s), two_body(p, q, s, r), two_body(r, s, p, q)})
            worst = std::max(worst, std::abs(v - w));
        }
  return worst;
}

SymmetrySector sector_of(const IntegralTable& t) {
  SymmetrySector s;
  s.n_electrons = t.n_electrons;
  s.require_sz_zero = t.ms2 == 0;
  s.target_irrep = t.target_irrep;
  s.orbital_irreps = t.orbital_irreps;
  return s;
}

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::vector<long> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<long> out;
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw FcidumpError(fmt::format("malformed value '{}' for {}", tok, key));
    }
  }
  return out;
}

}  // namespace

IntegralTable parse_fcidump(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string caps = upper(text);

  const auto start = caps.find("&FCI");
  if (start == std::string::npos) throw FcidumpError("FCIDUMP header must start with &FCI");
  std::size_t header_end = caps.find("&END", start);
  std::size_t body_start = header_end == std::string::npos ? std::string::npos : header_end + 4;
  {
    // Fortran namelists may also close with a lone '/'.
    std::size_t pos = start;
    while ((pos = caps.find('/', pos)) != std::string::npos) {
      if (header_end != std::string::npos && pos > header_end) break;
      const auto line_begin = caps.rfind('\n', pos);
      const auto line_end = caps.find('\n', pos);
      std::string line = caps.substr(line_begin == std::string::npos ? 0 : line_begin + 1,
                                     line_end == std::string::npos ? std::string::npos
                                                                   : line_end - line_begin - 1);
      line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
      if (line == "/") {
        header_end = pos;
        body_start = pos + 1;
        break;
      }
      ++pos;
    }
  }
  if (header_end == std::string::npos) throw FcidumpError("FCIDUMP header is not terminated");

  const std::string header = caps.substr(start + 4, header_end - start - 4);
  std::unordered_map<std::string, std::vector<long>> fields;
  const std::regex key_re(R"(([A-Z_][A-Z0-9_]*)\s*=)");
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> keys;
  for (auto it = std::sregex_iterator(header.begin(), header.end(), key_re);
       it != std::sregex_iterator(); ++it)
    keys.push_back({(*it)[1].str(),
                    {static_cast<std::size_t>(it->position(0)),
                     static_cast<std::size_t>(it->position(0) + it->length(0))}});
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto value_begin = keys[k].second.second;
    const auto value_end = k + 1 < keys.size() ? keys[k + 1].second.first : header.size();
    const auto& key = keys[k].first;
    if (key == "ORBSYM" || key == "NORB" || key == "NELEC" || key == "MS2" || key == "ISYM")
      fields[key] = parse_int_list(header.substr(value_begin, value_end - value_begin), key);
  }
  auto scalar = [&](const std::string& key, std::optional<long> fallback) -> long {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.empty()) {
      if (fallback) return *fallback;
      throw FcidumpError(fmt::format("FCIDUMP header is missing {}", key));
    }
    if (it->second.size() != 1) throw FcidumpError(fmt::format("{} must be a single integer", key));
    return it->second.front();
  };

  const long norb = scalar("NORB", std::nullopt);
  const long nelec = scalar("NELEC", std::nullopt);
  if (norb <= 0) throw FcidumpError("NORB must be positive");
  if (2 * norb > kMaxSpinOrbitals)
    throw FcidumpError(fmt::format("NORB = {} gives {} spin-orbitals; at most {} are supported", norb,
                                   2 * norb, kMaxSpinOrbitals));
  if (nelec < 0 || nelec > 2 * norb) throw FcidumpError(fmt::format("NELEC = {} out of range", nelec));

  IntegralTable t(static_cast<int>(norb), static_cast<int>(nelec));
  t.ms2 = static_cast<int>(scalar("MS2", 0));
  const long isym = scalar("ISYM", 1);
  if (isym < 1 || isym > 8) throw FcidumpError(fmt::format("ISYM = {} outside 1..8", isym));
  t.target_irrep = static_cast<std::uint8_t>(isym - 1);
  if (auto it = fields.find("ORBSYM"); it != fields.end()) {
    if (static_cast<long>(it->second.size()) != norb)
      throw FcidumpError(
          fmt::format("ORBSYM lists {} irreps for NORB = {}", it->second.size(), norb));
    for (std::size_t p = 0; p < it->second.size(); ++p) {
      const long k = it->second[p];
      if (k < 1 || k > 8) throw FcidumpError(fmt::format("ORBSYM entry {} outside 1..8", k));
      t.orbital_irreps[p] = static_cast<std::uint8_t>(k - 1);
    }
  }

  std::istringstream body(text.substr(body_start));
  std::string line;
  bool saw_core = false;
  std::size_t line_no = 0;
  while (std::getline(body, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string value_text;
    if (!(ls >> value_text)) continue;
    long i = 0, j = 0, k = 0, l = 0;
    if (!(ls >> i >> j >> k >> l))
      throw FcidumpError(fmt::format("integral line {} is malformed: '{}'", line_no, line));
    std::replace(value_text.begin(), value_text.end(), 'D', 'E');
    std::replace(value_text.begin(), value_text.end(), 'd', 'e');
    double value = 0.0;
    try {
      value = std::stod(value_text);
    } catch (const std::exception&) {
      throw FcidumpError(fmt::format("integral line {} has a bad value '{}'", line_no, value_text));
    }
    for (long idx : {i, j, k, l})
      if (idx < 0 || idx > norb)
        throw FcidumpError(fmt::format("index {} on line {} outside 0..{}", idx, line_no, norb));
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      t.core_energy = value;
      saw_core = true;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) continue;  // orbital energies, not needed
      t.set_one_body(static_cast<int>(i - 1), static_cast<int>(j - 1), value);
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw FcidumpError(fmt::format("partial zero indices on line {}", line_no));
      t.set_two_body(static_cast<int>(i - 1), static_cast<int>(j - 1), static_cast<int>(k - 1),
                     static_cast<int>(l - 1), value);
    }
  }
  if (!saw_core) spdlog::warn("FCIDUMP has no core-energy line; using 0");
  return t;
}

IntegralTable load_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FcidumpError(fmt::format("cannot open FCIDUMP '{}'", path.string()));
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralTable& t) {
  out << fmt::format(" &FCI NORB={},NELEC={},MS2={},\n  ORBSYM=", t.n_spatial, t.n_electrons, t.ms2);
  for (int p = 0; p < t.n_spatial; ++p)
    out << (p ? "," : "") << static_cast<int>(t.orbital_irreps[static_cast<std::size_t>(p)]) + 1;
  out << fmt::format(",\n  ISYM={},\n &END\n", static_cast<int>(t.target_irrep) + 1);
  const int n = t.n_spatial;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = t.two_body(p, q, r, s);
          if (v != 0.0) out << fmt::format("{:.17g} {} {} {} {}\n", v, p + 1, q + 1, r + 1, s + 1);
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (const double v = t.one_body(p, q); v != 0.0)
        out << fmt::format("{:.17g} {} {} 0 0\n", v, p + 1, q + 1);
  out << fmt::format("{:.17g} 0 0 0 0\n", t.core_energy);
}

namespace {

// Apply a_q (create = false) or a+_q (create = true) to `state`; returns the
// Jordan-Wigner sign from the occupied bits below q.
inline int apply_op(u64& state, int q, bool create) noexcept {
  const u64 below = state & ((u64{1} << q) - 1);
  state ^= u64{1} << q;
  (void)create;
  return (std::popcount(below) & 1) ? -1 : 1;
}

inline bool same_spin(int a, int b, int half) noexcept { return (a < half) == (b < half); }

}  // namespace

int excitation_phase(const Configuration& a, const Configuration& b) {
  const u64 diff = a.bits ^ b.bits;
  u64 holes = b.bits & diff;
  u64 particles = a.bits & diff;
  if (std::popcount(holes) != std::popcount(particles)) return 0;
  u64 state = b.bits;
  int sign = 1;
  // normal order a+_{p1} a+_{p2} ... a_{h2} a_{h1}: annihilate lowest hole first,
  // then create the highest particle first.
  while (holes) {
    const int h = std::countr_zero(holes);
    holes &= holes - 1;
    sign *= apply_op(state, h, false);
  }
  std::vector<int> ps;
  while (particles) {
    ps.push_back(std::countr_zero(particles));
    particles &= particles - 1;
  }
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) sign *= apply_op(state, *it, true);
  return sign;
}

MatrixElement slater_condon(const Configuration& a_in, const Configuration& b_in,
                            const IntegralTable& t) {
  const int m = t.n_spin_orbitals();
  if (a_in.n_spin_orbitals != m || b_in.n_spin_orbitals != m)
    throw DimensionError(fmt::format("configurations with {} and {} spin-orbitals against a table of {}",
                                     a_in.n_spin_orbitals, b_in.n_spin_orbitals, m));
  // Evaluate in a canonical order so that <a|H|b> and <b|H|a> are bit-identical.
  const bool swap = a_in.bits > b_in.bits;
  const Configuration& a = swap ? b_in : a_in;
  const Configuration& b = swap ? a_in : b_in;

  const u64 diff = a.bits ^ b.bits;
  const int n_diff = std::popcount(diff);
  if (n_diff > 4 || a.popcount() != b.popcount()) return {0.0, 3};
  const int half = m / 2;
  const u64 down = block_mask(SpinBlock::down, m);
  if (std::popcount(a.bits & down) != std::popcount(b.bits & down)) return {0.0, n_diff / 2};

  auto spatial = [m](int bit) { return spatial_of_bit(bit, m); };

  if (n_diff == 0) {
    double e = t.core_energy;
    int occ[kMaxSpinOrbitals];
    int n_occ = 0;
    for (u64 rest = a.bits; rest; rest &= rest - 1) occ[n_occ++] = std::countr_zero(rest);
    for (int i = 0; i < n_occ; ++i) {
      const int pi = spatial(occ[i]);
      e += t.one_body(pi, pi);
      for (int j = i + 1; j < n_occ; ++j) {
        const int pj = spatial(occ[j]);
        e += t.two_body(pi, pi, pj, pj);
        if (same_spin(occ[i], occ[j], half)) e -= t.two_body(pi, pj, pj, pi);
      }
    }
    return {e, 0};
  }

  const int sign = excitation_phase(a, b);
  if (n_diff == 2) {
    const int hole = std::countr_zero(b.bits & diff);
    const int part = std::countr_zero(a.bits & diff);
    const int ph = spatial(hole);
    const int pp = spatial(part);
    double v = t.one_body(pp, ph);
    for (u64 rest = b.bits & ~(u64{1} << hole); rest; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      const int pj = spatial(j);
      v += t.two_body(pp, ph, pj, pj);
      if (same_spin(j, part, half)) v -= t.two_body(pp, pj, pj, ph);
    }
    return {sign * v, 1};
  }

  u64 holes = b.bits & diff;
  u64 parts = a.bits & diff;
  const int h1 = std::countr_zero(holes);
  holes &= holes - 1;
  const int h2 = std::countr_zero(holes);
  const int p1 = std::countr_zero(parts);
  parts &= parts - 1;
  const int p2 = std::countr_zero(parts);
  double v = 0.0;
  if (same_spin(p1, h1, half) && same_spin(p2, h2, half))
    v += t.two_body(spatial(p1), spatial(h1), spatial(p2), spatial(h2));
  if (same_spin(p1, h2, half) && same_spin(p2, h1, half))
    v -= t.two_body(spatial(p1), spatial(h2), spatial(p2), spatial(h1));
  return {sign * v, 2};
}

namespace {

void check_unique(std::span<const Configuration> basis, int m) {
  std::vector<u64> sorted;
  sorted.reserve(basis.size());
  for (const auto& c : basis) {
    if (c.n_spin_orbitals != m)
      throw DimensionError(
          fmt::format("basis configuration has {} spin-orbitals, table has {}", c.n_spin_orbitals, m));
    sorted.push_back(c.bits);
  }
  std::sort(sorted.begin(), sorted.end());
  if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end())
    throw DuplicateConfiguration(
        fmt::format("configuration {} appears twice in the basis", Configuration{*it, m}.to_string()));
}

using Row = std::vector<std::pair<std::uint32_t, double>>;

SparseMatrix pack_rows(std::vector<Row>& rows) {
  SparseMatrix h;
  h.dim = rows.size();
  h.row_ptr.assign(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) h.row_ptr[i + 1] = h.row_ptr[i] + rows[i].size();
  h.col.resize(h.row_ptr.back());
  h.val.resize(h.row_ptr.back());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t k = h.row_ptr[i];
    for (const auto& [j, v] : rows[i]) {
      h.col[k] = j;
      h.val[k] = v;
      ++k;
    }
    Row().swap(rows[i]);
  }
  return h;
}

}  // namespace

SparseMatrix assemble_subspace(std::span<const Configuration> basis, const IntegralTable& t,
                               std::size_t all_pairs_limit) {
  const int m = t.n_spin_orbitals();
  check_unique(basis, m);
  const std::size_t n = basis.size();
  std::vector<Row> rows(n);

  if (n <= all_pairs_limit) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      Row& row = rows[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (std::popcount(basis[i].bits ^ basis[j].bits) > 4) continue;
        const auto me = slater_condon(basis[i], basis[j], t);
        if (me.value != 0.0 || i == j) row.emplace_back(static_cast<std::uint32_t>(j), me.value);
      }
    }
    return pack_rows(rows);
  }

  std::unordered_map<u64, std::uint32_t> index;
  index.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) index.emplace(basis[i].bits, static_cast<std::uint32_t>(i));

#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Row& row = rows[i];
    row.emplace_back(static_cast<std::uint32_t>(i), slater_condon(basis[i], basis[i], t).value);
    auto visit = [&](const Configuration& e) {
      auto it = index.find(e.bits);
      if (it == index.end()) return;
      const double v = slater_condon(basis[i], e, t).value;
      if (v != 0.0) row.emplace_back(it->second, v);
    };
    for_each_excitation(basis[i], ExcitationOrder::singles, visit);
    for_each_excitation(basis[i], ExcitationOrder::doubles, visit);
    std::sort(row.begin(), row.end());
  }
  return pack_rows(rows);
}

}  // namespace arnnsci
