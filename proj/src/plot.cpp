#include "arnnsci/plot.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

namespace arnnsci {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 160;
constexpr double kTop = 30;
constexpr double kBottom = 60;
constexpr double kFloor = 1e-10;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void header(std::ostream& out) {
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out << fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
}

void frame(std::ostream& out, const std::string& xlabel, const std::string& ylabel) {
  const double x1 = kWidth - kRight;
  const double y1 = kHeight - kBottom;
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, x1 - kLeft, y1 - kTop);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (kLeft + x1) / 2, kHeight - 15,
                     escape(xlabel));
  out << fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                     (kTop + y1) / 2, escape(ylabel));
}

void legend(std::ostream& out, const std::vector<std::string>& labels) {
  const double x = kWidth - kRight + 12;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + 14 + 18 * static_cast<double>(i);
    out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"4\" fill=\"{}\"/>\n", x, y - 4,
                       kPalette[i % std::size(kPalette)]);
    out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", x + 18, y, escape(labels[i]));
  }
}

}  // namespace

void write_convergence_svg(std::ostream& out, const std::vector<ConvergenceSeries>& series, double chem_acc) {
  int max_iter = 1;
  double lo = chem_acc;
  double hi = chem_acc;
  for (const auto& s : series)
    for (const auto& r : s.records) {
      if (!r.delta_e) continue;
      max_iter = std::max(max_iter, r.index);
      const double d = std::max(*r.delta_e, kFloor);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  const double dlo = std::floor(std::log10(lo));
  const double dhi = std::max(std::ceil(std::log10(hi)), dlo + 1);
  const double x1 = kWidth - kRight;
  const double y1 = kHeight - kBottom;
  auto px = [&](double i) { return kLeft + (x1 - kLeft) * i / max_iter; };
  auto py = [&](double d) { return y1 - (y1 - kTop) * (std::log10(std::max(d, kFloor)) - dlo) / (dhi - dlo); };

  header(out);
  frame(out, "iteration", "Delta E (Ha)");
  for (double e = dlo; e <= dhi; e += 1) {
    out << fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", kLeft, x1, py(std::pow(10, e)));
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6, py(std::pow(10, e)) + 4,
                       static_cast<int>(e));
  }
  const int step = std::max(1, max_iter / 10);
  for (int i = 0; i <= max_iter; i += step)
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(i), y1 + 18, i);
  out << fmt::format(
      "<line class=\"chem-acc\" x1=\"{0}\" x2=\"{1}\" y1=\"{2}\" y2=\"{2}\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n",
      kLeft, x1, py(chem_acc));
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:g} Ha</text>\n", x1 - 4, py(chem_acc) - 4, chem_acc);

  std::vector<std::string> labels;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    labels.push_back(s.label);
    std::string pts;
    for (const auto& r : s.records)
      if (r.delta_e) pts += fmt::format("{:.2f},{:.2f} ", px(r.index), py(*r.delta_e));
    const char* color = kPalette[k % std::size(kPalette)];
    out << fmt::format("<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       pts, color);
    for (const auto& r : s.records)
      if (r.delta_e)
        out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(r.index), py(*r.delta_e),
                           color);
  }
  legend(out, labels);
  out << "</svg>\n";
}

void write_born_table(std::ostream& out, const SparseState& gs) {
  const double norm = gs.norm_squared();
  out << "rank,bitstring,probability,cumulative\n";
  double cum = 0.0;
  std::size_t rank = 0;
  for (auto i : gs.order_by_weight()) {
    const double p = gs.amplitudes[i] * gs.amplitudes[i] / norm;
    cum += p;
    out << fmt::format("{},{},{:.17g},{:.17g}\n", ++rank, gs.support[i].to_string(), p, cum);
  }
}

std::vector<BornEntry> read_born_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "rank,bitstring,probability,cumulative")
    throw std::runtime_error("Born table header must be 'rank,bitstring,probability,cumulative'");
  std::vector<BornEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string rank, bits, p;
    if (!std::getline(ss, rank, ',') || !std::getline(ss, bits, ',') || !std::getline(ss, p, ','))
      throw std::runtime_error(fmt::format("malformed Born table line '{}'", line));
    out.push_back({Configuration::from_string(bits), std::stod(p)});
  }
  return out;
}

std::vector<Configuration> read_state_support(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "bitstring,amplitude")
    throw std::runtime_error("state CSV header must be 'bitstring,amplitude'");
  std::vector<Configuration> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(Configuration::from_string(line.substr(0, line.find(','))));
  }
  return out;
}

std::vector<double> filling_fractions(const std::vector<BornEntry>& born, const std::vector<Configuration>& support,
                                      std::size_t n_top, int bins) {
  if (bins < 1) throw std::invalid_argument("filling_fractions: bins must be positive");
  n_top = std::min(n_top, born.size());
  const std::unordered_set<Configuration> have(support.begin(), support.end());
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> size(out.size(), 0.0);
  for (std::size_t r = 0; r < n_top; ++r) {
    const auto b = std::min(out.size() - 1, r * out.size() / n_top);
    size[b] += 1.0;
    if (have.count(born[r].config)) out[b] += 1.0;
  }
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = size[b] > 0 ? out[b] / size[b] : 0.0;
  return out;
}

void write_filling_svg(std::ostream& out, const std::vector<FillingSeries>& series, std::size_t n_ca,
                       std::size_t n_top) {
  std::size_t bins = 1;
  for (const auto& s : series) bins = std::max(bins, s.fractions.size());
  const double x1 = kWidth - kRight;
  const double y1 = kHeight - kBottom;
  const double slot = (x1 - kLeft) / static_cast<double>(bins);
  const double bar = slot / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  header(out);
  frame(out, fmt::format("configurations by Born rank ({} per bin)", n_top / bins), "fraction present");
  for (int t = 0; t <= 4; ++t) {
    const double y = y1 - (y1 - kTop) * t / 4.0;
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.2f}</text>\n", kLeft - 6, y + 4, t / 4.0);
  }
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < series.size(); ++k) {
    labels.push_back(series[k].label);
    for (std::size_t b = 0; b < series[k].fractions.size(); ++b) {
      const double h = (y1 - kTop) * series[k].fractions[b];
      out << fmt::format("<rect class=\"bin\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         kLeft + slot * static_cast<double>(b) + bar * static_cast<double>(k), y1 - h, bar, h,
                         kPalette[k % std::size(kPalette)]);
    }
  }
  if (n_top > 0) {
    const double x = kLeft + (x1 - kLeft) * static_cast<double>(n_ca) / static_cast<double>(n_top);
    out << fmt::format(
        "<line class=\"n-ca\" x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1}\" y2=\"{2}\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n",
        x, kTop, y1);
  }
  legend(out, labels);
  out << "</svg>\n";
}

}  // namespace arnnsci
