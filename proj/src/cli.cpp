#include "arnnsci/cli.hpp"

#include "arnnsci/config.hpp"
#include "arnnsci/driver.hpp"
#include "arnnsci/parallel.hpp"
#include "arnnsci/plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace arnnsci::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", p.string()));
  return in;
}

RunConfig resolve_config(const std::filesystem::path& config_path, const std::vector<std::string>& overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  if (cfg.fcidump_path.empty()) throw ConfigError("no fcidump given (set fcidump in the config or override it)");
  if (!std::filesystem::exists(cfg.fcidump_path))
    throw std::runtime_error(fmt::format("FCIDUMP file not found: {}", cfg.fcidump_path.string()));
  return cfg;
}

template <typename F>
int guarded(std::ostream& out, F&& body) {
  try {
    return body();
  } catch (const GuardExceeded& e) {
    out << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out) {
  return guarded(out, [&] {
    RunConfig cfg = resolve_config(opt.config_path, opt.overrides);
    if (!opt.output_dir.empty()) cfg.output_dir = opt.output_dir;
    if (cfg.output_dir.empty()) cfg.output_dir = "arnnsci_run";
    std::filesystem::create_directories(cfg.output_dir);
    {
      auto snap = open_out(cfg.output_dir / "config.snapshot");
      write_config(snap, cfg);
    }
    const auto result = run(cfg);
    const auto& last = result.records.back();
    out << fmt::format("final energy {:.10f} Ha after {} iterations", last.energy, last.index);
    if (last.delta_e) out << fmt::format(", Delta E = {:.3e} Ha", *last.delta_e);
    out << '\n';
    switch (result.status) {
      case RunStatus::converged:
        out << "status: converged\n";
        return kExitOk;
      case RunStatus::reached_target:
        out << "status: reached target\n";
        return kExitOk;
      case RunStatus::max_iterations:
        out << "status: max iterations\n";
        return kExitMaxIterations;
    }
    return kExitError;
  });
}

int cmd_fci(const FciOptions& opt, std::ostream& out, FciReport* report) {
  return guarded(out, [&] {
    const auto t = load_fcidump(opt.fcidump);
    const auto s = sector_of(t);
    const auto gs = fci_reference(t, s, opt.guard);
    FciReport r;
    r.energy = gs.energy;
    r.dimension = gs.size();
    out << fmt::format("FCI energy {:.12f} Ha (dimension {})\n", gs.energy, gs.size());
    if (opt.chem_acc) {
      r.n_ca = n_ca(gs, t, *opt.chem_acc);
      r.expected_samples = expected_samples(gs, *r.n_ca);
      out << fmt::format("N_CA = {} at {:g} Ha; 1/p(N_CA) = {}\n", *r.n_ca, *opt.chem_acc, *r.expected_samples);
    }
    if (!opt.born_table.empty()) {
      auto f = open_out(opt.born_table);
      write_born_table(f, gs);
    }
    if (report) *report = r;
    return kExitOk;
  });
}

int cmd_seed(const SeedOptions& opt, std::ostream& out) {
  return guarded(out, [&] {
    RunConfig cfg = resolve_config(opt.config_path, opt.overrides);
    const auto ctx = prepare(cfg, load_fcidump(cfg.fcidump_path));
    const auto seed = build_seed(cfg, ctx);
    const auto [psi0, rec] = iteration_zero(seed, cfg, ctx);
    out << fmt::format("seed {}: {} configurations, energy {:.10f} Ha\n", to_string(cfg.seed_kind), seed.size(),
                       seed.energy);
    out << fmt::format("iteration 0: {} configurations, energy {:.10f} Ha", psi0.size(), psi0.energy);
    if (rec.delta_e) out << fmt::format(", Delta E = {:.3e} Ha", *rec.delta_e);
    out << '\n';
    if (!opt.output_dir.empty()) {
      auto a = open_out(opt.output_dir / "seed_state.csv");
      write_state_csv(a, seed);
      auto b = open_out(opt.output_dir / "iteration0_state.csv");
      write_state_csv(b, psi0);
    }
    return kExitOk;
  });
}

int cmd_sample(const SampleOptions& opt, std::ostream& out) {
  return guarded(out, [&] {
    const auto m = load_checkpoint(opt.checkpoint);
    auto batch = sample_fast(m, opt.n_samples, opt.beta, opt.seed);
    if (!opt.fcidump.empty()) batch = filter_physical(batch, sector_of(load_fcidump(opt.fcidump)));
    out << fmt::format("{} samples at beta = {:g}: {} unique kept, {} samples discarded as unphysical\n",
                       opt.n_samples, opt.beta, batch.entries.size(), batch.n_discarded_unphysical);
    if (!opt.output.empty()) {
      auto f = open_out(opt.output);
      write_sample_csv(f, batch);
    }
    return kExitOk;
  });
}

int cmd_inspect(const std::filesystem::path& file, std::ostream& out) {
  return guarded(out, [&] {
    {
      auto in = open_in(file);
      char magic[8] = {};
      in.read(magic, 8);
      if (in.gcount() == 8 && std::string(magic, 8) == "ARNNSCI1") {
        const auto m = load_checkpoint(file);
        out << fmt::format("ARNN checkpoint: {} bits, {} layers, {} features per bit, {} activation\n", m.n_bits(),
                           m.config.n_layers, m.config.features_per_bit, to_string(m.config.activation));
        out << fmt::format("{} parameters, dropout {:g}, init seed {}\n", m.n_params(), m.config.dropout_rate,
                           m.config.seed);
        return kExitOk;
      }
    }
    if (file.filename() == "records.csv" || file.extension() == ".csv") {
      auto in = open_in(file);
      const auto records = read_records_csv(in);
      out << fmt::format("{} iteration records\n", records.size());
      for (const auto& r : records)
        out << fmt::format("  {:>3}  {:.10f}  {}  N_U = {}  beta = {:g}  stage {}\n", r.index, r.energy,
                           r.delta_e ? fmt::format("{:.3e}", *r.delta_e) : std::string("n/a"), r.n_unique, r.beta,
                           r.stage);
      return kExitOk;
    }
    const auto t = load_fcidump(file);
    const auto s = sector_of(t);
    const auto hf = aufbau(t.n_spin_orbitals(), t.n_electrons);
    out << fmt::format("FCIDUMP: {} spatial orbitals ({} spin-orbitals), {} electrons, MS2 = {}\n", t.n_spatial,
                       t.n_spin_orbitals(), t.n_electrons, t.ms2);
    out << fmt::format("Fock space 2^{} = {}\n", t.n_spin_orbitals(), static_cast<unsigned __int128>(1) << t.n_spin_orbitals());
    out << fmt::format("particle/Sz sector {}; symmetry-respecting {}\n",
                       count_sector(t.n_spin_orbitals(), t.n_electrons, t.ms2 == 0), count_symmetric(s));
    out << fmt::format("core energy {:.10f} Ha; HF energy {:.10f} Ha\n", t.core_energy,
                       slater_condon(hf, hf, t).value);
    out << fmt::format("CISD space {} configurations\n", cisd_space(hf, s).size());
    return kExitOk;
  });
}

namespace {

ConvergenceSeries load_series(const std::filesystem::path& p) {
  ConvergenceSeries s;
  std::filesystem::path csv = p;
  if (std::filesystem::is_directory(p)) {
    csv = p / "records.csv";
    s.label = p.filename().string();
    const auto snap = p / "config.snapshot";
    if (std::filesystem::exists(snap)) s.label = to_string(load_config(snap).seed_kind);
  } else {
    s.label = p.stem().string();
  }
  auto in = open_in(csv);
  s.records = read_records_csv(in);
  return s;
}

}  // namespace

int cmd_plot(const PlotOptions& opt, std::ostream& out) {
  return guarded(out, [&] {
    if (opt.records.empty() && opt.born_table.empty()) throw std::runtime_error("plot needs --records or --born");
    if (!opt.records.empty()) {
      std::vector<ConvergenceSeries> series;
      for (const auto& p : opt.records) {
        // a directory holding several run directories expands to all of them
        if (std::filesystem::is_directory(p) && !std::filesystem::exists(p / "records.csv")) {
          std::vector<std::filesystem::path> runs;
          for (const auto& e : std::filesystem::directory_iterator(p))
            if (e.is_directory() && std::filesystem::exists(e.path() / "records.csv")) runs.push_back(e.path());
          std::sort(runs.begin(), runs.end());
          if (runs.empty()) throw std::runtime_error(fmt::format("no records.csv under {}", p.string()));
          for (const auto& r : runs) series.push_back(load_series(r));
        } else {
          series.push_back(load_series(p));
        }
      }
      auto f = open_out(opt.output);
      write_convergence_svg(f, series, opt.chem_acc);
      out << fmt::format("wrote {} ({} curves)\n", opt.output.string(), series.size());
    }
    if (!opt.born_table.empty()) {
      if (opt.n_ca == 0) throw std::runtime_error("the filling plot needs --n-ca");
      if (opt.states.empty()) throw std::runtime_error("the filling plot needs at least one --state");
      auto in = open_in(opt.born_table);
      const auto born = read_born_table(in);
      std::vector<FillingSeries> series;
      for (const auto& p : opt.states) {
        auto sin = open_in(p);
        const auto support = read_state_support(sin);
        const auto label = p.parent_path().filename().empty() ? p.stem().string() : p.parent_path().filename().string();
        series.push_back({label, filling_fractions(born, support, 2 * opt.n_ca, opt.bins)});
      }
      auto f = open_out(opt.filling_output);
      write_filling_svg(f, series, opt.n_ca, std::min(2 * opt.n_ca, born.size()));
      out << fmt::format("wrote {}\n", opt.filling_output.string());
    }
    return kExitOk;
  });
}

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Neural-network-sampled selected configuration interaction"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run the selected-CI loop");
  run->add_option("-c,--config", run_opt.config_path, "Config file");
  run->add_option("-o,--override", run_opt.overrides, "key=value (repeatable)");
  run->add_option("--output", run_opt.output_dir, "Output directory");

  FciOptions fci_opt;
  double chem_acc = 0.0;
  auto* fci = app.add_subcommand("fci", "Exact ground state in the symmetry sector");
  fci->add_option("fcidump", fci_opt.fcidump, "FCIDUMP file")->required();
  fci->add_option("--guard", fci_opt.guard, "Largest sector dimension to diagonalize");
  auto* chem = fci->add_option("--chem-acc", chem_acc, "Print N_CA for this accuracy (Ha)");
  fci->add_option("--born", fci_opt.born_table, "Write the sorted Born table here");

  SeedOptions seed_opt;
  auto* seed = app.add_subcommand("seed", "Build the seed state and iteration zero");
  seed->add_option("-c,--config", seed_opt.config_path, "Config file");
  seed->add_option("-o,--override", seed_opt.overrides, "key=value (repeatable)");
  seed->add_option("--output", seed_opt.output_dir, "Directory for state CSVs");

  SampleOptions sample_opt;
  auto* sample = app.add_subcommand("sample", "Sample a trained network");
  sample->add_option("checkpoint", sample_opt.checkpoint, "Model checkpoint")->required();
  sample->add_option("-n,--samples", sample_opt.n_samples, "Number of samples");
  sample->add_option("--beta", sample_opt.beta, "Inverse temperature");
  sample->add_option("--seed", sample_opt.seed, "Random seed");
  sample->add_option("--fcidump", sample_opt.fcidump, "Filter to this system's symmetry sector");
  sample->add_option("--output", sample_opt.output, "Sample CSV");

  std::filesystem::path inspect_file;
  auto* inspect = app.add_subcommand("inspect", "Summarize an FCIDUMP, checkpoint or records CSV");
  inspect->add_option("file", inspect_file, "File to inspect")->required();

  PlotOptions plot_opt;
  auto* plot = app.add_subcommand("plot", "Static SVG figures");
  plot->add_option("--records", plot_opt.records, "records.csv files or run directories");
  plot->add_option("--output", plot_opt.output, "Convergence SVG");
  plot->add_option("--chem-acc", plot_opt.chem_acc, "Chemical accuracy line (Ha)");
  plot->add_option("--born", plot_opt.born_table, "Born table from 'fci --born'");
  plot->add_option("--state", plot_opt.states, "State CSVs for the filling plot");
  plot->add_option("--n-ca", plot_opt.n_ca, "N_CA for the filling plot");
  plot->add_option("--bins", plot_opt.bins, "Filling histogram bins")->check(CLI::PositiveNumber);
  plot->add_option("--filling-output", plot_opt.filling_output, "Filling SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }
  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
  } catch (...) {
  }

  auto& out = std::cout;
  if (*run) return cmd_run(run_opt, out);
  if (*fci) {
    if (*chem) fci_opt.chem_acc = chem_acc;
    return cmd_fci(fci_opt, out);
  }
  if (*seed) return cmd_seed(seed_opt, out);
  if (*sample) return cmd_sample(sample_opt, out);
  if (*inspect) return cmd_inspect(inspect_file, out);
  if (*plot) return cmd_plot(plot_opt, out);
  return kExitError;
}

}  // namespace arnnsci::cli
