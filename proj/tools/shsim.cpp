// shsim: Swift-Hohenberg simulator and verification driver.

#include "shsplit/io/app.hpp"
#include "shsplit/verify/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace shsplit;
using nlohmann::json;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir = ".";
  bool quiet = false;
  bool json_out = false;
};

io::RunConfig load_config(const Common& c, io::RawConfig raw = {}) {
  if (!c.config_path.empty())
    for (auto& [k, v] : io::parse_config_file(c.config_path)) raw[k] = v;
  for (const auto& s : c.overrides) io::apply_override(raw, s);
  return io::to_run_config(raw);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json("unbounded"); }

int cmd_run(const Common& c) {
  const io::RunConfig cfg = load_config(c);
  const auto outcome = io::execute_run(cfg, c.output_dir, c.quiet ? nullptr : &std::cerr);
  const auto& last = outcome.log.records.back();
  if (c.json_out) {
    json j{{"steps", last.n},
           {"t", last.t},
           {"H", last.energy.total_H},
           {"linf", last.linf},
           {"fp_residual", last.fp_residual},
           {"csv", outcome.csv_path.string()},
           {"config_digest", outcome.log.meta.config_digest},
           {"converged", outcome.log.converged}};
    std::cout << j.dump(2) << '\n';
  } else if (!c.quiet) {
    std::cout << "wrote " << outcome.csv_path.string() << " (" << outcome.log.records.size() << " rows, digest "
              << outcome.log.meta.config_digest << ")\n";
  }
  if (cfg.time.adaptive && !outcome.log.converged) {
    std::cerr << "adaptive run stopped at max_steps with residual " << last.fp_residual << '\n';
    return io::kExitViolation;
  }
  return io::kExitOk;
}

int cmd_verify(const Common& c, const std::string& level, const std::vector<std::string>& suites,
               const std::string& fault) {
  const auto lvl = level == "full" ? verify::VerifyLevel::full : verify::VerifyLevel::quick;
  const auto f = fault == "broken-reflection" ? verify::Fault::broken_reflection : verify::Fault::none;
  const auto results = verify::run_suites(lvl, suites, f);
  bool ok = true;
  json j = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    if (c.json_out) {
      j.push_back({{"suite", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"checks", r.details}});
    } else {
      for (const auto& d : r.details)
        if (!c.quiet || d.rfind("FAIL", 0) == 0) std::cout << "[" << r.name << "] " << d << '\n';
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << std::fixed << std::setprecision(2) << r.seconds
                << " s)\n";
      std::cout.unsetf(std::ios::fixed);
    }
  }
  if (c.json_out) std::cout << j.dump(2) << '\n';
  return ok ? io::kExitOk : io::kExitViolation;
}

int cmd_convergence(const Common& c, const std::string& mode, std::vector<double> ladder, double reference_dt,
                    double final_time, std::vector<int> levels, double expected, double band, double defect_lo,
                    double defect_hi) {
  verify::ConvergenceStudy study;
  if (mode == "temporal") {
    const auto cfg = load_config(c, io::temporal_defaults());
    if (ladder.empty()) ladder = {1e-2, 5e-3, 2.5e-3};
    study = verify::temporal_convergence(io::temporal_study_config(cfg, ladder, reference_dt, final_time));
  } else {
    const auto cfg = load_config(c, io::spatial_defaults());
    if (levels.empty()) levels = {8, 16, 32};
    study = verify::spatial_convergence(io::spatial_study_config(cfg, levels, final_time));
  }
  std::filesystem::create_directories(c.output_dir);
  const auto path = std::filesystem::path(c.output_dir) / (mode + "_convergence.csv");
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  verify::write_study_csv(os, study);

  bool ok = true;
  for (double o : study.orders()) ok = ok && std::abs(o - expected) <= band;
  if (mode == "spatial")
    for (double r : study.defect_ratios()) ok = ok && r >= defect_lo && r <= defect_hi;
  if (c.json_out) {
    json levels_json = json::array();
    for (const auto& l : study.levels) {
      json lj{{"step", l.step}, {"error", l.error}};
      if (l.order) lj["order"] = *l.order;
      if (l.defect) lj["defect"] = *l.defect;
      if (l.defect_ratio) lj["defect_ratio"] = *l.defect_ratio;
      levels_json.push_back(lj);
    }
    std::cout << json{{"mode", mode}, {"levels", levels_json}, {"passed", ok}, {"csv", path.string()}}.dump(2) << '\n';
  } else if (!c.quiet) {
    std::ostringstream table;
    verify::write_study_csv(table, study);
    std::cout << table.str() << (ok ? "PASS" : "FAIL") << " observed orders within " << expected << " +/- " << band
              << '\n';
  }
  return ok ? io::kExitOk : io::kExitViolation;
}

int cmd_constants(const Common& c, std::optional<double> m_override) {
  const auto cfg = load_config(c);
  const auto r = io::compute_constants(cfg, m_override);
  if (c.json_out) {
    json j{{"zeta", r.zeta},          {"c_eps_eta_zeta", r.c_eps_eta_zeta}, {"omega", r.omega},
           {"sobolev_c", r.sobolev_c}, {"sobolev_mode", r.sobolev_mode},     {"M", r.m},
           {"sup_bound", r.sup_bound}, {"dt_limit", optional_json(r.dt_limit)}, {"H0", r.initial_energy}};
    std::cout << j.dump(2) << '\n';
    return io::kExitOk;
  }
  std::cout << std::setprecision(10);
  auto row = [](const char* name, const std::string& v) { std::cout << std::left << std::setw(16) << name << v << '\n'; };
  auto num = [](double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
  };
  row("zeta", num(r.zeta));
  row("C_eps_eta_zeta", num(r.c_eps_eta_zeta));
  row("omega", num(r.omega));
  row("sobolev_C", num(r.sobolev_c) + " (" + r.sobolev_mode + ")");
  row("H(U0)", num(r.initial_energy));
  row("M", num(r.m));
  row("sup_bound", num(r.sup_bound));
  row("dt_limit", r.dt_limit ? num(*r.dt_limit) : "unbounded");
  return io::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swift-Hohenberg simulator with energy-stable linearly implicit stepping"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Configuration file (key = value)");
    sub->add_option("--set", common.overrides, "Override one setting, key=value (repeatable)");
    sub->add_option("--output-dir", common.output_dir, "Directory for output files");
    sub->add_flag("--quiet", common.quiet, "Suppress progress output");
    sub->add_flag("--json", common.json_out, "Machine-readable output");
  };

  auto* run = app.add_subcommand("run", "March a configured run and write the CSV log");
  add_common(run);

  auto* ver = app.add_subcommand("verify", "Run the verification suites");
  add_common(ver);
  std::string level = "quick";
  std::vector<std::string> suites{"all"};
  std::string fault = "none";
  ver->add_option("level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--suite", suites, "Suite name (repeatable): identities, oracle, spd, gradients, convexity, all");
  ver->add_option("--inject-fault", fault, "Negative control: none or broken-reflection")
      ->check(CLI::IsMember({"none", "broken-reflection"}));

  auto* conv = app.add_subcommand("convergence", "Empirical convergence study");
  add_common(conv);
  std::string mode;
  std::vector<double> ladder;
  double reference_dt = 1e-4, final_time = -1.0, expected = -1.0, band = -1.0;
  double defect_lo = 3.2, defect_hi = 4.8;
  std::vector<int> levels;
  conv->add_option("mode", mode, "temporal or spatial")->required()->check(CLI::IsMember({"temporal", "spatial"}));
  conv->add_option("--dt-ladder", ladder, "Temporal step ladder (default 1e-2 5e-3 2.5e-3)");
  conv->add_option("--reference-dt", reference_dt, "Temporal reference step");
  conv->add_option("--final-time", final_time, "Final time (default 0.5 temporal, 2e-3 spatial)");
  conv->add_option("--levels", levels, "Spatial interval counts per axis (default 8 16 32)");
  conv->add_option("--expected-order", expected, "Expected order (default 1 temporal, 2 spatial)");
  conv->add_option("--order-tol", band, "Accepted deviation from the expected order (default 0.15 / 0.2)");
  conv->add_option("--defect-ratio-min", defect_lo, "Lower bound on the truncation-defect ratio");
  conv->add_option("--defect-ratio-max", defect_hi, "Upper bound on the truncation-defect ratio");

  auto* cons = app.add_subcommand("constants", "Print stability constants for a configuration");
  add_common(cons);
  double m_override = -1.0;
  cons->add_option("--M", m_override, "Evaluate the step limit at this truncation level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? io::kExitOk : io::kExitValidation;
  }

  try {
    if (*run) return cmd_run(common);
    if (*ver) return cmd_verify(common, level, suites, fault);
    if (*conv) {
      const bool temporal = mode == "temporal";
      if (final_time < 0) final_time = temporal ? 0.5 : 2e-3;
      if (expected < 0) expected = temporal ? 1.0 : 2.0;
      if (band < 0) band = temporal ? 0.15 : 0.2;
      return cmd_convergence(common, mode, ladder, reference_dt, final_time, levels, expected, band, defect_lo,
                             defect_hi);
    }
    if (*cons) return cmd_constants(common, m_override >= 0 ? std::optional<double>(m_override) : std::nullopt);
  } catch (const monitor_violation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitViolation;
  } catch (const io::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitViolation;
  }
  return io::kExitOk;
}
