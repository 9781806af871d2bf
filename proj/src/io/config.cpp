#include "shsplit/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace shsplit::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const RawEntry& e) {
  double v = 0.0;
  const char* b = e.value.data();
  const auto [p, ec] = std::from_chars(b, b + e.value.size(), v);
  if (ec != std::errc() || p != b + e.value.size() || !std::isfinite(v))
    throw config_error(e.source, e.line, key + ": expected a finite number, got '" + e.value + "'");
  return v;
}

long long to_integer(const std::string& key, const RawEntry& e, long long lo) {
  long long v = 0;
  const char* b = e.value.data();
  const auto [p, ec] = std::from_chars(b, b + e.value.size(), v);
  if (ec != std::errc() || p != b + e.value.size())
    throw config_error(e.source, e.line, key + ": expected an integer, got '" + e.value + "'");
  if (v < lo) throw config_error(e.source, e.line, key + ": must be >= " + std::to_string(lo));
  return v;
}

bool to_bool(const std::string& key, const RawEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off") return false;
  throw config_error(e.source, e.line, key + ": expected true/false, got '" + e.value + "'");
}

template <typename Enum>
Enum to_enum(const std::string& key, const RawEntry& e, std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, v] : table)
    if (e.value == name) return v;
  std::string opts;
  for (const auto& [name, v] : table) opts += std::string(opts.empty() ? "" : "|") + name;
  throw config_error(e.source, e.line, key + ": expected one of " + opts + ", got '" + e.value + "'");
}

std::vector<std::array<int, 3>> to_modes(const std::string& key, const RawEntry& e) {
  // "1,1,1; 2,0,0"
  std::vector<std::array<int, 3>> modes;
  std::stringstream groups(e.value);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::array<int, 3> m{};
    std::stringstream parts(group);
    std::string part;
    int n = 0;
    while (std::getline(parts, part, ',')) {
      if (n == 3) throw config_error(e.source, e.line, key + ": each mode needs exactly 3 integers");
      RawEntry tmp{trim(part), e.source, e.line};
      m[static_cast<std::size_t>(n++)] = static_cast<int>(to_integer(key, tmp, 0));
    }
    if (n != 3) throw config_error(e.source, e.line, key + ": each mode needs exactly 3 integers");
    modes.push_back(m);
  }
  if (modes.empty()) throw config_error(e.source, e.line, key + ": at least one mode required");
  return modes;
}

using Setter = std::function<void(RunConfig&, const std::string&, const RawEntry&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.nx", [](RunConfig& c, auto& k, auto& e) { c.grid.nx = static_cast<int>(to_integer(k, e, GridSpec::kMinIntervals)); }},
      {"grid.ny", [](RunConfig& c, auto& k, auto& e) { c.grid.ny = static_cast<int>(to_integer(k, e, GridSpec::kMinIntervals)); }},
      {"grid.nz", [](RunConfig& c, auto& k, auto& e) { c.grid.nz = static_cast<int>(to_integer(k, e, GridSpec::kMinIntervals)); }},
      {"grid.lx", [](RunConfig& c, auto& k, auto& e) { c.grid.lx = to_double(k, e); }},
      {"grid.ly", [](RunConfig& c, auto& k, auto& e) { c.grid.ly = to_double(k, e); }},
      {"grid.lz", [](RunConfig& c, auto& k, auto& e) { c.grid.lz = to_double(k, e); }},
      {"params.epsilon", [](RunConfig& c, auto& k, auto& e) { c.params.epsilon = to_double(k, e); }},
      {"params.eta", [](RunConfig& c, auto& k, auto& e) { c.params.eta = to_double(k, e); }},
      {"bounds.zeta", [](RunConfig& c, auto& k, auto& e) { c.bounds.zeta = to_double(k, e); }},
      {"bounds.c_grid", [](RunConfig& c, auto& k, auto& e) { c.bounds.c_grid = to_double(k, e); }},
      {"bounds.sobolev_mode",
       [](RunConfig& c, auto& k, auto& e) {
         c.bounds.sobolev_mode = to_enum<SobolevChoice>(k, e,
                                                        {{"auto", SobolevChoice::automatic},
                                                         {"dense", SobolevChoice::dense},
                                                         {"probe", SobolevChoice::probe},
                                                         {"manual", SobolevChoice::manual}});
       }},
      {"time.dt",
       [](RunConfig& c, auto& k, auto& e) {
         if (e.value == "auto") c.time.dt.reset();
         else c.time.dt = to_double(k, e);
       }},
      {"time.dt_cap", [](RunConfig& c, auto& k, auto& e) { c.time.dt_cap = to_double(k, e); }},
      {"time.steps", [](RunConfig& c, auto& k, auto& e) { c.time.steps = static_cast<std::size_t>(to_integer(k, e, 0)); }},
      {"time.adaptive", [](RunConfig& c, auto& k, auto& e) { c.time.adaptive = to_bool(k, e); }},
      {"time.dt_lo", [](RunConfig& c, auto& k, auto& e) { c.time.dt_lo = to_double(k, e); }},
      {"time.dt_hi",
       [](RunConfig& c, auto& k, auto& e) {
         if (e.value == "auto") c.time.dt_hi.reset();
         else c.time.dt_hi = to_double(k, e);
       }},
      {"time.target_residual", [](RunConfig& c, auto& k, auto& e) { c.time.target_residual = to_double(k, e); }},
      {"time.max_steps",
       [](RunConfig& c, auto& k, auto& e) { c.time.max_steps = static_cast<std::size_t>(to_integer(k, e, 1)); }},
      {"solver.rel_tol", [](RunConfig& c, auto& k, auto& e) { c.solver.rel_tol = to_double(k, e); }},
      {"solver.abs_tol", [](RunConfig& c, auto& k, auto& e) { c.solver.abs_tol = to_double(k, e); }},
      {"solver.max_iter",
       [](RunConfig& c, auto& k, auto& e) { c.solver.max_iter = static_cast<std::size_t>(to_integer(k, e, 0)); }},
      {"ic.kind",
       [](RunConfig& c, auto& k, auto& e) {
         c.ic.kind = to_enum<IcKind>(k, e,
                                     {{"zero", IcKind::zero},
                                      {"constant", IcKind::constant},
                                      {"cosine_modes", IcKind::cosine_modes},
                                      {"filtered_noise", IcKind::filtered_noise}});
       }},
      {"ic.value", [](RunConfig& c, auto& k, auto& e) { c.ic.value = to_double(k, e); }},
      {"ic.amplitude", [](RunConfig& c, auto& k, auto& e) { c.ic.amplitude = to_double(k, e); }},
      {"ic.modes", [](RunConfig& c, auto& k, auto& e) { c.ic.modes = to_modes(k, e); }},
      {"ic.seed", [](RunConfig& c, auto& k, auto& e) { c.ic.seed = static_cast<std::uint64_t>(to_integer(k, e, 0)); }},
      {"output.csv_path", [](RunConfig& c, auto&, auto& e) { c.output.csv_path = e.value; }},
      {"output.snapshot_every",
       [](RunConfig& c, auto& k, auto& e) { c.output.snapshot_every = static_cast<std::size_t>(to_integer(k, e, 0)); }},
      {"output.snapshot_dir", [](RunConfig& c, auto&, auto& e) { c.output.snapshot_dir = e.value; }},
      {"output.format",
       [](RunConfig& c, auto& k, auto& e) {
         c.output.format = to_enum<SnapshotFormat>(k, e, {{"raw", SnapshotFormat::raw}, {"vtk", SnapshotFormat::vtk}});
       }},
      {"run.monitors", [](RunConfig& c, auto& k, auto& e) { c.monitors = to_bool(k, e); }},
  };
  return table;
}

const RawEntry* find(const RawConfig& raw, const std::string& key) {
  const auto it = raw.find(key);
  return it == raw.end() ? nullptr : &it->second;
}

// Errors that involve several keys point at the first of them that was given.
[[noreturn]] void fail(const RawConfig& raw, std::initializer_list<const char*> keys, const std::string& msg) {
  for (const char* k : keys)
    if (const RawEntry* e = find(raw, k)) throw config_error(e->source, e->line, msg);
  throw config_error("<defaults>", 0, msg);
}

}  // namespace

config_error::config_error(const std::string& src, int ln, const std::string& msg)
    : std::runtime_error(src + (ln > 0 ? ":" + std::to_string(ln) : std::string()) + ": " + msg), source(src), line(ln) {}

RawConfig parse_config_text(const std::string& text, const std::string& source) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error(source, n, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(source, n, "empty key");
    if (!setters().count(key)) throw config_error(source, n, "unknown key '" + key + "'");
    if (value.empty()) throw config_error(source, n, key + ": empty value");
    if (const auto it = raw.find(key); it != raw.end())
      throw config_error(source, n, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    raw[key] = {value, source, n};
  }
  return raw;
}

RawConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(RawConfig& raw, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw config_error("--set", 0, "expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!setters().count(key)) throw config_error("--set", 0, "unknown key '" + key + "'");
  if (value.empty()) throw config_error("--set", 0, key + ": empty value");
  raw[key] = {value, "--set", 0};
}

GridSpec RunConfig::grid_spec() const { return GridSpec::from_lengths(grid.nx, grid.ny, grid.nz, grid.lx, grid.ly, grid.lz); }

RunConfig to_run_config(const RawConfig& raw) {
  RunConfig c;
  for (const auto& [key, entry] : raw) setters().at(key)(c, key, entry);

  if (!(c.grid.lx > 0 && c.grid.ly > 0 && c.grid.lz > 0)) fail(raw, {"grid.lx", "grid.ly", "grid.lz"}, "box lengths must be positive");
  if (!(c.params.epsilon > 0)) fail(raw, {"params.epsilon"}, "params.epsilon must be positive");
  if (c.bounds.zeta && !(*c.bounds.zeta > zeta_threshold(c.params)))
    fail(raw, {"bounds.zeta", "params.epsilon", "params.eta"},
         "bounds.zeta must exceed 1/epsilon + eta - 1 = " + fmt(zeta_threshold(c.params)));
  if (c.bounds.c_grid && !(*c.bounds.c_grid > 0)) fail(raw, {"bounds.c_grid"}, "bounds.c_grid must be positive");
  if (c.bounds.sobolev_mode == SobolevChoice::manual && !c.bounds.c_grid)
    fail(raw, {"bounds.sobolev_mode"}, "sobolev_mode = manual requires bounds.c_grid");
  if (c.bounds.sobolev_mode == SobolevChoice::dense) {
    const auto nodes = static_cast<std::size_t>(c.grid.nx + 1) * (c.grid.ny + 1) * (c.grid.nz + 1);
    if (nodes > 4096) fail(raw, {"bounds.sobolev_mode"}, "dense Sobolev mode is limited to 4096 nodes");
  }
  if (c.time.dt && !(*c.time.dt > 0)) fail(raw, {"time.dt"}, "time.dt must be positive");
  if (!(c.time.dt_cap > 0)) fail(raw, {"time.dt_cap"}, "time.dt_cap must be positive");
  if (!(c.time.dt_lo > 0)) fail(raw, {"time.dt_lo"}, "time.dt_lo must be positive");
  if (c.time.dt_hi && !(*c.time.dt_hi >= c.time.dt_lo)) fail(raw, {"time.dt_hi", "time.dt_lo"}, "time.dt_hi must be >= time.dt_lo");
  if (!(c.time.target_residual > 0)) fail(raw, {"time.target_residual"}, "time.target_residual must be positive");
  if (!(c.solver.rel_tol > 0)) fail(raw, {"solver.rel_tol"}, "solver.rel_tol must be positive");
  if (!(c.solver.abs_tol > 0)) fail(raw, {"solver.abs_tol"}, "solver.abs_tol must be positive");
  if (c.ic.kind == IcKind::filtered_noise && !(c.ic.amplitude >= 0)) fail(raw, {"ic.amplitude"}, "ic.amplitude must be >= 0");
  if (c.output.csv_path.empty()) fail(raw, {"output.csv_path"}, "output.csv_path must not be empty");
  return c;
}

std::string canonical_string(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["grid.nx"] = std::to_string(c.grid.nx);
  kv["grid.ny"] = std::to_string(c.grid.ny);
  kv["grid.nz"] = std::to_string(c.grid.nz);
  kv["grid.lx"] = fmt(c.grid.lx);
  kv["grid.ly"] = fmt(c.grid.ly);
  kv["grid.lz"] = fmt(c.grid.lz);
  kv["params.epsilon"] = fmt(c.params.epsilon);
  kv["params.eta"] = fmt(c.params.eta);
  kv["bounds.zeta"] = c.bounds.zeta ? fmt(*c.bounds.zeta) : "auto";
  kv["bounds.c_grid"] = c.bounds.c_grid ? fmt(*c.bounds.c_grid) : "auto";
  kv["bounds.sobolev_mode"] = to_string(c.bounds.sobolev_mode);
  kv["time.dt"] = c.time.dt ? fmt(*c.time.dt) : "auto";
  kv["time.dt_cap"] = fmt(c.time.dt_cap);
  kv["time.steps"] = std::to_string(c.time.steps);
  kv["time.adaptive"] = c.time.adaptive ? "true" : "false";
  kv["time.dt_lo"] = fmt(c.time.dt_lo);
  kv["time.dt_hi"] = c.time.dt_hi ? fmt(*c.time.dt_hi) : "auto";
  kv["time.target_residual"] = fmt(c.time.target_residual);
  kv["time.max_steps"] = std::to_string(c.time.max_steps);
  kv["solver.rel_tol"] = fmt(c.solver.rel_tol);
  kv["solver.abs_tol"] = fmt(c.solver.abs_tol);
  kv["solver.max_iter"] = std::to_string(c.solver.max_iter);
  kv["ic.kind"] = to_string(c.ic.kind);
  kv["ic.value"] = fmt(c.ic.value);
  kv["ic.amplitude"] = fmt(c.ic.amplitude);
  std::string modes;
  for (const auto& m : c.ic.modes)
    modes += (modes.empty() ? "" : ";") + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2]);
  kv["ic.modes"] = modes;
  kv["ic.seed"] = std::to_string(c.ic.seed);
  kv["output.csv_path"] = c.output.csv_path;
  kv["output.snapshot_every"] = std::to_string(c.output.snapshot_every);
  kv["output.snapshot_dir"] = c.output.snapshot_dir;
  kv["output.format"] = to_string(c.output.format);
  kv["run.monitors"] = c.monitors ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_digest(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_string(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::string to_string(IcKind k) {
  switch (k) {
    case IcKind::zero: return "zero";
    case IcKind::constant: return "constant";
    case IcKind::cosine_modes: return "cosine_modes";
    default: return "filtered_noise";
  }
}

std::string to_string(SnapshotFormat f) { return f == SnapshotFormat::raw ? "raw" : "vtk"; }

std::string to_string(SobolevChoice s) {
  switch (s) {
    case SobolevChoice::automatic: return "auto";
    case SobolevChoice::dense: return "dense";
    case SobolevChoice::probe: return "probe";
    default: return "manual";
  }
}

}  // namespace shsplit::io
