#include "sdesplit/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>

#include "sdesplit/analysis.hpp"
#include "sdesplit/checks.hpp"
#include "sdesplit/models.hpp"
#include "sdesplit/schemes.hpp"

namespace sdesplit {

namespace {

constexpr const char* kVersion = "sdesplit 0.1.0";

const std::vector<std::string> kScalarKeys = {
    "model", "scheme", "estimators", "fix", "x0",  "h_fine",     "h_obs",
    "T",     "M",      "N",          "seed", "out", "paper_scale"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string join_list(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out.push_back(',');
    out += xs[i];
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value '" + value + "' for key '" + key + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value '" + value + "' for key '" + key + "'");
  }
}

std::string valid_keys_for(const RunConfig& cfg) {
  std::string keys = join_list(kScalarKeys);
  try {
    keys += "," + join_list(get_model(cfg.model_id).param_names);
  } catch (const std::exception&) {
  }
  return keys;
}

ParamVector resolve_params(const RunConfig& cfg, const ModelSpec& model) {
  ParamVector p;
  for (const auto& name : model.param_names) {
    const auto it = cfg.params.find(name);
    if (it == cfg.params.end())
      throw ConfigError("missing value for model parameter '" + name + "'");
    p.values.push_back(it->second);
  }
  return p;
}

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line.push_back(',');
    line += cells[i];
  }
  line.push_back('\n');
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") {
    cfg.model_id = value;
    cfg.params.clear();  // parameter names are model-specific
    return;
  }
  if (key == "scheme") {
    cfg.schemes = split_list(value);
    return;
  }
  if (key == "estimators") {
    cfg.estimators = split_list(value);
    return;
  }
  if (key == "fix") {
    cfg.fixed_params = split_list(value);
    return;
  }
  if (key == "x0") { cfg.x0 = parse_double(key, value); return; }
  if (key == "h_fine") { cfg.h_fine = parse_double(key, value); return; }
  if (key == "h_obs") { cfg.h_obs = parse_double(key, value); return; }
  if (key == "T") { cfg.T = parse_double(key, value); return; }
  if (key == "M") { cfg.M = parse_u64(key, value); return; }
  if (key == "N") { cfg.N = parse_u64(key, value); return; }
  if (key == "seed") { cfg.seed = parse_u64(key, value); return; }
  if (key == "out") { cfg.out_dir = value; return; }
  if (key == "paper_scale") { cfg.paper_scale = parse_u64(key, value) != 0; return; }

  // Anything else must be a parameter of the configured model.
  try {
    const ModelSpec& model = get_model(cfg.model_id);
    for (const auto& name : model.param_names) {
      if (name == key) {
        cfg.params[key] = parse_double(key, value);
        return;
      }
    }
  } catch (const std::invalid_argument&) {
  }
  throw ConfigError("unknown key '" + key + "'; valid keys: " + valid_keys_for(cfg));
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;

  // First pass pulls the model key so parameter names can be validated in
  // file order afterwards.
  {
    std::istringstream scan(text);
    std::string l;
    while (std::getline(scan, l)) {
      const auto hash = l.find('#');
      if (hash != std::string::npos) l.erase(hash);
      std::istringstream tokens(l);
      std::string tok;
      while (tokens >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos && tok.substr(0, eq) == "model")
          apply_config_entry(cfg, "model", tok.substr(eq + 1));
      }
    }
  }

  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Tolerate spaces around '='.
    std::string compact;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '=') {
        while (!compact.empty() && (compact.back() == ' ' || compact.back() == '\t'))
          compact.pop_back();
        compact.push_back('=');
        std::size_t j = i + 1;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        i = j - 1;
      } else {
        compact.push_back(line[i]);
      }
    }
    std::istringstream tokens(compact);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
        throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + tok +
                          "'");
      const std::string key = tok.substr(0, eq);
      if (key == "model") continue;  // already applied
      try {
        apply_config_entry(cfg, key, tok.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "model=" << cfg.model_id << "\n";
  for (const auto& [name, value] : cfg.params) out << name << "=" << format_double(value) << "\n";
  out << "scheme=" << join_list(cfg.schemes) << "\n";
  out << "estimators=" << join_list(cfg.estimators) << "\n";
  if (!cfg.fixed_params.empty()) out << "fix=" << join_list(cfg.fixed_params) << "\n";
  out << "x0=" << format_double(cfg.x0) << "\n";
  out << "h_fine=" << format_double(cfg.h_fine) << "\n";
  out << "h_obs=" << format_double(cfg.h_obs) << "\n";
  out << "T=" << format_double(cfg.T) << "\n";
  out << "M=" << cfg.M << "\n";
  out << "N=" << cfg.N << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "out=" << cfg.out_dir << "\n";
  out << "paper_scale=" << (cfg.paper_scale ? 1 : 0) << "\n";
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  const ModelSpec& model = get_model(cfg.model_id);  // throws on unknown model
  for (const auto& [name, value] : cfg.params) {
    (void)value;
    bool known = false;
    for (const auto& pname : model.param_names) known = known || pname == name;
    if (!known)
      throw ConfigError("parameter '" + name + "' is not a parameter of model '" + cfg.model_id +
                        "'; valid: " + join_list(model.param_names));
  }
  const ParamVector p = resolve_params(cfg, model);
  if (!model.valid(p)) throw ConfigError("parameter values are invalid for " + cfg.model_id);
  for (const auto& name : cfg.fixed_params) model.param_index(name);  // throws if unknown
  for (const auto& s : cfg.schemes) parse_scheme(s);
  for (const auto& e : cfg.estimators) parse_estimator(e);
  if (!(cfg.h_fine > 0.0) || !(cfg.h_obs > 0.0) || !(cfg.T > 0.0))
    throw ConfigError("h_fine, h_obs, and T must be positive");
  if (cfg.M == 0 || cfg.N == 0) throw ConfigError("M and N must be positive");
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string make_run_dir(const std::string& base, std::uint64_t seed) {
  std::filesystem::create_directories(base);
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto stamp = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  for (int k = 0;; ++k) {
    std::string dir = base + "/run-" + std::to_string(stamp) + "-s" + std::to_string(seed);
    if (k) dir += "-" + std::to_string(k);
    if (!std::filesystem::exists(dir)) {
      std::filesystem::create_directory(dir);
      return dir;
    }
  }
}

namespace {

struct StageClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void cmd_simulate(const RunConfig& cfg, const ModelSpec& model, const ParamVector& p,
                  const std::string& dir, std::ostringstream& manifest_extra) {
  const double h = cfg.h_fine;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.T / h));
  if (n_steps == 0) throw ConfigError("T/h_fine gives zero steps");
  const SchemeKind scheme = parse_scheme(cfg.schemes.at(0));
  std::string csv = "path_id,t,x\n";
  std::size_t aborted = 0;
  for (std::size_t i = 0; i < cfg.M; ++i) {
    const NoiseGrid grid = make_noise_grid({cfg.seed, i, Purpose::path_noise}, h, n_steps);
    Trajectory traj;
    try {
      traj = simulate_path(scheme, model, p, cfg.x0, grid);
    } catch (const PathAborted&) {
      ++aborted;
      continue;
    }
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
      csv += csv_join({std::to_string(i), format_double(static_cast<double>(k) * h),
                       format_double(traj.values[k])});
    }
  }
  write_text_atomic(dir + "/paths.csv", csv);
  manifest_extra << "aborted_paths=" << aborted << "\n";
}

void cmd_converge(const RunConfig& cfg, const ModelSpec& model, const ParamVector& p,
                  const std::string& dir, std::ostringstream& manifest_extra) {
  std::vector<double> h_list;
  double h_fine = cfg.h_fine;
  std::size_t M = cfg.M;
  if (cfg.paper_scale) {
    h_list = {0.1, 0.05, 0.02, 0.01, 0.005, 0.002};
    h_fine = 1e-4;
    M = std::max<std::size_t>(M, 1000);
  } else {
    for (int k = 4; k <= 9; ++k) h_list.push_back(std::ldexp(1.0, -k));
  }
  std::string mse = "h,s_n,m,scheme,model\n";
  std::string slopes = "scheme,slope,intercept,r_squared\n";
  for (const auto& scheme_id : cfg.schemes) {
    const SchemeKind scheme = parse_scheme(scheme_id);
    const ConvergenceReport report =
        strong_error_curve(scheme, model, p, cfg.x0, cfg.T, h_list, h_fine, M, cfg.seed);
    for (const auto& row : report.rows) {
      mse += csv_join({format_double(row.h), format_double(row.s_n), std::to_string(M),
                       scheme_id, cfg.model_id});
    }
    slopes += csv_join({scheme_id, format_double(report.order.slope),
                        format_double(report.order.intercept),
                        format_double(report.order.r_squared)});
  }
  write_text_atomic(dir + "/mse.csv", mse);
  write_text_atomic(dir + "/slopes.csv", slopes);
  manifest_extra << "h_fine_used=" << format_double(h_fine) << "\n";
}

void cmd_infer(const RunConfig& cfg, const ModelSpec& model, const ParamVector& p,
               const std::string& dir, std::ostringstream& manifest_extra) {
  InferenceOptions opt;
  opt.h_fine = cfg.h_fine;
  if (!cfg.fixed_params.empty()) {
    opt.fixed_mask.assign(model.param_names.size(), false);
    for (const auto& name : cfg.fixed_params) opt.fixed_mask[model.param_index(name)] = true;
  }
  std::vector<EstimatorKind> estimators;
  for (const auto& e : cfg.estimators) estimators.push_back(parse_estimator(e));
  const std::size_t replicates = cfg.paper_scale ? std::max<std::size_t>(cfg.M, 1000) : cfg.M;
  const StudyTable table = inference_study(model, p, cfg.x0, estimators,
                                           {{cfg.h_obs, cfg.N}}, replicates, cfg.seed, opt);
  std::string csv = "replicate,estimator,h_obs,n,param,value,nll,converged,runtime_ms\n";
  std::size_t failures = 0;
  for (const auto& rec : table.rows) {
    if (!rec.success()) ++failures;
    for (std::size_t j = 0; j < model.param_names.size(); ++j) {
      csv += csv_join({std::to_string(rec.replicate), estimator_name(rec.estimator),
                       format_double(rec.cell.h_obs), std::to_string(rec.cell.n_obs),
                       model.param_names[j], format_double(rec.fit.params.empty()
                                                               ? std::numeric_limits<double>::quiet_NaN()
                                                               : rec.fit.params[j]),
                       format_double(rec.fit.nll), rec.fit.converged ? "1" : "0",
                       format_double(rec.fit.runtime_ms)});
    }
  }
  write_text_atomic(dir + "/estimates.csv", csv);
  manifest_extra << "failed_fits=" << failures << "\n";
}

void cmd_wasserstein(const RunConfig& cfg, const ModelSpec& model, const ParamVector& p,
                     const std::string& dir, std::ostringstream&) {
  std::string csv = "scheme,h,w1,m\n";
  for (const auto& scheme_id : cfg.schemes) {
    const double w1 =
        one_step_wasserstein(model, p, parse_scheme(scheme_id), cfg.h_obs, cfg.x0, cfg.M, cfg.seed);
    csv += csv_join({scheme_id, format_double(cfg.h_obs), format_double(w1),
                     std::to_string(cfg.M)});
  }
  write_text_atomic(dir + "/wasserstein.csv", csv);
}

bool cmd_check(const std::string& dir) {
  const auto results = run_invariant_checks();
  std::string report;
  for (const auto& r : results) {
    report += (r.passed ? "PASS " : "FAIL ") + r.name;
    if (!r.detail.empty()) report += " — " + r.detail;
    report += "\n";
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name
              << (r.detail.empty() ? "" : " — " + r.detail) << "\n";
  }
  write_text_atomic(dir + "/checks.txt", report);
  return all_passed(results);
}

}  // namespace

int run_subcommand(const std::string& command, RunConfig cfg, std::string* run_dir_out) {
  try {
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  }
  try {
    const ModelSpec& model = get_model(cfg.model_id);
    const ParamVector p = resolve_params(cfg, model);
    const std::string dir = make_run_dir(cfg.out_dir, cfg.seed);
    if (run_dir_out) *run_dir_out = dir;

    const StageClock clock;
    std::ostringstream extra;
    bool ok = true;
    if (command == "simulate") {
      cmd_simulate(cfg, model, p, dir, extra);
    } else if (command == "converge") {
      cmd_converge(cfg, model, p, dir, extra);
    } else if (command == "infer") {
      cmd_infer(cfg, model, p, dir, extra);
    } else if (command == "wasserstein") {
      cmd_wasserstein(cfg, model, p, dir, extra);
    } else if (command == "check") {
      ok = cmd_check(dir);
    } else {
      std::cerr << "unknown subcommand '" << command << "'\n";
      return 1;
    }

    std::ostringstream manifest;
    manifest << "version=" << kVersion << "\n";
    manifest << "command=" << command << "\n";
    manifest << "runtime_ms=" << format_double(clock.ms()) << "\n";
    manifest << extra.str();
    manifest << "# resolved configuration\n";
    manifest << serialize_config(cfg);
    write_text_atomic(dir + "/manifest.txt", manifest.str());
    std::cout << "run directory: " << dir << "\n";
    return ok ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sdesplit
