#include "molcool/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "molcool/errors.hpp"
#include "molcool/io.hpp"

namespace molcool {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct KeyContext {
  const std::filesystem::path& path;
  int line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + what +
                      " for key '" + key + "'");
  }
};

double parse_double(const KeyContext& ctx, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    ctx.fail("invalid number '" + text + "'");
  }
  if (pos != text.size()) ctx.fail("invalid number '" + text + "'");
  return v;
}

int parse_int(const KeyContext& ctx, const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    ctx.fail("invalid integer '" + text + "'");
  }
  if (pos != text.size() || v < INT_MIN || v > INT_MAX)
    ctx.fail("invalid integer '" + text + "'");
  return static_cast<int>(v);
}

bool parse_bool(const KeyContext& ctx, const std::string& text) {
  const std::string t = lower(text);
  if (t == "true" || t == "1" || t == "on" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "off" || t == "no") return false;
  ctx.fail("invalid boolean '" + text + "'");
}

std::vector<double> parse_list(const KeyContext& ctx, const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_double(ctx, token));
  if (out.empty()) ctx.fail("expected a list of numbers");
  return out;
}

}  // namespace

void ScenarioConfig::finalize() {
  if (acc_states < 1) throw ConfigError("ScenarioConfig: acc_states must be >= 1");
  if (!fc_factors.empty() &&
      static_cast<int>(fc_factors.size()) != acc_states)
    throw ConfigError("ScenarioConfig: fc_factors has " +
                      std::to_string(fc_factors.size()) + " entries but acc_states = " +
                      std::to_string(acc_states));
  engine.ladder = fc_factors.empty()
                      ? DecayLadder<double>::logarithmic(acc_states, gamma, k_a)
                      : DecayLadder<double>::explicit_fractions(fc_factors, gamma, k_a);
  if (engine.half_span > 0.0) {
    const double required =
        std::max(5.0 * engine.sigma, engine.effective_p_start() + 5.0 * engine.sigma_vsel);
    if (engine.half_span < required - 1e-12)
      throw ConfigError("ScenarioConfig: half_span = " + std::to_string(engine.half_span) +
                        " does not cover the thermal tail; need >= " +
                        std::to_string(required));
  }
  engine.validate();
}

std::string ScenarioConfig::canonical_text() const {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto num = [](double v) { return format_number(v); };
  auto onoff = [](bool v) { return std::string(v ? "true" : "false"); };

  kv("acc_states", std::to_string(acc_states));
  kv("dp_vs", num(engine.dp_vs));
  kv("emit_fig3", onoff(emit_fig3));
  kv("emit_fig4", onoff(emit_fig4));
  kv("emit_fig5", onoff(emit_fig5));
  kv("emit_fig6", onoff(emit_fig6));
  kv("emit_plot_script", onoff(emit_plot_script));
  if (fc_factors.empty()) {
    kv("fc_factors", "logarithmic");
  } else {
    std::string joined;
    for (std::size_t i = 0; i < fc_factors.size(); ++i) {
      if (i) joined += ',';
      joined += num(fc_factors[i]);
    }
    kv("fc_factors", joined);
  }
  kv("gamma", num(gamma));
  kv("half_span", num(engine.effective_half_span()));
  kv("k_a", num(k_a));
  kv("p_start", num(engine.effective_p_start()));
  kv("resolution", std::to_string(engine.resolution));
  kv("samples_step1", std::to_string(engine.samples_step1));
  kv("samples_step2", std::to_string(engine.samples_step2));
  kv("samples_step3", std::to_string(engine.samples_step3));
  kv("sigma", num(engine.sigma));
  kv("sigma_vsel", num(engine.sigma_vsel));
  kv("tau1", num(engine.tau1));
  kv("tau2", num(engine.tau2));
  kv("tau3", num(engine.tau3));
  kv("trace_tol", num(engine.trace_tol));
  return out.str();
}

std::string ScenarioConfig::config_hash() const { return fnv1a64_hex(canonical_text()); }

ScenarioConfig default_scenario() {
  ScenarioConfig sc;
  sc.finalize();
  return sc;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());

  ScenarioConfig sc;
  std::set<std::string> seen;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (!seen.insert(key).second)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");

    const KeyContext ctx{path, lineno, key};
    if (key == "sigma") sc.engine.sigma = parse_double(ctx, value);
    else if (key == "dp_vs") sc.engine.dp_vs = parse_double(ctx, value);
    else if (key == "sigma_vsel") sc.engine.sigma_vsel = parse_double(ctx, value);
    else if (key == "p_start") sc.engine.p_start = parse_double(ctx, value);
    else if (key == "half_span") sc.engine.half_span = parse_double(ctx, value);
    else if (key == "resolution") sc.engine.resolution = parse_int(ctx, value);
    else if (key == "tau1") sc.engine.tau1 = parse_double(ctx, value);
    else if (key == "tau2") sc.engine.tau2 = parse_double(ctx, value);
    else if (key == "tau3") sc.engine.tau3 = parse_double(ctx, value);
    else if (key == "gamma") sc.gamma = parse_double(ctx, value);
    else if (key == "acc_states") sc.acc_states = parse_int(ctx, value);
    else if (key == "fc_factors") sc.fc_factors = parse_list(ctx, value);
    else if (key == "k_a") sc.k_a = parse_double(ctx, value);
    else if (key == "samples_step1") sc.engine.samples_step1 = parse_int(ctx, value);
    else if (key == "samples_step2") sc.engine.samples_step2 = parse_int(ctx, value);
    else if (key == "samples_step3") sc.engine.samples_step3 = parse_int(ctx, value);
    else if (key == "trace_tol") sc.engine.trace_tol = parse_double(ctx, value);
    else if (key == "output_dir") sc.output_dir = value;
    else if (key == "emit_fig3") sc.emit_fig3 = parse_bool(ctx, value);
    else if (key == "emit_fig4") sc.emit_fig4 = parse_bool(ctx, value);
    else if (key == "emit_fig5") sc.emit_fig5 = parse_bool(ctx, value);
    else if (key == "emit_fig6") sc.emit_fig6 = parse_bool(ctx, value);
    else if (key == "emit_plot_script") sc.emit_plot_script = parse_bool(ctx, value);
    else
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
  }

  if (!seen.count("sigma_vsel")) sc.engine.sigma_vsel = sc.engine.dp_vs / 2.0;
  if (!seen.count("tau3")) {
    if (!(sc.gamma > 0.0)) throw ConfigError("ScenarioConfig: gamma must be > 0");
    sc.engine.tau3 = 10.0 / sc.gamma;
  }
  if (!seen.count("acc_states") && !sc.fc_factors.empty())
    sc.acc_states = static_cast<int>(sc.fc_factors.size());
  sc.finalize();
  return sc;
}

}  // namespace molcool
