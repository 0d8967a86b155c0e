#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asdrc/cli.hpp"

namespace asdrc::cli {

namespace {

using nlohmann::json;

// Strict view of one JSON object: every read marks the key as known, and
// finish() rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(field(key), "missing required field");
    seen_.insert(key);
    return j_.at(key);
  }

  void skip(const std::string& key) { seen_.insert(key); }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }

  double positive(const std::string& key) {
    const double d = number(key);
    if (d <= 0.0) throw ConfigError(field(key), "must be positive");
    return d;
  }

  int integer(const std::string& key, int min_value) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    const auto i = v.get<long long>();
    if (i < min_value || i > 1'000'000'000) throw ConfigError(field(key), "must be at least " + std::to_string(min_value));
    return static_cast<int>(i);
  }

  bool boolean(const std::string& key) {
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t exact_size = 0) {
    return parse_numbers(at(key), field(key), exact_size);
  }

  Section section(const std::string& key) { return Section(at(key), field(key)); }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown field");
  }

  static std::vector<double> parse_numbers(const json& v, const std::string& where, std::size_t exact_size) {
    if (!v.is_array() || v.empty()) throw ConfigError(where, "expected a non-empty array of numbers");
    if (exact_size && v.size() != exact_size)
      throw ConfigError(where, "expected " + std::to_string(exact_size) + " entries");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) throw ConfigError(where, "entries must be finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

sim::Vec4 to_vec4(const std::vector<double>& v) { return sim::Vec4(v[0], v[1], v[2], v[3]); }

json vec_json(const sim::Vec4& v) { return json::array({v(0), v(1), v(2), v(3)}); }

LinearModel parse_linear_model(Section s) {
  const json& a = s.at("A");
  const std::string where = s.field("A");
  if (!a.is_array() || a.empty()) throw ConfigError(where, "expected a square array of rows");
  const auto n = static_cast<Eigen::Index>(a.size());
  LinearModel lm;
  lm.sys.A.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = Section::parse_numbers(a.at(static_cast<std::size_t>(i)), where, static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) lm.sys.A(i, j) = row[static_cast<std::size_t>(j)];
  }
  const auto b = s.numbers("b", static_cast<std::size_t>(n));
  const auto c = s.numbers("c", static_cast<std::size_t>(n));
  lm.sys.b = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  lm.sys.c = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  lm.Ts = s.positive("Ts");
  s.finish();
  return lm;
}

}  // namespace

int ToolConfig::N() const { return rc::compute_N(signals.T_nominal, linear_model ? linear_model->Ts : Ts); }

ToolConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }

  ToolConfig cfg;
  Section root(doc, "");

  Section plant = root.section("plant");
  cfg.plant.J_l = plant.positive("J_l");
  cfg.plant.J_m = plant.positive("J_m");
  cfg.plant.K = plant.number("K");
  cfg.plant.M = plant.number("M");
  cfg.plant.g = plant.number("g");
  cfg.plant.l = plant.number("l");
  cfg.plant.F_l = plant.number("F_l");
  cfg.plant.F_m = plant.number("F_m");
  cfg.plant.p = to_vec4(plant.numbers("p", 4));
  cfg.plant.x0 = to_vec4(plant.numbers("x0", 4));
  plant.finish();
  try {
    sim::Plant{cfg.plant};
  } catch (const InvalidArgument& e) {
    throw ConfigError("plant", e.what());
  }

  Section sig = root.section("signals");
  cfg.signals.r_amp = sig.number("r_amp");
  cfg.signals.r_offset = sig.number("r_offset");
  cfg.signals.d1_amp = sig.number("d1_amp");
  cfg.signals.d2_amp = sig.number("d2_amp");
  cfg.signals.T_nominal = sig.positive("T_nominal");
  sig.finish();

  Section design = root.section("design");
  cfg.Ts = design.positive("Ts");
  cfg.q_taps = design.numbers("q_taps");
  cfg.grid_size = design.integer("grid_size", 16);
  cfg.allow_uncertified = design.boolean("allow_uncertified");
  {
    const json& wv = design.at("weight_variants");
    const std::string where = design.field("weight_variants");
    if (!wv.is_array() || wv.empty()) throw ConfigError(where, "expected a non-empty array of weight lists");
    cfg.weight_variants.clear();
    for (std::size_t i = 0; i < wv.size(); ++i)
      cfg.weight_variants.push_back(Section::parse_numbers(wv[i], where + "[" + std::to_string(i) + "]", 0));
  }
  design.finish();

  Section simu = root.section("simulation");
  cfg.h_int = simu.positive("h_int");
  cfg.T_ss = simu.positive("T_ss");
  cfg.horizon_periods = simu.integer("horizon_periods", 1);
  cfg.bound_window_periods = simu.integer("bound_window_periods", 1);
  cfg.signals.alpha = simu.number("alpha");
  simu.finish();

  Section sweep = root.section("sweep");
  cfg.sweep_alphas = sweep.numbers("alphas");
  cfg.workers = sweep.integer("workers", 1);
  sweep.finish();

  Section fr = root.section("freqresp");
  cfg.freqresp_points = fr.integer("points", 2);
  fr.finish();

  Section output = root.section("output");
  cfg.output_directory = output.string("directory");
  output.finish();

  if (root.has("linear_model"))
    cfg.linear_model = parse_linear_model(root.section("linear_model"));
  else
    root.skip("linear_model");
  root.finish();

  // Cross-field checks.
  try {
    cfg.signals.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("simulation.alpha", e.what());
  }
  for (std::size_t i = 0; i < cfg.sweep_alphas.size(); ++i)
    if (1.0 + cfg.sweep_alphas[i] <= 0.0)
      throw ConfigError("sweep.alphas[" + std::to_string(i) + "]", "1 + alpha must be positive");
  int n = 0;
  try {
    n = cfg.N();
  } catch (const InvalidArgument& e) {
    throw ConfigError("design.Ts", e.what());
  }
  for (std::size_t i = 0; i < cfg.weight_variants.size(); ++i) {
    try {
      rc::WeightFunction::make(cfg.weight_variants[i], n);
    } catch (const InvalidArgument& e) {
      throw ConfigError("design.weight_variants[" + std::to_string(i) + "]", e.what());
    }
  }
  sim::SimConfig sc;
  sc.signals = cfg.signals;
  sc.Ts = cfg.Ts;
  sc.h_int = cfg.h_int;
  sc.T_ss = cfg.T_ss;
  sc.horizon_periods = cfg.horizon_periods;
  sc.bound_window_periods = cfg.bound_window_periods;
  try {
    sc.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("simulation", e.what());
  }
  if (cfg.linear_model) {
    try {
      cfg.linear_model->sys.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("linear_model", e.what());
    }
  }
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string default_config_json() {
  const ToolConfig d;
  json doc;
  doc["plant"] = {{"J_l", d.plant.J_l}, {"J_m", d.plant.J_m}, {"K", d.plant.K},     {"M", d.plant.M},
                  {"g", d.plant.g},     {"l", d.plant.l},     {"F_l", d.plant.F_l}, {"F_m", d.plant.F_m},
                  {"p", vec_json(d.plant.p)}, {"x0", vec_json(d.plant.x0)}};
  doc["signals"] = {{"r_amp", d.signals.r_amp},
                    {"r_offset", d.signals.r_offset},
                    {"d1_amp", d.signals.d1_amp},
                    {"d2_amp", d.signals.d2_amp},
                    {"T_nominal", d.signals.T_nominal}};
  doc["design"] = {{"Ts", d.Ts},
                   {"q_taps", d.q_taps},
                   {"weight_variants", d.weight_variants},
                   {"grid_size", d.grid_size},
                   {"allow_uncertified", d.allow_uncertified}};
  doc["simulation"] = {{"h_int", d.h_int},
                       {"T_ss", d.T_ss},
                       {"horizon_periods", d.horizon_periods},
                       {"bound_window_periods", d.bound_window_periods},
                       {"alpha", d.signals.alpha}};
  doc["sweep"] = {{"alphas", d.sweep_alphas}, {"workers", d.workers}};
  doc["freqresp"] = {{"points", d.freqresp_points}};
  doc["output"] = {{"directory", d.output_directory}};
  return doc.dump(2) + "\n";
}

}  // namespace asdrc::cli
