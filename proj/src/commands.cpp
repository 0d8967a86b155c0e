#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "asdrc/cli.hpp"
#include "asdrc/rc_runtime.hpp"

namespace asdrc::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw Error("cannot write " + (dir / name).string());
  os << content;
}

// "(z + 9.399)" style factors; complex pairs become one quadratic and roots
// at the origin collapse into a power of z.
std::string factored(const poly::Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out = p.leading() == 1.0 && p.degree() > 0 ? "" : fmt("%.4g", p.leading());
  if (p.degree() == 0) return out;
  int origin = 0;
  for (const poly::Complex& r : poly::roots(p)) {
    if (r.imag() < 0.0) continue;
    if (r.imag() > 0.0)
      out += fmt(" (z^2 %c %.4g z + %.4g)", r.real() > 0 ? '-' : '+', std::abs(2.0 * r.real()), std::norm(r));
    else if (r.real() == 0.0)
      ++origin;
    else
      out += fmt(" (z %c %.4g)", r.real() > 0 ? '-' : '+', std::abs(r.real()));
  }
  if (origin == 1) out += " z";
  if (origin > 1) out += fmt(" z^%d", origin);
  return out.front() == ' ' ? out.substr(1) : out;
}

std::string ratfn_text(const poly::RationalFunction& r) {
  return "[" + factored(r.num()) + "] / [" + factored(r.den()) + "]";
}

std::string variant_name(const std::vector<double>& w) {
  std::string s = "W = ";
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double c = w[i];
    if (i == 0)
      s += fmt("%g", c);
    else if (std::abs(c) == 1.0)
      s += c < 0 ? " -" : " +";
    else
      s += fmt(" %c %g", c < 0 ? '-' : '+', std::abs(c));
    if (i == 1) s += " z^-N";
    if (i > 1) s += fmt(" z^-%zuN", i);
  }
  return s;
}

poly::RationalFunction plant_tf(const ToolConfig& cfg) {
  if (cfg.linear_model) return linalg::ss_to_tf(linalg::zoh_discretize(cfg.linear_model->sys, cfg.linear_model->Ts));
  return linalg::ss_to_tf(linalg::zoh_discretize(sim::Plant{cfg.plant}.linear_model(), cfg.Ts));
}

double sample_time(const ToolConfig& cfg) { return cfg.linear_model ? cfg.linear_model->Ts : cfg.Ts; }

rc::RcDesign make_design(const ToolConfig& cfg, const poly::RationalFunction& plant, const std::vector<double>& w) {
  rc::DesignInputs in;
  in.q_taps = cfg.q_taps;
  in.weights = w;
  in.N = cfg.N();
  in.grid_size = cfg.grid_size;
  return rc::synthesize(plant, in);
}

void require_arm(const ToolConfig& cfg, const char* cmd) {
  if (cfg.linear_model)
    throw ConfigError("linear_model", std::string("not supported by '") + cmd + "', which simulates the arm");
}

sim::SimConfig sim_config(const ToolConfig& cfg, rc::RcDesign design) {
  sim::SimConfig sc;
  sc.plant = cfg.plant;
  sc.signals = cfg.signals;
  sc.design = std::move(design);
  sc.admission = cfg.admission();
  sc.Ts = cfg.Ts;
  sc.h_int = cfg.h_int;
  sc.T_ss = cfg.T_ss;
  sc.horizon_periods = cfg.horizon_periods;
  sc.bound_window_periods = cfg.bound_window_periods;
  return sc;
}

const char* factor_name(rc::UnstableFactor f) {
  switch (f) {
    case rc::UnstableFactor::Plant: return "plant P(z)";
    case rc::UnstableFactor::Sensitivity: return "closed loop 1/(1 + P(z))";
    case rc::UnstableFactor::Filter: return "filter L(z)";
  }
  return "?";
}

// Independent realization of u_p for the equivalence check: the whole
// controller expanded into one difference equation in z^-1.
std::vector<double> expanded_response(const rc::RcDesign& d, const std::vector<double>& x) {
  using Taps = std::vector<double>;
  const auto conv = [](const Taps& a, const Taps& b) {
    Taps o(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) o[i + j] += a[i] * b[j];
    return o;
  };
  const int deg = d.L_causal.den().degree();
  Taps bn(static_cast<std::size_t>(deg) + 1), ad(static_cast<std::size_t>(deg) + 1);
  for (int j = 0; j <= deg; ++j) {
    bn[static_cast<std::size_t>(j)] = d.L_causal.num()[deg - j];
    ad[static_cast<std::size_t>(j)] = d.L_causal.den()[deg - j];
  }
  const Taps qw = conv(d.q_taps, d.W.expand().coeffs());
  Taps loop(static_cast<std::size_t>(d.N) + qw.size(), 0.0);
  loop[0] = 1.0;
  for (std::size_t i = 0; i < qw.size(); ++i) loop[static_cast<std::size_t>(d.N) + i] -= qw[i];
  const Taps den = conv(ad, loop);
  Taps feed(static_cast<std::size_t>(d.N - d.advance), 0.0);
  feed.insert(feed.end(), qw.begin(), qw.end());
  Taps num = den;
  const Taps extra = conv(bn, feed);
  if (extra.size() > num.size()) num.resize(extra.size(), 0.0);
  for (std::size_t i = 0; i < extra.size(); ++i) num[i] += extra[i];

  std::vector<double> y(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < num.size() && j <= k; ++j) acc += num[j] * x[k - j];
    for (std::size_t j = 1; j < den.size() && j <= k; ++j) acc -= den[j] * y[k - j];
    y[k] = acc / den[0];
  }
  return y;
}

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

}  // namespace

int cmd_discretize(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  linalg::ContinuousStateSpace sys = cfg.linear_model ? cfg.linear_model->sys : sim::Plant{cfg.plant}.linear_model();
  const double ts = sample_time(cfg);
  const auto d = linalg::zoh_discretize(sys, ts);
  const auto tf = linalg::ss_to_tf(d);

  out << fmt("ZOH discretization at Ts = %g s\n", ts) << "F =\n";
  for (Eigen::Index i = 0; i < d.F.rows(); ++i) {
    out << " ";
    for (Eigen::Index j = 0; j < d.F.cols(); ++j) out << fmt(" %14.10f", d.F(i, j));
    out << "\n";
  }
  out << "g =\n";
  for (Eigen::Index i = 0; i < d.g.size(); ++i) out << fmt("  %14.6e\n", d.g(i));
  out << "P(z) = " << ratfn_text(tf) << "\n";

  std::ostringstream csv;
  csv << "power,numerator,denominator\n";
  for (int k = 0; k <= tf.den().degree(); ++k) csv << fmt("%d,%.17g,%.17g\n", k, tf.num()[k], tf.den()[k]);
  write_file(dir, "discretize.csv", csv.str());
  return kExitOk;
}

int cmd_design(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  (void)dir;
  const auto plant = plant_tf(cfg);
  const double ts = sample_time(cfg);
  bool all_pass = true;
  out << "P(z) = " << ratfn_text(plant) << "\n";
  out << fmt("N = %d samples per period, Q taps:", cfg.N());
  for (double q : cfg.q_taps) out << fmt(" %g", q);
  out << "\n";
  for (const auto& w : cfg.weight_variants) {
    out << "\n" << variant_name(w) << "\n";
    try {
      const rc::RcDesign d = make_design(cfg, plant, w);
      out << fmt("  advance a = %d\n", d.advance);
      out << "  L(z) = z^" << d.advance << " " << ratfn_text(d.L_causal) << "\n";
      const int modes = rc::unstable_mode_count(d);
      const double theta = std::abs(d.worst_theta);
      out << fmt("  margin max|QWz^-N(1-TL)| = %.10g at omega*Ts = %.6f rad (omega = %.6g rad/s), %d grid points\n",
                 d.margin, theta, theta / ts, d.grid_size);
      out << fmt("  internal-model modes outside the unit circle: %d\n", modes);
      if (d.certified()) {
        out << "  PASS margin < 1\n";
      } else {
        all_pass = false;
        out << fmt("  FAIL margin >= 1 (violated at omega = %.6g rad/s)\n", theta / ts);
      }
    } catch (const rc::StabilityConditionError& e) {
      all_pass = false;
      out << "  FAIL " << factor_name(e.factor()) << " is not stable: " << e.what() << "\n";
    }
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_freqresp(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto plant = plant_tf(cfg);
  const double ts = sample_time(cfg);
  const int n = cfg.N();
  const double lo = 2.0 * std::numbers::pi / (50.0 * n * ts), hi = std::numbers::pi / ts;
  std::vector<double> omegas(static_cast<std::size_t>(cfg.freqresp_points));
  for (std::size_t k = 0; k < omegas.size(); ++k)
    omegas[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(omegas.size() - 1));
  omegas.back() = hi;

  const double w1 = 2.0 * std::numbers::pi / (n * ts);
  const std::vector<double> probes{0.0, w1, 1.01 * w1};
  std::vector<Series> series;
  for (std::size_t v = 0; v < cfg.weight_variants.size(); ++v) {
    const rc::RcDesign d = make_design(cfg, plant, cfg.weight_variants[v]);
    const auto curve = rc::sensitivity_curve(d, omegas, ts, cfg.admission());
    std::ostringstream csv;
    rc::write_sensitivity_csv(csv, curve);
    write_file(dir, "sensitivity_w" + std::to_string(v + 1) + ".csv", csv.str());
    series.push_back({variant_name(cfg.weight_variants[v]), curve.omegas, curve.magnitudes});

    const auto at = rc::sensitivity_curve(d, probes, ts, cfg.admission());
    out << variant_name(cfg.weight_variants[v]) << fmt(": |S(0)| = %.3g, |S(w1)| = %.6g, |S(1.01 w1)| = %.6g\n",
                                                       at.magnitudes[0], at.magnitudes[1], at.magnitudes[2]);
  }
  ChartSpec spec{"Tracking-error sensitivity", "omega (rad/s)", "magnitude", true, true};
  write_file(dir, "freqresp.svg", line_chart_svg(spec, series));
  out << fmt("%zu points from %.6g to %.6g rad/s per variant\n", omegas.size(), lo, hi);
  return kExitOk;
}

int cmd_simulate(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  require_arm(cfg, "simulate");
  const auto plant = plant_tf(cfg);
  std::vector<Series> series;
  for (std::size_t v = 0; v < cfg.weight_variants.size(); ++v) {
    const auto res = sim::simulate(sim_config(cfg, make_design(cfg, plant, cfg.weight_variants[v])));
    std::ostringstream csv;
    sim::write_sim_csv(csv, res);
    write_file(dir, "simulate_w" + std::to_string(v + 1) + ".csv", csv.str());
    series.push_back({variant_name(cfg.weight_variants[v]), res.t, res.e});
    out << variant_name(cfg.weight_variants[v])
        << fmt(": alpha = %g, ultimate bound = %.17g rad\n", cfg.signals.alpha, res.ultimate_bound);
  }
  ChartSpec spec{"Tracking error", "t (s)", "y - r (rad)", false, false};
  write_file(dir, "tracking_error.svg", line_chart_svg(spec, series));
  return kExitOk;
}

int cmd_sweep(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  require_arm(cfg, "sweep");
  const auto base = sim_config(cfg, make_design(cfg, plant_tf(cfg), cfg.weight_variants.front()));
  const auto res = sim::sweep_alpha(base, cfg.sweep_alphas, cfg.weight_variants, cfg.workers);

  std::ostringstream csv;
  sim::write_sweep_csv(csv, res);
  write_file(dir, "sweep.csv", csv.str());

  bool ok = true;
  std::vector<Series> series(cfg.weight_variants.size());
  for (std::size_t v = 0; v < series.size(); ++v) series[v].label = variant_name(cfg.weight_variants[v]);
  for (const auto& row : res.rows) {
    out << fmt("alpha = %+.4f", row.alpha);
    for (std::size_t v = 0; v < row.bounds.size(); ++v) {
      series[v].x.push_back(row.alpha);
      series[v].y.push_back(row.bounds[v]);
      if (row.errors[v].empty()) {
        out << fmt("  bound_w%zu = %.6e", v + 1, row.bounds[v]);
      } else {
        ok = false;
        out << fmt("  bound_w%zu failed (", v + 1) << row.errors[v] << ")";
      }
    }
    out << "\n";
  }
  ChartSpec spec{"Ultimate bound versus period mismatch", "alpha", "ultimate bound (rad)", false, false};
  write_file(dir, "sweep.svg", line_chart_svg(spec, series));
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_check(const ToolConfig& cfg, const fs::path& dir, std::ostream& out) {
  (void)dir;
  require_arm(cfg, "check");
  const auto plant = plant_tf(cfg);
  std::vector<CheckLine> lines;
  constexpr double kExact = 1e-6;

  std::vector<rc::RcDesign> designs;
  for (const auto& w : cfg.weight_variants) designs.push_back(make_design(cfg, plant, w));

  for (std::size_t v = 0; v < designs.size(); ++v) {
    const std::string tag = "[" + variant_name(cfg.weight_variants[v]) + "]";
    const auto rep = sim::decomposition_check(sim_config(cfg, designs[v]));
    lines.push_back({"decomposition " + tag, rep.decomposition_error < kExact,
                     fmt("max|x - (xp + xs)| = %.3e, tol %.0e", rep.decomposition_error, kExact)});
    lines.push_back({"observer " + tag, rep.observer_error < kExact,
                     fmt("max|xs_hat - xs| = %.3e, tol %.0e", rep.observer_error, kExact)});
  }

  {
    // Coarse steps so the integration error dominates roundoff.
    const auto oc = sim::rk4_order_check(sim_config(cfg, designs.front()), 0.05, 1);
    lines.push_back({"rk4 order", oc.ratio >= 12.0 && oc.ratio <= 20.0,
                     fmt("error(h=%.3g) = %.3e, error(h/2) = %.3e, ratio %.2f, want [12, 20]", oc.h, oc.error_h,
                         oc.error_half, oc.ratio)});
  }

  for (std::size_t v = 0; v < designs.size(); ++v) {
    const rc::RcDesign& d = designs[v];
    rc::RepetitiveController c(d, rc::Admission::AllowUncertified);
    std::mt19937_64 rng(20240 + v);
    std::normal_distribution<double> nd(0.0, 0.1);
    std::vector<double> x(static_cast<std::size_t>(50 * d.N));
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(2.0 * std::numbers::pi * k / d.N) + nd(rng);
    const auto ref = expanded_response(d, x);
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double y = c.step(x[k]);
      diff += (y - ref[k]) * (y - ref[k]);
      scale += ref[k] * ref[k];
    }
    diff = std::sqrt(diff / x.size());
    scale = std::sqrt(scale / x.size());
    const double tol = 1e-9 * std::max(1.0, scale);
    lines.push_back({"filter equivalence [" + variant_name(cfg.weight_variants[v]) + "]", diff <= tol,
                     fmt("rms difference %.3e over %zu samples, tol %.3e", diff, x.size(), tol)});
  }

  {
    const auto sc = sim_config(cfg, designs.front());
    const auto small = sim::secondary_iss_check(sc, 1e-3);
    const auto large = sim::secondary_iss_check(sc, 1e-2);
    lines.push_back({"secondary loop iss", std::isfinite(large.sup_norm) && small.sup_norm < large.sup_norm,
                     fmt("sup|xs| = %.4g at e_p = 1e-3, %.4g at e_p = 1e-2", small.sup_norm, large.sup_norm)});
  }

  bool ok = true;
  for (const auto& l : lines) {
    ok = ok && l.pass;
    out << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail << "\n";
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete-time repetitive control design and simulation for an elastic-joint arm"};
  app.name("asdrc");
  std::string config_path, out_dir;
  int workers = 0;
  bool seed = false;
  app.add_option("--config", config_path, "JSON configuration (defaults to the built-in example)");
  app.add_option("--out", out_dir, "output directory, overrides output.directory");
  app.add_option("--workers", workers, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_flag("--seed-defaults", seed, "print the default configuration and exit");
  app.require_subcommand(0, 1);
  const std::pair<const char*, const char*> subs[] = {
      {"discretize", "ZOH discretization and P(z) in factored form"},
      {"design", "ZPETC filter and stability margin per weight variant"},
      {"freqresp", "tracking-error sensitivity curves (CSV + SVG)"},
      {"simulate", "closed-loop simulation per weight variant (CSV + SVG)"},
      {"sweep", "ultimate bound versus period mismatch (CSV + SVG)"},
      {"check", "exactness and numerical invariant suite"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitConfigError;
  }

  if (seed) {
    out << default_config_json();
    return kExitOk;
  }
  const auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    err << "usage error: a subcommand is required\n" << app.help();
    return kExitConfigError;
  }
  const std::string cmd = chosen.front()->get_name();

  try {
    ToolConfig cfg = config_path.empty() ? ToolConfig{} : load_config(config_path);
    if (workers > 0) cfg.workers = workers;
    const fs::path dir = out_dir.empty() ? fs::path(cfg.output_directory) : fs::path(out_dir);
    if (cmd == "discretize") return cmd_discretize(cfg, dir, out);
    if (cmd == "design") return cmd_design(cfg, dir, out);
    if (cmd == "freqresp") return cmd_freqresp(cfg, dir, out);
    if (cmd == "simulate") return cmd_simulate(cfg, dir, out);
    if (cmd == "sweep") return cmd_sweep(cfg, dir, out);
    return cmd_check(cfg, dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << cmd << " failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace asdrc::cli
