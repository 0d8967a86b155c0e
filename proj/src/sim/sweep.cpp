#include <algorithm>
#include <atomic>
#include <limits>
#include <optional>
#include <thread>

#include "asdrc/sim.hpp"

namespace asdrc::sim {

SweepResult sweep_alpha(const SimConfig& base, std::span<const double> alphas,
                        std::span<const std::vector<double>> weight_variants, int workers) {
  if (weight_variants.empty()) throw InvalidArgument("sweep needs at least one weight variant");
  const std::size_t nv = weight_variants.size();

  // Designs are built once on the calling thread. A variant that cannot be
  // built fails every cell in its column.
  std::vector<std::optional<rc::RcDesign>> designs(nv);
  std::vector<std::string> design_errors(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    try {
      designs[v] = rc::with_weights(base.design, weight_variants[v]);
    } catch (const std::exception& ex) {
      design_errors[v] = ex.what();
    }
  }

  SweepResult out;
  out.rows.resize(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    out.rows[a].alpha = alphas[a];
    out.rows[a].bounds.assign(nv, std::numeric_limits<double>::quiet_NaN());
    out.rows[a].errors.assign(nv, std::string());
  }

  // Each cell writes only its own slot, so the result is independent of
  // scheduling.
  const std::size_t cells = alphas.size() * nv;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const std::size_t a = i / nv, v = i % nv;
      SweepRow& row = out.rows[a];
      if (!designs[v]) {
        row.errors[v] = design_errors[v];
        continue;
      }
      try {
        SimConfig cfg = base;
        cfg.signals.alpha = alphas[a];
        cfg.design = *designs[v];
        row.bounds[v] = simulate(cfg).ultimate_bound;
      } catch (const std::exception& ex) {
        row.errors[v] = ex.what();
      }
    }
  };

  const auto n_threads = static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(std::max<std::size_t>(cells, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace asdrc::sim
