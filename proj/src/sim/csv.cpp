#include <cstdio>
#include <ostream>

#include "asdrc/sim.hpp"

namespace asdrc::sim {

namespace {

void put(std::ostream& os, double v, bool first = false) {
  char buf[40];
  std::snprintf(buf, sizeof buf, first ? "%.17g" : ",%.17g", v);
  os << buf;
}

}  // namespace

void write_sim_csv(std::ostream& os, const SimResult& res) {
  os << "t,x1,x2,x3,x4,y,r,e,u,up,us,yp_hat,xs_hat1,xs_hat2,xs_hat3,xs_hat4\n";
  for (std::size_t k = 0; k < res.size(); ++k) {
    put(os, res.t[k], true);
    for (int i = 0; i < 4; ++i) put(os, res.x[k](i));
    for (double v : {res.y[k], res.r[k], res.e[k], res.u[k], res.up[k], res.us[k], res.yp_hat[k]}) put(os, v);
    for (int i = 0; i < 4; ++i) put(os, res.xs_hat[k](i));
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  const std::size_t nv = res.rows.empty() ? 2 : res.rows.front().bounds.size();
  os << "alpha";
  for (std::size_t v = 0; v < nv; ++v) os << ",bound_w" << v + 1;
  os << '\n';
  for (const SweepRow& row : res.rows) {
    put(os, row.alpha, true);
    for (double b : row.bounds) put(os, b);
    os << '\n';
  }
}

}  // namespace asdrc::sim
