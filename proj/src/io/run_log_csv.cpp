#include "shsplit/io/run_log_csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace shsplit::io {
namespace {

void num(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_run_csv_header(std::ostream& os) {
  for (std::size_t i = 0; i < kRunLogColumns.size(); ++i) os << (i ? "," : "") << kRunLogColumns[i];
  os << '\n';
}

void write_run_csv_row(std::ostream& os, const RunRecord& r) {
  os << r.n << ',';
  for (double v : {r.t, r.dt, r.energy.total_H, r.energy.phi1, r.energy.phi2, r.energy.phi3, r.energy.phi4, r.linf,
                   r.l2}) {
    num(os, v);
    os << ',';
  }
  os << r.cg_iters;
  for (double v : {r.cg_residual, r.dissipation_slack, r.supbound_slack, r.fp_residual}) {
    os << ',';
    num(os, v);
  }
  os << '\n';
}

void write_run_csv(std::ostream& os, const RunLog& log) {
  write_run_csv_header(os);
  for (const auto& r : log.records) write_run_csv_row(os, r);
}

}  // namespace shsplit::io
