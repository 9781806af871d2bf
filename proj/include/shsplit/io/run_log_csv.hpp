#pragma once

#include "shsplit/sh_scheme.hpp"

#include <array>
#include <iosfwd>
#include <string_view>

namespace shsplit::io {

inline constexpr std::array<std::string_view, 15> kRunLogColumns{
    "n",    "t",  "dt",       "H",           "phi1",
    "phi2", "phi3", "phi4",   "linf",        "l2",
    "cg_iters", "cg_residual", "dissipation_slack", "supbound_slack", "fp_residual"};

void write_run_csv_header(std::ostream& os);
void write_run_csv_row(std::ostream& os, const RunRecord& r);
/// Header plus one row per record.
void write_run_csv(std::ostream& os, const RunLog& log);

}  // namespace shsplit::io
