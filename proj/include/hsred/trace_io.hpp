#pragma once

#include <ostream>
#include <string>

#include "hsred/reduction.hpp"

namespace hsred {

/// One row per step:
/// n,g,lambda1..lambda4,e1..e4,p1..p4,entropy,relevant_count,flags
/// Reals carry 17 significant digits; flags is a semicolon-separated
/// name list (possibly empty). Header row first.
void write_trace_csv(const ReductionTrace &trace, std::ostream &os);

/// Incremental pieces, for streaming a trace row by row as a run advances.
void write_trace_header(std::ostream &os);
void write_trace_row(const ReductionStep &step, std::ostream &os);

std::string format_real(double x); // %.17g

} // namespace hsred
