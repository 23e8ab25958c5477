#include "hsred/trace_io.hpp"

#include <cstdio>

namespace hsred {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_trace_header(std::ostream &os) {
    os << "n,g,lambda1,lambda2,lambda3,lambda4,e1,e2,e3,e4,"
          "p1,p2,p3,p4,entropy,relevant_count,flags\n";
}

void write_trace_row(const ReductionStep &st, std::ostream &os) {
    os << st.n << ',' << format_real(st.g);
    for (double v : st.lambda) os << ',' << format_real(v);
    for (double v : st.e) os << ',' << format_real(v);
    for (double v : st.p) os << ',' << format_real(v);
    os << ',' << format_real(st.entropy) << ',' << st.relevant_count << ','
       << flag_names(st.flags) << '\n';
}

void write_trace_csv(const ReductionTrace &trace, std::ostream &os) {
    write_trace_header(os);
    for (const ReductionStep &st : trace.steps) write_trace_row(st, os);
}

} // namespace hsred
