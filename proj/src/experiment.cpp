#include "hsred/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hsred/trace_io.hpp"

namespace hsred {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string &path, int line, const std::string &msg) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string &path, int line, const std::string &key,
                    const std::string &v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail(path, line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string &path, int line, const std::string &key,
               const std::string &v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail(path, line, "key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string &path, int line, const std::string &key,
                const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(path, line, "key '" + key + "': expected true/false, got '" + v + "'");
}

} // namespace

ExperimentConfig parse_config_text(const std::string &text, const std::string &path) {
    static const char *known[] = {
        "scheme", "L", "J_t", "J_l", "J_c", "M_tot", "output",
        "k", "tol", "max_iter", "seed", "dense_threshold",
        "epsilon", "n_floor", "p_abort", "g_jump_abort", "lambda_target",
        "eliminate_smallest_amplitude",
    };

    std::map<std::string, std::pair<int, std::string>> kv; // key -> (line, value)
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        lineno++;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(path, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(path, lineno, "empty key");
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char *k) { return key == k; }) == std::end(known))
            fail(path, lineno, "unknown key '" + key + "'");
        if (kv.count(key))
            fail(path, lineno, "duplicate key '" + key + "' (first on line " +
                                   std::to_string(kv[key].first) + ")");
        kv[key] = {lineno, value};
    }

    for (const char *req : {"scheme", "L", "J_t", "J_l", "J_c"})
        if (!kv.count(req)) throw ConfigError(path + ": missing required key '" + std::string(req) + "'");

    ExperimentConfig cfg;
    ReductionConfig &r = cfg.reduction;

    {
        const auto &[line, v] = kv["scheme"];
        if (v == "su2")
            r.scheme = Scheme::SU2;
        else if (v == "so4")
            r.scheme = Scheme::SO4;
        else
            fail(path, line, "key 'scheme': expected su2 or so4, got '" + v + "'");
    }
    {
        const auto &[line, v] = kv["L"];
        const long L = parse_int(path, line, "L", v);
        if (L < 1 || L > kMaxLegSites) fail(path, line, "key 'L': out of range");
        r.L = static_cast<int>(L);
    }
    const double j_t = parse_double(path, kv["J_t"].first, "J_t", kv["J_t"].second);
    const double j_l = parse_double(path, kv["J_l"].first, "J_l", kv["J_l"].second);
    const double j_c = parse_double(path, kv["J_c"].first, "J_c", kv["J_c"].second);
    if (!(j_t > 0.0)) fail(path, kv["J_t"].first, "key 'J_t': must be positive");
    if (!(j_l > 0.0)) fail(path, kv["J_l"].first, "key 'J_l': must be positive");
    if (!(j_c > 0.0)) fail(path, kv["J_c"].first, "key 'J_c': must be positive");
    r.couplings = CouplingSet::make(j_t, j_l, j_c);

    if (kv.count("M_tot")) {
        const auto &[line, v] = kv["M_tot"];
        const long m = parse_int(path, line, "M_tot", v);
        if (m < -r.L || m > r.L) fail(path, line, "key 'M_tot': empty sector");
        r.m_tot = static_cast<int>(m);
    }
    if (kv.count("k")) {
        const auto &[line, v] = kv["k"];
        const long k = parse_int(path, line, "k", v);
        if (k < 1 || k > 16) fail(path, line, "key 'k': out of range");
        r.solver.k = static_cast<int>(k);
    }
    if (kv.count("tol")) {
        const auto &[line, v] = kv["tol"];
        r.solver.tol = parse_double(path, line, "tol", v);
        if (!(r.solver.tol > 0.0)) fail(path, line, "key 'tol': must be positive");
    }
    if (kv.count("max_iter")) {
        const auto &[line, v] = kv["max_iter"];
        const long it = parse_int(path, line, "max_iter", v);
        if (it < 1) fail(path, line, "key 'max_iter': must be positive");
        r.solver.max_iter = static_cast<int>(it);
    }
    if (kv.count("seed")) {
        const auto &[line, v] = kv["seed"];
        r.solver.seed = static_cast<std::uint64_t>(parse_int(path, line, "seed", v));
    }
    if (kv.count("dense_threshold")) {
        const auto &[line, v] = kv["dense_threshold"];
        const long d = parse_int(path, line, "dense_threshold", v);
        if (d < 0) fail(path, line, "key 'dense_threshold': must be non-negative");
        r.solver.dense_threshold = static_cast<int>(d);
    }
    if (kv.count("epsilon")) {
        const auto &[line, v] = kv["epsilon"];
        r.epsilon = parse_double(path, line, "epsilon", v);
        if (!(r.epsilon > 0.0)) fail(path, line, "key 'epsilon': must be positive");
    }
    if (kv.count("n_floor")) {
        const auto &[line, v] = kv["n_floor"];
        const long f = parse_int(path, line, "n_floor", v);
        if (f < std::max(r.solver.k, 2)) fail(path, line, "key 'n_floor': too small");
        r.n_floor = static_cast<std::size_t>(f);
    }
    if (kv.count("p_abort")) {
        const auto &[line, v] = kv["p_abort"];
        r.p_abort = parse_double(path, line, "p_abort", v);
        if (!(r.p_abort > 0.0)) fail(path, line, "key 'p_abort': must be positive");
    }
    if (kv.count("g_jump_abort")) {
        const auto &[line, v] = kv["g_jump_abort"];
        r.g_jump_abort = parse_double(path, line, "g_jump_abort", v);
        if (!(r.g_jump_abort > 1.0)) fail(path, line, "key 'g_jump_abort': must exceed 1");
    }
    if (kv.count("lambda_target")) {
        const auto &[line, v] = kv["lambda_target"];
        if (!v.empty()) r.lambda_target = parse_double(path, line, "lambda_target", v);
    }
    if (kv.count("eliminate_smallest_amplitude")) {
        const auto &[line, v] = kv["eliminate_smallest_amplitude"];
        r.eliminate_smallest_amplitude = parse_bool(path, line, "eliminate_smallest_amplitude", v);
    }

    if (kv.count("output")) {
        cfg.output = kv["output"].second;
        if (cfg.output.empty()) fail(path, kv["output"].first, "key 'output': empty path");
    } else {
        // default: config file stem + "_trace.csv" in the working directory
        std::string stem = path;
        const auto slash = stem.find_last_of("/\\");
        if (slash != std::string::npos) stem.erase(0, slash + 1);
        const auto dot = stem.find_last_of('.');
        if (dot != std::string::npos && dot > 0) stem.erase(dot);
        cfg.output = stem + "_trace.csv";
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

int env_thread_count() {
    const char *v = std::getenv("HSRED_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

namespace {

struct RunOutcome {
    ReductionTrace trace;
    bool solver_failed = false;
};

RunOutcome execute_run(const ExperimentConfig &cfg, const std::string &out_path) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw ConfigError(out_path + ": cannot open output file");
    write_trace_header(os);
    RunOutcome r;
    r.trace = run_reduction(cfg.reduction, [&os](const ReductionStep &st) {
        write_trace_row(st, os);
        os.flush();
    });
    r.solver_failed = r.trace.stop_reason == StopReason::SolverFailure;
    return r;
}

double max_p_before_min(const ReductionTrace &t) {
    double m = 0.0;
    for (const ReductionStep &st : t.steps) {
        if (st.n == t.n_min()) break;
        for (double p : st.p) m = std::max(m, p);
    }
    return m;
}

void print_summary(const ReductionTrace &t, const std::string &out_path, std::ostream &os) {
    os << "N       = " << t.initial_dim << "\n";
    os << "lambda1 = " << format_real(t.lambda_target) << "\n";
    os << "N_min   = " << t.n_min() << "\n";
    os << "final g = " << format_real(t.steps.empty() ? 0.0 : t.steps.back().g) << "\n";
    os << "max p(i) before N_min = " << format_real(max_p_before_min(t)) << "\n";
    const char *why = t.stop_reason == StopReason::Instability     ? "instability"
                      : t.stop_reason == StopReason::SolverFailure ? "solver failure"
                                                                   : "dimension floor";
    os << "stopped on " << why << "; trace written to " << out_path << "\n";
}

} // namespace

int cmd_run(const ExperimentConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        const RunOutcome r = execute_run(cfg, cfg.output);
        print_summary(r.trace, cfg.output, out);
        return r.solver_failed ? 2 : 0;
    } catch (const SolverFailure &e) {
        err << "solver failure: " << e.what() << "\n";
        return 2;
    }
}

int cmd_spectrum(const ExperimentConfig &cfg, int k, std::ostream &out, std::ostream &err) {
    (void)err;
    if (cfg.reduction.L > 8) throw ConfigError("spectrum: L must be at most 8");
    SolverConfig scfg = cfg.reduction.solver;
    scfg.k = k;

    auto lowest = [&](Scheme scheme) {
        const Basis basis = scheme == Scheme::SU2
                                ? build_su2_basis(cfg.reduction.L, cfg.reduction.m_tot)
                                : build_so4_basis(cfg.reduction.L, cfg.reduction.m_tot);
        const SplitHamiltonian h = assemble(basis, cfg.reduction.couplings);
        return solve_lowest(h, scfg);
    };
    const EigenSolution su2 = lowest(Scheme::SU2);
    const EigenSolution so4 = lowest(Scheme::SO4);

    out << "i,E_su2,E_so4\n";
    double max_rel = 0.0;
    const std::size_t rows = std::min<std::size_t>(k, std::min(su2.values.size(), so4.values.size()));
    for (std::size_t i = 0; i < rows; i++) {
        out << i + 1 << ',' << format_real(su2.values[i]) << ',' << format_real(so4.values[i])
            << '\n';
        const double denom = std::max(std::abs(su2.values[i]), std::abs(so4.values[i]));
        if (denom > 0.0)
            max_rel = std::max(max_rel, std::abs(su2.values[i] - so4.values[i]) / denom);
    }
    out << "max relative difference = " << format_real(max_rel) << "\n";
    return 0;
}

std::string sweep_output_path(const std::string &base_output, double jt) {
    char num[32];
    std::snprintf(num, sizeof(num), "%g", jt);
    std::string stem = base_output, ext;
    const auto dot = base_output.find_last_of('.');
    const auto slash = base_output.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        stem = base_output.substr(0, dot);
        ext = base_output.substr(dot);
    }
    return stem + "_jt" + num + ext;
}

int cmd_sweep(const ExperimentConfig &base, const std::vector<double> &jt_values,
              std::ostream &out, std::ostream &err) {
    if (jt_values.empty()) throw ConfigError("sweep: empty J_t list");
    for (double jt : jt_values)
        if (!(jt > 0.0)) throw ConfigError("sweep: J_t values must be positive");

    struct Row {
        double jt = 0.0;
        bool failed = false;
        std::string error;
        std::size_t n_min = 0;
        std::size_t deepest = 0;
        double entropy0 = 0.0;
        bool solver_failed = false;
    };
    std::vector<Row> rows(jt_values.size());

    const int threads = std::min(env_thread_count(), static_cast<int>(jt_values.size()));
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= jt_values.size()) return;
                idx = next++;
            }
            Row &row = rows[idx];
            row.jt = jt_values[idx];
            try {
                ExperimentConfig cfg = base;
                cfg.reduction.couplings = CouplingSet::make(
                    row.jt, base.reduction.couplings.j_l, base.reduction.couplings.j_c);
                cfg.output = sweep_output_path(base.output, row.jt);
                const RunOutcome r = execute_run(cfg, cfg.output);
                row.solver_failed = r.solver_failed;
                row.n_min = r.trace.n_min();
                row.deepest = deepest_stable_n(r.trace, 1.0);
                row.entropy0 = r.trace.steps.empty() ? 0.0 : r.trace.steps.front().entropy;
            } catch (const std::exception &e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) pool.emplace_back(worker);
        for (auto &th : pool) th.join();
    }

    out << "J_t,N_min,deepest_n_p1_le_1pc,initial_entropy,status\n";
    bool any_failed = false;
    for (const Row &row : rows) {
        char num[32];
        std::snprintf(num, sizeof(num), "%g", row.jt);
        if (row.failed) {
            any_failed = true;
            out << num << ",,,,failed\n";
            err << "J_t=" << num << ": " << row.error << "\n";
        } else {
            out << num << ',' << row.n_min << ',' << row.deepest << ','
                << format_real(row.entropy0) << ','
                << (row.solver_failed ? "solver-failure" : "ok") << '\n';
            any_failed = any_failed || row.solver_failed;
        }
    }
    return any_failed ? 2 : 0;
}

} // namespace hsred
