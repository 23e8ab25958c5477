#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsred/basis.hpp"
#include "hsred/couplings.hpp"
#include "hsred/eigensolver.hpp"
#include "hsred/hamiltonian.hpp"

namespace hsred {

// Step flags, also the CSV flag-name order.
enum StepFlag : unsigned {
    kFlagNoRealRoot = 1u,
    kFlagInstability = 2u,
    kFlagWarmStartFailed = 4u,
};
std::string flag_names(unsigned flags); // "no-real-root;instability;..." or ""

/// Scalars of the one-state elimination. With the eliminated state |e>,
/// the kept-block projector P and the normalized projected ground vector
/// phi = P psi1 / ||P psi1||:
///   d0 = <e|H0|e>,   d1 = <e|H1|e>
///   a0 = <phi|H0|phi>, a1 = <phi|H1|phi>   (P-restricted)
///   v0 = <phi|H0|e>, v1 = <phi|H1|e>
struct RenormalizationInputs {
    double lambda1 = 0.0; // energy target, frozen at the full-space value
    double d0 = 0.0, d1 = 0.0;
    double a0 = 0.0, a1 = 0.0;
    double v0 = 0.0, v1 = 0.0;
    double g_prev = 0.0;
};

struct RenormResult {
    double g_new = 0.0;
    bool no_real_root = false; // kept g_prev: no real root / indeterminate
};

struct ReductionStep {
    std::size_t n = 0;              // dimension after this step's solve
    double g = 0.0;                 // coupling used at this step
    std::array<double, 4> lambda{}; // four lowest eigenvalues
    std::array<double, 4> e{};      // lambda_i / 2L
    std::array<double, 4> p{};      // percentage deviations vs step 0
    double entropy = 0.0;           // amplitude entropy per site
    std::size_t relevant_count = 0; // |{ i : |a_1i| > epsilon }|
    unsigned flags = 0;
};

enum class StopReason { FloorReached, Instability, SolverFailure };

struct ReductionTrace {
    Scheme scheme = Scheme::SU2;
    int L = 0;
    int m_tot = 0;
    CouplingSet couplings{};
    double lambda_target = 0.0;
    std::size_t initial_dim = 0;
    StopReason stop_reason = StopReason::FloorReached;
    std::vector<ReductionStep> steps;

    std::size_t n_min() const { return steps.empty() ? 0 : steps.back().n; }
};

struct ReductionConfig {
    Scheme scheme = Scheme::SU2;
    int L = 0;
    int m_tot = 0;
    CouplingSet couplings{};
    SolverConfig solver{};
    double epsilon = 1e-2;      // relevant-amplitude threshold
    std::size_t n_floor = 8;    // stop when the space is this small
    double p_abort = 5.0;       // instability: any tracked p(i) above this percentage
    double g_jump_abort = 10.0; // instability: single-step |g'/g| outside [1/f, f]
    std::optional<double> lambda_target; // default: computed lambda_1^(N)
    // Elimination by smallest ground-state amplitude instead of largest
    // diagonal. Exposed for experiments, not validated.
    bool eliminate_smallest_amplitude = false;
};

/// Extracts the renormalization scalars for eliminating state `elim`
/// (the reduction loop always passes the last, highest-diagonal state).
/// psi1 is the current normalized ground vector on the active block.
/// Cost is one row slice plus two restricted matvecs.
RenormalizationInputs feshbach_coefficients(const SplitHamiltonian &h,
                                            std::span<const double> psi1, double lambda1,
                                            std::size_t elim);

/// New coupling from the one-state effective-Hamiltonian condition
///   (a0 + g' a1)(lambda1 - d0 - g' d1) + (v0 + g' v1)^2
///       = lambda1 (lambda1 - d0 - g' d1),
/// i.e. alpha g'^2 + beta g' + gamma = 0 with
///   alpha = v1^2 - a1 d1
///   beta  = 2 v0 v1 + a1 (lambda1 - d0) - a0 d1 + lambda1 d1
///   gamma = v0^2 + (a0 - lambda1)(lambda1 - d0).
/// Among real roots the one closest to g_prev wins (exact tie: the
/// smaller); no real root or an indeterminate equation keeps g_prev and
/// sets the flag.
RenormResult solve_renormalization(const RenormalizationInputs &in);

/// Instability test on the trace tail: any tracked p(i) above the abort
/// threshold, a single-step g jump beyond the abort factor, or three
/// consecutive no-real-root steps. The renormalization pins the ground
/// energy itself, so the deviations that announce the breakdown show up
/// across the tracked spectrum, not in p(1) alone.
bool detect_instability(std::span<const ReductionStep> steps, double p_abort,
                        double g_jump_abort);

using StepCallback = std::function<void(const ReductionStep &)>;

/// The full reduction loop: build basis, assemble, order by diagonal,
/// solve, then repeatedly eliminate the last state, renormalize g so the
/// frozen lambda_1^(N) target is preserved, restrict, and re-solve with
/// the projected eigenvectors as warm start. Stops at the dimension
/// floor, on instability, or when the solver fails twice. `on_step`, when
/// set, receives each finished step (flags included) as the run advances,
/// so traces can be streamed out.
ReductionTrace run_reduction(const ReductionConfig &cfg, const StepCallback &on_step = {});

/// Smallest n whose recorded p(1) still satisfies p1 <= threshold.
std::size_t deepest_stable_n(const ReductionTrace &trace, double p1_threshold);

} // namespace hsred
