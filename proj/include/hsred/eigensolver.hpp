#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsred/hamiltonian.hpp"
#include "hsred/types.hpp"

namespace hsred {

struct SolverConfig {
    int k = 4;                // number of lowest pairs
    double tol = 1e-10;       // residual tolerance ||Hv - lambda v||
    int max_iter = 500;       // cap on the Krylov dimension
    std::uint64_t seed = 1;   // start-vector seed
    int dense_threshold = 64; // below this dimension the dense path is used
};

struct EigenSolution {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // orthonormal, sign-fixed
    std::vector<double> residuals;             // ||Hv - lambda v|| per pair
    int iterations = 0;                        // Krylov steps spent
    bool degenerate_tail = false; // lambda_k and lambda_{k+1} closer than 1e-9
    bool warm_start_failed = false; // fell back to the seeded random start
};

class SolverFailure : public std::runtime_error {
  public:
    SolverFailure(const std::string &what, std::vector<double> best_residuals, int iterations)
        : std::runtime_error(what), residuals(std::move(best_residuals)), iterations(iterations) {}
    std::vector<double> residuals; // best-so-far
    int iterations;
};

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

/// k lowest eigenpairs of a symmetric operator given through its matvec.
/// Lanczos with full reorthogonalization of the Krylov basis; ghost
/// copies of converged eigenvalues would otherwise leak into the
/// accuracy traces of long reduction runs. Deterministic for a fixed
/// seed. A non-empty `warm_start` seeds the first Krylov vector; if that
/// run fails to converge the solve is retried once from the seeded
/// random vector and the solution is flagged.
EigenSolution lanczos_lowest(const MatVec &op, std::size_t n, const SolverConfig &cfg,
                             std::span<const double> warm_start = {});

/// Dense symmetric oracle (full accuracy, n up to a few thousand).
EigenSolution dense_lowest(const DenseMatrix &h, int k);

/// Dispatch on dim: dense path below cfg.dense_threshold, Lanczos above.
EigenSolution solve_lowest(const SplitHamiltonian &h, const SolverConfig &cfg,
                           std::span<const double> warm_start = {});

} // namespace hsred
