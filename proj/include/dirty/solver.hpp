#pragma once
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dirty/core.hpp"

namespace dirty {

/// Inner products c_j^(k) = <X_j, y> and Gram matrices d^(k) = X^T X.
/// Tasks with identical designs share one Gram matrix.
struct GramCache {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<Eigen::VectorXd> c;    // r vectors of length p
    std::vector<Eigen::MatrixXd> gram; // distinct Gram matrices
    std::vector<std::size_t> gram_of;  // task -> index into gram
    std::vector<double> yty;           // ||y^(k)||^2

    std::size_t tasks() const { return c.size(); }
    const Eigen::MatrixXd& d(std::size_t k) const { return gram[gram_of[k]]; }
};

GramCache precompute(const MultiTaskProblem& problem);

enum class SolverMode { dirty, lasso_only, linf_only };

std::string_view to_string(SolverMode mode);
SolverMode parse_mode(std::string_view name);

struct SolverConfig {
    double epsilon = 1e-6;
    std::size_t max_sweeps = 10000;
    SolverMode mode = SolverMode::dirty;
    double filter_threshold = kDefaultFilter;
    /// Dirty mode rejects lambda_b/lambda_s outside (1, r] or integer unless
    /// this is cleared (used to probe the degenerate limits).
    bool enforce_ratio = true;
};

struct SolveResult {
    DirtyPair pair;
    std::vector<double> objective_trace; // value after each outer iteration
    std::size_t sweeps_used = 0;
    bool converged = false;
};

/// (1/2n) sum_k ||y - X (s + b)||^2 + lambda_s ||S||_{1,1} + lambda_b ||B||_{1,inf}.
double objective(const MultiTaskProblem& problem, const DirtyPair& pair, const RegPair& reg);

/// Coefficients plus the running gradient g^(k) = c^(k) - d^(k) (b^(k) + s^(k)).
struct SolverState {
    DirtyPair pair;
    std::vector<Eigen::VectorXd> grad;
};

SolverState make_state(const GramCache& cache, DirtyPair pair);

/// Recomputes the running gradient from scratch.
void refresh_gradient(SolverState& state, const GramCache& cache);

/// Objective from cached quantities; matches objective() up to rounding.
double cached_objective(const SolverState& state, const GramCache& cache, const RegPair& reg);

/// One cyclic pass over S (j ascending, then k), each entry set to its exact
/// minimizer with B fixed. lambda_s is in the 1/(2n) scale.
void sweep_s(SolverState& state, const GramCache& cache, double lambda_s);

/// One cyclic pass over the rows of B, each row set to its exact block
/// minimizer (weighted l_inf prox) with S and the other rows fixed.
void sweep_b(SolverState& state, const GramCache& cache, double lambda_b);

/// Alternates sweep_s / sweep_b until the relative objective change drops
/// below config.epsilon or max_sweeps passes have run. In lasso_only mode B is
/// pinned to zero and lambda_b ignored; in linf_only mode S is pinned to zero.
SolveResult solve(const MultiTaskProblem& problem, const RegPair& reg, const SolverConfig& config,
                  const std::optional<DirtyPair>& init = std::nullopt);

/// Same as solve() with a prebuilt cache; used by grid searches that reuse it.
SolveResult solve_cached(const GramCache& cache, const RegPair& reg, const SolverConfig& config,
                         const std::optional<DirtyPair>& init = std::nullopt);

} // namespace dirty
