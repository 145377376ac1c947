#pragma once
#include <cstddef>
#include <vector>

#include "dirty/core.hpp"

namespace dirty {

/// Splits theta row-wise: with v_j the (d+1)-th largest magnitude of row j
/// (0 when d+1 > r), S keeps the excess sign(t) max(0, |t| - v_j) and
/// B = theta - S. Requires 1 <= d <= r.
DirtyPair h_transform(const CoefMatrix& theta, std::size_t d);

struct StarReport {
    bool p1 = false; // M(B) >= d+1 and D(S) <= d
    bool p2 = false; // nonzero S entries on max coordinates of B agree in sign
    bool p3 = false; // S vanishes off the max coordinates of nonzero B rows
    bool all() const { return p1 && p2 && p3; }
};

/// Structural properties of a (B, S) split, exact zero test on entries and
/// kTieRelTol on row maxima.
StarReport check_star_properties(const DirtyPair& pair, std::size_t d);

/// Block size used when the split is driven by a regularization pair.
std::size_t block_size_for(double lambda_b, double lambda_s);

struct DesignDiagnostics {
    double gamma_s = 0.0;
    double gamma_b = 0.0;
    double c_min = 0.0;
    double d_max = 0.0;       // NaN when some restricted Gram is singular
    bool column_norm_ok = false; // ||X_j^(k)||_2 <= sqrt(2n) for all j, k
    bool invertible = false;  // every (1/n) X_U^T X_U nonsingular
};

/// Incoherence, curvature and normalization diagnostics for per-task
/// supports. gamma values are NaN when invertible == false; no
/// pseudo-inverse is substituted.
DesignDiagnostics design_diagnostics(const MultiTaskProblem& problem,
                                     const std::vector<std::vector<std::size_t>>& supports);

enum class BoundKind { deterministic, gaussian };

struct ErrorBoundParams {
    double sigma = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t r = 0;
    std::size_t s = 0; // max per-task support size, used by the gaussian bound
    double c_min = 0.0;
    double d_max = 0.0;
    double lambda_s = 0.0;
};

/// Elementwise error bounds:
///   deterministic: sqrt(4 sigma^2 log(p r) / (n c_min)) + lambda_s d_max
///   gaussian:      sqrt(50 sigma^2 log(r s) / (n c_min)) + lambda_s (4 s / (c_min sqrt n) + d_max)
/// Natural logarithm. Throws for c_min <= 0 or zero dimensions.
double error_bound(BoundKind kind, const ErrorBoundParams& params);

} // namespace dirty
