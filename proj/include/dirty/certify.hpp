#pragma once
#include <string>

#include "dirty/core.hpp"

namespace dirty {

/// Z with z^(k) = (1/n) X^(k)T (y^(k) - X^(k)(b^(k) + s^(k))), the unique
/// matrix satisfying the stationarity equation for the given pair.
CoefMatrix dual_from_stationarity(const MultiTaskProblem& problem, const DirtyPair& pair);

struct NecessaryReport {
    bool p1 = false; // S and B agree in sign on Supp(S) within RowSupp(B)
    bool p2 = false; // D(S) < lambda_b/lambda_s < M(B)
    bool p3 = false; // Supp(S) sits on row maxima of B
    bool p4 = false; // every row with B and S nonzero has a row maximum of B outside Supp(S)
    bool all() const { return p1 && p2 && p3 && p4; }
};

struct CertReport {
    /// Largest violation of the sub-differential conditions by the dual
    /// matrix, in absolute units.
    double stationarity_residual = 0.0;
    bool s_subgrad_ok = false; // Z in lambda_s * d||S||_{1,1}
    bool b_subgrad_ok = false; // Z in lambda_b * d||B||_{1,inf}
    NecessaryReport necessary;
    double tol = 0.0;

    bool ok() const { return s_subgrad_ok && b_subgrad_ok; }
};

/// Verifies that the dual matrix lies in both scaled sub-differentials.
/// Supports come from the pair filtered at filter_threshold; tol is relative,
/// so the slack is tol * lambda_s for S conditions and tol * lambda_b for B.
/// Strict inequalities are checked non-strictly.
CertReport check_kkt(const MultiTaskProblem& problem, const DirtyPair& pair, const RegPair& reg,
                     double filter_threshold = kDefaultFilter, double tol = 1e-4);

/// Structural conditions every optimum must satisfy when lambda_b/lambda_s is
/// not an integer, evaluated on the filtered pair.
NecessaryReport check_necessary(const DirtyPair& pair, const RegPair& reg,
                                double filter_threshold = kDefaultFilter);

/// Plain-text "key: value" rendering used by the CLI.
std::string to_text(const CertReport& report);

} // namespace dirty
