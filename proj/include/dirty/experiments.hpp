#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dirty/solver.hpp"
#include "dirty/synth.hpp"

namespace dirty {

/// Regularization search grid. lambda_b = c * scale and lambda_s = ratio *
/// lambda_b, so ratio_values hold lambda_s / lambda_b.
struct CvGrid {
    std::vector<double> c_values;
    std::vector<double> ratio_values;

    std::size_t cells(SolverMode mode) const {
        return mode == SolverMode::dirty ? c_values.size() * ratio_values.size() : c_values.size();
    }
    /// Throws unless both lists are nonempty, positive, and every ratio
    /// gives a non-integer lambda_b/lambda_s in (1, r].
    void validate(std::size_t r) const;
};

/// count points log-spaced over [lo, hi], both ends included.
std::vector<double> log_space(double lo, double hi, std::size_t count);

/// 30 c values in [0.01, 100] and ratios 0.55, 0.60, ..., 0.95.
CvGrid default_cv_grid();

struct CvResult {
    RegPair reg;
    DirtyPair pair;
    double score = 0.0;
    std::size_t cell = 0; // index into the search order
};

/// (1/2n) sum_k ||y - X theta^(k)||^2 with no penalty terms.
double prediction_error(const MultiTaskProblem& problem, const CoefMatrix& theta);

/// Fits every grid cell on train (warm-started from the previous cell),
/// scores the filtered B + S on test and returns the best cell; ties go to
/// the earliest cell. The lambda scale is sqrt(r log(p) / n_train).
/// Baselines search only their active lambda over c_values.
CvResult cv_select(const MultiTaskProblem& train, const MultiTaskProblem& test, const CvGrid& grid,
                   SolverMode method, const SolverConfig& config);

/// Same search with an explicit lambda scale.
CvResult cv_select_scaled(const MultiTaskProblem& train, const MultiTaskProblem& test, const CvGrid& grid,
                          SolverMode method, const SolverConfig& config, double lambda_scale);

struct SweepPoint {
    SolverMode method = SolverMode::dirty;
    std::size_t p = 0;
    std::size_t s = 0;
    double alpha = 0.0;
    double theta = 0.0; // n / (s log(p - (2 - alpha) s))
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;

    double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

using SweepTable = std::vector<SweepPoint>;

/// Runs `count` independent jobs on up to `workers` threads. Each job writes
/// only its own slot, so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job);

/// Seed of one Monte-Carlo trial.
std::uint64_t trial_seed(std::uint64_t base_seed, SolverMode method, std::size_t theta_index, std::size_t trial);

/// Runs `trials` independent instances of spec (seeds from trial_seed) with
/// a full CV search each. A trial succeeds when the filtered estimate has
/// exactly the true signed support.
SweepPoint success_probability(const InstanceSpec& spec, SolverMode method, const CvGrid& grid,
                               std::size_t trials, const SolverConfig& config, std::size_t theta_index = 0,
                               std::size_t workers = 1);

struct SweepOptions {
    std::size_t trials = 100;
    std::size_t workers = 1;
    CvGrid grid = default_cv_grid();
    SolverConfig config;
    /// Called after each finished point (for progress logging).
    std::function<void(const SweepPoint&)> on_point;
};

/// One SweepPoint per (method, theta); n = n_for_figure_theta(theta). The
/// template's n is ignored and its seed is the base seed.
SweepTable sweep_phase(const InstanceSpec& tmpl, const std::vector<double>& thetas,
                       const std::vector<SolverMode>& methods, const SweepOptions& options);

/// First 0.5 crossing of a rate curve sorted by theta, by linear
/// interpolation between the bracketing points.
std::optional<double> threshold_50(const std::vector<std::pair<double, double>>& curve);

struct ThresholdPoint {
    SolverMode method = SolverMode::dirty;
    std::size_t p = 0;
    std::size_t s = 0;
    double alpha = 0.0;
    double theta_star = 0.0; // in the method's native rescaling
    double n_star = 0.0;     // raw sample count at the crossing
    double n_star_stderr = 0.0;
};

/// 50% thresholds for every (method, p, s, alpha) curve with a crossing.
/// Lasso thresholds are expressed as n / (s log(p - s)); the others on the
/// figure axis. n_star_stderr is a delta-method estimate: the binomial
/// standard error at rate 0.5 divided by the local slope.
std::vector<ThresholdPoint> extract_thresholds(const SweepTable& table);

/// f(kappa, tau, alpha) = 2 - 2(1 - tau) alpha - 2 tau alpha kappa + (1 + tau)/2 alpha kappa^2.
double overlap_f(double kappa, double tau, double alpha);

struct TheoryParams {
    double kappa = 1.4142135623730951; // lambda_b / lambda_s
    double tau = 0.0;                  // unbalanced share of the shared rows
    double alpha = 0.0;                // overlap fraction
};

/// g(kappa, tau, alpha) = max(2 f / kappa^2, f): predicted threshold on the
/// figure axis.
double predicted_threshold(const TheoryParams& params);

/// 2 - alpha + (3 - 2 sqrt 2) tau alpha, the kappa = sqrt 2 closed form.
double predicted_threshold_sqrt2(double tau, double alpha);

/// Lasso: 2 on n / (s log(p - s)); l1/l_inf: 4 - 3 alpha on the figure axis.
double baseline_threshold(SolverMode method, double alpha);

inline constexpr const char* kSweepCsvHeader = "method,p,s,alpha,theta,n,trials,successes,success_rate";
inline constexpr const char* kThresholdCsvHeader = "method,p,s,alpha,theta_star,n_star";

void write_sweep_csv(std::ostream& os, const SweepTable& table);
void write_threshold_csv(std::ostream& os, const std::vector<ThresholdPoint>& points);

} // namespace dirty
