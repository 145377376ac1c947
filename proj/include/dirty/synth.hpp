#pragma once
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dirty/core.hpp"

namespace dirty {

/// Parameters of a synthetic multi-task instance with partially shared
/// supports. s == 0 selects floor(0.1 p).
struct InstanceSpec {
    std::size_t p = 128;
    std::size_t s = 0;
    double alpha = 0.5;
    std::size_t n = 100;
    double sigma = 0.1;
    std::size_t r = 2;
    std::uint64_t seed = 0;
    // Row magnitudes are drawn uniformly from [magnitude_lo, magnitude_hi].
    double magnitude_lo = 0.5;
    double magnitude_hi = 1.0;

    std::size_t support_size() const;
    std::size_t shared_count() const;
    double effective_alpha() const;
    /// Throws std::invalid_argument if the supports do not fit in p rows.
    void validate() const;
};

struct GroundTruth {
    CoefMatrix theta_bar;
    SignSupport sign_support;
    std::vector<std::size_t> shared_rows;
    std::vector<std::vector<std::size_t>> exclusive_rows; // per task
    double effective_alpha = 0.0;

    /// Support of column k of theta_bar (ascending).
    std::vector<std::size_t> task_support(std::size_t k) const;
};

struct Instance {
    MultiTaskProblem train;
    MultiTaskProblem test;
    GroundTruth truth;
};

/// Draws supports, signs and row magnitudes, then independent Gaussian train
/// and test designs and noise sharing the same truth. Every draw comes from
/// its own (seed, stream) counter stream, so the result depends on the seed
/// only.
Instance generate_instance(const InstanceSpec& spec);

/// log(p - (2 - alpha) s); throws when the argument is <= 1.
double overlap_log(std::size_t p, std::size_t s, double alpha);

/// n / ((2 - alpha) s log(p - (2 - alpha) s)).
double theta_rescale(std::size_t n, std::size_t p, std::size_t s, double alpha);

/// Inverse of theta_rescale rounded to the nearest integer >= 1.
std::size_t n_for_theta(double theta, std::size_t p, std::size_t s, double alpha);

/// n / (s log(p - (2 - alpha) s)): the axis on which phase-transition curves
/// are plotted and the native rescaling of the l1/l_inf method.
double figure_theta(std::size_t n, std::size_t p, std::size_t s, double alpha);
std::size_t n_for_figure_theta(double theta, std::size_t p, std::size_t s, double alpha);

/// n / (s log(p - s)): the native rescaling of the Lasso.
double lasso_theta(std::size_t n, std::size_t p, std::size_t s);

} // namespace dirty
