#pragma once

#include <Eigen/Dense>

namespace dirty::prox {

/// sign(a) * max(|a| - lambda, 0).
double soft_threshold(double a, double lambda);

/// argmin_b 1/2 ||a - b||^2 + lambda ||b||_inf.
///
/// Sorts |a| descending, picks m* maximizing (sum_{i<=m} |a_(i)| - lambda) / m
/// and clips the top m* entries to that common level. Returns zero when
/// sum |a| <= lambda and a itself when lambda == 0.
Eigen::VectorXd linf_prox(const Eigen::VectorXd& a, double lambda);

/// argmin_b sum_k w_k/2 (b_k - a_k)^2 + lambda ||b||_inf, w_k > 0.
///
/// Water-filling: the smallest t >= 0 with sum_k w_k max(|a_k| - t, 0) <= lambda
/// is found by a scan over the sorted breakpoints |a_k|; output entries are
/// sign(a_k) min(|a_k|, t). Throws std::invalid_argument for w_k <= 0.
Eigen::VectorXd weighted_linf_prox(const Eigen::VectorXd& a, const Eigen::VectorXd& w, double lambda);

/// Level t returned by the water-filling scan (0 when the output is zero).
double water_level(const Eigen::VectorXd& a, const Eigen::VectorXd& w, double lambda);

/// Euclidean projection onto {x : ||x||_1 <= radius}.
Eigen::VectorXd l1_ball_project(const Eigen::VectorXd& a, double radius);

} // namespace dirty::prox
