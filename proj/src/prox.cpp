#include "dirty/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dirty::prox {

namespace {

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Indices sorted by |a| descending; equal magnitudes keep ascending index order.
std::vector<Eigen::Index> order_by_magnitude(const Eigen::VectorXd& a) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(a.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(a[x]) > std::abs(a[y]); });
    return idx;
}

Eigen::VectorXd clip_to(const Eigen::VectorXd& a, double t) {
    Eigen::VectorXd out(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k)
        out[k] = sign_of(a[k]) * std::min(std::abs(a[k]), t);
    return out;
}

} // namespace

double soft_threshold(double a, double lambda) {
    const double mag = std::abs(a) - lambda;
    return mag > 0 ? sign_of(a) * mag : 0.0;
}

Eigen::VectorXd linf_prox(const Eigen::VectorXd& a, double lambda) {
    if (lambda <= 0.0)
        return a;
    const double total = a.cwiseAbs().sum();
    if (total <= lambda)
        return Eigen::VectorXd::Zero(a.size());

    const auto idx = order_by_magnitude(a);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t m_star = 1;
    double partial = 0.0;
    for (std::size_t m = 1; m <= idx.size(); ++m) {
        partial += std::abs(a[idx[m - 1]]);
        const double level = (partial - lambda) / static_cast<double>(m);
        if (level > best) {
            best = level;
            m_star = m;
        }
    }
    Eigen::VectorXd out = a;
    for (std::size_t i = 0; i < m_star; ++i)
        out[idx[i]] = sign_of(a[idx[i]]) * best;
    return out;
}

double water_level(const Eigen::VectorXd& a, const Eigen::VectorXd& w, double lambda) {
    if (w.size() != a.size())
        throw std::invalid_argument("weight and target vectors differ in length");
    if ((w.array() <= 0.0).any())
        throw std::invalid_argument("prox weights must be strictly positive");
    if (a.size() == 0)
        return 0.0;
    if (lambda <= 0.0)
        return a.cwiseAbs().maxCoeff();
    if (w.dot(a.cwiseAbs()) <= lambda)
        return 0.0;

    const auto idx = order_by_magnitude(a);
    double wsum = 0.0;
    double wabs = 0.0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
        wsum += w[idx[m]];
        wabs += w[idx[m]] * std::abs(a[idx[m]]);
        const double next = m + 1 < idx.size() ? std::abs(a[idx[m + 1]]) : 0.0;
        const double t = (wabs - lambda) / wsum;
        if (t >= next)
            return t;
    }
    return 0.0; // unreachable: the last segment ends at 0 with positive pull
}

Eigen::VectorXd weighted_linf_prox(const Eigen::VectorXd& a, const Eigen::VectorXd& w, double lambda) {
    const double t = water_level(a, w, lambda);
    if (t <= 0.0)
        return Eigen::VectorXd::Zero(a.size());
    return clip_to(a, t);
}

Eigen::VectorXd l1_ball_project(const Eigen::VectorXd& a, double radius) {
    if (a.cwiseAbs().sum() <= radius)
        return a;
    if (radius <= 0.0)
        return Eigen::VectorXd::Zero(a.size());
    // rho = largest j with u_j > (sum_{i<=j} u_i - radius) / j
    const auto idx = order_by_magnitude(a);
    double partial = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const double u = std::abs(a[idx[j]]);
        partial += u;
        const double candidate = (partial - radius) / static_cast<double>(j + 1);
        if (u > candidate)
            tau = candidate;
    }
    Eigen::VectorXd out(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k)
        out[k] = soft_threshold(a[k], tau);
    return out;
}

} // namespace dirty::prox
