#include "dirty/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dirty {

DirtyPair h_transform(const CoefMatrix& theta, std::size_t d) {
    const auto r = static_cast<std::size_t>(theta.cols());
    if (d < 1 || d > r)
        throw std::invalid_argument("block size d must satisfy 1 <= d <= r");
    CoefMatrix s = CoefMatrix::Zero(theta.rows(), theta.cols());
    std::vector<double> mags(r);
    for (Eigen::Index j = 0; j < theta.rows(); ++j) {
        for (std::size_t k = 0; k < r; ++k)
            mags[k] = std::abs(theta(j, static_cast<Eigen::Index>(k)));
        double v = 0.0;
        if (d + 1 <= r) {
            std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(d), mags.end(),
                             std::greater<>());
            v = mags[d];
        }
        for (Eigen::Index k = 0; k < theta.cols(); ++k) {
            const double t = theta(j, k);
            const double excess = std::abs(t) - v;
            if (excess > 0.0)
                s(j, k) = t > 0 ? excess : -excess;
        }
    }
    CoefMatrix b = theta - s;
    return {std::move(b), std::move(s)};
}

StarReport check_star_properties(const DirtyPair& pair, std::size_t d) {
    StarReport rep{true, true, true};
    const auto& b = pair.b;
    const auto& s = pair.s;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        const std::size_t s_nnz = static_cast<std::size_t>((s.row(j).array() != 0.0).count());
        if (s_nnz > d)
            rep.p1 = false;
        const auto top = max_magnitude_set(b, static_cast<std::size_t>(j));
        if (top.empty())
            continue; // zero row of B
        if (top.size() < d + 1)
            rep.p1 = false;
        std::vector<bool> is_top(static_cast<std::size_t>(b.cols()), false);
        for (auto k : top)
            is_top[k] = true;
        for (Eigen::Index k = 0; k < b.cols(); ++k) {
            const double sv = s(j, k);
            if (sv == 0.0)
                continue;
            if (is_top[static_cast<std::size_t>(k)]) {
                if ((sv > 0) != (b(j, k) > 0))
                    rep.p2 = false;
            } else {
                rep.p3 = false;
            }
        }
    }
    return rep;
}

std::size_t block_size_for(double lambda_b, double lambda_s) {
    const double ratio = lambda_b / lambda_s;
    if (!(ratio >= 1.0) || !std::isfinite(ratio))
        throw std::invalid_argument("lambda_b/lambda_s must be finite and at least 1");
    return static_cast<std::size_t>(std::floor(ratio));
}

namespace {

// ||A||_{inf,1}: maximum over rows of the row l1 norm.
double max_row_l1(const Eigen::MatrixXd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = x.col(static_cast<Eigen::Index>(idx[i]));
    return out;
}

} // namespace

DesignDiagnostics design_diagnostics(const MultiTaskProblem& problem,
                                     const std::vector<std::vector<std::size_t>>& supports) {
    problem.validate();
    const std::size_t r = problem.tasks();
    const std::size_t p = problem.features();
    const double n = static_cast<double>(problem.samples());
    if (supports.size() != r)
        throw std::invalid_argument("need one support set per task");
    std::vector<bool> in_union(p, false);
    for (const auto& u : supports) {
        if (u.empty())
            throw std::invalid_argument("per-task supports must be nonempty");
        for (auto j : u) {
            if (j >= p)
                throw std::invalid_argument("support index out of range");
            in_union[j] = true;
        }
    }

    DesignDiagnostics out;
    out.column_norm_ok = true;
    const double col_cap = std::sqrt(2.0 * n);
    for (const auto& x : problem.designs)
        if ((x.colwise().norm().array() > col_cap).any())
            out.column_norm_ok = false;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.invertible = true;
    out.c_min = std::numeric_limits<double>::infinity();
    out.d_max = 0.0;
    // per task: rows X_j^T X_U (X_U^T X_U)^{-1} for every feature j
    std::vector<Eigen::MatrixXd> leverage(r);
    for (std::size_t k = 0; k < r; ++k) {
        const Eigen::MatrixXd xu = columns(problem.designs[k], supports[k]);
        const Eigen::MatrixXd gram = xu.transpose() * xu;
        const Eigen::MatrixXd scaled = gram / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
        if (!lu.isInvertible() || !(lo > 0.0)) {
            out.invertible = false;
            out.c_min = 0.0;
            continue;
        }
        out.c_min = std::min(out.c_min, lo);
        out.d_max = std::max(out.d_max, max_row_l1(lu.inverse()));
        const Eigen::MatrixXd gram_inv = gram.fullPivLu().inverse();
        leverage[k] = problem.designs[k].transpose() * xu * gram_inv; // p x |U_k|
    }
    if (!out.invertible) {
        out.d_max = nan;
        out.gamma_s = nan;
        out.gamma_b = nan;
        return out;
    }

    double worst_b = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        if (in_union[j])
            continue;
        double total = 0.0;
        for (std::size_t k = 0; k < r; ++k)
            total += leverage[k].row(static_cast<Eigen::Index>(j)).cwiseAbs().sum();
        worst_b = std::max(worst_b, total);
    }
    double worst_s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        std::vector<bool> in_k(p, false);
        for (auto j : supports[k])
            in_k[j] = true;
        for (std::size_t j = 0; j < p; ++j)
            if (!in_k[j])
                worst_s = std::max(worst_s, leverage[k].row(static_cast<Eigen::Index>(j)).cwiseAbs().sum());
    }
    out.gamma_b = 1.0 - worst_b;
    out.gamma_s = 1.0 - worst_s;
    return out;
}

double error_bound(BoundKind kind, const ErrorBoundParams& q) {
    if (!(q.c_min > 0.0))
        throw std::invalid_argument("c_min must be positive");
    if (q.n == 0 || q.p == 0 || q.r == 0)
        throw std::invalid_argument("n, p and r must be positive");
    const double n = static_cast<double>(q.n);
    const double var = q.sigma * q.sigma;
    if (kind == BoundKind::deterministic) {
        const double lg = std::log(static_cast<double>(q.p) * static_cast<double>(q.r));
        return std::sqrt(4.0 * var * lg / (n * q.c_min)) + q.lambda_s * q.d_max;
    }
    if (q.s == 0)
        throw std::invalid_argument("support size s must be positive");
    const double s = static_cast<double>(q.s);
    const double lg = std::log(static_cast<double>(q.r) * s);
    return std::sqrt(50.0 * var * lg / (n * q.c_min)) + q.lambda_s * (4.0 * s / (q.c_min * std::sqrt(n)) + q.d_max);
}

} // namespace dirty
