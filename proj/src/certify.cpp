#include "dirty/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirty {

CoefMatrix dual_from_stationarity(const MultiTaskProblem& problem, const DirtyPair& pair) {
    problem.validate();
    if (pair.features() != problem.features() || pair.tasks() != problem.tasks())
        throw std::invalid_argument("coefficient shape does not match the problem");
    const double n = static_cast<double>(problem.samples());
    CoefMatrix z(pair.b.rows(), pair.b.cols());
    for (std::size_t k = 0; k < problem.tasks(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd resid =
            problem.responses[k] - problem.designs[k] * (pair.b.col(col) + pair.s.col(col));
        z.col(col) = problem.designs[k].transpose() * resid / n;
    }
    return z;
}

namespace {

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Worst violation of Z in lambda * d||S||_{1,1}.
double s_violation(const CoefMatrix& z, const CoefMatrix& s, double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < z.rows(); ++j)
        for (Eigen::Index k = 0; k < z.cols(); ++k) {
            const double v = s(j, k) != 0.0 ? std::abs(z(j, k) - lambda * sgn(s(j, k)))
                                            : std::max(0.0, std::abs(z(j, k)) - lambda);
            worst = std::max(worst, v);
        }
    return worst;
}

// Worst violation of Z in lambda * d||B||_{1,inf}: on nonzero rows, z must
// vanish off the row maxima, carry the sign of b on them, and have l1 mass
// lambda there; on zero rows ||z_j||_1 <= lambda.
double b_violation(const CoefMatrix& z, const CoefMatrix& b, double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < z.rows(); ++j) {
        const auto top = max_magnitude_set(b, static_cast<std::size_t>(j));
        if (top.empty()) {
            worst = std::max(worst, z.row(j).cwiseAbs().sum() - lambda);
            continue;
        }
        std::vector<bool> is_top(static_cast<std::size_t>(z.cols()), false);
        double mass = 0.0;
        for (auto k : top) {
            is_top[k] = true;
            const double zk = z(j, static_cast<Eigen::Index>(k));
            const double bk = b(j, static_cast<Eigen::Index>(k));
            if (zk * bk < 0.0)
                worst = std::max(worst, std::abs(zk));
            mass += std::abs(zk);
        }
        worst = std::max(worst, std::abs(mass - lambda));
        for (Eigen::Index k = 0; k < z.cols(); ++k)
            if (!is_top[static_cast<std::size_t>(k)])
                worst = std::max(worst, std::abs(z(j, k)));
    }
    return worst;
}

} // namespace

CertReport check_kkt(const MultiTaskProblem& problem, const DirtyPair& pair, const RegPair& reg,
                     double filter_threshold, double tol) {
    const CoefMatrix z = dual_from_stationarity(problem, pair);
    const CoefMatrix s = filter_small(pair.s, filter_threshold);
    const CoefMatrix b = filter_small(pair.b, filter_threshold);
    const double vs = s_violation(z, s, reg.lambda_s);
    const double vb = b_violation(z, b, reg.lambda_b);

    CertReport rep;
    rep.tol = tol;
    rep.stationarity_residual = std::max(vs, vb);
    rep.s_subgrad_ok = vs <= tol * reg.lambda_s;
    rep.b_subgrad_ok = vb <= tol * reg.lambda_b;
    rep.necessary = check_necessary(pair, reg, filter_threshold);
    return rep;
}

NecessaryReport check_necessary(const DirtyPair& pair, const RegPair& reg, double filter_threshold) {
    const CoefMatrix s = filter_small(pair.s, filter_threshold);
    const CoefMatrix b = filter_small(pair.b, filter_threshold);
    NecessaryReport rep{true, true, true, true};

    const double kappa = reg.ratio();
    const auto s_stats = sparsity_stats(s, 0.0);
    const auto b_stats = sparsity_stats(b, 0.0);
    const bool d_ok = static_cast<double>(s_stats.d_stat) < kappa;
    const bool m_ok = b_stats.m_stat == SparsityStats::kNoRows || kappa < static_cast<double>(b_stats.m_stat);
    rep.p2 = d_ok && m_ok;

    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        const double top = b.row(j).cwiseAbs().maxCoeff();
        const bool b_row = top > 0.0;
        const bool s_row = (s.row(j).array() != 0.0).any();
        bool has_free_max = false;
        for (Eigen::Index k = 0; k < s.cols(); ++k) {
            const bool at_max = std::abs(b(j, k)) >= top * (1.0 - kTieRelTol);
            if (s(j, k) != 0.0) {
                if (b_row && sgn(s(j, k)) != sgn(b(j, k)))
                    rep.p1 = false;
                if (!at_max)
                    rep.p3 = false;
            } else if (at_max) {
                has_free_max = true;
            }
        }
        if (b_row && s_row && !has_free_max)
            rep.p4 = false;
    }
    return rep;
}

std::string to_text(const CertReport& r) {
    std::ostringstream os;
    os << "stationarity_residual: " << r.stationarity_residual << '\n'
       << "s_subgrad_ok: " << (r.s_subgrad_ok ? "true" : "false") << '\n'
       << "b_subgrad_ok: " << (r.b_subgrad_ok ? "true" : "false") << '\n'
       << "necessary_p1: " << (r.necessary.p1 ? "true" : "false") << '\n'
       << "necessary_p2: " << (r.necessary.p2 ? "true" : "false") << '\n'
       << "necessary_p3: " << (r.necessary.p3 ? "true" : "false") << '\n'
       << "necessary_p4: " << (r.necessary.p4 ? "true" : "false") << '\n'
       << "tol: " << r.tol << '\n';
    return os.str();
}

} // namespace dirty
