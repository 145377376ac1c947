#include "dirty/core.hpp"

#include <cmath>
#include <sstream>

namespace dirty {

void MultiTaskProblem::validate() const {
    if (designs.empty())
        throw std::invalid_argument("problem has no tasks");
    if (designs.size() != responses.size())
        throw std::invalid_argument("designs and responses disagree on task count");
    const auto n = designs.front().rows();
    const auto p = designs.front().cols();
    if (n < 1 || p < 1)
        throw std::invalid_argument("design must have at least one sample and one feature");
    for (std::size_t k = 0; k < designs.size(); ++k) {
        if (designs[k].rows() != n || designs[k].cols() != p)
            throw std::invalid_argument("task " + std::to_string(k) + ": design shape differs from task 0");
        if (responses[k].size() != n)
            throw std::invalid_argument("task " + std::to_string(k) + ": response length differs from n");
        if (!designs[k].allFinite() || !responses[k].allFinite())
            throw std::invalid_argument("task " + std::to_string(k) + ": non-finite data");
    }
}

DirtyPair::DirtyPair(CoefMatrix b_, CoefMatrix s_) : b(std::move(b_)), s(std::move(s_)) {
    if (b.rows() != s.rows() || b.cols() != s.cols())
        throw std::invalid_argument("B and S must have the same shape");
}

DirtyPair DirtyPair::zeros(std::size_t p, std::size_t r) {
    const auto rows = static_cast<Eigen::Index>(p);
    const auto cols = static_cast<Eigen::Index>(r);
    return {CoefMatrix::Zero(rows, cols), CoefMatrix::Zero(rows, cols)};
}

static std::string ratio_message(double ratio) {
    std::ostringstream os;
    os << "lambda_b/lambda_s = " << ratio
       << " is an integer; the B/S split is then not unique";
    return os.str();
}

IntegerRatioError::IntegerRatioError(double ratio) : std::invalid_argument(ratio_message(ratio)) {}

bool is_integer_ratio(double ratio, double tol) {
    return std::abs(ratio - std::round(ratio)) <= tol;
}

void RegPair::validate(std::size_t r) const {
    if (!(lambda_s > 0.0) || !(lambda_b > 0.0) || !std::isfinite(lambda_s) || !std::isfinite(lambda_b))
        throw std::invalid_argument("lambda_s and lambda_b must be positive and finite");
    const double k = ratio();
    if (is_integer_ratio(k))
        throw IntegerRatioError(k);
    if (!(k > 1.0) || k > static_cast<double>(r)) {
        std::ostringstream os;
        os << "lambda_b/lambda_s = " << k << " outside (1, " << r << "]";
        throw std::invalid_argument(os.str());
    }
}

MatrixNorms matrix_norms(const CoefMatrix& m) {
    MatrixNorms out;
    if (m.size() == 0)
        return out;
    out.l11 = m.cwiseAbs().sum();
    out.l1inf = m.cwiseAbs().rowwise().maxCoeff().sum();
    return out;
}

SignSupport signed_support(const CoefMatrix& m, double filter_threshold) {
    SignSupport out = SignSupport::Zero(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            const double v = m(j, k);
            if (std::abs(v) > filter_threshold)
                out(j, k) = v > 0 ? 1 : -1;
        }
    return out;
}

CoefMatrix filter_small(const CoefMatrix& m, double filter_threshold) {
    return m.unaryExpr([filter_threshold](double v) { return std::abs(v) > filter_threshold ? v : 0.0; });
}

std::vector<std::size_t> max_magnitude_set(const CoefMatrix& m, std::size_t row) {
    const auto j = static_cast<Eigen::Index>(row);
    const double top = m.row(j).cwiseAbs().maxCoeff();
    std::vector<std::size_t> out;
    if (!(top > 0.0))
        return out;
    for (Eigen::Index k = 0; k < m.cols(); ++k)
        if (std::abs(m(j, k)) >= top * (1.0 - kTieRelTol))
            out.push_back(static_cast<std::size_t>(k));
    return out;
}

SparsityStats sparsity_stats(const CoefMatrix& m, double filter_threshold) {
    const CoefMatrix f = filter_small(m, filter_threshold);
    SparsityStats st;
    for (Eigen::Index j = 0; j < f.rows(); ++j) {
        std::size_t nnz = 0;
        for (Eigen::Index k = 0; k < f.cols(); ++k)
            if (f(j, k) != 0.0) {
                ++nnz;
                st.support.emplace_back(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
            }
        if (nnz == 0)
            continue;
        st.row_support.push_back(static_cast<std::size_t>(j));
        st.d_stat = std::max(st.d_stat, nnz);
        st.m_stat = std::min(st.m_stat, max_magnitude_set(f, static_cast<std::size_t>(j)).size());
    }
    return st;
}

} // namespace dirty
