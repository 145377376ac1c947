#pragma once
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dirty {

/// p x r coefficient matrix: rows are features, columns are tasks.
using CoefMatrix = Eigen::MatrixXd;

/// {-1, 0, +1} pattern of a coefficient matrix.
using SignSupport = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative tolerance used to decide that |m_jk| attains the row maximum.
inline constexpr double kTieRelTol = 1e-9;

/// Default absolute threshold below which solver outputs are treated as zero.
inline constexpr double kDefaultFilter = 1e-3;

/// r regression tasks sharing the feature dimension p and sample count n.
/// Designs may differ per task.
struct MultiTaskProblem {
    std::vector<Eigen::MatrixXd> designs;   // r matrices, n x p
    std::vector<Eigen::VectorXd> responses; // r vectors, length n

    std::size_t tasks() const { return designs.size(); }
    std::size_t samples() const { return designs.empty() ? 0 : static_cast<std::size_t>(designs.front().rows()); }
    std::size_t features() const { return designs.empty() ? 0 : static_cast<std::size_t>(designs.front().cols()); }

    /// Throws std::invalid_argument on inconsistent shapes, empty dimensions
    /// or non-finite entries.
    void validate() const;
};

/// Superposition Theta = B + S with B the row-sparse part and S the
/// elementwise-sparse part.
struct DirtyPair {
    CoefMatrix b;
    CoefMatrix s;

    DirtyPair() = default;
    DirtyPair(CoefMatrix b_, CoefMatrix s_);

    static DirtyPair zeros(std::size_t p, std::size_t r);

    CoefMatrix theta() const { return b + s; }
    std::size_t features() const { return static_cast<std::size_t>(b.rows()); }
    std::size_t tasks() const { return static_cast<std::size_t>(b.cols()); }
};

/// Thrown when lambda_b / lambda_s is an integer: the decomposition is then
/// not unique.
class IntegerRatioError : public std::invalid_argument {
public:
    explicit IntegerRatioError(double ratio);
};

/// Regularization weights in the 1/(2n) loss scale.
struct RegPair {
    double lambda_s = 0.0;
    double lambda_b = 0.0;

    double ratio() const { return lambda_b / lambda_s; }

    /// Checks positivity, 1 < lambda_b/lambda_s <= r and non-integer ratio
    /// (absolute tolerance 1e-9).
    void validate(std::size_t r) const;
};

bool is_integer_ratio(double ratio, double tol = 1e-9);

struct MatrixNorms {
    double l11 = 0.0;   // sum of |m_jk|
    double l1inf = 0.0; // sum over rows of max_k |m_jk|
};

MatrixNorms matrix_norms(const CoefMatrix& m);

/// sign(m_jk) where |m_jk| > filter_threshold, 0 elsewhere.
SignSupport signed_support(const CoefMatrix& m, double filter_threshold = kDefaultFilter);

/// Copy of m with entries |m_jk| <= filter_threshold set to zero.
CoefMatrix filter_small(const CoefMatrix& m, double filter_threshold = kDefaultFilter);

/// Indices k with |m_jk| = ||m_j||_inf > 0, using kTieRelTol.
std::vector<std::size_t> max_magnitude_set(const CoefMatrix& m, std::size_t row);

struct SparsityStats {
    /// Reported as m_stat when no row is nonzero.
    static constexpr std::size_t kNoRows = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> row_support;
    std::vector<std::pair<std::size_t, std::size_t>> support;
    std::size_t d_stat = 0;      // max nonzeros in a row
    std::size_t m_stat = kNoRows; // min |M_j| over nonzero rows
};

SparsityStats sparsity_stats(const CoefMatrix& m, double filter_threshold = kDefaultFilter);

} // namespace dirty
