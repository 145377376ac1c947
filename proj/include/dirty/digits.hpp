#pragma once
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirty/experiments.hpp"

namespace dirty::digits {

inline constexpr std::size_t kDigits = 10;
inline constexpr std::size_t kPerDigit = 200;
inline constexpr std::size_t kRows = kDigits * kPerDigit;
inline constexpr std::size_t kFeatures = 649;

class MissingFileError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class RowCountError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct View {
    std::string name; // file suffix: pix, fou, kar, fac, zer, mor
    std::size_t first = 0;
    std::size_t width = 0;
};

/// The six feature views side by side, rows ordered by digit in blocks of 200.
struct MfeatDataset {
    Eigen::MatrixXd features; // 2000 x 649
    std::vector<int> labels;
    std::vector<View> views;
    bool scaled = false;

    const View& view(const std::string& name) const;
};

/// View files in column order: pixel, Fourier, Karhunen-Loeve, profile
/// correlation, Zernike, morphological.
const std::vector<std::string>& view_order();

/// Reads mfeat-pix, mfeat-fou, ... from dir. Each file must hold 2000
/// whitespace-separated rows with a constant column count.
MfeatDataset load_mfeat(const std::filesystem::path& dir);

/// Divisor applied to every column of the 649 (fixed, not data-derived).
std::vector<double> feature_divisors(const MfeatDataset& ds);

/// Divides each column by its fixed divisor. Throws std::logic_error when the
/// dataset is already scaled.
MfeatDataset scale_features(MfeatDataset ds);

struct Heldout {
    Eigen::MatrixXd features;
    std::vector<int> labels;
};

struct MultitaskSplit {
    MultiTaskProblem problem; // 10 tasks sharing one design of 10 n rows
    std::vector<int> train_labels;
    Heldout heldout;
};

/// Samples n rows per digit without replacement (seeded), stacks them by
/// digit into a shared design and builds one indicator response per digit.
/// The remaining 200 - n rows per digit form the held-out split.
MultitaskSplit build_multitask(const MfeatDataset& ds, std::size_t n_per_digit, std::uint64_t seed);

struct DigitsMetrics {
    std::vector<double> per_task_error; // one-vs-rest disagreement per digit
    double mean_error = 0.0;
    double error_variance = 0.0; // population variance over the 10 tasks
    double misclassification = 0.0; // 10-way argmax error rate
    std::size_t b_row_support = 0;
    std::size_t combined_row_support = 0;
    std::size_t s_support = 0;
    std::size_t combined_support = 0;
};

/// Predicts argmax_k x (B + S) (ties to the smallest digit) for each held-out
/// row and scores each digit as a one-vs-rest task.
DigitsMetrics evaluate_digits(const DirtyPair& pair, const Heldout& heldout,
                              double filter_threshold = kDefaultFilter);

/// c log-spaced over [0.01, 10] (15 points) and lambda_s/lambda_b ratios
/// 0.15, 0.25, ..., 0.95, nudged by +0.01 where lambda_b/lambda_s would be an
/// integer.
CvGrid digits_cv_grid();

struct DigitsRun {
    DigitsMetrics metrics;
    RegPair reg;
};

/// Full pipeline for one split: 80/20 fit/score split of the training rows
/// for lambda selection with lambda_b = c sqrt(2 log(649) / n_fit), refit on
/// all training rows with lambdas rescaled to the larger n, evaluate on the
/// held-out rows.
DigitsRun run_digits(const MfeatDataset& scaled, std::size_t n_per_digit, SolverMode method, std::uint64_t seed,
                     const SolverConfig& config, const CvGrid& grid);

inline constexpr const char* kDigitsCsvHeader =
    "split_fraction,method,mean_error,error_variance,b_row_support,combined_row_support,s_support,combined_support";

void write_digits_row(std::ostream& os, double split_fraction, SolverMode method, const DigitsMetrics& m);

} // namespace dirty::digits
