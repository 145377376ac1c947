#include "dirty/digits.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dirty/rng.hpp"

namespace dirty::digits {

const std::vector<std::string>& view_order() {
    static const std::vector<std::string> order{"pix", "fou", "kar", "fac", "zer", "mor"};
    return order;
}

const View& MfeatDataset::view(const std::string& name) const {
    for (const auto& v : views)
        if (v.name == name)
            return v;
    throw std::out_of_range("no view named " + name);
}

namespace {

std::vector<std::vector<double>> read_view(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw MissingFileError("cannot open " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size())
                throw ParseError(file.string() + ":" + std::to_string(line_no) + ": bad token '" + tok + "'");
            row.push_back(v);
        }
        if (row.empty())
            continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.size() != kRows)
        throw RowCountError(file.string() + ": expected " + std::to_string(kRows) + " rows, got " +
                            std::to_string(rows.size()));
    return rows;
}

} // namespace

MfeatDataset load_mfeat(const std::filesystem::path& dir) {
    std::vector<std::vector<std::vector<double>>> blocks;
    MfeatDataset ds;
    std::size_t cols = 0;
    for (const auto& name : view_order()) {
        blocks.push_back(read_view(dir / ("mfeat-" + name)));
        const std::size_t width = blocks.back().front().size();
        ds.views.push_back(View{name, cols, width});
        cols += width;
    }
    if (cols != kFeatures)
        throw ParseError("expected " + std::to_string(kFeatures) + " features in total, got " + std::to_string(cols));

    ds.features.resize(static_cast<Eigen::Index>(kRows), static_cast<Eigen::Index>(cols));
    for (std::size_t v = 0; v < blocks.size(); ++v)
        for (std::size_t i = 0; i < kRows; ++i)
            for (std::size_t c = 0; c < ds.views[v].width; ++c)
                ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ds.views[v].first + c)) =
                    blocks[v][i][c];
    ds.labels.resize(kRows);
    for (std::size_t i = 0; i < kRows; ++i)
        ds.labels[i] = static_cast<int>(i / kPerDigit);
    return ds;
}

std::vector<double> feature_divisors(const MfeatDataset& ds) {
    std::vector<double> out(static_cast<std::size_t>(ds.features.cols()), 1.0);
    for (const auto& v : ds.views) {
        std::vector<double> per;
        if (v.name == "pix") per.assign(v.width, 6.0);
        else if (v.name == "fou") per.assign(v.width, 1.0);
        else if (v.name == "kar") per.assign(v.width, 17.0);
        else if (v.name == "fac") per.assign(v.width, 1400.0);
        else if (v.name == "zer") per.assign(v.width, 800.0);
        else if (v.name == "mor") {
            // three small integer counts, then three reals with distinct ranges
            per = {6.0, 6.0, 6.0, 200.0, 3.0, 18000.0};
            per.resize(v.width, 1.0);
        }
        for (std::size_t c = 0; c < v.width; ++c)
            out[v.first + c] = per[c];
    }
    return out;
}

MfeatDataset scale_features(MfeatDataset ds) {
    if (ds.scaled)
        throw std::logic_error("features are already scaled");
    const auto div = feature_divisors(ds);
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c)
        ds.features.col(c) /= div[static_cast<std::size_t>(c)];
    ds.scaled = true;
    return ds;
}

MultitaskSplit build_multitask(const MfeatDataset& ds, std::size_t n_per_digit, std::uint64_t seed) {
    if (n_per_digit < 1 || n_per_digit > kPerDigit)
        throw std::invalid_argument("training rows per digit must be in [1, 200]");
    const auto p = ds.features.cols();
    const auto n_train = static_cast<Eigen::Index>(kDigits * n_per_digit);
    const auto n_held = static_cast<Eigen::Index>(kDigits * (kPerDigit - n_per_digit));

    MultitaskSplit out;
    Eigen::MatrixXd x(n_train, p);
    out.heldout.features.resize(n_held, p);
    Eigen::Index ti = 0, hi = 0;
    for (std::size_t digit = 0; digit < kDigits; ++digit) {
        std::vector<std::size_t> rows(kPerDigit);
        std::iota(rows.begin(), rows.end(), digit * kPerDigit);
        StreamRng rng(seed, digit);
        for (std::size_t i = 0; i < n_per_digit; ++i)
            std::swap(rows[i], rows[i + static_cast<std::size_t>(rng.below(kPerDigit - i))]);
        for (std::size_t i = 0; i < kPerDigit; ++i) {
            const auto src = static_cast<Eigen::Index>(rows[i]);
            if (i < n_per_digit) {
                x.row(ti++) = ds.features.row(src);
                out.train_labels.push_back(static_cast<int>(digit));
            } else {
                out.heldout.features.row(hi++) = ds.features.row(src);
                out.heldout.labels.push_back(static_cast<int>(digit));
            }
        }
    }
    for (std::size_t k = 0; k < kDigits; ++k) {
        Eigen::VectorXd y(n_train);
        for (Eigen::Index i = 0; i < n_train; ++i)
            y[i] = out.train_labels[static_cast<std::size_t>(i)] == static_cast<int>(k) ? 1.0 : 0.0;
        out.problem.responses.push_back(std::move(y));
        out.problem.designs.push_back(x);
    }
    return out;
}

DigitsMetrics evaluate_digits(const DirtyPair& pair, const Heldout& heldout, double filter_threshold) {
    if (pair.features() != static_cast<std::size_t>(heldout.features.cols()) || pair.tasks() != kDigits)
        throw std::invalid_argument("coefficients must be 649 x 10 and match the held-out features");
    const CoefMatrix theta = pair.theta();
    DigitsMetrics m;
    m.per_task_error.assign(kDigits, 0.0);
    const std::size_t rows = heldout.labels.size();
    if (rows > 0) {
        const Eigen::MatrixXd scores = heldout.features * theta;
        std::vector<std::size_t> wrong(kDigits, 0);
        std::size_t missed = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            Eigen::Index pred = 0;
            scores.row(static_cast<Eigen::Index>(i)).maxCoeff(&pred); // first maximum wins
            if (pred != heldout.labels[i])
                ++missed;
            for (std::size_t k = 0; k < kDigits; ++k) {
                const bool said = pred == static_cast<Eigen::Index>(k);
                const bool is = heldout.labels[i] == static_cast<int>(k);
                if (said != is)
                    ++wrong[k];
            }
        }
        for (std::size_t k = 0; k < kDigits; ++k)
            m.per_task_error[k] = static_cast<double>(wrong[k]) / static_cast<double>(rows);
        m.misclassification = static_cast<double>(missed) / static_cast<double>(rows);
    }
    const double mean = std::accumulate(m.per_task_error.begin(), m.per_task_error.end(), 0.0) / kDigits;
    double var = 0.0;
    for (double e : m.per_task_error)
        var += (e - mean) * (e - mean);
    m.mean_error = mean;
    m.error_variance = var / kDigits;

    const auto b = sparsity_stats(pair.b, filter_threshold);
    const auto s = sparsity_stats(pair.s, filter_threshold);
    const auto both = sparsity_stats(theta, filter_threshold);
    m.b_row_support = b.row_support.size();
    m.s_support = s.support.size();
    m.combined_row_support = both.row_support.size();
    m.combined_support = both.support.size();
    return m;
}

CvGrid digits_cv_grid() {
    CvGrid grid;
    grid.c_values = log_space(0.01, 10.0, 15);
    for (int i = 0; i < 9; ++i) {
        double q = 0.15 + 0.1 * i;
        if (is_integer_ratio(1.0 / q))
            q += 0.01;
        grid.ratio_values.push_back(q);
    }
    return grid;
}

namespace {

MultiTaskProblem take_rows(const MultiTaskProblem& prob, const std::vector<Eigen::Index>& rows) {
    const Eigen::MatrixXd& x = prob.designs.front();
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        sub.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    MultiTaskProblem out;
    for (const auto& y : prob.responses) {
        Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            ys[static_cast<Eigen::Index>(i)] = y[rows[i]];
        out.designs.push_back(sub);
        out.responses.push_back(std::move(ys));
    }
    return out;
}

} // namespace

DigitsRun run_digits(const MfeatDataset& scaled, std::size_t n_per_digit, SolverMode method, std::uint64_t seed,
                     const SolverConfig& config, const CvGrid& grid) {
    const MultitaskSplit split = build_multitask(scaled, n_per_digit, seed);

    // Rows are stacked in digit blocks of n_per_digit; the first 80% of each
    // block fit, the rest score.
    std::size_t n_fit = n_per_digit - n_per_digit / 5;
    if (n_fit == n_per_digit && n_per_digit > 1)
        --n_fit;
    std::vector<Eigen::Index> fit_rows, score_rows;
    for (std::size_t d = 0; d < kDigits; ++d)
        for (std::size_t i = 0; i < n_per_digit; ++i)
            (i < n_fit ? fit_rows : score_rows).push_back(static_cast<Eigen::Index>(d * n_per_digit + i));
    if (score_rows.empty())
        score_rows = fit_rows;
    const MultiTaskProblem fit = take_rows(split.problem, fit_rows);
    const MultiTaskProblem score = take_rows(split.problem, score_rows);

    const double log_p = std::log(static_cast<double>(kFeatures));
    const double fit_n = static_cast<double>(fit_rows.size());
    const CvResult cv = cv_select_scaled(fit, score, grid, method, config, std::sqrt(2.0 * log_p / fit_n));

    const double all_n = static_cast<double>(split.problem.samples());
    const double shrink = std::sqrt(fit_n / all_n);
    RegPair reg{cv.reg.lambda_s * shrink, cv.reg.lambda_b * shrink};
    SolverConfig cfg = config;
    cfg.mode = method;
    const SolveResult final_fit = solve(split.problem, reg, cfg, cv.pair);
    return DigitsRun{evaluate_digits(final_fit.pair, split.heldout, config.filter_threshold), reg};
}

void write_digits_row(std::ostream& os, double split_fraction, SolverMode method, const DigitsMetrics& m) {
    os << split_fraction << ',' << to_string(method) << ',' << m.mean_error << ',' << m.error_variance << ','
       << m.b_row_support << ',' << m.combined_row_support << ',' << m.s_support << ',' << m.combined_support
       << '\n';
}

} // namespace dirty::digits
