#include "dirty/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dirty/rng.hpp"

namespace dirty {

namespace {

enum Stream : std::uint64_t {
    kSupportStream = 0,
    kSignStream = 1,
    kMagnitudeStream = 2,
    kTrainDesignStream = 3,
    kTrainNoiseStream = 4,
    kTestDesignStream = 5,
    kTestNoiseStream = 6,
};

MultiTaskProblem draw_problem(const InstanceSpec& spec, const CoefMatrix& theta, std::uint64_t design_stream,
                              std::uint64_t noise_stream) {
    MultiTaskProblem out;
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    StreamRng design_rng(spec.seed, design_stream);
    StreamRng noise_rng(spec.seed, noise_stream);
    for (std::size_t k = 0; k < spec.r; ++k) {
        Eigen::MatrixXd x(n, p);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                x(i, j) = design_rng.normal();
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = spec.sigma * noise_rng.normal();
        out.responses.push_back(x * theta.col(static_cast<Eigen::Index>(k)) + w);
        out.designs.push_back(std::move(x));
    }
    return out;
}

} // namespace

std::size_t InstanceSpec::support_size() const { return s == 0 ? p / 10 : s; }

std::size_t InstanceSpec::shared_count() const {
    return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(support_size())));
}

double InstanceSpec::effective_alpha() const {
    return static_cast<double>(shared_count()) / static_cast<double>(support_size());
}

void InstanceSpec::validate() const {
    if (p == 0 || r == 0 || n == 0)
        throw std::invalid_argument("p, r and n must be positive");
    if (support_size() == 0)
        throw std::invalid_argument("support size must be positive (p too small for the default s)");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(sigma >= 0.0))
        throw std::invalid_argument("sigma must be nonnegative");
    if (!(magnitude_lo > 0.0 && magnitude_hi >= magnitude_lo))
        throw std::invalid_argument("row magnitude range must be positive and ordered");
    const std::size_t ss = support_size();
    const std::size_t shared = shared_count();
    if (shared + r * (ss - shared) > p)
        throw std::invalid_argument("row support exceeds the number of features");
}

std::vector<std::size_t> GroundTruth::task_support(std::size_t k) const {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < theta_bar.rows(); ++j)
        if (theta_bar(j, static_cast<Eigen::Index>(k)) != 0.0)
            out.push_back(static_cast<std::size_t>(j));
    return out;
}

Instance generate_instance(const InstanceSpec& spec) {
    spec.validate();
    const std::size_t ss = spec.support_size();
    const std::size_t shared = spec.shared_count();
    const std::size_t excl = ss - shared;

    // partial Fisher-Yates over feature indices
    std::vector<std::size_t> perm(spec.p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    StreamRng support_rng(spec.seed, kSupportStream);
    const std::size_t needed = shared + spec.r * excl;
    for (std::size_t i = 0; i < needed; ++i) {
        const auto pick = i + static_cast<std::size_t>(support_rng.below(spec.p - i));
        std::swap(perm[i], perm[pick]);
    }

    GroundTruth truth;
    truth.effective_alpha = spec.effective_alpha();
    truth.shared_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(shared));
    std::sort(truth.shared_rows.begin(), truth.shared_rows.end());
    for (std::size_t k = 0; k < spec.r; ++k) {
        const auto first = perm.begin() + static_cast<std::ptrdiff_t>(shared + k * excl);
        std::vector<std::size_t> rows(first, first + static_cast<std::ptrdiff_t>(excl));
        std::sort(rows.begin(), rows.end());
        truth.exclusive_rows.push_back(std::move(rows));
    }

    const auto p = static_cast<Eigen::Index>(spec.p);
    const auto r = static_cast<Eigen::Index>(spec.r);
    truth.theta_bar = CoefMatrix::Zero(p, r);
    StreamRng sign_rng(spec.seed, kSignStream);
    StreamRng mag_rng(spec.seed, kMagnitudeStream);
    // one magnitude per row: rows are balanced across the tasks they touch
    std::vector<bool> touched(spec.p, false);
    for (auto j : truth.shared_rows)
        touched[j] = true;
    for (const auto& rows : truth.exclusive_rows)
        for (auto j : rows)
            touched[j] = true;
    std::vector<double> magnitude(spec.p, 0.0);
    for (std::size_t j = 0; j < spec.p; ++j)
        if (touched[j])
            magnitude[j] = mag_rng.uniform(spec.magnitude_lo, spec.magnitude_hi);
    for (auto j : truth.shared_rows)
        for (Eigen::Index k = 0; k < r; ++k)
            truth.theta_bar(static_cast<Eigen::Index>(j), k) = (sign_rng.coin() ? 1.0 : -1.0) * magnitude[j];
    for (std::size_t k = 0; k < spec.r; ++k)
        for (auto j : truth.exclusive_rows[k])
            truth.theta_bar(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                (sign_rng.coin() ? 1.0 : -1.0) * magnitude[j];
    truth.sign_support = signed_support(truth.theta_bar, 0.0);

    Instance inst;
    inst.train = draw_problem(spec, truth.theta_bar, kTrainDesignStream, kTrainNoiseStream);
    inst.test = draw_problem(spec, truth.theta_bar, kTestDesignStream, kTestNoiseStream);
    inst.truth = std::move(truth);
    return inst;
}

double overlap_log(std::size_t p, std::size_t s, double alpha) {
    const double arg = static_cast<double>(p) - (2.0 - alpha) * static_cast<double>(s);
    if (!(arg > 1.0))
        throw std::invalid_argument("p - (2 - alpha) s must exceed 1");
    return std::log(arg);
}

double theta_rescale(std::size_t n, std::size_t p, std::size_t s, double alpha) {
    return static_cast<double>(n) / ((2.0 - alpha) * static_cast<double>(s) * overlap_log(p, s, alpha));
}

std::size_t n_for_theta(double theta, std::size_t p, std::size_t s, double alpha) {
    const double n = theta * (2.0 - alpha) * static_cast<double>(s) * overlap_log(p, s, alpha);
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(n)));
}

double figure_theta(std::size_t n, std::size_t p, std::size_t s, double alpha) {
    return static_cast<double>(n) / (static_cast<double>(s) * overlap_log(p, s, alpha));
}

std::size_t n_for_figure_theta(double theta, std::size_t p, std::size_t s, double alpha) {
    const double n = theta * static_cast<double>(s) * overlap_log(p, s, alpha);
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(n)));
}

double lasso_theta(std::size_t n, std::size_t p, std::size_t s) {
    const double arg = static_cast<double>(p) - static_cast<double>(s);
    if (!(arg > 1.0))
        throw std::invalid_argument("p - s must exceed 1");
    return static_cast<double>(n) / (static_cast<double>(s) * std::log(arg));
}

} // namespace dirty
