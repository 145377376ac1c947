#include "dirty/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "dirty/rng.hpp"

namespace dirty {

void CvGrid::validate(std::size_t r) const {
    if (c_values.empty() || ratio_values.empty())
        throw std::invalid_argument("CV grid must have at least one c value and one ratio");
    for (double c : c_values)
        if (!(c > 0.0))
            throw std::invalid_argument("CV c values must be positive");
    for (double q : ratio_values) {
        if (!(q > 0.0))
            throw std::invalid_argument("CV ratios must be positive");
        RegPair{q, 1.0}.validate(r);
    }
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
    if (count == 0)
        return {};
    if (count == 1)
        return {lo};
    std::vector<double> out(count);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

CvGrid default_cv_grid() {
    CvGrid grid;
    grid.c_values = log_space(0.01, 100.0, 30);
    for (int i = 11; i <= 19; ++i)
        grid.ratio_values.push_back(0.05 * i);
    return grid;
}

double prediction_error(const MultiTaskProblem& problem, const CoefMatrix& theta) {
    double loss = 0.0;
    for (std::size_t k = 0; k < problem.tasks(); ++k)
        loss += (problem.responses[k] - problem.designs[k] * theta.col(static_cast<Eigen::Index>(k))).squaredNorm();
    return loss / (2.0 * static_cast<double>(problem.samples()));
}

namespace {
// Scores closer than this (relative) count as ties and keep the earlier cell.
constexpr double kScoreTieRel = 1e-9;
} // namespace

CvResult cv_select(const MultiTaskProblem& train, const MultiTaskProblem& test, const CvGrid& grid,
                   SolverMode method, const SolverConfig& config) {
    const double r = static_cast<double>(train.tasks());
    const double p = static_cast<double>(train.features());
    const double n = static_cast<double>(train.samples());
    return cv_select_scaled(train, test, grid, method, config, std::sqrt(r * std::log(p) / n));
}

CvResult cv_select_scaled(const MultiTaskProblem& train, const MultiTaskProblem& test, const CvGrid& grid,
                          SolverMode method, const SolverConfig& config, double lambda_scale) {
    if (grid.c_values.empty() || (method == SolverMode::dirty && grid.ratio_values.empty()))
        throw std::invalid_argument("CV grid is empty");
    test.validate();
    if (test.tasks() != train.tasks() || test.features() != train.features())
        throw std::invalid_argument("train and test problems differ in shape");
    if (method == SolverMode::dirty)
        grid.validate(train.tasks());

    const GramCache cache = precompute(train);
    SolverConfig cfg = config;
    cfg.mode = method;

    std::optional<CvResult> best;
    std::optional<DirtyPair> warm;
    std::size_t cell = 0;
    auto visit = [&](const RegPair& reg) {
        SolveResult res = solve_cached(cache, reg, cfg, warm);
        const CoefMatrix theta = filter_small(res.pair.theta(), cfg.filter_threshold);
        const double score = prediction_error(test, theta);
        if (!best || score < best->score - kScoreTieRel * std::max(1.0, std::abs(best->score)))
            best = CvResult{reg, res.pair, score, cell};
        warm = std::move(res.pair);
        ++cell;
    };

    for (double c : grid.c_values) {
        const double lam = c * lambda_scale;
        switch (method) {
        case SolverMode::dirty:
            for (double q : grid.ratio_values)
                visit(RegPair{q * lam, lam});
            break;
        case SolverMode::lasso_only:
            visit(RegPair{lam, 0.0});
            break;
        case SolverMode::linf_only:
            visit(RegPair{0.0, lam});
            break;
        }
    }
    return std::move(*best);
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::uint64_t trial_seed(std::uint64_t base_seed, SolverMode method, std::size_t theta_index, std::size_t trial) {
    return hash_seed({base_seed, static_cast<std::uint64_t>(method), theta_index, trial});
}

SweepPoint success_probability(const InstanceSpec& spec, SolverMode method, const CvGrid& grid,
                               std::size_t trials, const SolverConfig& config, std::size_t theta_index,
                               std::size_t workers) {
    if (trials == 0)
        throw std::invalid_argument("trials must be at least 1");
    spec.validate();
    std::vector<char> success(trials, 0);
    parallel_for(trials, workers, [&](std::size_t t) {
        InstanceSpec trial_spec = spec;
        trial_spec.seed = trial_seed(spec.seed, method, theta_index, t);
        const Instance inst = generate_instance(trial_spec);
        const CvResult cv = cv_select(inst.train, inst.test, grid, method, config);
        success[t] = signed_support(cv.pair.theta(), config.filter_threshold) == inst.truth.sign_support;
    });

    SweepPoint pt;
    pt.method = method;
    pt.p = spec.p;
    pt.s = spec.support_size();
    pt.alpha = spec.effective_alpha();
    pt.theta = figure_theta(spec.n, spec.p, pt.s, pt.alpha);
    pt.n = spec.n;
    pt.trials = trials;
    pt.successes = static_cast<std::size_t>(std::count(success.begin(), success.end(), 1));
    return pt;
}

SweepTable sweep_phase(const InstanceSpec& tmpl, const std::vector<double>& thetas,
                       const std::vector<SolverMode>& methods, const SweepOptions& options) {
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if (!(thetas[i] > thetas[i - 1]))
            throw std::invalid_argument("theta grid must be strictly increasing");
    SweepTable table;
    const std::size_t s = tmpl.support_size();
    const double alpha = tmpl.effective_alpha();
    for (SolverMode method : methods) {
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            InstanceSpec spec = tmpl;
            spec.n = n_for_figure_theta(thetas[i], tmpl.p, s, alpha);
            SweepPoint pt = success_probability(spec, method, options.grid, options.trials, options.config, i,
                                                options.workers);
            pt.theta = thetas[i];
            if (options.on_point)
                options.on_point(pt);
            table.push_back(pt);
        }
    }
    return table;
}

namespace {

struct Crossing {
    double theta;
    double slope; // rate change per unit theta around the crossing
};

std::optional<Crossing> find_crossing(const std::vector<std::pair<double, double>>& curve) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto [t, rate] = curve[i];
        if (rate == 0.5) {
            double slope = 0.0;
            if (i > 0)
                slope = (rate - curve[i - 1].second) / (t - curve[i - 1].first);
            if (slope <= 0.0 && i + 1 < curve.size())
                slope = (curve[i + 1].second - rate) / (curve[i + 1].first - t);
            return Crossing{t, slope};
        }
        if (rate > 0.5) {
            if (i == 0)
                return std::nullopt; // starts above 0.5: the crossing lies left of the grid
            const auto [t0, r0] = curve[i - 1];
            const double slope = (rate - r0) / (t - t0);
            return Crossing{t0 + (0.5 - r0) / slope, slope};
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<double> threshold_50(const std::vector<std::pair<double, double>>& curve) {
    const auto c = find_crossing(curve);
    if (!c)
        return std::nullopt;
    return c->theta;
}

std::vector<ThresholdPoint> extract_thresholds(const SweepTable& table) {
    using Key = std::tuple<int, std::size_t, std::size_t, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<const SweepPoint*>> groups;
    for (const auto& pt : table) {
        Key key{static_cast<int>(pt.method), pt.p, pt.s, pt.alpha};
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(&pt);
    }
    std::vector<ThresholdPoint> out;
    for (const auto& key : order) {
        auto pts = groups[key];
        std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->theta < b->theta; });
        std::vector<std::pair<double, double>> curve;
        for (auto* pt : pts)
            curve.emplace_back(pt->theta, pt->success_rate());
        const auto cross = find_crossing(curve);
        if (!cross)
            continue;
        const SweepPoint& ref = *pts.front();
        const double scale = static_cast<double>(ref.s) * overlap_log(ref.p, ref.s, ref.alpha);
        ThresholdPoint tp;
        tp.method = ref.method;
        tp.p = ref.p;
        tp.s = ref.s;
        tp.alpha = ref.alpha;
        tp.n_star = cross->theta * scale;
        tp.theta_star = cross->theta;
        if (ref.method == SolverMode::lasso_only)
            tp.theta_star = tp.n_star / (static_cast<double>(ref.s) *
                                         std::log(static_cast<double>(ref.p) - static_cast<double>(ref.s)));
        const double rate_se = 0.5 / std::sqrt(static_cast<double>(ref.trials));
        tp.n_star_stderr = cross->slope > 0.0 ? rate_se / cross->slope * scale
                                              : std::numeric_limits<double>::infinity();
        out.push_back(tp);
    }
    return out;
}

double overlap_f(double kappa, double tau, double alpha) {
    return 2.0 - 2.0 * (1.0 - tau) * alpha - 2.0 * tau * alpha * kappa + 0.5 * (1.0 + tau) * alpha * kappa * kappa;
}

double predicted_threshold(const TheoryParams& q) {
    const double f = overlap_f(q.kappa, q.tau, q.alpha);
    return std::max(2.0 * f / (q.kappa * q.kappa), f);
}

double predicted_threshold_sqrt2(double tau, double alpha) {
    return 2.0 - alpha + (3.0 - 2.0 * std::sqrt(2.0)) * tau * alpha;
}

double baseline_threshold(SolverMode method, double alpha) {
    switch (method) {
    case SolverMode::lasso_only: return 2.0;
    case SolverMode::linf_only: return 4.0 - 3.0 * alpha;
    case SolverMode::dirty: return 2.0 - alpha;
    }
    return 0.0;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    os << kSweepCsvHeader << '\n';
    for (const auto& pt : table)
        os << to_string(pt.method) << ',' << pt.p << ',' << pt.s << ',' << pt.alpha << ',' << pt.theta << ','
           << pt.n << ',' << pt.trials << ',' << pt.successes << ',' << pt.success_rate() << '\n';
}

void write_threshold_csv(std::ostream& os, const std::vector<ThresholdPoint>& points) {
    os << kThresholdCsvHeader << '\n';
    for (const auto& tp : points)
        os << to_string(tp.method) << ',' << tp.p << ',' << tp.s << ',' << tp.alpha << ',' << tp.theta_star << ','
           << tp.n_star << '\n';
}

} // namespace dirty
