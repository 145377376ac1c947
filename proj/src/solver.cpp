#include "dirty/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dirty/prox.hpp"

namespace dirty {

namespace {

// The running gradient accumulates rank-one updates; it is rebuilt from the
// Gram matrices this often to bound drift.
constexpr std::size_t kRefreshEvery = 16;

void check_lambda(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
}

} // namespace

std::string_view to_string(SolverMode mode) {
    switch (mode) {
    case SolverMode::dirty: return "dirty";
    case SolverMode::lasso_only: return "lasso";
    case SolverMode::linf_only: return "linf";
    }
    return "?";
}

SolverMode parse_mode(std::string_view name) {
    if (name == "dirty") return SolverMode::dirty;
    if (name == "lasso") return SolverMode::lasso_only;
    if (name == "linf") return SolverMode::linf_only;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected dirty, lasso or linf)");
}

GramCache precompute(const MultiTaskProblem& problem) {
    problem.validate();
    GramCache cache;
    cache.n = problem.samples();
    cache.p = problem.features();
    const std::size_t r = problem.tasks();
    cache.c.reserve(r);
    cache.gram_of.resize(r);
    cache.yty.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
        const auto& x = problem.designs[k];
        const auto& y = problem.responses[k];
        cache.c.push_back(x.transpose() * y);
        cache.yty[k] = y.squaredNorm();
        std::size_t shared = k;
        for (std::size_t prev = 0; prev < k; ++prev)
            if (problem.designs[prev] == x) {
                shared = prev;
                break;
            }
        if (shared == k) {
            cache.gram_of[k] = cache.gram.size();
            Eigen::MatrixXd g(x.cols(), x.cols());
            g.setZero();
            g.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
            g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
            cache.gram.push_back(std::move(g));
        } else {
            cache.gram_of[k] = cache.gram_of[shared];
        }
    }
    return cache;
}

double objective(const MultiTaskProblem& problem, const DirtyPair& pair, const RegPair& reg) {
    const std::size_t r = problem.tasks();
    if (pair.tasks() != r || pair.features() != problem.features())
        throw std::invalid_argument("coefficient shape does not match the problem");
    const double n = static_cast<double>(problem.samples());
    double loss = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd theta = pair.b.col(col) + pair.s.col(col);
        loss += (problem.responses[k] - problem.designs[k] * theta).squaredNorm();
    }
    return loss / (2.0 * n) + reg.lambda_s * matrix_norms(pair.s).l11 + reg.lambda_b * matrix_norms(pair.b).l1inf;
}

SolverState make_state(const GramCache& cache, DirtyPair pair) {
    if (pair.features() != cache.p || pair.tasks() != cache.tasks())
        throw std::invalid_argument("initial pair shape does not match the problem");
    SolverState state{std::move(pair), {}};
    state.grad.resize(cache.tasks());
    refresh_gradient(state, cache);
    return state;
}

void refresh_gradient(SolverState& state, const GramCache& cache) {
    const CoefMatrix theta = state.pair.theta();
    for (std::size_t k = 0; k < cache.tasks(); ++k)
        state.grad[k] = cache.c[k] - cache.d(k) * theta.col(static_cast<Eigen::Index>(k));
}

double cached_objective(const SolverState& state, const GramCache& cache, const RegPair& reg) {
    // 1/2 ||y - X theta||^2 = 1/2 y'y - c'theta + 1/2 theta' D theta
    //                      = 1/2 y'y - 1/2 theta'(c + g)
    double loss = 0.0;
    for (std::size_t k = 0; k < cache.tasks(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd theta = state.pair.b.col(col) + state.pair.s.col(col);
        loss += 0.5 * cache.yty[k] - 0.5 * theta.dot(cache.c[k] + state.grad[k]);
    }
    loss = std::max(loss, 0.0);
    return loss / static_cast<double>(cache.n) + reg.lambda_s * matrix_norms(state.pair.s).l11 +
           reg.lambda_b * matrix_norms(state.pair.b).l1inf;
}

void sweep_s(SolverState& state, const GramCache& cache, double lambda_s) {
    const double thresh = static_cast<double>(cache.n) * lambda_s;
    auto& s = state.pair.s;
    const auto p = static_cast<Eigen::Index>(cache.p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < cache.tasks(); ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            const auto& d = cache.d(k);
            const double djj = d(j, j);
            const double old = s(j, col);
            double fresh = 0.0;
            if (djj > 0.0) {
                const double alpha = state.grad[k][j] + djj * old;
                fresh = prox::soft_threshold(alpha, thresh) / djj;
            }
            const double delta = fresh - old;
            if (delta != 0.0) {
                s(j, col) = fresh;
                state.grad[k].noalias() -= delta * d.col(j);
            }
        }
    }
}

void sweep_b(SolverState& state, const GramCache& cache, double lambda_b) {
    const double thresh = static_cast<double>(cache.n) * lambda_b;
    auto& b = state.pair.b;
    const std::size_t r = cache.tasks();
    const auto p = static_cast<Eigen::Index>(cache.p);
    std::vector<Eigen::Index> active;
    active.reserve(r);
    Eigen::VectorXd target(static_cast<Eigen::Index>(r));
    Eigen::VectorXd weight(static_cast<Eigen::Index>(r));
    for (Eigen::Index j = 0; j < p; ++j) {
        active.clear();
        for (std::size_t k = 0; k < r; ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            const double djj = cache.d(k)(j, j);
            if (djj > 0.0) {
                target[static_cast<Eigen::Index>(active.size())] = (state.grad[k][j] + djj * b(j, col)) / djj;
                weight[static_cast<Eigen::Index>(active.size())] = djj;
                active.push_back(col);
            }
        }
        const auto m = static_cast<Eigen::Index>(active.size());
        Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r));
        if (m > 0) {
            const Eigen::VectorXd sub = prox::weighted_linf_prox(target.head(m), weight.head(m), thresh);
            for (Eigen::Index i = 0; i < m; ++i)
                row[active[static_cast<std::size_t>(i)]] = sub[i];
        }
        for (std::size_t k = 0; k < r; ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            const double delta = row[col] - b(j, col);
            if (delta != 0.0) {
                b(j, col) = row[col];
                state.grad[k].noalias() -= delta * cache.d(k).col(j);
            }
        }
    }
}

SolveResult solve(const MultiTaskProblem& problem, const RegPair& reg, const SolverConfig& config,
                  const std::optional<DirtyPair>& init) {
    return solve_cached(precompute(problem), reg, config, init);
}

SolveResult solve_cached(const GramCache& cache, const RegPair& reg, const SolverConfig& config,
                         const std::optional<DirtyPair>& init) {
    if (!(config.epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (config.max_sweeps == 0)
        throw std::invalid_argument("max_sweeps must be positive");

    RegPair effective = reg;
    switch (config.mode) {
    case SolverMode::dirty:
        if (config.enforce_ratio) {
            reg.validate(cache.tasks());
        } else {
            check_lambda(reg.lambda_s, "lambda_s");
            check_lambda(reg.lambda_b, "lambda_b");
        }
        break;
    case SolverMode::lasso_only:
        check_lambda(reg.lambda_s, "lambda_s");
        effective.lambda_b = 0.0;
        break;
    case SolverMode::linf_only:
        check_lambda(reg.lambda_b, "lambda_b");
        effective.lambda_s = 0.0;
        break;
    }

    DirtyPair start = init ? *init : DirtyPair::zeros(cache.p, cache.tasks());
    if (!start.b.allFinite() || !start.s.allFinite())
        throw std::invalid_argument("initial pair has non-finite entries");
    if (config.mode == SolverMode::lasso_only && start.features() == cache.p)
        start.b.setZero();
    if (config.mode == SolverMode::linf_only && start.features() == cache.p)
        start.s.setZero();
    SolverState state = make_state(cache, std::move(start));

    SolveResult result;
    double previous = cached_objective(state, cache, effective);
    for (std::size_t it = 1; it <= config.max_sweeps; ++it) {
        if (config.mode != SolverMode::linf_only)
            sweep_s(state, cache, reg.lambda_s);
        if (config.mode != SolverMode::lasso_only)
            sweep_b(state, cache, reg.lambda_b);
        if (it % kRefreshEvery == 0)
            refresh_gradient(state, cache);

        const double current = cached_objective(state, cache, effective);
        result.objective_trace.push_back(current);
        result.sweeps_used = it;
        const double change = std::abs(current - previous) / std::max(previous, 1e-12);
        previous = current;
        if (change < config.epsilon) {
            result.converged = true;
            break;
        }
    }
    result.pair = std::move(state.pair);
    return result;
}

} // namespace dirty
