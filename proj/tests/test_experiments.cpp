#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dirty/experiments.hpp"
#include "oracles.hpp"

using namespace dirty;

TEST_CASE("predicted thresholds") {
    const double rt2 = std::sqrt(2.0);
    CHECK(predicted_threshold({rt2, 0.0, 0.3}) == doctest::Approx(1.7));
    CHECK(predicted_threshold({rt2, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(predicted_threshold({rt2, 1.0, 1.0}) == doctest::Approx(4.0 - 2.0 * rt2));
    for (double tau : {0.0, 0.25, 0.5, 1.0})
        for (double alpha : {0.0, 0.1, 0.5, 2.0 / 3.0, 1.0}) {
            CHECK(predicted_threshold({rt2, tau, alpha}) ==
                  doctest::Approx(predicted_threshold_sqrt2(tau, alpha)).epsilon(1e-12));
            CHECK(predicted_threshold({rt2, 0.0, alpha}) == doctest::Approx(2.0 - alpha));
        }
    // away from sqrt 2 the max picks the larger branch
    CHECK(predicted_threshold({1.2, 0.0, 0.5}) == doctest::Approx(2.0 * overlap_f(1.2, 0.0, 0.5) / 1.44));
    CHECK(predicted_threshold({1.8, 0.0, 0.5}) == doctest::Approx(overlap_f(1.8, 0.0, 0.5)));
    CHECK(overlap_f(1.0, 0.0, 0.0) == 2.0);
}

TEST_CASE("baseline thresholds") {
    CHECK(baseline_threshold(SolverMode::lasso_only, 0.3) == 2.0);
    CHECK(baseline_threshold(SolverMode::linf_only, 2.0 / 3.0) == doctest::Approx(2.0));
    CHECK(baseline_threshold(SolverMode::linf_only, 1.0) == doctest::Approx(1.0));
    CHECK(baseline_threshold(SolverMode::dirty, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("threshold_50") {
    CHECK(*threshold_50({{1.0, 0.0}, {1.4, 0.3}, {1.8, 0.7}, {2.2, 1.0}}) == doctest::Approx(1.6));
    CHECK_FALSE(threshold_50({{1.0, 0.0}, {2.0, 0.4}}).has_value());
    CHECK_FALSE(threshold_50({{1.0, 0.9}, {2.0, 1.0}}).has_value());
    CHECK_FALSE(threshold_50({}).has_value());
    CHECK(*threshold_50({{1.0, 0.1}, {1.2, 0.5}, {1.4, 0.9}}) == 1.2);
    // the first crossing wins on a non-monotone curve
    CHECK(*threshold_50({{1.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}, {4.0, 1.0}}) == doctest::Approx(1.5));
}

TEST_CASE("extract_thresholds") {
    SweepTable table;
    auto add = [&](SolverMode m, double theta, std::size_t succ) {
        SweepPoint pt;
        pt.method = m;
        pt.p = 128;
        pt.s = 12;
        pt.alpha = 0.5;
        pt.theta = theta;
        pt.trials = 10;
        pt.successes = succ;
        table.push_back(pt);
    };
    add(SolverMode::dirty, 2.0, 8);
    add(SolverMode::dirty, 1.0, 2);
    add(SolverMode::lasso_only, 1.0, 2);
    add(SolverMode::lasso_only, 2.0, 8);
    add(SolverMode::linf_only, 1.0, 0);
    const auto out = extract_thresholds(table);
    REQUIRE(out.size() == 2);
    const double scale = 12 * std::log(110.0);
    CHECK(out[0].method == SolverMode::dirty);
    CHECK(out[0].theta_star == doctest::Approx(1.5));
    CHECK(out[0].n_star == doctest::Approx(1.5 * scale));
    CHECK(out[0].n_star_stderr == doctest::Approx(0.5 / std::sqrt(10.0) / 0.6 * scale));
    CHECK(out[1].method == SolverMode::lasso_only);
    CHECK(out[1].theta_star == doctest::Approx(1.5 * scale / (12 * std::log(116.0))));

    std::ostringstream os;
    write_threshold_csv(os, out);
    CHECK(os.str().rfind("method,p,s,alpha,theta_star,n_star\n", 0) == 0);
}

TEST_CASE("grids") {
    const auto v = log_space(1.0, 100.0, 3);
    REQUIRE(v.size() == 3);
    CHECK(v[1] == doctest::Approx(10.0));
    CHECK(log_space(1.0, 5.0, 1) == std::vector<double>{1.0});
    CHECK(log_space(1.0, 5.0, 0).empty());
    const CvGrid g = default_cv_grid();
    CHECK(g.c_values.size() == 30);
    CHECK(g.c_values.front() == 0.01);
    CHECK(g.c_values.back() == 100.0);
    CHECK(g.ratio_values.size() == 9);
    CHECK(g.cells(SolverMode::dirty) == 270);
    CHECK(g.cells(SolverMode::lasso_only) == 30);
    CHECK_NOTHROW(g.validate(2));
    CHECK_THROWS_AS((CvGrid{{1.0}, {0.5}}).validate(2), IntegerRatioError);
    CHECK_THROWS((CvGrid{{}, {0.6}}).validate(2));
    CHECK_THROWS((CvGrid{{-1.0}, {0.6}}).validate(2));
}

TEST_CASE("cv_select") {
    std::mt19937_64 rng(41);
    const auto train = oracle::random_problem(rng, 40, 10, 2, 0.3);
    const auto test = oracle::random_problem(rng, 40, 10, 2, 0.3);
    SolverConfig cfg;

    const CvResult one = cv_select(train, test, CvGrid{{0.5}, {0.7}}, SolverMode::dirty, cfg);
    CHECK(one.cell == 0);
    const double scale = std::sqrt(2 * std::log(10.0) / 40);
    CHECK(one.reg.lambda_b == doctest::Approx(0.5 * scale));
    CHECK(one.reg.lambda_s == doctest::Approx(0.35 * scale));
    CHECK(one.score == doctest::Approx(prediction_error(test, filter_small(one.pair.theta()))));

    const CvResult dup = cv_select(train, test, CvGrid{{0.5, 0.5, 0.5}, {0.7}}, SolverMode::lasso_only, cfg);
    CHECK(dup.cell == 0);

    CHECK_THROWS(cv_select(train, test, CvGrid{{}, {0.7}}, SolverMode::lasso_only, cfg));
    CHECK_THROWS(cv_select(train, test, CvGrid{{1.0}, {0.5}}, SolverMode::dirty, cfg));
}

TEST_CASE("cv_select picks the best cell") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 5; ++t) {
        const auto train = oracle::random_problem(rng, 30, 8, 2, 0.5);
        const auto test = oracle::random_problem(rng, 30, 8, 2, 0.5);
        const CvGrid grid{log_space(0.01, 10.0, 7), {0.6, 0.8}};
        SolverConfig cfg;
        cfg.epsilon = 1e-12;
        for (SolverMode m : {SolverMode::dirty, SolverMode::lasso_only, SolverMode::linf_only}) {
            const CvResult cv = cv_select(train, test, grid, m, cfg);
            const double scale = std::sqrt(2 * std::log(8.0) / 30);
            double best = std::numeric_limits<double>::infinity();
            SolverConfig c = cfg;
            c.mode = m;
            for (double cval : grid.c_values)
                for (double q : grid.ratio_values) {
                    const double lam = cval * scale;
                    const RegPair reg = m == SolverMode::dirty        ? RegPair{q * lam, lam}
                                        : m == SolverMode::lasso_only ? RegPair{lam, 0.0}
                                                                      : RegPair{0.0, lam};
                    const SolveResult r = solve(train, reg, c);
                    best = std::min(best, prediction_error(test, filter_small(r.pair.theta())));
                    if (m != SolverMode::dirty)
                        break;
                }
            CHECK(cv.score == doctest::Approx(best).epsilon(1e-6));
            CHECK(cv.cell < grid.cells(m));
        }
    }
}

TEST_CASE("parallel_for") {
    std::vector<int> out(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(out[i] == static_cast<int>(i * i));
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    parallel_for(0, 4, [](std::size_t) { FAIL("no jobs expected"); });
}

TEST_CASE("success_probability and sweeps") {
    InstanceSpec spec;
    spec.p = 40;
    spec.alpha = 0.5;
    spec.n = 60;
    spec.seed = 9;
    const CvGrid grid{log_space(0.05, 2.0, 4), {0.7}};
    SolverConfig cfg;
    const SweepPoint a = success_probability(spec, SolverMode::lasso_only, grid, 4, cfg, 0, 1);
    const SweepPoint b = success_probability(spec, SolverMode::lasso_only, grid, 4, cfg, 0, 3);
    CHECK(a.successes == b.successes);
    CHECK(a.trials == 4);
    CHECK(a.s == 4);
    CHECK(a.theta == doctest::Approx(figure_theta(60, 40, 4, 0.5)));
    CHECK_THROWS(success_probability(spec, SolverMode::lasso_only, grid, 0, cfg));
    CHECK(trial_seed(1, SolverMode::dirty, 0, 0) != trial_seed(1, SolverMode::dirty, 0, 1));
    CHECK(trial_seed(1, SolverMode::dirty, 0, 0) != trial_seed(1, SolverMode::lasso_only, 0, 0));

    SweepOptions opt;
    opt.trials = 2;
    opt.grid = grid;
    CHECK(sweep_phase(spec, {1.0, 2.0}, {}, opt).empty());
    std::size_t calls = 0;
    opt.on_point = [&](const SweepPoint&) { ++calls; };
    const SweepTable one = sweep_phase(spec, {1.5}, {SolverMode::linf_only}, opt);
    REQUIRE(one.size() == 1);
    CHECK(calls == 1);
    CHECK(one[0].theta == 1.5);
    CHECK(one[0].n == n_for_figure_theta(1.5, 40, 4, 0.5));
    CHECK_THROWS(sweep_phase(spec, {2.0, 1.0}, {SolverMode::dirty}, opt));

    std::ostringstream os;
    write_sweep_csv(os, one);
    std::istringstream is(os.str());
    std::string header, row, extra;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "method,p,s,alpha,theta,n,trials,successes,success_rate");
    CHECK(row.rfind("linf,40,4,0.5,1.5,", 0) == 0);
    CHECK_FALSE(std::getline(is, extra));
}
