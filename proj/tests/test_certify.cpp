#include <doctest.h>

#include <random>

#include "dirty/certify.hpp"
#include "dirty/decompose.hpp"
#include "dirty/solver.hpp"
#include "oracles.hpp"

using namespace dirty;

namespace {
CoefMatrix row(std::initializer_list<double> v) {
    CoefMatrix m(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v)
        m(0, k++) = x;
    return m;
}
} // namespace

TEST_CASE("dual_from_stationarity examples") {
    MultiTaskProblem zero;
    zero.designs = {Eigen::MatrixXd::Ones(3, 2)};
    zero.responses = {Eigen::VectorXd::Zero(3)};
    CHECK(dual_from_stationarity(zero, DirtyPair::zeros(2, 1)).isZero());

    MultiTaskProblem one;
    one.designs = {Eigen::MatrixXd::Ones(1, 1)};
    one.responses = {Eigen::VectorXd::Ones(1)};
    DirtyPair half = DirtyPair::zeros(1, 1);
    half.b(0, 0) = 0.25;
    half.s(0, 0) = 0.25;
    CHECK(dual_from_stationarity(one, half)(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("dual matrix is the negative loss gradient") {
    std::mt19937_64 rng(31);
    auto pr = oracle::random_problem(rng, 15, 4, 2);
    const SolveResult r = solve(pr, RegPair{0.05, 0.08}, SolverConfig{});
    const CoefMatrix z = dual_from_stationarity(pr, r.pair);
    const double h = 1e-6;
    const double n = 15;
    auto loss = [&](const CoefMatrix& theta) {
        double l = 0;
        for (int k = 0; k < 2; ++k)
            l += (pr.responses[k] - pr.designs[k] * theta.col(k)).squaredNorm();
        return l / (2 * n);
    };
    const CoefMatrix theta = r.pair.theta();
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 2; ++k) {
            CoefMatrix up = theta, dn = theta;
            up(j, k) += h;
            dn(j, k) -= h;
            const double fd = (loss(up) - loss(dn)) / (2 * h);
            CHECK(std::abs(-fd - z(j, k)) < 1e-8);
        }
}

TEST_CASE("check_kkt examples") {
    MultiTaskProblem zero;
    zero.designs = {Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 2)};
    zero.responses = {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
    const CertReport ok = check_kkt(zero, DirtyPair::zeros(2, 2), RegPair{0.1, 0.15});
    CHECK(ok.ok());
    CHECK(ok.stationarity_residual == 0.0);
    CHECK(ok.necessary.all());

    // off-support |z| = 2 lambda_s
    MultiTaskProblem one;
    one.designs = {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    one.responses = {Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Zero(1)};
    const CertReport bad = check_kkt(one, DirtyPair::zeros(1, 2), RegPair{0.1, 0.25});
    CHECK_FALSE(bad.s_subgrad_ok);
    CHECK(bad.b_subgrad_ok);
    CHECK(bad.stationarity_residual == doctest::Approx(0.1));
    CHECK(to_text(bad).find("s_subgrad_ok: false") != std::string::npos);
}

TEST_CASE("converged solver output is certified") {
    std::mt19937_64 rng(32);
    SolverConfig cfg;
    cfg.epsilon = 1e-12;
    for (int t = 0; t < 20; ++t) {
        auto pr = oracle::random_problem(rng, 20, 6, 2);
        const RegPair reg{0.03, 0.03 * 1.6};
        const SolveResult r = solve(pr, reg, cfg);
        REQUIRE(r.converged);
        const CertReport rep = check_kkt(pr, r.pair, reg);
        CHECK_MESSAGE(rep.ok(), to_text(rep));
        CHECK(rep.stationarity_residual <= 1e-4 * reg.lambda_s);
        CHECK_MESSAGE(rep.necessary.all(), to_text(rep));
    }
}

TEST_CASE("check_necessary examples") {
    const RegPair reg{1.0, 1.5};
    // S entry sits on the -2 maximum with the wrong sign
    const DirtyPair clash(row({2, -2}), row({0, 1}));
    CHECK_FALSE(check_necessary(clash, reg).p1);
    const DirtyPair agree(row({2, -2}), row({1, 0}));
    CHECK(check_necessary(agree, reg).p1);

    // D(S) = 2 is not below 1.5
    const DirtyPair dense(CoefMatrix::Zero(1, 2), row({1, 1}));
    CHECK_FALSE(check_necessary(dense, reg).p2);
    // M(B) = 1 is not above 1.5
    const DirtyPair lone(row({2, 1}), CoefMatrix::Zero(1, 2));
    CHECK_FALSE(check_necessary(lone, reg).p2);

    const DirtyPair off(row({2, 1}), row({0, 0.5}));
    CHECK_FALSE(check_necessary(off, reg).p3);

    // every maximum of B carries S: P4 fails
    const DirtyPair covered(row({2, -2}), row({1, -1}));
    CHECK_FALSE(check_necessary(covered, reg).p4);

    CHECK(check_necessary(DirtyPair::zeros(3, 2), reg).all());
}

TEST_CASE("necessary conditions hold for split truths and at solver optima") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (int t = 0; t < 20; ++t) {
        // a clean instance whose truth has balanced rows and some excess
        const int p = 5, n = 60;
        CoefMatrix theta = CoefMatrix::Zero(p, 2);
        theta(0, 0) = theta(0, 1) = u(rng);
        theta(1, 0) = -u(rng);
        theta(2, 1) = u(rng);
        MultiTaskProblem pr;
        std::normal_distribution<double> g;
        for (int k = 0; k < 2; ++k) {
            Eigen::MatrixXd x(n, p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j)
                    x(i, j) = g(rng);
            Eigen::VectorXd y = x * theta.col(k);
            for (int i = 0; i < n; ++i)
                y[i] += 0.01 * g(rng);
            pr.designs.push_back(x);
            pr.responses.push_back(y);
        }
        const RegPair reg{0.01, 0.015};
        const DirtyPair split = h_transform(theta, block_size_for(reg.lambda_b, reg.lambda_s));
        CHECK(check_necessary(split, reg).all());
        SolverConfig cfg;
        cfg.epsilon = 1e-12;
        const SolveResult r = solve(pr, reg, cfg);
        CHECK(check_necessary(r.pair, reg).all());
    }
}
