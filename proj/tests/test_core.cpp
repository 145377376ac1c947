#include <doctest.h>

#include <random>

#include "dirty/core.hpp"

using namespace dirty;

namespace {
CoefMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    CoefMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index j = 0;
    for (auto row : rows) {
        Eigen::Index k = 0;
        for (double v : row)
            m(j, k++) = v;
        ++j;
    }
    return m;
}

CoefMatrix random_matrix(std::mt19937_64& rng, int p, int r) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::bernoulli_distribution zero(0.4);
    CoefMatrix m(p, r);
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < r; ++k)
            m(j, k) = zero(rng) ? 0.0 : u(rng);
    return m;
}
} // namespace

TEST_CASE("matrix_norms examples") {
    auto z = matrix_norms(CoefMatrix::Zero(3, 2));
    CHECK(z.l11 == 0.0);
    CHECK(z.l1inf == 0.0);
    auto n = matrix_norms(mat({{1, -2}, {0, 3}}));
    CHECK(n.l11 == 6.0);
    CHECK(n.l1inf == 5.0);
    auto one = matrix_norms(mat({{4}}));
    CHECK(one.l11 == 4.0);
    CHECK(one.l1inf == 4.0);
}

TEST_CASE("norm ordering and equality iff one nonzero per row") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 500; ++t) {
        const CoefMatrix m = random_matrix(rng, 1 + t % 6, 1 + t % 4);
        const auto n = matrix_norms(m);
        CHECK(n.l11 >= n.l1inf - 1e-12);
        CHECK(n.l1inf >= 0.0);
        bool single = true;
        for (Eigen::Index j = 0; j < m.rows(); ++j)
            single = single && (m.row(j).array() != 0.0).count() <= 1;
        CHECK((std::abs(n.l11 - n.l1inf) < 1e-12) == single);
    }
}

TEST_CASE("signed_support examples") {
    SignSupport s = signed_support(mat({{0.5, -0.0005}}), 1e-3);
    CHECK(s(0, 0) == 1);
    CHECK(s(0, 1) == 0);
    const CoefMatrix m = mat({{0.5, -1e-9}, {0, -3}});
    SignSupport exact = signed_support(m, 0.0);
    CHECK(exact(0, 0) == 1);
    CHECK(exact(0, 1) == -1);
    CHECK(exact(1, 0) == 0);
    CHECK(exact(1, 1) == -1);
    CHECK((signed_support(CoefMatrix::Zero(2, 2)).array() == 0).all());
}

TEST_CASE("filtering at increasing thresholds composes") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const CoefMatrix m = random_matrix(rng, 5, 3);
        const double t1 = u(rng), t2 = t1 + u(rng);
        CHECK(signed_support(filter_small(m, t1), t2) == signed_support(m, t2));
        CHECK(filter_small(filter_small(m, t1), t2) == filter_small(m, t2));
    }
}

TEST_CASE("sparsity_stats examples") {
    auto a = sparsity_stats(mat({{3, 3, 1}}));
    CHECK(a.d_stat == 3);
    CHECK(a.m_stat == 2);

    auto z = sparsity_stats(CoefMatrix::Zero(4, 2));
    CHECK(z.row_support.empty());
    CHECK(z.support.empty());
    CHECK(z.d_stat == 0);
    CHECK(z.m_stat == SparsityStats::kNoRows);

    auto b = sparsity_stats(mat({{2, 0}, {0, -1}}));
    CHECK(b.support == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
    CHECK(b.row_support == std::vector<std::size_t>{0, 1});
    CHECK(b.d_stat == 1);
    CHECK(b.m_stat == 1);
}

TEST_CASE("sparsity_stats ties use a relative tolerance and respect the filter") {
    auto a = sparsity_stats(mat({{1.0, -1.0 * (1 + 1e-12), 0.5}}));
    CHECK(a.m_stat == 2);
    auto b = sparsity_stats(mat({{1.0, 1.0 - 1e-6}}));
    CHECK(b.m_stat == 1);
    auto c = sparsity_stats(mat({{0.0005, 0}, {0, 0}}), 1e-3);
    CHECK(c.row_support.empty());
}

TEST_CASE("sparsity_stats bounds on random matrices") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 300; ++t) {
        const int p = 1 + t % 7, r = 1 + t % 5;
        const auto st = sparsity_stats(random_matrix(rng, p, r));
        CHECK(st.d_stat <= static_cast<std::size_t>(r));
        CHECK(st.support.size() <= static_cast<std::size_t>(p * r));
        if (!st.row_support.empty())
            CHECK(st.m_stat >= 1);
    }
}

TEST_CASE("max_magnitude_set") {
    const CoefMatrix m = mat({{-2, 2, 1}, {0, 0, 0}});
    CHECK(max_magnitude_set(m, 0) == std::vector<std::size_t>{0, 1});
    CHECK(max_magnitude_set(m, 1).empty());
}

TEST_CASE("RegPair validation") {
    CHECK_NOTHROW((RegPair{1.0, 1.5}.validate(2)));
    CHECK_THROWS_AS((RegPair{1.0, 2.0}.validate(2)), IntegerRatioError);
    CHECK_THROWS_AS((RegPair{1.0, 2.0 + 1e-10}.validate(3)), IntegerRatioError);
    CHECK_THROWS_AS((RegPair{1.0, 0.9}.validate(2)), std::invalid_argument);
    CHECK_THROWS_AS((RegPair{1.0, 2.5}.validate(2)), std::invalid_argument);
    CHECK_THROWS_AS((RegPair{0.0, 1.5}.validate(2)), std::invalid_argument);
    CHECK_THROWS_AS((RegPair{-1.0, -1.5}.validate(2)), std::invalid_argument);
    CHECK_NOTHROW((RegPair{1.0, 2.5}.validate(3)));
}

TEST_CASE("MultiTaskProblem validation") {
    MultiTaskProblem pr;
    CHECK_THROWS(pr.validate());
    pr.designs = {Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 2)};
    pr.responses = {Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)};
    CHECK_NOTHROW(pr.validate());
    CHECK(pr.tasks() == 2);
    CHECK(pr.samples() == 3);
    CHECK(pr.features() == 2);
    pr.responses[1] = Eigen::VectorXd::Ones(4);
    CHECK_THROWS(pr.validate());
    pr.responses[1] = Eigen::VectorXd::Ones(3);
    pr.designs[1] = Eigen::MatrixXd::Ones(3, 3);
    CHECK_THROWS(pr.validate());
    pr.designs[1] = Eigen::MatrixXd::Ones(3, 2);
    pr.designs[0](0, 0) = std::nan("");
    CHECK_THROWS(pr.validate());
}

TEST_CASE("DirtyPair shape") {
    CHECK_THROWS(DirtyPair(CoefMatrix::Zero(2, 2), CoefMatrix::Zero(3, 2)));
    const DirtyPair p(mat({{1, 2}}), mat({{0.5, -2}}));
    CHECK(p.theta() == mat({{1.5, 0}}));
    const auto z = DirtyPair::zeros(4, 3);
    CHECK(z.features() == 4);
    CHECK(z.tasks() == 3);
}
