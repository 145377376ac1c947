#include <doctest.h>

#include <cmath>
#include <set>

#include "dirty/synth.hpp"

using namespace dirty;

TEST_CASE("support sizes") {
    InstanceSpec spec;
    CHECK(spec.support_size() == 12);
    spec.alpha = 2.0 / 3.0;
    CHECK(spec.shared_count() == 8);
    CHECK(spec.effective_alpha() == doctest::Approx(2.0 / 3.0));
    spec.seed = 5;
    const Instance inst = generate_instance(spec);
    CHECK(inst.truth.shared_rows.size() == 8);
    std::size_t rows = 0;
    for (Eigen::Index j = 0; j < inst.truth.theta_bar.rows(); ++j)
        rows += inst.truth.theta_bar.row(j).cwiseAbs().maxCoeff() > 0;
    CHECK(rows == 16);

    spec.alpha = 0.3; // 3.6 shared rows round to 4
    CHECK(spec.shared_count() == 4);
    CHECK(spec.effective_alpha() == doctest::Approx(4.0 / 12.0));

    InstanceSpec tight;
    tight.p = 10;
    tight.s = 6;
    tight.alpha = 0.0;
    CHECK_THROWS_AS(tight.validate(), std::invalid_argument);
}

TEST_CASE("generation is deterministic in the seed") {
    InstanceSpec spec;
    spec.n = 40;
    spec.seed = 77;
    const Instance a = generate_instance(spec);
    const Instance b = generate_instance(spec);
    CHECK(a.truth.theta_bar == b.truth.theta_bar);
    CHECK(a.train.designs[0] == b.train.designs[0]);
    CHECK(a.test.responses[1] == b.test.responses[1]);
    spec.seed = 78;
    const Instance c = generate_instance(spec);
    CHECK(a.truth.theta_bar != c.truth.theta_bar);
}

TEST_CASE("truth invariants") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        InstanceSpec spec;
        spec.n = 10;
        spec.seed = seed;
        spec.alpha = static_cast<double>(seed % 5) / 4.0;
        const Instance inst = generate_instance(spec);
        const CoefMatrix& t = inst.truth.theta_bar;
        const std::set<std::size_t> shared(inst.truth.shared_rows.begin(), inst.truth.shared_rows.end());
        for (Eigen::Index k = 0; k < t.cols(); ++k) {
            CHECK(static_cast<std::size_t>((t.col(k).array() != 0.0).count()) == spec.support_size());
            CHECK(inst.truth.task_support(static_cast<std::size_t>(k)).size() == spec.support_size());
        }
        for (Eigen::Index j = 0; j < t.rows(); ++j) {
            const bool sh = shared.count(static_cast<std::size_t>(j)) > 0;
            if (sh) {
                CHECK(std::abs(t(j, 0)) == std::abs(t(j, 1)));
                CHECK(std::abs(t(j, 0)) >= spec.magnitude_lo);
                CHECK(std::abs(t(j, 0)) <= spec.magnitude_hi);
            } else {
                CHECK((t(j, 0) == 0.0 || t(j, 1) == 0.0));
            }
        }
        CHECK(inst.train.samples() == 10);
        CHECK(inst.test.samples() == 10);
        CHECK(inst.truth.sign_support == signed_support(t));
    }
}

TEST_CASE("theta rescalings") {
    CHECK(overlap_log(128, 12, 2.0 / 3.0) == doctest::Approx(std::log(112.0)));
    CHECK(n_for_theta(1.0, 128, 12, 2.0 / 3.0) == 75);
    for (std::size_t n : {20u, 75u, 300u, 1000u})
        CHECK(n_for_theta(theta_rescale(n, 128, 12, 0.5), 128, 12, 0.5) == n);
    CHECK(figure_theta(300, 128, 12, 0.5) == doctest::Approx(300.0 / (12 * std::log(110.0))));
    CHECK(n_for_figure_theta(figure_theta(300, 128, 12, 0.5), 128, 12, 0.5) == 300);
    CHECK(lasso_theta(300, 128, 12) == doctest::Approx(300.0 / (12 * std::log(116.0))));
    CHECK(n_for_theta(1e-6, 128, 12, 0.5) == 1);
    CHECK_THROWS(overlap_log(24, 12, 0.0));
}

TEST_CASE("designs are standard Gaussian") {
    InstanceSpec spec;
    spec.n = 400;
    spec.seed = 3;
    const Instance inst = generate_instance(spec);
    const Eigen::MatrixXd& x = inst.train.designs[0];
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
    CHECK(inst.train.designs[0] != inst.train.designs[1]);
    CHECK(inst.train.designs[0] != inst.test.designs[0]);
}
