#include "random_density.hpp"
#include "test_util.hpp"

#include "tpmbm/pmbm_density.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace tpmbm;
using namespace tpmbm::testing;

TEST_CASE("log-domain helpers") {
    CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
    CHECK(log_add(kNegInf, 1.5) == 1.5);
    CHECK(log_sum_exp({kNegInf, kNegInf}) == kNegInf);
    CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));

    std::vector<GlobalHypothesis> h{{std::log(1.0), {}}, {std::log(3.0), {}}};
    normalize_hypotheses(h);
    CHECK(std::exp(h[0].log_weight) == doctest::Approx(0.25));
    CHECK(log_normalizer(h) == doctest::Approx(0.0));
    std::vector<GlobalHypothesis> dead{{kNegInf, {}}};
    CHECK_THROWS_AS(normalize_hypotheses(dead), std::runtime_error);
}

TEST_CASE("association history is persistent and ordered") {
    const AssocHistory a = AssocHistory{}.extended({0, 1}).extended({2, 0});
    const AssocHistory b = a.extended({3, 4});
    CHECK(a.size() == 2);
    CHECK(b.size() == 3);
    const auto e = b.entries();
    REQUIRE(e.size() == 3);
    CHECK(e.front() == MeasurementRef{0, 1});
    CHECK(e.back() == MeasurementRef{3, 4});
    CHECK(AssocHistory::from_entries(e).entries() == e);
    CHECK(AssocHistory{}.empty());
}

TEST_CASE("density validation") {
    TestRng rng(5);
    const MotionModel motion = constant_velocity(1.0, 1.0, 0.9);
    PmbmDensity d = random_density(rng, motion, 3, true);
    CHECK_NOTHROW(validate_density(d));
    CHECK(best_hypothesis(d) < d.hypotheses.size());

    PmbmDensity bad = d;
    bad.hypotheses[0].leaves.push_back(0);
    CHECK_THROWS_AS(validate_density(bad), std::invalid_argument);
    bad = d;
    bad.hypotheses[0].leaves[0] = 99;
    CHECK_THROWS_AS(validate_density(bad), std::invalid_argument);
    bad = d;
    bad.tracks[0].leaves[0].existence = 1.5;
    CHECK_THROWS_AS(validate_density(bad), std::invalid_argument);
    bad = d;
    bad.hypotheses.clear();
    CHECK_THROWS_AS(validate_density(bad), std::invalid_argument);
}

TEST_CASE("expected live count adds undetected and Bernoulli mass") {
    TrajectoryMixture u;
    u.components.push_back(MixtureComponent{0.5, 2, 2, InfoGaussian::from_moments(Vector::Zero(1), Matrix::Identity(1, 1))});
    PmbmDensity d = PmbmDensity::with_undetected(u, 2);
    CHECK(d.hypotheses.size() == 1);
    CHECK(expected_live_count(d) == doctest::Approx(0.5));

    Bernoulli b;
    b.existence = 0.8;
    b.density.components.push_back(MixtureComponent{1.0, 1, 2,
        InfoGaussian::from_moments(Vector::Zero(1), Matrix::Identity(1, 1)).predicted(Matrix::Identity(1, 1), Matrix::Identity(1, 1))});
    d.tracks.push_back(Track{{1, 0}, {b}});
    d.hypotheses[0].leaves.push_back(0);
    CHECK(expected_live_count(d) == doctest::Approx(1.3));
}

TEST_CASE("marginalization to a target Bernoulli") {
    Bernoulli b;
    b.existence = 0.6;
    const Matrix i2 = Matrix::Identity(2, 2);
    const InfoGaussian g1 = InfoGaussian::from_moments(Vector{{1.0, 0.0}}, i2);
    const InfoGaussian g2 = InfoGaussian::from_moments(Vector{{3.0, 0.0}}, i2);
    b.density.components = {MixtureComponent{0.25, 4, 4, g1}, MixtureComponent{0.5, 4, 4, g2},
                            MixtureComponent{0.25, 3, 3, g1}};
    const TargetBernoulli t = marginalize_to_target(b, 4);
    CHECK(t.existence == doctest::Approx(0.45));
    REQUIRE(t.density.size() == 2);
    CHECK(t.density[0].weight == doctest::Approx(1.0 / 3.0));
    const TargetBernoulli c = marginalize_to_target(b, 4, true);
    REQUIRE(c.density.size() == 1);
    // Moment matching: mean 1/3*1 + 2/3*3, variance 1 + spread.
    CHECK(c.density[0].moments.mean(0) == doctest::Approx(7.0 / 3.0));
    CHECK(c.density[0].moments.cov(0, 0) == doctest::Approx(1.0 + (1.0 / 3.0) * (2.0 / 3.0) * 4.0));
}
