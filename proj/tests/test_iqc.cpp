#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "msicert/iqc.hpp"

using namespace msicert;

namespace {

Signal random_signal(int horizon, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Signal y;
    for (int t = 0; t < horizon; ++t) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = g(rng);
        y.push_back(v);
    }
    return y;
}

SamplingPattern random_covering_pattern(int hbar, int horizon, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> hdist(1, hbar);
    std::vector<int> intervals;
    int cov = 0;
    while (cov < horizon) {
        const int h = hdist(rng);
        intervals.push_back(h);
        cov += h;
    }
    return SamplingPattern(intervals, hbar);
}

Eigen::MatrixXd random_psd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    return M * M.transpose();
}

}  // namespace

TEST_CASE("assemble_pi block layout") {
    SUBCASE("pure gain, scalar") {
        const Eigen::MatrixXd pi = assemble_pi(
            {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1), 1.0});
        Eigen::MatrixXd want(2, 2);
        want << 1, 0, 0, -1;
        CHECK((pi - want).norm() == 0.0);
    }
    SUBCASE("scalar with passivity and the exact gain at hbar 3") {
        const double lam = (3.0 + std::sqrt(5.0)) / 2.0;
        const Eigen::MatrixXd pi = assemble_pi(
            {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1), lam});
        CHECK(pi(0, 0) == doctest::Approx((5.0 + std::sqrt(5.0)) / 2.0));
        CHECK(pi(0, 1) == doctest::Approx(1.0));
        CHECK(pi(1, 0) == doctest::Approx(1.0));
        CHECK(pi(1, 1) == doctest::Approx(-1.0));
    }
    SUBCASE("block identity") {
        const Eigen::MatrixXd pi = assemble_pi(
            {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2), 1.0});
        Eigen::VectorXd diag(4);
        diag << 1, 1, -1, -1;
        CHECK((pi - Eigen::MatrixXd(diag.asDiagonal())).norm() == 0.0);
    }
    SUBCASE("indefinite X rejected") {
        CHECK_THROWS_AS(assemble_pi({-Eigen::MatrixXd::Identity(1, 1),
                                     Eigen::MatrixXd::Zero(1, 1), 1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("check_iqc basics") {
    std::mt19937_64 rng(3);
    SUBCASE("zero signals pass with all partial sums zero") {
        Signal z(4, Eigen::VectorXd::Zero(2));
        const auto res = check_iqc(z, z, assemble_pi({Eigen::MatrixXd::Identity(2, 2),
                                                      Eigen::MatrixXd::Zero(2, 2), 1.0}));
        CHECK(res.ok);
        for (double s : res.partial_sums) CHECK(s == 0.0);
    }
    SUBCASE("delayed signals satisfy the combined IQC with the exact gain") {
        const int hbar = 6;
        const auto pattern = random_covering_pattern(hbar, 50, rng);
        const Signal y = random_signal(50, 2, rng);
        const Signal e = apply_delay(y, pattern);
        const Eigen::MatrixXd X = random_psd(2, rng) + Eigen::MatrixXd::Identity(2, 2);
        const Eigen::MatrixXd Y = random_psd(2, rng);
        const auto res = check_iqc(y, e, assemble_pi({X, Y, exact_gain(hbar)}));
        CHECK(res.ok);
    }
    SUBCASE("amplified error violates the pure-gain IQC") {
        const int hbar = 4;
        const Signal y = random_signal(20, 2, rng);
        Signal e;
        const double factor = 2.0 * legacy_gain(hbar);
        for (const auto& v : y) e.push_back(factor * v);
        const auto res = check_iqc(
            y, e, assemble_pi({Eigen::MatrixXd::Identity(2, 2),
                               Eigen::MatrixXd::Zero(2, 2), legacy_gain(hbar)}));
        CHECK_FALSE(res.ok);
    }
    SUBCASE("dimension mismatch") {
        Signal y(3, Eigen::VectorXd::Zero(2));
        Signal e(2, Eigen::VectorXd::Zero(2));
        CHECK_THROWS_AS(check_iqc(y, e, Eigen::MatrixXd::Zero(4, 4)),
                        std::invalid_argument);
    }
}

TEST_CASE("passivity boundary case: partial sums (0.5, 0)") {
    Signal y;
    y.push_back(Eigen::VectorXd::Constant(1, 1.0));
    y.push_back(Eigen::VectorXd::Constant(1, -1.0));
    const auto res =
        check_passivity(y, SamplingPattern({2}, 2), Eigen::MatrixXd::Identity(1, 1));
    CHECK(res.ok);
    REQUIRE(res.partial_sums.size() == 2);
    CHECK(res.partial_sums[0] == doctest::Approx(0.5));
    CHECK(res.partial_sums[1] == doctest::Approx(0.0));
}

TEST_CASE("indefinite passivity multiplier is rejected") {
    Signal y(3, Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(check_passivity(y, SamplingPattern({3}, 3),
                                    -Eigen::MatrixXd::Identity(1, 1)),
                    std::invalid_argument);
}

TEST_CASE("any factor below one half admits a counterexample") {
    Signal y;
    y.push_back(Eigen::VectorXd::Constant(1, 1.0));
    y.push_back(Eigen::VectorXd::Constant(1, -1.0));
    for (double c : {0.49, 0.4, 0.25}) {
        const auto res = check_passivity(y, SamplingPattern({2}, 2),
                                         Eigen::MatrixXd::Identity(1, 1), c);
        CHECK_FALSE(res.ok);
    }
}

TEST_CASE("unit sampling reduces passivity sums to the feedforward term") {
    std::mt19937_64 rng(17);
    const Signal y = random_signal(12, 2, rng);
    const Eigen::MatrixXd Y = random_psd(2, rng);
    const auto res = check_passivity(y, SamplingPattern::unit(12), Y);
    CHECK(res.ok);
    double acc = 0.0;
    for (size_t t = 0; t < y.size(); ++t) {
        acc += 0.5 * y[t].dot(Y * y[t]);
        CHECK(res.partial_sums[t] == doctest::Approx(acc));
    }
}

TEST_CASE("passivity fuzz across dimensions and patterns") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> ndist(1, 4), hdist(1, 8), tdist(8, 64);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = ndist(rng);
        const int hbar = hdist(rng);
        const int horizon = tdist(rng);
        const auto pattern = random_covering_pattern(hbar, horizon, rng);
        const Signal y = random_signal(horizon, n, rng);
        const Eigen::MatrixXd Y = random_psd(n, rng);
        CHECK(check_passivity(y, pattern, Y).ok);
    }
}

TEST_CASE("conic combinations of satisfied IQCs stay satisfied") {
    std::mt19937_64 rng(31);
    const int hbar = 5;
    const auto pattern = random_covering_pattern(hbar, 40, rng);
    const Signal y = random_signal(40, 2, rng);
    const Signal e = apply_delay(y, pattern);
    const Eigen::MatrixXd X = random_psd(2, rng) + Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd Y = random_psd(2, rng);
    const double lam = exact_gain(hbar);

    const Eigen::MatrixXd pi_gain = assemble_pi({X, Eigen::MatrixXd::Zero(2, 2), lam});
    Eigen::MatrixXd pi_pass(4, 4);
    pi_pass << Y, Y, Y, Eigen::MatrixXd::Zero(2, 2);
    REQUIRE(check_iqc(y, e, pi_gain).ok);
    REQUIRE(check_iqc(y, e, pi_pass).ok);
    for (double a : {0.0, 0.3, 2.0})
        for (double b : {0.0, 1.0, 5.0})
            CHECK(check_iqc(y, e, a * pi_gain + b * pi_pass).ok);
}
