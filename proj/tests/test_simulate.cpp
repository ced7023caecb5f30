#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "msicert/simulate.hpp"

using namespace msicert;

namespace {

SystemModel benchmark_model() {
    SystemModel m;
    m.A.resize(2, 2);
    m.A << 1.0, 0.010000, 0.0, 0.999000;
    m.B.resize(2, 1);
    m.B << 5e-6, 1.000e-3;
    m.K.resize(1, 2);
    m.K << -3.75, -11.5;
    return m;
}

}  // namespace

TEST_CASE("unit sampling reproduces the closed-loop recursion") {
    const SystemModel m = benchmark_model();
    const Eigen::MatrixXd Acl = m.closed_loop();
    Eigen::VectorXd x0(2);
    x0 << 1.0, -0.5;
    const auto traj = closed_loop(m, SamplingPattern::unit(10), x0, 10);
    Eigen::VectorXd x = x0;
    for (int t = 0; t <= 10; ++t) {
        CHECK((traj[static_cast<size_t>(t)] - x).norm() <= 1e-14);
        x = Acl * x;
    }
}

TEST_CASE("zero input matrix gives open-loop powers") {
    SystemModel m = benchmark_model();
    m.B.setZero();
    Eigen::VectorXd x0(2);
    x0 << 2.0, 1.0;
    const auto traj = closed_loop(m, SamplingPattern({4, 4}, 4), x0, 8);
    Eigen::VectorXd x = x0;
    for (int t = 0; t <= 8; ++t) {
        CHECK((traj[static_cast<size_t>(t)] - x).norm() <= 1e-14);
        x = m.A * x;
    }
}

TEST_CASE("interval map closed forms") {
    const SystemModel m = benchmark_model();
    SUBCASE("h = 1 is the closed loop") {
        CHECK((interval_map(m, 1) - m.closed_loop()).norm() <= 1e-15);
    }
    SUBCASE("identity A degenerates the geometric sum") {
        SystemModel id = m;
        id.A = Eigen::MatrixXd::Identity(2, 2);
        const Eigen::MatrixXd want =
            Eigen::MatrixXd::Identity(2, 2) + 7.0 * id.B * id.K;
        CHECK((interval_map(id, 7) - want).norm() <= 1e-12);
    }
    SUBCASE("matches the recursion over one interval") {
        Eigen::VectorXd x0(2);
        x0 << 0.3, -1.1;
        const auto traj = closed_loop(m, SamplingPattern({7}, 7), x0, 7);
        const Eigen::VectorXd via_map = interval_map(m, 7) * x0;
        CHECK((traj.back() - via_map).norm() <= 1e-12 * via_map.norm());
    }
}

TEST_CASE("pattern of repeated intervals equals iterated interval maps") {
    const SystemModel m = benchmark_model();
    Eigen::VectorXd x0(2);
    x0 << 1.0, 1.0;
    const auto traj = closed_loop(m, SamplingPattern::periodic(5, 6, 5), x0, 30);
    const Eigen::MatrixXd phi = interval_map(m, 5);
    Eigen::VectorXd x = x0;
    for (int k = 0; k <= 6; ++k) {
        CHECK((traj[static_cast<size_t>(5 * k)] - x).norm() <= 1e-12 * (1.0 + x.norm()));
        x = phi * x;
    }
}

TEST_CASE("falsify flags an unstable interval map") {
    // a = 1.05 with weak feedback: phi(h) = 4 - 3 * 1.05^h leaves [-1, 1]
    // once the hold is long enough (h >= 11)
    SystemModel m;
    m.A = Eigen::MatrixXd::Constant(1, 1, 1.05);
    m.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
    m.K = Eigen::MatrixXd::Constant(1, 1, -0.2);
    const auto res = falsify(m, 12, 20, 200, 1);
    CHECK(res.growth > 1.0);
    CHECK_FALSE(res.worst_pattern.empty());
}

TEST_CASE("falsify finds no growth inside the arbitrary-interval region") {
    SystemModel m;
    m.A = Eigen::MatrixXd::Constant(1, 1, 0.4);
    m.B = Eigen::MatrixXd::Constant(1, 1, 0.5);
    m.K = Eigen::MatrixXd::Constant(1, 1, 1.0);
    const auto res = falsify(m, 50, 30, 500, 2);
    CHECK(res.growth < 1.0);
}

TEST_CASE("experiment generation") {
    const SystemModel m = benchmark_model();
    const Eigen::MatrixXd Bd = 0.01 * Eigen::MatrixXd::Identity(2, 2);
    SUBCASE("noise-free data reproduce the dynamics exactly") {
        const Experiment exp = generate_experiment(m, 50, 10.0, 0.0, Bd, 3);
        const Eigen::MatrixXd resid =
            exp.dataset.Xplus - m.A * exp.dataset.X - m.B * exp.dataset.U;
        CHECK(resid.norm() <= 1e-12);
    }
    SUBCASE("realized disturbance respects the quadratic budget") {
        const Experiment exp = generate_experiment(m, 200, 10.0, 0.01, Bd, 4);
        double energy = 0.0;
        for (int t = 0; t < 200; ++t) {
            const double nrm = exp.Dhat.col(t).norm();
            CHECK(nrm <= 0.01 + 1e-12);
            energy += nrm * nrm;
        }
        CHECK(energy <= 200 * 0.01 * 0.01 + 1e-12);
    }
    SUBCASE("deterministic per seed") {
        const Experiment a = generate_experiment(m, 30, 10.0, 0.005, Bd, 42);
        const Experiment b = generate_experiment(m, 30, 10.0, 0.005, Bd, 42);
        CHECK((a.states - b.states).norm() == 0.0);
        CHECK((a.inputs - b.inputs).norm() == 0.0);
        const Experiment c = generate_experiment(m, 30, 10.0, 0.005, Bd, 43);
        CHECK((a.states - c.states).norm() > 0.0);
    }
    SUBCASE("generated data always contain the truth") {
        for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
            const Experiment exp = generate_experiment(m, 120, 10.0, 0.002, Bd, seed);
            CHECK(membership(m.A, m.B, exp.dataset).inside);
        }
    }
}
