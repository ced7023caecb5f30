#include "msicert/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace msicert {

std::vector<Eigen::VectorXd> closed_loop(const SystemModel& model,
                                         const SamplingPattern& pattern,
                                         const Eigen::VectorXd& x0, int horizon) {
    model.validate();
    if (x0.size() != model.n()) throw std::invalid_argument("closed_loop: x0 dimension");
    if (horizon < 1) throw std::invalid_argument("closed_loop: horizon must be >= 1");
    if (pattern.coverage() < horizon)
        throw std::invalid_argument("closed_loop: pattern does not cover horizon");

    std::vector<Eigen::VectorXd> x;
    x.reserve(static_cast<size_t>(horizon) + 1);
    x.push_back(x0);
    Eigen::VectorXd held = model.K * x0;
    const DelaySequence tau = delay_sequence(pattern, horizon);
    for (int t = 0; t < horizon; ++t) {
        if (tau.values[static_cast<size_t>(t)] == 0) held = model.K * x.back();
        x.push_back(model.A * x.back() + model.B * held);
    }
    return x;
}

Eigen::MatrixXd interval_map(const SystemModel& model, int h) {
    model.validate();
    if (h < 1) throw std::invalid_argument("interval_map: h must be >= 1");
    const int n = model.n();
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Asum = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < h; ++i) {
        Asum += Apow;
        Apow = model.A * Apow;
    }
    return Apow + Asum * model.B * model.K;
}

SamplingPattern random_pattern(int hbar, int min_coverage, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(1, hbar);
    std::vector<int> intervals;
    int covered = 0;
    while (covered < min_coverage) {
        const int h = dist(rng);
        intervals.push_back(h);
        covered += h;
    }
    return SamplingPattern(std::move(intervals), hbar);
}

FalsifyResult falsify(const SystemModel& model, int hbar, int trials, int horizon,
                      std::uint64_t seed) {
    model.validate();
    if (hbar < 1 || trials < 1 || horizon < 1)
        throw std::invalid_argument("falsify: bad arguments");
    const int n = model.n();

    // phi(h) = A^h + (sum_{i<h} A^i) B K, built incrementally
    std::vector<Eigen::MatrixXd> phi;
    phi.reserve(static_cast<size_t>(hbar));
    const Eigen::MatrixXd BK = model.B * model.K;
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Asum = Eigen::MatrixXd::Zero(n, n);
    for (int h = 1; h <= hbar; ++h) {
        Asum += Apow;
        Apow = model.A * Apow;
        phi.push_back(Apow + Asum * BK);
    }

    FalsifyResult best;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto run = [&](const std::vector<int>& intervals, const Eigen::VectorXd& x0) {
        Eigen::VectorXd x = x0;
        for (int h : intervals) x = phi[static_cast<size_t>(h - 1)] * x;
        const double g = x.norm() / x0.norm();
        if (g > best.growth) {
            best.growth = g;
            best.worst_pattern = intervals;
        }
    };

    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0(i) = gauss(rng);
        x0.normalize();

        // random pattern
        std::vector<int> intervals;
        {
            std::uniform_int_distribution<int> dist(1, hbar);
            int covered = 0;
            while (covered < horizon) {
                const int h = dist(rng);
                intervals.push_back(h);
                covered += h;
            }
        }
        run(intervals, x0);

        // greedy pattern: pick the interval maximizing one-step growth
        intervals.clear();
        Eigen::VectorXd x = x0;
        int covered = 0;
        while (covered < horizon) {
            int besth = 1;
            double bestnorm = -1.0;
            for (int h = 1; h <= hbar; ++h) {
                const double v = (phi[static_cast<size_t>(h - 1)] * x).norm();
                if (v > bestnorm) {
                    bestnorm = v;
                    besth = h;
                }
            }
            intervals.push_back(besth);
            covered += besth;
            x = phi[static_cast<size_t>(besth - 1)] * x;
        }
        run(intervals, x0);
    }
    return best;
}

Experiment generate_experiment(const SystemModel& model_true, int N, double input_range,
                               double dbar, const Eigen::MatrixXd& Bd,
                               std::uint64_t seed) {
    model_true.validate();
    if (N < 1) throw std::invalid_argument("generate_experiment: N must be >= 1");
    if (input_range < 0 || dbar < 0)
        throw std::invalid_argument("generate_experiment: negative range");
    if (Bd.rows() != model_true.n())
        throw std::invalid_argument("generate_experiment: Bd row count != n");
    const int n = model_true.n(), m = model_true.m();
    const int nd = static_cast<int>(Bd.cols());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-input_range, input_range);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd states(n, N + 1), inputs(m, N), D(nd, N);
    states.col(0).setZero();
    for (int t = 0; t < N; ++t) {
        for (int i = 0; i < m; ++i) inputs(i, t) = uni(rng);
        // uniform in the dbar-ball: direction from a normalized Gaussian,
        // radius dbar * u^{1/nd}
        Eigen::VectorXd g(nd);
        for (int i = 0; i < nd; ++i) g(i) = gauss(rng);
        const double gn = g.norm();
        if (gn > 0 && dbar > 0)
            D.col(t) = dbar * std::pow(unit(rng), 1.0 / static_cast<double>(nd)) * g / gn;
        else
            D.col(t).setZero();
        states.col(t + 1) =
            model_true.A * states.col(t) + model_true.B * inputs.col(t) + Bd * D.col(t);
    }

    Experiment exp;
    exp.states = states;
    exp.inputs = inputs;
    exp.Dhat = D;
    exp.dataset.Xplus = states.rightCols(N);
    exp.dataset.X = states.leftCols(N);
    exp.dataset.U = inputs;
    exp.dataset.disturbance = norm_bound_disturbance(N, nd, dbar, Bd);
    return exp;
}

}  // namespace msicert
