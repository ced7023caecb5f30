// Closed-loop simulation under arbitrary sampling patterns, experiment
// generation for the data-driven pipeline, and heuristic falsification.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "msicert/data_analysis.hpp"
#include "msicert/delay.hpp"
#include "msicert/model_analysis.hpp"

namespace msicert {

// States x(0..horizon); the input is held at K x(t_k) between samples.
std::vector<Eigen::VectorXd> closed_loop(const SystemModel& model,
                                         const SamplingPattern& pattern,
                                         const Eigen::VectorXd& x0, int horizon);

// One-interval transition Phi(h) = A^h + (sum_{i<h} A^i) B K.
Eigen::MatrixXd interval_map(const SystemModel& model, int h);

SamplingPattern random_pattern(int hbar, int min_coverage, std::mt19937_64& rng);

struct FalsifyResult {
    double growth = 0.0;             // max ||x(horizon)|| / ||x0|| found
    std::vector<int> worst_pattern;  // intervals achieving it
};

// Random + greedy pattern search for trajectories that grow; absence of
// growth is evidence, not proof.
FalsifyResult falsify(const SystemModel& model, int hbar, int trials, int horizon,
                      std::uint64_t seed = 0);

struct Experiment {
    DataSet dataset;
    Eigen::MatrixXd Dhat;      // realized disturbance, nd x N (test-only)
    Eigen::MatrixXd states;    // n x (N+1) full trajectory
    Eigen::MatrixXd inputs;    // m x N
};

// Open-loop experiment x+ = A x + B u + Bd d with u uniform on
// [-input_range, input_range] and d uniform in the dbar-ball; deterministic
// per seed.
Experiment generate_experiment(const SystemModel& model_true, int N, double input_range,
                               double dbar, const Eigen::MatrixXd& Bd,
                               std::uint64_t seed);

}  // namespace msicert
