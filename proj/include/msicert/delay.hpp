// Sampling-induced delay operator: exact and bounded l2-gain characterization,
// sawtooth delay sequences, and direct application to finite signals.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace msicert {

// Vector-valued discrete-time signal, time-major.
using Signal = std::vector<Eigen::VectorXd>;

// Aperiodic sampling pattern: intervals h_k between consecutive sampling
// instants t_k, each bounded by 1 <= h_k <= hbar.
struct SamplingPattern {
    std::vector<int> intervals;
    int hbar = 1;

    SamplingPattern(std::vector<int> intervals_, int hbar_);

    // Sampling instants t_0 = 0, t_{k+1} = t_k + h_k.
    std::vector<int> instants() const;
    // Total covered horizon (sum of intervals).
    int coverage() const;
    // All-ones pattern of given length (periodic unit sampling).
    static SamplingPattern unit(int count);
    // Single interval of length h repeated `count` times.
    static SamplingPattern periodic(int h, int count, int hbar);
};

// Sawtooth delay tau(t): elapsed steps since the last sampling instant.
struct DelaySequence {
    std::vector<int> values;
};

enum class GainMode { Exact, Frobenius, Legacy };

const char* to_string(GainMode mode);
std::optional<GainMode> gain_mode_from_string(const std::string& s);

// Squared-gain bounds for the delay operator at a given interval bound.
struct DelayGainBundle {
    int hbar = 1;
    double exact_sq_gain = 0.0;      // lambda_max(E_hbar)
    double frobenius_sq_gain = 0.0;  // ||E_hbar||_F
    double legacy_sq_gain = 0.0;     // hbar (hbar - 1) / 2
    bool exact_substituted = false;  // Frobenius used in place of the eigenvalue
};

// The hbar x hbar matrix E whose largest eigenvalue is the exact squared
// l2 gain of the delay operator: E[i][j] = min(i, j) (0-indexed).
Eigen::MatrixXd build_E(int hbar);

// Largest eigenvalue of build_E(hbar), by dense symmetric eigensolver.
double exact_gain(int hbar);

// Frobenius norm of E: sqrt((1/6)(hbar-1) hbar (hbar^2 - hbar + 1)).
// Upper-bounds exact_gain as a squared-gain estimate.
double frobenius_gain(int hbar);

// Previously published squared-gain bound hbar (hbar - 1) / 2.
double legacy_gain(int hbar);

// Strictly lower triangular matrix of ones: the one-interval operator in the
// lifted domain. lifted_matrix(h) * lifted_matrix(h)^T == build_E(h).
Eigen::MatrixXd lifted_matrix(int hbar);

// All three bounds at once; for hbar beyond eig_threshold the eigenvalue is
// too expensive and the Frobenius bound is substituted for the exact gain.
DelayGainBundle gain_bundle(int hbar, int eig_threshold = 2000);

// Squared gain for the selected mode, with the same automatic substitution.
double gain_for_mode(int hbar, GainMode mode, int eig_threshold = 2000);

// Sawtooth sequence of length `horizon` induced by the pattern. The pattern
// must cover the horizon.
DelaySequence delay_sequence(const SamplingPattern& pattern, int horizon);

// e(t) = sum_{i=t-tau(t)}^{t-1} y(i), evaluated by the telescoping recursion
// e(t_k) = 0, e(t+1) = e(t) + y(t) inside an interval.
Signal apply_delay(const Signal& y, const SamplingPattern& pattern);

}  // namespace msicert
