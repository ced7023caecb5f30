// Hard static IQC multipliers for the delay operator (combined gain +
// input-feedforward passivity) and empirical verification on finite signals.
#pragma once

#include <Eigen/Dense>

#include "msicert/delay.hpp"

namespace msicert {

// Multipliers defining Pi = [gain_sq*X + Y, Y; Y, -X] with X > 0, Y >= 0.
struct MultiplierSet {
    Eigen::MatrixXd X;   // gain multiplier, symmetric positive definite
    Eigen::MatrixXd Y;   // passivity multiplier, symmetric positive semidefinite
    double gain_sq = 0;  // scalar multiplying X, normally lambda_max(E_hbar)
};

struct IqcCheckResult {
    bool ok = false;
    std::vector<double> partial_sums;  // one entry per truncation T = 0..horizon-1
    double worst = 0.0;                // most negative partial sum
};

// Assembles the combined multiplier Pi. Throws on dimension mismatch or
// indefinite X.
Eigen::MatrixXd assemble_pi(const MultiplierSet& ms, double tol = 1e-9);

// Checks sum_{t=0}^{T} [y;e]' Pi [y;e] >= -tol for every truncation T.
IqcCheckResult check_iqc(const Signal& y, const Signal& e, const Eigen::MatrixXd& pi,
                         double tol = 1e-9);

// Evaluates the input-feedforward passivity inequality
//   sum_t (y' Y e + c y' Y y) >= 0  on every truncation, with e = delay(y).
// The factor c defaults to 1/2, the smallest value for which it holds.
IqcCheckResult check_passivity(const Signal& y, const SamplingPattern& pattern,
                               const Eigen::MatrixXd& Y, double factor = 0.5,
                               double tol = 1e-9);

// Smallest eigenvalue of a symmetric matrix (helper shared with tests).
double min_eigenvalue(const Eigen::MatrixXd& M);

}  // namespace msicert
