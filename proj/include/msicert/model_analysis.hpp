// Model-based stability certification for aperiodically sampled LTI loops:
// the time-domain LMI test, the frequency-grid check, and the scalar
// closed-form region.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "msicert/delay.hpp"
#include "msicert/lmi.hpp"

namespace msicert {

struct SystemModel {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x m
    Eigen::MatrixXd K;  // m x n feedback gain

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    Eigen::MatrixXd closed_loop() const { return A + B * K; }
    void validate() const;
};

enum class Verdict { Certified, NotCertified, AssumptionViolated, NumericalFailure };

const char* to_string(Verdict v);

struct Certificate {
    Verdict verdict = Verdict::NumericalFailure;
    int hbar = 0;
    GainMode gain_mode = GainMode::Exact;
    double gain_sq = 0.0;
    Eigen::MatrixXd S;  // Lyapunov multiplier witness
    Eigen::MatrixXd X;  // gain multiplier witness
    Eigen::MatrixXd Y;  // passivity multiplier witness
    lmi::LmiSolution::Diagnostics diagnostics;
    std::string note;
};

struct CertifyOptions {
    bool y_zero = false;        // pin the passivity multiplier to zero
    double epsilon = 1e-7;      // LMI strictness scale
    int eig_threshold = 2000;   // exact-gain eigenvalue cutoff
    lmi::SolverOptions solver;
};

// [[A+BK, BK], [I-A-BK, -BK]] -- the interconnection of the LTI part and the
// delay channel.
Eigen::MatrixXd closed_loop_blocks(const SystemModel& model);

// The stability LMI: variables S > 0, X > 0, Y >= 0 and one strict
// constraint, the congruence of diag([S, -S], Pi) with the tall
// [A+BK, BK; I, 0; I-A-BK, -BK; 0, I] factor.
lmi::LmiProblem model_stability_problem(const SystemModel& model, int hbar, GainMode mode,
                                 const CertifyOptions& opts = {});

Certificate certify_model(const SystemModel& model, int hbar, GainMode mode,
                          const CertifyOptions& opts = {});

// G(z) = (I-A-BK)(zI-(A+BK))^{-1} BK - BK at z = e^{j omega}.
Eigen::MatrixXcd transfer_function_value(const SystemModel& model, double omega);

struct FrequencyCheck {
    bool ok = false;
    double worst_omega = 0.0;
    double worst_value = 0.0;  // largest Hermitian-form eigenvalue over the grid
};

// Grid evaluation of the frequency-domain condition with fixed multipliers.
// Sufficient-only up to gridding; the rigorous path is the LMI test.
FrequencyCheck frequency_domain_check(const SystemModel& model, int hbar,
                                const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                int grid_size = 2048);

// Scalar loop x+ = a x + b u, K = 1: stabilizable for every interval bound iff
// a in (-1,1), b in (0,2), a+b in (-1,1).
bool scalar_region(double a, double b);

bool is_schur(const Eigen::MatrixXd& M, double tol = 1e-9);

}  // namespace msicert
