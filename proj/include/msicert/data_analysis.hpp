// Data-driven certification: disturbance-consistency set from a measured
// trajectory, its QMI parametrization, and the data-driven stability LMI.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "msicert/model_analysis.hpp"

namespace msicert {

// Quadratic disturbance bound: all D with [D'; I]' [Qd Sd; Sd' Rd] [D'; I] >= 0.
struct DisturbanceModel {
    Eigen::MatrixXd Qd;  // N x N, negative definite
    Eigen::MatrixXd Sd;  // N x nd
    Eigen::MatrixXd Rd;  // nd x nd
    Eigen::MatrixXd Bd;  // n x nd, full column rank

    int N() const { return static_cast<int>(Qd.rows()); }
    int nd() const { return static_cast<int>(Bd.cols()); }
    void validate() const;
};

// Sequence norm bound ||d(t)|| <= dbar: Qd = -I, Sd = 0, Rd = dbar^2 N I.
DisturbanceModel norm_bound_disturbance(int N, int nd, double dbar,
                                        const Eigen::MatrixXd& Bd);

struct DataSet {
    Eigen::MatrixXd Xplus;  // n x N, states 1..N
    Eigen::MatrixXd X;      // n x N, states 0..N-1
    Eigen::MatrixXd U;      // m x N, inputs 0..N-1
    DisturbanceModel disturbance;

    int n() const { return static_cast<int>(X.rows()); }
    int m() const { return static_cast<int>(U.rows()); }
    int N() const { return static_cast<int>(X.cols()); }
    void validate() const;
};

// QMI parametrization of the consistency set, with inverse blocks for the
// dualized form used by the stability LMI.
struct QmiSet {
    bool valid = false;
    std::string issue;  // assumption diagnostics when invalid

    Eigen::MatrixXd P;        // (n+m+n) square
    Eigen::MatrixXd Qtilde;   // (n+m) square block of P^{-1}
    Eigen::MatrixXd Stilde;   // (n+m) x n
    Eigen::MatrixXd Rtilde;   // n x n
    int negatives = 0, zeros = 0, positives = 0;
    double condition = 0.0;
    double data_scale = 1.0;  // Frobenius norm the inverse was normalized by
    int n = 0, m = 0, nd = 0;
};

struct QmiOptions {
    double cond_threshold = 1e12;
    double zero_eig_rel = 1e-14;  // eigenvalue magnitude treated as zero
};

// Assembles P from the data and disturbance geometry, computes its inverse
// by symmetric eigendecomposition, and validates invertibility plus the
// required inertia (exactly nd positive eigenvalues).
QmiSet build_qmi(const DataSet& dataset, const QmiOptions& opts = {});

// Direct QMI membership test of a candidate (A, B); independent of build_qmi.
struct MembershipResult {
    bool inside = false;
    double min_eig = 0.0;
};
MembershipResult membership(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const DataSet& dataset, double tol = 1e-9);

// The data-driven stability LMI: same multipliers as the model-based test,
// one strict constraint over the two-channel (delay + model uncertainty)
// interconnection with the dualized QMI blocks.
lmi::LmiProblem data_stability_problem(const Eigen::MatrixXd& K, const QmiSet& qmi, int hbar,
                                 GainMode mode, const CertifyOptions& opts = {});

Certificate certify_data(const DataSet& dataset, const Eigen::MatrixXd& K, int hbar,
                         GainMode mode, const CertifyOptions& opts = {});

}  // namespace msicert
