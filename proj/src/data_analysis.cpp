#include "msicert/data_analysis.hpp"

#include <stdexcept>

namespace msicert {

void DisturbanceModel::validate() const {
    const int N_ = N();
    const int nd_ = nd();
    if (Qd.cols() != N_ || Sd.rows() != N_ || Sd.cols() != nd_ || Rd.rows() != nd_ ||
        Rd.cols() != nd_)
        throw std::invalid_argument("DisturbanceModel: inconsistent dimensions");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Qd, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().maxCoeff() >= 0.0)
        throw std::invalid_argument("DisturbanceModel: Qd must be negative definite");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bd);
    if (qr.rank() < nd_)
        throw std::invalid_argument("DisturbanceModel: Bd must have full column rank");
}

DisturbanceModel norm_bound_disturbance(int N, int nd, double dbar,
                                        const Eigen::MatrixXd& Bd) {
    if (N < 1) throw std::invalid_argument("norm_bound_disturbance: N must be >= 1");
    if (dbar < 0) throw std::invalid_argument("norm_bound_disturbance: dbar < 0");
    if (Bd.cols() != nd)
        throw std::invalid_argument("norm_bound_disturbance: Bd column count != nd");
    DisturbanceModel d;
    d.Qd = -Eigen::MatrixXd::Identity(N, N);
    d.Sd = Eigen::MatrixXd::Zero(N, nd);
    d.Rd = dbar * dbar * static_cast<double>(N) * Eigen::MatrixXd::Identity(nd, nd);
    d.Bd = Bd;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bd);
    if (qr.rank() < nd)
        throw std::invalid_argument("norm_bound_disturbance: Bd rank deficient");
    return d;
}

void DataSet::validate() const {
    if (N() < 1) throw std::invalid_argument("DataSet: no samples");
    if (Xplus.rows() != n() || Xplus.cols() != N() || U.cols() != N())
        throw std::invalid_argument("DataSet: inconsistent column counts");
    if (disturbance.N() != N())
        throw std::invalid_argument("DataSet: disturbance horizon mismatch");
    if (disturbance.Bd.rows() != n())
        throw std::invalid_argument("DataSet: Bd row count != n");
}

namespace {

// P = [-X 0; -U 0; X+ Bd] [Qd Sd; Sd' Rd] (same)'
Eigen::MatrixXd assemble_P(const DataSet& ds) {
    const int n = ds.n(), m = ds.m(), N = ds.N(), nd = ds.disturbance.nd();
    Eigen::MatrixXd L(n + m + n, N + nd);
    L.setZero();
    L.block(0, 0, n, N) = -ds.X;
    L.block(n, 0, m, N) = -ds.U;
    L.block(n + m, 0, n, N) = ds.Xplus;
    L.block(n + m, N, n, nd) = ds.disturbance.Bd;
    Eigen::MatrixXd mid(N + nd, N + nd);
    mid.topLeftCorner(N, N) = ds.disturbance.Qd;
    mid.topRightCorner(N, nd) = ds.disturbance.Sd;
    mid.bottomLeftCorner(nd, N) = ds.disturbance.Sd.transpose();
    mid.bottomRightCorner(nd, nd) = ds.disturbance.Rd;
    Eigen::MatrixXd P = L * mid * L.transpose();
    return 0.5 * (P + P.transpose());
}

}  // namespace

QmiSet build_qmi(const DataSet& dataset, const QmiOptions& opts) {
    dataset.validate();
    dataset.disturbance.validate();
    QmiSet q;
    q.n = dataset.n();
    q.m = dataset.m();
    q.nd = dataset.disturbance.nd();
    q.P = assemble_P(dataset);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.P);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double magmax = ev.cwiseAbs().maxCoeff();
    const double zero_tol = opts.zero_eig_rel * std::max(1.0, magmax);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > zero_tol)
            ++q.positives;
        else if (ev(i) < -zero_tol)
            ++q.negatives;
        else
            ++q.zeros;
    }
    if (q.zeros > 0) {
        q.issue = "P_AB is singular";
        return q;
    }
    const double magmin = ev.cwiseAbs().minCoeff();
    q.condition = magmax / magmin;
    if (q.positives != q.nd) {
        q.issue = "P_AB has " + std::to_string(q.positives) +
                  " positive eigenvalues, expected " + std::to_string(q.nd);
        return q;
    }
    if (q.condition > opts.cond_threshold) {
        q.issue = "P_AB condition number " + std::to_string(q.condition) +
                  " exceeds threshold";
        return q;
    }

    // inverse via reciprocal-eigenvalue reassembly
    Eigen::MatrixXd Pinv =
        eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    Pinv = 0.5 * (Pinv + Pinv.transpose()).eval();
    // the consistency set is invariant under positive scaling of the QMI, so
    // the inverse is normalized for a well-scaled downstream LMI
    q.data_scale = Pinv.norm();
    Pinv /= q.data_scale;
    const int nm = q.n + q.m;
    q.Qtilde = Pinv.topLeftCorner(nm, nm);
    q.Stilde = Pinv.topRightCorner(nm, q.n);
    q.Rtilde = Pinv.bottomRightCorner(q.n, q.n);
    q.valid = true;
    return q;
}

MembershipResult membership(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const DataSet& dataset, double tol) {
    dataset.validate();
    const int n = dataset.n(), m = dataset.m();
    if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != m)
        throw std::invalid_argument("membership: candidate dimension mismatch");
    const Eigen::MatrixXd P = assemble_P(dataset);
    Eigen::MatrixXd ABI(n + m + n, n);
    ABI.topRows(n) = A.transpose();
    ABI.middleRows(n, m) = B.transpose();
    ABI.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd form = ABI.transpose() * P * ABI;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (form + form.transpose()),
                                                       Eigen::EigenvaluesOnly);
    MembershipResult res;
    res.min_eig = eig.eigenvalues().minCoeff();
    // tolerance relative to the form itself; P is orders of magnitude larger
    res.inside = res.min_eig >= -tol * std::max(1.0, form.norm());
    return res;
}

lmi::LmiProblem data_stability_problem(const Eigen::MatrixXd& K, const QmiSet& qmi, int hbar,
                                 GainMode mode, const CertifyOptions& opts) {
    if (!qmi.valid)
        throw std::invalid_argument("data_stability_problem: QMI set invalid: " + qmi.issue);
    if (hbar < 1) throw std::invalid_argument("data_stability_problem: hbar must be >= 1");
    const int n = qmi.n, m = qmi.m;
    if (K.rows() != m || K.cols() != n)
        throw std::invalid_argument("data_stability_problem: K dimension mismatch");
    const double gain_sq = gain_for_mode(hbar, mode, opts.eig_threshold);

    lmi::LmiProblem prob;
    prob.epsilon = opts.epsilon;
    const auto S = prob.add_variable("S", n, lmi::Cone::PosDef);
    const auto X = prob.add_variable("X", n, lmi::Cone::PosDef);
    std::optional<lmi::VariableRef> Y;
    if (!opts.y_zero) Y = prob.add_variable("Y", n, lmi::Cone::PosSemiDef);

    // outer factor rows (x+, x, y, e, z, w), columns (x, e, w)
    const int rows = 6 * n + m;
    Eigen::MatrixXd T(rows, 3 * n);
    T.setZero();
    const auto I = Eigen::MatrixXd::Identity(n, n);
    T.block(0, 2 * n, n, n) = I;         // x+ = w
    T.block(n, 0, n, n) = I;             // x
    T.block(2 * n, 0, n, n) = I;         // y = x - w
    T.block(2 * n, 2 * n, n, n) = -I;
    T.block(3 * n, n, n, n) = I;         // e
    T.block(4 * n, 0, n, n) = I;         // z = [x; K(x+e)]
    T.block(5 * n, 0, m, n) = K;
    T.block(5 * n, n, m, n) = K;
    T.block(5 * n + m, 2 * n, n, n) = I; // w

    // middle: diag([S, -S], Pi, [-Qtilde, Stilde; Stilde', -Rtilde])
    lmi::AffineExpr mid(rows);
    mid.add_block(S, 0, 0, 1.0);
    mid.add_block(S, n, n, -1.0);
    mid.add_block(X, 2 * n, 2 * n, gain_sq);
    mid.add_block(X, 3 * n, 3 * n, -1.0);
    if (Y) {
        mid.add_block(*Y, 2 * n, 2 * n, 1.0);
        mid.add_block(*Y, 2 * n, 3 * n, 1.0);
    }
    Eigen::MatrixXd data_block = Eigen::MatrixXd::Zero(rows, rows);
    const int z0 = 4 * n;
    const int w0 = 5 * n + m;
    data_block.block(z0, z0, n + m, n + m) = -qmi.Qtilde;
    data_block.block(z0, w0, n + m, n) = qmi.Stilde;
    data_block.block(w0, z0, n, n + m) = qmi.Stilde.transpose();
    data_block.block(w0, w0, n, n) = -qmi.Rtilde;
    mid.add_constant(data_block);

    prob.require_neg_def(mid.congruence(T));
    return prob;
}

Certificate certify_data(const DataSet& dataset, const Eigen::MatrixXd& K, int hbar,
                         GainMode mode, const CertifyOptions& opts) {
    Certificate cert;
    cert.hbar = hbar;
    cert.gain_mode = mode;
    cert.gain_sq = gain_for_mode(hbar, mode, opts.eig_threshold);

    const QmiSet qmi = build_qmi(dataset);
    if (!qmi.valid) {
        cert.verdict = Verdict::AssumptionViolated;
        cert.note = qmi.issue;
        return cert;
    }
    const lmi::LmiProblem prob = data_stability_problem(K, qmi, hbar, mode, opts);
    const lmi::LmiSolution sol = lmi::solve(prob, opts.solver);
    cert.diagnostics = sol.diagnostics;
    switch (sol.status) {
        case lmi::SolveStatus::Feasible: {
            cert.verdict = Verdict::Certified;
            cert.S = sol.witness.at("S");
            cert.X = sol.witness.at("X");
            cert.Y = opts.y_zero ? Eigen::MatrixXd::Zero(qmi.n, qmi.n)
                                 : sol.witness.at("Y");
            break;
        }
        case lmi::SolveStatus::Infeasible: cert.verdict = Verdict::NotCertified; break;
        case lmi::SolveStatus::NumericalFailure:
            cert.verdict = Verdict::NumericalFailure;
            break;
    }
    return cert;
}

}  // namespace msicert
