#include "msicert/lmi.hpp"

#include <stdexcept>

namespace msicert::lmi {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "?";
}

AffineExpr::AffineExpr(int dim) : dim_(dim), constant_(Eigen::MatrixXd::Zero(dim, dim)) {
    if (dim < 1) throw std::invalid_argument("AffineExpr: dimension must be >= 1");
}

AffineExpr AffineExpr::constant_expr(const Eigen::MatrixXd& C) {
    AffineExpr e(static_cast<int>(C.rows()));
    e.add_constant(C);
    return e;
}

void AffineExpr::add_constant(const Eigen::MatrixXd& C) {
    if (C.rows() != dim_ || C.cols() != dim_)
        throw std::invalid_argument("AffineExpr: constant dimension mismatch");
    constant_ += 0.5 * (C + C.transpose());
}

void AffineExpr::add_block(const VariableRef& v, int row, int col, double scale) {
    if (row < 0 || col < 0 || row + v.dim > dim_ || col + v.dim > dim_)
        throw std::invalid_argument("AffineExpr: block out of range");
    int offset = 0;
    for (int j = 0; j < v.dim; ++j) {
        for (int i = 0; i <= j; ++i, ++offset) {
            const int idx = v.base + offset;
            auto it = coeffs_.find(idx);
            if (it == coeffs_.end())
                it = coeffs_.emplace(idx, Eigen::MatrixXd::Zero(dim_, dim_)).first;
            Eigen::MatrixXd& A = it->second;
            // variable basis: e_i e_j' + e_j e_i' (i < j), e_i e_i' (i == j)
            A(row + i, col + j) += scale;
            if (i != j) A(row + j, col + i) += scale;
            if (row != col) {
                A(col + j, row + i) += scale;
                if (i != j) A(col + i, row + j) += scale;
            }
        }
    }
}

AffineExpr AffineExpr::congruence(const Eigen::MatrixXd& T) const {
    if (T.rows() != dim_) throw std::invalid_argument("AffineExpr: congruence dims");
    AffineExpr out(static_cast<int>(T.cols()));
    out.constant_ = T.transpose() * constant_ * T;
    for (const auto& [idx, A] : coeffs_) {
        Eigen::MatrixXd M = T.transpose() * A * T;
        if (M.cwiseAbs().maxCoeff() > 0.0) out.coeffs_.emplace(idx, std::move(M));
    }
    return out;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("AffineExpr: add dims");
    constant_ += other.constant_;
    for (const auto& [idx, A] : other.coeffs_) {
        auto it = coeffs_.find(idx);
        if (it == coeffs_.end())
            coeffs_.emplace(idx, A);
        else
            it->second += A;
    }
    return *this;
}

Eigen::MatrixXd AffineExpr::evaluate(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd M = constant_;
    for (const auto& [idx, A] : coeffs_) {
        if (idx >= theta.size()) throw std::invalid_argument("AffineExpr: theta too short");
        M += theta(idx) * A;
    }
    return M;
}

VariableRef LmiProblem::add_variable(const std::string& name, int dim, Cone cone) {
    if (dim < 1) throw std::invalid_argument("LmiProblem: variable dim must be >= 1");
    if (find(name)) throw std::invalid_argument("LmiProblem: duplicate variable " + name);
    VariableRef ref{next_scalar_, dim};
    next_scalar_ += ref.scalar_count();
    names_.push_back(name);
    vars_.push_back(ref);
    cones_.push_back(cone);
    return ref;
}

void LmiProblem::require_neg_def(const AffineExpr& expr) { neg_def_.push_back(expr); }
void LmiProblem::require_pos_semi(const AffineExpr& expr) { pos_semi_.push_back(expr); }

std::optional<VariableRef> LmiProblem::find(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return vars_[i];
    return std::nullopt;
}

Cone LmiProblem::cone_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return cones_[i];
    throw std::invalid_argument("LmiProblem: unknown variable " + name);
}

Eigen::VectorXd LmiProblem::pack(
    const std::map<std::string, Eigen::MatrixXd>& witness) const {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(next_scalar_);
    for (size_t k = 0; k < names_.size(); ++k) {
        auto it = witness.find(names_[k]);
        if (it == witness.end())
            throw std::invalid_argument("pack: missing witness for " + names_[k]);
        const Eigen::MatrixXd& V = it->second;
        const VariableRef& ref = vars_[k];
        if (V.rows() != ref.dim || V.cols() != ref.dim)
            throw std::invalid_argument("pack: dimension mismatch for " + names_[k]);
        int offset = 0;
        for (int j = 0; j < ref.dim; ++j)
            for (int i = 0; i <= j; ++i, ++offset)
                theta(ref.base + offset) = 0.5 * (V(i, j) + V(j, i));
    }
    return theta;
}

std::map<std::string, Eigen::MatrixXd> LmiProblem::unpack(
    const Eigen::VectorXd& theta) const {
    std::map<std::string, Eigen::MatrixXd> witness;
    for (size_t k = 0; k < names_.size(); ++k) {
        const VariableRef& ref = vars_[k];
        Eigen::MatrixXd V(ref.dim, ref.dim);
        int offset = 0;
        for (int j = 0; j < ref.dim; ++j)
            for (int i = 0; i <= j; ++i, ++offset) {
                V(i, j) = theta(ref.base + offset);
                V(j, i) = V(i, j);
            }
        witness.emplace(names_[k], std::move(V));
    }
    return witness;
}

std::vector<LmiProblem::ConstraintView> LmiProblem::constraints() const {
    std::vector<ConstraintView> out;
    for (const auto& e : neg_def_) out.push_back({&e, true});
    for (const auto& e : pos_semi_) out.push_back({&e, false});
    return out;
}

VerifyResult verify_witness(const LmiProblem& problem,
                            const std::map<std::string, Eigen::MatrixXd>& witness,
                            double tol) {
    const Eigen::VectorXd theta = problem.pack(witness);
    VerifyResult res;
    res.ok = true;
    auto record = [&](double violation) {
        res.max_violation = std::max(res.max_violation, violation);
        if (violation > tol) res.ok = false;
    };

    for (const auto& name : problem.variable_names()) {
        const Eigen::MatrixXd& V = witness.at(name);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V, Eigen::EigenvaluesOnly);
        const double mineig = eig.eigenvalues().minCoeff();
        const double scale = std::max(1.0, V.norm());
        switch (problem.cone_of(name)) {
            case Cone::PosDef:
            case Cone::PosSemiDef: record(std::max(0.0, -mineig) / scale); break;
            case Cone::Free: break;
        }
    }
    for (const auto& c : problem.constraints()) {
        const Eigen::MatrixXd M = c.expr->evaluate(theta);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, M.norm());
        if (c.strict) {
            record(std::max(0.0, eig.eigenvalues().maxCoeff()) / scale);
            // strict inequality: landing exactly on the boundary is a failure
            if (eig.eigenvalues().maxCoeff() >= 0.0) res.ok = false;
        } else {
            record(std::max(0.0, -eig.eigenvalues().minCoeff()) / scale);
        }
    }
    return res;
}

}  // namespace msicert::lmi
