#include "msicert/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace msicert::io {

using nlohmann::json;

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw std::runtime_error("config: " + what + " must be a non-empty 2-D array");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    Eigen::MatrixXd M(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw std::runtime_error("config: ragged rows in " + what);
        for (size_t c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
    }
    return M;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

SystemConfig load_system(const std::string& path) {
    const json j = load_json_file(path);
    SystemConfig cfg;
    cfg.model.A = matrix_from_json(j.at("A"), "A");
    cfg.model.B = matrix_from_json(j.at("B"), "B");
    cfg.model.K = matrix_from_json(j.at("K"), "K");
    cfg.model.validate();
    if (j.contains("hbar")) cfg.hbar = j.at("hbar").get<int>();
    return cfg;
}

void save_system(const std::string& path, const SystemModel& model,
                 std::optional<int> hbar) {
    json j;
    j["A"] = matrix_to_json(model.A);
    j["B"] = matrix_to_json(model.B);
    j["K"] = matrix_to_json(model.K);
    if (hbar) j["hbar"] = *hbar;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
    const int n = static_cast<int>(traj.states.rows());
    const int m = static_cast<int>(traj.inputs.rows());
    const int N = static_cast<int>(traj.inputs.cols());
    if (traj.states.cols() != N + 1)
        throw std::invalid_argument("save_trajectory_csv: states must have N+1 columns");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= m; ++i) out << ",u" << i;
    out << "\n";
    out << std::setprecision(17);
    for (int t = 0; t <= N; ++t) {
        out << t;
        for (int i = 0; i < n; ++i) out << "," << traj.states(i, t);
        if (t < N)
            for (int i = 0; i < m; ++i) out << "," << traj.inputs(i, t);
        out << "\n";
    }
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");

    // header: t,x1..xn,u1..um
    int n = 0, m = 0;
    {
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',') || field != "t")
            throw std::runtime_error("trajectory header must start with 't'");
        while (std::getline(ss, field, ',')) {
            if (field.size() >= 2 && field[0] == 'x')
                ++n;
            else if (field.size() >= 2 && field[0] == 'u')
                ++m;
            else
                throw std::runtime_error("unexpected trajectory column " + field);
        }
    }
    if (n < 1 || m < 1) throw std::runtime_error("trajectory needs x and u columns");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) {
            if (!field.empty()) row.push_back(std::stod(field));
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::runtime_error("trajectory needs at least 2 rows");
    const int N = static_cast<int>(rows.size()) - 1;

    Trajectory traj;
    traj.states.resize(n, N + 1);
    traj.inputs.resize(m, N);
    for (int t = 0; t <= N; ++t) {
        const auto& row = rows[static_cast<size_t>(t)];
        const size_t expect = (t < N) ? static_cast<size_t>(1 + n + m)
                                      : static_cast<size_t>(1 + n);
        if (row.size() != expect && row.size() != static_cast<size_t>(1 + n + m))
            throw std::runtime_error("trajectory row " + std::to_string(t) +
                                     " has wrong field count");
        for (int i = 0; i < n; ++i) traj.states(i, t) = row[static_cast<size_t>(1 + i)];
        if (t < N)
            for (int i = 0; i < m; ++i)
                traj.inputs(i, t) = row[static_cast<size_t>(1 + n + i)];
    }
    return traj;
}

DisturbanceModel load_disturbance(const std::string& path, int N) {
    const json j = load_json_file(path);
    Eigen::MatrixXd Bd = matrix_from_json(j.at("Bd"), "Bd");
    if (j.contains("dbar")) {
        return norm_bound_disturbance(N, static_cast<int>(Bd.cols()),
                                      j.at("dbar").get<double>(), Bd);
    }
    DisturbanceModel d;
    d.Qd = matrix_from_json(j.at("Qd"), "Qd");
    d.Sd = matrix_from_json(j.at("Sd"), "Sd");
    d.Rd = matrix_from_json(j.at("Rd"), "Rd");
    d.Bd = Bd;
    if (d.N() != N)
        throw std::runtime_error("disturbance Qd horizon does not match trajectory");
    d.validate();
    return d;
}

DataSet dataset_from_trajectory(const Trajectory& traj,
                                const DisturbanceModel& disturbance) {
    const int N = static_cast<int>(traj.inputs.cols());
    DataSet ds;
    ds.Xplus = traj.states.rightCols(N);
    ds.X = traj.states.leftCols(N);
    ds.U = traj.inputs;
    ds.disturbance = disturbance;
    ds.validate();
    return ds;
}

std::string certificate_to_json(const Certificate& cert) {
    json j;
    j["verdict"] = to_string(cert.verdict);
    j["hbar"] = cert.hbar;
    j["gain_mode"] = to_string(cert.gain_mode);
    j["gain_sq"] = cert.gain_sq;
    if (cert.verdict == Verdict::Certified) {
        j["witness"]["S"] = matrix_to_json(cert.S);
        j["witness"]["X"] = matrix_to_json(cert.X);
        j["witness"]["Y"] = matrix_to_json(cert.Y);
    }
    j["diagnostics"]["margin"] = cert.diagnostics.margin;
    j["diagnostics"]["newton_iters"] = cert.diagnostics.newton_iters;
    j["diagnostics"]["max_violation"] = cert.diagnostics.max_violation;
    j["diagnostics"]["residual"] = cert.diagnostics.residual;
    if (!cert.note.empty()) j["note"] = cert.note;
    return j.dump(2);
}

int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::Certified: return 0;
        case Verdict::NotCertified: return 2;
        case Verdict::AssumptionViolated: return 3;
        case Verdict::NumericalFailure: return 4;
    }
    return 4;
}

}  // namespace msicert::io
