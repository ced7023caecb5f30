// File formats: JSON system/disturbance configs, CSV trajectories, and
// JSON certification reports.
#pragma once

#include <optional>
#include <string>

#include "msicert/data_analysis.hpp"
#include "msicert/model_analysis.hpp"
#include "msicert/simulate.hpp"

namespace msicert::io {

struct SystemConfig {
    SystemModel model;
    std::optional<int> hbar;
};

// {"A": [[...]], "B": [[...]], "K": [[...]], "hbar": 136}
SystemConfig load_system(const std::string& path);
void save_system(const std::string& path, const SystemModel& model,
                 std::optional<int> hbar = std::nullopt);

struct Trajectory {
    Eigen::MatrixXd states;  // n x (N+1)
    Eigen::MatrixXd inputs;  // m x N
};

// Header t,x1..xn,u1..um; one row per step; the final row carries the last
// state and omits the input columns.
void save_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory_csv(const std::string& path);

// {"dbar": .., "Bd": [[..]]} or {"Qd": [[..]], "Sd": [[..]], "Rd": [[..]], "Bd": [[..]]}
// The shorthand form is instantiated for the trajectory length N.
DisturbanceModel load_disturbance(const std::string& path, int N);

DataSet dataset_from_trajectory(const Trajectory& traj,
                                const DisturbanceModel& disturbance);

// Machine-readable certificate with embedded full-precision witnesses.
std::string certificate_to_json(const Certificate& cert);

// Exit code convention: 0 certified/success, 2 not-certified,
// 3 assumption-violated, 4 numerical-failure (1 is usage/parse).
int verdict_exit_code(Verdict v);

}  // namespace msicert::io
