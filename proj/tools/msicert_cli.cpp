// msicert: stability certification and MSI estimation for discrete-time
// systems under aperiodic sample-and-hold feedback.
#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>

#include "msicert/data_analysis.hpp"
#include "msicert/delay.hpp"
#include "msicert/io.hpp"
#include "msicert/model_analysis.hpp"
#include "msicert/msi_search.hpp"
#include "msicert/simulate.hpp"

namespace {

using namespace msicert;

struct CommonFlags {
    std::string gain_mode = "exact";
    double epsilon = 1e-7;
    bool y_zero = false;
    bool json = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--gain-mode", flags.gain_mode, "exact | frobenius | legacy")
        ->check(CLI::IsMember({"exact", "frobenius", "legacy"}));
    cmd->add_option("--epsilon", flags.epsilon, "LMI strictness scale");
    cmd->add_flag("--y-zero", flags.y_zero, "pin the passivity multiplier to zero");
    cmd->add_flag("--json", flags.json, "machine-readable output");
}

CertifyOptions make_options(const CommonFlags& flags) {
    CertifyOptions opts;
    opts.epsilon = flags.epsilon;
    opts.y_zero = flags.y_zero;
    return opts;
}

void print_certificate(const Certificate& cert, bool as_json) {
    if (as_json) {
        std::cout << io::certificate_to_json(cert) << "\n";
        return;
    }
    std::cout << "verdict: " << to_string(cert.verdict) << "\n"
              << "hbar: " << cert.hbar << "\n"
              << "gain-mode: " << to_string(cert.gain_mode)
              << " (squared gain " << cert.gain_sq << ")\n";
    if (cert.verdict == Verdict::Certified)
        std::cout << "margin: " << cert.diagnostics.margin << "\n";
    if (!cert.note.empty()) std::cout << "note: " << cert.note << "\n";
}

int run_gain(const std::vector<int>& hbars, bool as_json) {
    if (as_json) {
        std::cout << "[";
        bool first = true;
        for (int h : hbars) {
            const DelayGainBundle b = gain_bundle(h);
            std::cout << (first ? "" : ",") << "\n  {\"hbar\": " << h
                      << ", \"exact_sq\": " << b.exact_sq_gain
                      << ", \"frobenius_sq\": " << b.frobenius_sq_gain
                      << ", \"legacy_sq\": " << b.legacy_sq_gain << "}";
            first = false;
        }
        std::cout << "\n]\n";
        return 0;
    }
    std::printf("%6s %16s %16s %16s %12s %12s\n", "hbar", "exact-sq", "frobenius-sq",
                "legacy-sq", "exact-ratio", "frob-ratio");
    for (int h : hbars) {
        const DelayGainBundle b = gain_bundle(h);
        const double leg = b.legacy_sq_gain;
        const double r_exact = leg > 0 ? std::sqrt(b.exact_sq_gain / leg) : 0.0;
        const double r_frob = leg > 0 ? std::sqrt(b.frobenius_sq_gain / leg) : 0.0;
        std::printf("%6d %16.6f %16.6f %16.6f %12.6f %12.6f\n", h, b.exact_sq_gain,
                    b.frobenius_sq_gain, b.legacy_sq_gain, r_exact, r_frob);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability certification for aperiodically sampled discrete-time systems"};
    app.require_subcommand(1);

    // ---- gain table
    auto* gain_cmd = app.add_subcommand("gain", "squared l2-gain bounds of the delay operator");
    std::vector<int> gain_hbars;
    bool gain_json = false;
    gain_cmd->add_option("hbar", gain_hbars, "interval bounds")->required();
    gain_cmd->add_flag("--json", gain_json, "machine-readable output");

    // ---- certify
    auto* certify_cmd = app.add_subcommand("certify", "one-shot certification at a fixed hbar");
    auto* certify_model_cmd = certify_cmd->add_subcommand("model", "from a known model");
    auto* certify_data_cmd = certify_cmd->add_subcommand("data", "from a measured trajectory");
    certify_cmd->require_subcommand(1);

    std::string sys_path, traj_path, dist_path;
    CommonFlags cert_flags;
    int hbar_flag = 0;
    int freq_grid = 0;
    certify_model_cmd->add_option("--system", sys_path, "system JSON")->required();
    certify_model_cmd->add_option("--hbar", hbar_flag, "interval bound (falls back to the config)");
    certify_model_cmd->add_option("--grid", freq_grid,
                                  "also run the frequency-domain check on this many "
                                  "grid points (model mode, certified verdicts)");
    add_common(certify_model_cmd, cert_flags);

    certify_data_cmd->add_option("--system", sys_path, "system JSON (K is used)")->required();
    certify_data_cmd->add_option("--traj", traj_path, "trajectory CSV")->required();
    certify_data_cmd->add_option("--disturbance", dist_path, "disturbance JSON")->required();
    certify_data_cmd->add_option("--hbar", hbar_flag, "interval bound (falls back to the config)");
    add_common(certify_data_cmd, cert_flags);

    // ---- msi
    auto* msi_cmd = app.add_subcommand("msi", "largest certifiable interval bound");
    auto* msi_model_cmd = msi_cmd->add_subcommand("model", "from a known model");
    auto* msi_data_cmd = msi_cmd->add_subcommand("data", "from a measured trajectory");
    msi_cmd->require_subcommand(1);
    std::string search_kind = "exponential";
    int cap = 10000;
    CommonFlags msi_flags;
    for (auto* cmd : {msi_model_cmd, msi_data_cmd}) {
        cmd->add_option("--system", sys_path, "system JSON")->required();
        cmd->add_option("--search", search_kind, "linear | exponential")
            ->check(CLI::IsMember({"linear", "exponential"}));
        cmd->add_option("--cap", cap, "largest candidate considered");
        add_common(cmd, msi_flags);
    }
    msi_data_cmd->add_option("--traj", traj_path, "trajectory CSV")->required();
    msi_data_cmd->add_option("--disturbance", dist_path, "disturbance JSON")->required();

    // ---- simulate
    auto* sim_cmd = app.add_subcommand("simulate", "closed loop under a random pattern");
    int sim_hbar = 1, sim_horizon = 100;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    std::vector<double> sim_x0;
    sim_cmd->add_option("--system", sys_path, "system JSON")->required();
    sim_cmd->add_option("--hbar", sim_hbar, "interval bound")->required();
    sim_cmd->add_option("--horizon", sim_horizon, "steps to simulate");
    sim_cmd->add_option("--seed", sim_seed, "pattern seed");
    sim_cmd->add_option("--x0", sim_x0, "initial state (default: ones)");
    sim_cmd->add_option("--out", sim_out, "write the state trajectory CSV here");

    // ---- generate
    auto* gen_cmd = app.add_subcommand("generate", "open-loop experiment data");
    int gen_N = 1000;
    double gen_range = 10.0, gen_dbar = 0.0, gen_bd_scale = 0.01;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen_cmd->add_option("--system", sys_path, "system JSON (true model)")->required();
    gen_cmd->add_option("--n", gen_N, "number of samples");
    gen_cmd->add_option("--input-range", gen_range, "inputs uniform on [-r, r]");
    gen_cmd->add_option("--dbar", gen_dbar, "disturbance norm bound");
    gen_cmd->add_option("--bd-scale", gen_bd_scale, "Bd = scale * I");
    gen_cmd->add_option("--seed", gen_seed, "experiment seed");
    gen_cmd->add_option("--out", gen_out, "trajectory CSV path")->required();

    // ---- falsify
    auto* fals_cmd = app.add_subcommand("falsify", "search for destabilizing patterns");
    int fals_hbar = 1, fals_trials = 100, fals_horizon = 1000;
    std::uint64_t fals_seed = 0;
    fals_cmd->add_option("--system", sys_path, "system JSON")->required();
    fals_cmd->add_option("--hbar", fals_hbar, "interval bound")->required();
    fals_cmd->add_option("--trials", fals_trials, "random restarts");
    fals_cmd->add_option("--horizon", fals_horizon, "pattern length in steps");
    fals_cmd->add_option("--seed", fals_seed, "search seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage and parse problems exit with 1
    }

    try {
        if (*gain_cmd) return run_gain(gain_hbars, gain_json);

        if (*certify_model_cmd || *certify_data_cmd) {
            const io::SystemConfig cfg = io::load_system(sys_path);
            const int hbar = hbar_flag > 0 ? hbar_flag : cfg.hbar.value_or(0);
            if (hbar < 1) {
                std::cerr << "error: no hbar given (flag or config)\n";
                return 1;
            }
            const GainMode mode = *gain_mode_from_string(cert_flags.gain_mode);
            Certificate cert;
            if (*certify_model_cmd) {
                cert = certify_model(cfg.model, hbar, mode, make_options(cert_flags));
                if (freq_grid > 0 && cert.verdict == Verdict::Certified) {
                    const FrequencyCheck fc =
                        frequency_domain_check(cfg.model, hbar, cert.X, cert.Y, freq_grid);
                    std::cout << "frequency check (" << freq_grid
                              << " points, non-exhaustive): "
                              << (fc.ok ? "consistent" : "violated") << ", worst omega "
                              << fc.worst_omega << "\n";
                }
            } else {
                const io::Trajectory traj = io::load_trajectory_csv(traj_path);
                const auto dist = io::load_disturbance(
                    dist_path, static_cast<int>(traj.inputs.cols()));
                const DataSet ds = io::dataset_from_trajectory(traj, dist);
                cert = certify_data(ds, cfg.model.K, hbar, mode, make_options(cert_flags));
            }
            print_certificate(cert, cert_flags.json);
            return io::verdict_exit_code(cert.verdict);
        }

        if (*msi_model_cmd || *msi_data_cmd) {
            const io::SystemConfig cfg = io::load_system(sys_path);
            const GainMode mode = *gain_mode_from_string(msi_flags.gain_mode);
            const CertifyOptions opts = make_options(msi_flags);

            std::function<Certificate(int)> certify_at;
            if (*msi_model_cmd) {
                certify_at = [&](int h) { return certify_model(cfg.model, h, mode, opts); };
            } else {
                const io::Trajectory traj = io::load_trajectory_csv(traj_path);
                const auto dist = io::load_disturbance(
                    dist_path, static_cast<int>(traj.inputs.cols()));
                const DataSet ds = io::dataset_from_trajectory(traj, dist);
                const QmiSet qmi = build_qmi(ds);
                if (!qmi.valid) {
                    std::cerr << "assumption violated: " << qmi.issue << "\n";
                    return 3;
                }
                certify_at = [&, ds, qmi](int h) {
                    Certificate cert;
                    cert.hbar = h;
                    cert.gain_mode = mode;
                    cert.gain_sq = gain_for_mode(h, mode, opts.eig_threshold);
                    const auto prob = data_stability_problem(cfg.model.K, qmi, h, mode, opts);
                    const auto sol = lmi::solve(prob, opts.solver);
                    cert.diagnostics = sol.diagnostics;
                    cert.verdict = sol.status == lmi::SolveStatus::Feasible
                                       ? Verdict::Certified
                                       : (sol.status == lmi::SolveStatus::Infeasible
                                              ? Verdict::NotCertified
                                              : Verdict::NumericalFailure);
                    if (cert.verdict == Verdict::Certified) {
                        cert.S = sol.witness.at("S");
                        cert.X = sol.witness.at("X");
                        cert.Y = opts.y_zero
                                     ? Eigen::MatrixXd::Zero(qmi.n, qmi.n)
                                     : sol.witness.at("Y");
                    }
                    return cert;
                };
            }
            const Certifier certifier = [&](int h) {
                return certify_at(h).verdict == Verdict::Certified;
            };
            const SearchResult res = search_kind == "linear"
                                         ? linear_search(certifier, cap)
                                         : exponential_search(certifier, cap);
            if (msi_flags.json) {
                const std::string cert_json =
                    res.msi ? io::certificate_to_json(certify_at(*res.msi)) : "null";
                std::cout << "{\"msi\": " << (res.msi ? std::to_string(*res.msi) : "null")
                          << ", \"cap_exhausted\": " << (res.cap_exhausted ? "true" : "false")
                          << ", \"calls\": " << res.calls
                          << ", \"certificate\": " << cert_json << "}\n";
            } else if (res.msi) {
                const Certificate cert = certify_at(*res.msi);
                std::cout << "msi: " << *res.msi
                          << (res.cap_exhausted ? " (cap exhausted)" : "")
                          << " (margin " << cert.diagnostics.margin << ")\n";
            } else {
                std::cout << "not certifiable at hbar = 1\n";
            }
            return res.msi ? 0 : 2;
        }

        if (*sim_cmd) {
            const io::SystemConfig cfg = io::load_system(sys_path);
            Eigen::VectorXd x0 = Eigen::VectorXd::Ones(cfg.model.n());
            if (!sim_x0.empty()) {
                if (static_cast<int>(sim_x0.size()) != cfg.model.n()) {
                    std::cerr << "error: x0 size != n\n";
                    return 1;
                }
                for (int i = 0; i < cfg.model.n(); ++i) x0(i) = sim_x0[static_cast<size_t>(i)];
            }
            std::mt19937_64 rng(sim_seed);
            const SamplingPattern pattern = random_pattern(sim_hbar, sim_horizon, rng);
            const auto states = closed_loop(cfg.model, pattern, x0, sim_horizon);
            std::cout << "initial norm " << x0.norm() << ", final norm "
                      << states.back().norm() << "\n";
            if (!sim_out.empty()) {
                io::Trajectory traj;
                traj.states.resize(cfg.model.n(), static_cast<int>(states.size()));
                for (size_t t = 0; t < states.size(); ++t)
                    traj.states.col(static_cast<int>(t)) = states[t];
                traj.inputs = Eigen::MatrixXd::Zero(cfg.model.m(),
                                                    static_cast<int>(states.size()) - 1);
                io::save_trajectory_csv(sim_out, traj);
                std::cout << "wrote " << sim_out << "\n";
            }
            return 0;
        }

        if (*gen_cmd) {
            const io::SystemConfig cfg = io::load_system(sys_path);
            const Eigen::MatrixXd Bd =
                gen_bd_scale * Eigen::MatrixXd::Identity(cfg.model.n(), cfg.model.n());
            const Experiment exp =
                generate_experiment(cfg.model, gen_N, gen_range, gen_dbar, Bd, gen_seed);
            io::Trajectory traj;
            traj.states = exp.states;
            traj.inputs = exp.inputs;
            io::save_trajectory_csv(gen_out, traj);
            std::cout << "wrote " << gen_out << " (N = " << gen_N << ")\n";
            return 0;
        }

        if (*fals_cmd) {
            const io::SystemConfig cfg = io::load_system(sys_path);
            const FalsifyResult res =
                falsify(cfg.model, fals_hbar, fals_trials, fals_horizon, fals_seed);
            std::cout << "max growth " << res.growth << " over " << fals_trials
                      << " trials (heuristic; absence of growth is evidence, not proof)\n";
            return res.growth >= 1.0 ? 2 : 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
