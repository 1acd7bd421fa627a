// Command-line front end: Monte-Carlo sweeps over array sizes plus a
// single-instance solve that reports the precoder and its metrics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "gsmimo/gsmimo.hpp"

namespace {

struct SolverFlags {
    double lambda = 0.0;
    double mu = 0.0;
    double eta = 1.0;
    double tol = 1e-8;
    int max_iter = 5000;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
    app->add_option("--lambda", f.lambda, "Ridge regularizer lambda")->check(CLI::NonNegativeNumber);
    app->add_option("--mu", f.mu, "Group-sparsity regularizer mu")->check(CLI::NonNegativeNumber);
    app->add_option("--eta", f.eta, "Relaxation parameter of the l21 budget")->check(CLI::PositiveNumber);
    app->add_option("--tol", f.tol, "Relative objective-change stopping threshold")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", f.max_iter, "Maximum solver iterations")->check(CLI::PositiveNumber);
}

gsmimo::SolverConfig to_solver_config(const SolverFlags& f, double beta) {
    gsmimo::SolverConfig cfg;
    cfg.lambda = f.lambda;
    cfg.mu = f.mu;
    cfg.eta = f.eta;
    cfg.tolerance = f.tol;
    cfg.max_iterations = f.max_iter;
    cfg.beta = beta;
    return cfg;
}

std::vector<gsmimo::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<gsmimo::Method> out;
    for (const auto& n : names) {
        if (n == "group-lasso")
            out.push_back(gsmimo::Method::GroupLasso);
        else if (n == "mrt")
            out.push_back(gsmimo::Method::Mrt);
        else
            throw CLI::ValidationError("--methods", "unknown method '" + n + "'");
    }
    return out;
}

void run_and_emit(const gsmimo::ScenarioConfig& cfg, const std::string& out_path) {
    auto records = gsmimo::run_sweep(cfg);
    for (const auto& r : records)
        if (r.flagged)
            std::cerr << "warning: cell " << r.method << " M=" << r.m << " L=" << r.l
                      << " had " << r.degenerate_trials << " degenerate trials\n";
    gsmimo::emit_csv(records, out_path);
    std::cout << "wrote " << records.size() << " records to " << out_path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint user selection and precoding via group-sparse recovery"};
    app.require_subcommand(1);
    app.set_config("--config");

    // scenario-a: fixed loads, K and L proportional to M
    auto* sa = app.add_subcommand("scenario-a", "Sweep M with K = ceil(alpha_k M), L = ceil(alpha_l M)");
    gsmimo::ScenarioConfig acfg;
    acfg.mode = gsmimo::ScenarioMode::FixedLoad;
    std::vector<int> a_m{4, 8, 16, 32, 64};
    std::vector<std::string> a_methods{"group-lasso", "mrt"};
    std::string a_out = "scenario_a.csv";
    SolverFlags a_solver;
    sa->add_option("--alpha-k", acfg.alpha_k, "User load K/M")->check(CLI::PositiveNumber);
    sa->add_option("--alpha-l", acfg.alpha_l, "Selection load L/M")->check(CLI::PositiveNumber);
    sa->add_option("--m", a_m, "Array sizes to sweep")->delimiter(',');
    sa->add_option("--power", acfg.power, "Transmit power P")->check(CLI::PositiveNumber);
    sa->add_option("--noise-var", acfg.noise_variance, "Noise variance per user")->check(CLI::PositiveNumber);
    sa->add_option("--beta", acfg.beta, "Scaling factor beta")->check(CLI::PositiveNumber);
    sa->add_option("--trials", acfg.trials, "Monte-Carlo trials per cell")->check(CLI::PositiveNumber);
    sa->add_option("--seed", acfg.master_seed, "Master seed");
    sa->add_option("--methods", a_methods, "Methods to run")->delimiter(',');
    sa->add_option("--workers", acfg.workers, "Worker threads (0 = hardware)");
    sa->add_option("--out", a_out, "Output CSV path");
    add_solver_flags(sa, a_solver);

    // scenario-b: fixed number of users
    auto* sb = app.add_subcommand("scenario-b", "Sweep M at constant K for one or more L");
    gsmimo::ScenarioConfig bcfg;
    bcfg.mode = gsmimo::ScenarioMode::FixedUsers;
    std::vector<int> b_m{4, 8, 16, 32, 64};
    std::vector<int> b_l{8};
    std::vector<std::string> b_methods{"group-lasso", "mrt"};
    std::string b_out = "scenario_b.csv";
    SolverFlags b_solver;
    sb->add_option("--k", bcfg.k_users, "Number of users K")->check(CLI::PositiveNumber);
    sb->add_option("--l", b_l, "Selected-user counts to sweep")->delimiter(',');
    sb->add_option("--m", b_m, "Array sizes to sweep")->delimiter(',');
    sb->add_option("--power", bcfg.power, "Transmit power P")->check(CLI::PositiveNumber);
    sb->add_option("--noise-var", bcfg.noise_variance, "Noise variance per user")->check(CLI::PositiveNumber);
    sb->add_option("--beta", bcfg.beta, "Scaling factor beta")->check(CLI::PositiveNumber);
    sb->add_option("--trials", bcfg.trials, "Monte-Carlo trials per cell")->check(CLI::PositiveNumber);
    sb->add_option("--seed", bcfg.master_seed, "Master seed");
    sb->add_option("--methods", b_methods, "Methods to run")->delimiter(',');
    sb->add_option("--workers", bcfg.workers, "Worker threads (0 = hardware)");
    sb->add_option("--out", b_out, "Output CSV path");
    add_solver_flags(sb, b_solver);

    // solve: one instance from a channel file
    auto* sv = app.add_subcommand("solve", "Solve a single instance from a channel-matrix file");
    std::string channel_path;
    double sv_power = 1.0, sv_noise = 0.1, sv_beta = 1.0;
    int sv_l = 1;
    SolverFlags sv_solver;
    sv->add_option("--channel", channel_path, "Channel fixture file")->required()->check(CLI::ExistingFile);
    sv->add_option("--power", sv_power, "Transmit power P")->check(CLI::PositiveNumber);
    sv->add_option("--l", sv_l, "Number of selected users L")->required()->check(CLI::PositiveNumber);
    sv->add_option("--noise-var", sv_noise, "Noise variance per user")->check(CLI::PositiveNumber);
    sv->add_option("--beta", sv_beta, "Scaling factor beta")->check(CLI::PositiveNumber);
    add_solver_flags(sv, sv_solver);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sa->parsed()) {
            acfg.m_values = a_m;
            acfg.methods = parse_methods(a_methods);
            acfg.solver = to_solver_config(a_solver, acfg.beta);
            run_and_emit(acfg, a_out);
        } else if (sb->parsed()) {
            bcfg.m_values = b_m;
            bcfg.l_values = b_l;
            bcfg.methods = parse_methods(b_methods);
            bcfg.solver = to_solver_config(b_solver, bcfg.beta);
            run_and_emit(bcfg, b_out);
        } else if (sv->parsed()) {
            const gsmimo::ChannelMatrix h = gsmimo::load_channel(channel_path);
            const auto cfg = to_solver_config(sv_solver, sv_beta);
            const auto out = gsmimo::algorithm1(h, sv_power, sv_l, cfg);
            const auto noise = gsmimo::NoiseProfile::uniform(h.users(), sv_noise);
            const auto rep = gsmimo::compute_metrics(h, out, noise, sv_beta);

            nlohmann::json j;
            j["m_antennas"] = h.antennas();
            j["k_users"] = h.users();
            j["selected_set"] = out.selected_set;
            j["power_vector"] = std::vector<double>(out.power_vector.begin(), out.power_vector.end());
            j["total_power"] = out.v_matrix.squaredNorm();
            j["metrics"] = {
                {"per_user_sinr", std::vector<double>(rep.per_user_sinr.begin(), rep.per_user_sinr.end())},
                {"per_user_rate", std::vector<double>(rep.per_user_rate.begin(), rep.per_user_rate.end())},
                {"avg_throughput", rep.avg_throughput},
                {"leakage", rep.leakage},
                {"rss", rep.rss},
                {"d_value", rep.d_value},
            };
            std::cout << j.dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
