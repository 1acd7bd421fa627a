#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gsmimo/channel.hpp"
#include "gsmimo/metrics.hpp"
#include "gsmimo/precoder.hpp"
#include "gsmimo/solver.hpp"

namespace gsmimo {

enum class ScenarioMode { FixedLoad, FixedUsers };

enum class Method { GroupLasso, Mrt };

inline const char* method_name(Method m) {
    return m == Method::GroupLasso ? "group-lasso" : "mrt";
}

struct ScenarioConfig {
    ScenarioMode mode = ScenarioMode::FixedLoad;
    std::vector<int> m_values;       // ascending array sizes
    double alpha_k = 1.0;            // fixed-load: K = ceil(alpha_k M)
    double alpha_l = 0.3;            // fixed-load: L = ceil(alpha_l M)
    int k_users = 16;                // fixed-users: constant K
    std::vector<int> l_values{8};    // fixed-users: swept L
    double power = 1.0;
    double noise_variance = 0.1;
    double beta = 1.0;
    int trials = 200;
    std::uint64_t master_seed = 0;
    SolverConfig solver;
    std::vector<Method> methods{Method::GroupLasso, Method::Mrt};
    int workers = 0;                 // 0 = hardware concurrency

    void validate() const {
        if (m_values.empty()) throw std::invalid_argument("ScenarioConfig: m_values empty");
        for (std::size_t i = 0; i < m_values.size(); ++i) {
            if (m_values[i] < 1) throw std::invalid_argument("ScenarioConfig: M must be >= 1");
            if (i > 0 && m_values[i] <= m_values[i - 1])
                throw std::invalid_argument("ScenarioConfig: m_values must be ascending");
        }
        if (power <= 0.0) throw std::invalid_argument("ScenarioConfig: power <= 0");
        if (noise_variance <= 0.0) throw std::invalid_argument("ScenarioConfig: noise_variance <= 0");
        if (beta <= 0.0) throw std::invalid_argument("ScenarioConfig: beta <= 0");
        if (trials < 1) throw std::invalid_argument("ScenarioConfig: trials < 1");
        if (methods.empty()) throw std::invalid_argument("ScenarioConfig: no methods");
        solver.validate();
        if (mode == ScenarioMode::FixedLoad) {
            if (!(alpha_l > 0.0 && alpha_l <= alpha_k))
                throw std::invalid_argument("ScenarioConfig: need 0 < alpha_l <= alpha_k");
        } else {
            if (k_users < 1) throw std::invalid_argument("ScenarioConfig: k_users < 1");
            if (l_values.empty()) throw std::invalid_argument("ScenarioConfig: l_values empty");
            for (int l : l_values)
                if (l < 1 || l > k_users)
                    throw std::invalid_argument("ScenarioConfig: l_values must be in [1, K]");
        }
    }
};

/// One plotted point: per-cell Monte-Carlo aggregate. mean_leakage is
/// the leakage averaged per non-selected user (the double-sum divided by
/// K - L), matching the reported curves; it is zero when L = K.
struct SweepRecord {
    std::string method;
    int m = 0;
    int k = 0;
    int l = 0;
    int trials = 0;
    double mean_avg_throughput = 0.0;
    double stderr_throughput = 0.0;
    double mean_leakage = 0.0;
    double stderr_leakage = 0.0;
    double mean_rss = 0.0;
    int degenerate_trials = 0;       // redrawn trials; not part of the CSV
    bool flagged = false;            // > 1% of trials were degenerate
};

namespace detail {

constexpr std::uint64_t kChannelTag = 0x4348414eULL;  // stream domain tags
constexpr std::uint64_t kMrtTag = 0x4d5254ULL;

inline ChannelMatrix trial_channel(std::uint64_t master_seed, int m, int k,
                                   int trial, int redraw) {
    SplitMix64 rng(derive_stream(master_seed,
                                 {kChannelTag, static_cast<std::uint64_t>(m),
                                  static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(trial),
                                  static_cast<std::uint64_t>(redraw)}));
    return sample_rayleigh(m, k, rng);
}

struct TrialResult {
    double throughput = 0.0;
    double leakage = 0.0;  // already normalized per non-selected user
    double rss_value = 0.0;
    int redraws = 0;
};

inline TrialResult run_trial(const ScenarioConfig& cfg, Method method, int m, int k,
                             int l, int trial) {
    const NoiseProfile noise = NoiseProfile::uniform(k, cfg.noise_variance);
    const Eigen::VectorXd weights = Eigen::VectorXd::Ones(k);
    TrialResult r;
    SolverConfig scfg = cfg.solver;
    scfg.beta = cfg.beta;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 100)
            throw std::runtime_error("run_sweep: persistent degenerate solutions in cell M=" +
                                     std::to_string(m));
        const ChannelMatrix h = trial_channel(cfg.master_seed, m, k, trial, attempt);
        PrecoderOutput out;
        if (method == Method::GroupLasso) {
            try {
                out = algorithm1(h, cfg.power, l, scfg);
            } catch (const DegenerateSolutionError&) {
                ++r.redraws;
                continue;
            }
        } else {
            SplitMix64 sel(derive_stream(cfg.master_seed,
                                         {kMrtTag, static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(l),
                                          static_cast<std::uint64_t>(trial)}));
            out = mrt_random(h, cfg.power, l, sel);
        }
        r.throughput = avg_throughput(h, out, noise, weights);
        const double q = power_leakage(h, out);
        r.leakage = (k > l) ? q / static_cast<double>(k - l) : 0.0;
        r.rss_value = rss(h, out.v_matrix, cfg.beta, l, k);
        return r;
    }
}

// Runs fn(trial) for trial in [0, n) on the requested number of worker
// threads; results land in trial-indexed slots so aggregation order is
// independent of scheduling.
template <class Fn>
inline void parallel_trials(int n, int workers, Fn&& fn) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    if (workers == 1) {
        for (int t = 0; t < n; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= n) return;
                try {
                    fn(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline void aggregate(const std::vector<double>& x, double& mean, double& se) {
    const int n = static_cast<int>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    mean = sum / n;
    if (n < 2) {
        se = 0.0;
        return;
    }
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (n - 1) / n);
}

}  // namespace detail

/// Monte-Carlo sweep over (method, M[, L]) cells. Trial t of a cell
/// always sees the same channel regardless of execution order, and both
/// methods consume the same channel per trial.
inline std::vector<SweepRecord> run_sweep(const ScenarioConfig& cfg) {
    cfg.validate();
    struct Cell {
        Method method;
        int m, k, l;
    };
    std::vector<Cell> cells;
    for (Method method : cfg.methods)
        for (int m : cfg.m_values) {
            if (cfg.mode == ScenarioMode::FixedLoad) {
                const int k = static_cast<int>(std::ceil(cfg.alpha_k * m));
                const int l = static_cast<int>(std::ceil(cfg.alpha_l * m));
                if (l < 1 || k < l)
                    throw std::invalid_argument("run_sweep: derived (K, L) invalid at M=" +
                                                std::to_string(m));
                cells.push_back({method, m, k, l});
            } else {
                for (int l : cfg.l_values) cells.push_back({method, m, cfg.k_users, l});
            }
        }

    std::vector<SweepRecord> records;
    for (const Cell& cell : cells) {
        std::vector<detail::TrialResult> results(static_cast<std::size_t>(cfg.trials));
        detail::parallel_trials(cfg.trials, cfg.workers, [&](int t) {
            results[static_cast<std::size_t>(t)] =
                detail::run_trial(cfg, cell.method, cell.m, cell.k, cell.l, t);
        });

        std::vector<double> tp, lk;
        tp.reserve(results.size());
        lk.reserve(results.size());
        double rss_sum = 0.0;
        int redraws = 0;
        for (const auto& r : results) {
            tp.push_back(r.throughput);
            lk.push_back(r.leakage);
            rss_sum += r.rss_value;
            redraws += r.redraws;
        }
        SweepRecord rec;
        rec.method = method_name(cell.method);
        rec.m = cell.m;
        rec.k = cell.k;
        rec.l = cell.l;
        rec.trials = cfg.trials;
        detail::aggregate(tp, rec.mean_avg_throughput, rec.stderr_throughput);
        detail::aggregate(lk, rec.mean_leakage, rec.stderr_leakage);
        rec.mean_rss = rss_sum / cfg.trials;
        rec.degenerate_trials = redraws;
        rec.flagged = redraws * 100 > cfg.trials;
        records.push_back(std::move(rec));
    }
    return records;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// Writes records as CSV with the fixed column order, rows sorted by
/// (method, M, L).
inline void emit_csv(std::vector<SweepRecord> records, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_csv: no records");
    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.m != b.m) return a.m < b.m;
        return a.l < b.l;
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << "method,M,K,L,trials,mean_avg_throughput,stderr_throughput,"
           "mean_leakage,stderr_leakage,mean_rss\n";
    for (const SweepRecord& r : records) {
        out << r.method << ',' << r.m << ',' << r.k << ',' << r.l << ',' << r.trials << ','
            << format_double(r.mean_avg_throughput) << ',' << format_double(r.stderr_throughput)
            << ',' << format_double(r.mean_leakage) << ',' << format_double(r.stderr_leakage)
            << ',' << format_double(r.mean_rss) << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace gsmimo
