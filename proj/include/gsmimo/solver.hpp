#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gsmimo/channel.hpp"

namespace gsmimo {

using PrecodingMatrix = ComplexMatrix;

struct SolverConfig {
    double lambda = 0.0;        // ridge regularizer
    double mu = 0.0;            // group-sparsity regularizer
    double beta = 1.0;          // target scaling factor
    double eta = 1.0;           // relaxation parameter of the l21 budget
    int max_iterations = 5000;
    double tolerance = 1e-8;    // relative objective-change stopping threshold
    bool acceleration = true;

    void validate() const {
        if (lambda < 0.0) throw std::invalid_argument("SolverConfig: lambda < 0");
        if (mu < 0.0) throw std::invalid_argument("SolverConfig: mu < 0");
        if (beta <= 0.0) throw std::invalid_argument("SolverConfig: beta <= 0");
        if (eta <= 0.0) throw std::invalid_argument("SolverConfig: eta <= 0");
        if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations < 1");
        if (tolerance <= 0.0) throw std::invalid_argument("SolverConfig: tolerance <= 0");
    }
};

struct SolverResult {
    PrecodingMatrix v_matrix;
    int iterations = 0;
    std::vector<double> objective_trace;
    bool converged = false;
    double kkt_residual = 0.0;
};

/// Sum of column Euclidean norms.
inline double l21_norm(const ComplexMatrix& v) {
    return v.colwise().norm().sum();
}

/// Number of exactly-zero-free columns; zeros are counted bitwise, never
/// by near-zero thresholding.
inline Eigen::Index l20_norm(const ComplexMatrix& v) {
    Eigen::Index n = 0;
    for (Eigen::Index k = 0; k < v.cols(); ++k)
        if (!v.col(k).isZero(0.0)) ++n;
    return n;
}

inline void check_dims(const ChannelMatrix& h, const ComplexMatrix& v) {
    if (v.rows() != h.antennas() || v.cols() != h.users())
        throw std::invalid_argument("precoding matrix dimensions do not match channel");
}

/// ||H^T V - beta I||_F^2 + lambda ||V||_F^2 + mu ||V||_{2,1}
inline double objective(const ChannelMatrix& h, const PrecodingMatrix& v,
                        const SolverConfig& cfg) {
    check_dims(h, v);
    const Eigen::Index k = h.users();
    ComplexMatrix r = h.matrix().transpose() * v;
    r.diagonal().array() -= cfg.beta;
    return r.squaredNorm() + cfg.lambda * v.squaredNorm() + cfg.mu * l21_norm(v);
}

/// Gradient of the smooth part, G = 2 [conj(H)(H^T V - beta I) + lambda V].
/// The factor 2 is included; iterates update as V <- V - t G.
inline ComplexMatrix smooth_gradient(const ChannelMatrix& h, const PrecodingMatrix& v,
                                     double lambda, double beta) {
    check_dims(h, v);
    ComplexMatrix r = h.matrix().transpose() * v;
    r.diagonal().array() -= beta;
    return 2.0 * (h.matrix().conjugate() * r + lambda * v);
}

/// Proximal operator of threshold * ||.||_{2,1}: column-wise shrinkage
/// v_k <- v_k max(0, 1 - threshold/||v_k||); columns at or below the
/// threshold become exactly zero.
inline PrecodingMatrix block_soft_threshold(const PrecodingMatrix& v, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("block_soft_threshold: threshold < 0");
    if (threshold == 0.0) return v;
    PrecodingMatrix out = v;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double nrm = v.col(k).norm();
        if (nrm <= threshold)
            out.col(k).setZero();
        else
            out.col(k) *= 1.0 - threshold / nrm;
    }
    return out;
}

/// Largest singular value of H by power iteration on H^H H.
inline double spectral_norm(const ChannelMatrix& h) {
    const ComplexMatrix& m = h.matrix();
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(m.cols());
    x.normalize();
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXcd y = m.adjoint() * (m * x);
        const double nrm = y.norm();
        if (nrm == 0.0) return 0.0;
        x = y / nrm;
        const double est = std::sqrt(nrm);
        if (std::abs(est - prev) <= 1e-10 * est) return est;
        prev = est;
    }
    return prev;
}

/// Norm of the minimal-norm element of the objective's subdifferential
/// at v, aggregated over columns.
inline double kkt_residual(const ChannelMatrix& h, const PrecodingMatrix& v,
                           const SolverConfig& cfg) {
    const ComplexMatrix g = smooth_gradient(h, v, cfg.lambda, cfg.beta);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double vn = v.col(k).norm();
        double rk;
        if (vn > 0.0)
            rk = (g.col(k) + (cfg.mu / vn) * v.col(k)).norm();
        else
            rk = std::max(0.0, g.col(k).norm() - cfg.mu);
        acc += rk * rk;
    }
    return std::sqrt(acc);
}

/// Proximal-gradient solve of the unconstrained penalized objective,
/// optionally FISTA-accelerated, warm-started from v0.
inline SolverResult solve_rls(const ChannelMatrix& h, const SolverConfig& cfg,
                              const PrecodingMatrix& v0) {
    cfg.validate();
    check_dims(h, v0);
    const double smax = spectral_norm(h);
    const double lip = 2.0 * (smax * smax + cfg.lambda);
    const double step = lip > 0.0 ? 1.0 / lip : 1.0;

    PrecodingMatrix v = v0;
    PrecodingMatrix y = v;
    double momentum = 1.0;

    SolverResult res;
    res.objective_trace.push_back(objective(h, v, cfg));
    bool stopped = false;
    int it = 0;
    for (; it < cfg.max_iterations && !stopped; ++it) {
        const ComplexMatrix g = smooth_gradient(h, y, cfg.lambda, cfg.beta);
        PrecodingMatrix vn = block_soft_threshold(y - step * g, step * cfg.mu);
        if (!vn.allFinite())
            throw std::runtime_error("solve_rls: iterate diverged to non-finite values");
        if (cfg.acceleration) {
            const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            y = vn + ((momentum - 1.0) / m_next) * (vn - v);
            momentum = m_next;
        } else {
            y = vn;
        }
        v.swap(vn);
        const double f = objective(h, v, cfg);
        const double fprev = res.objective_trace.back();
        res.objective_trace.push_back(f);
        if (std::abs(fprev - f) <= cfg.tolerance * std::max(std::abs(fprev), 1e-300))
            stopped = true;
    }
    res.iterations = it;
    res.converged = stopped;
    res.v_matrix = std::move(v);
    res.kkt_residual = kkt_residual(h, res.v_matrix, cfg);
    return res;
}

inline SolverResult solve_rls(const ChannelMatrix& h, const SolverConfig& cfg) {
    return solve_rls(h, cfg, PrecodingMatrix::Zero(h.antennas(), h.users()));
}

namespace detail {

// Bisection on mu until ||V||_{2,1} <= eta L, tight when the
// mu-free solution violates the budget. Warm-starts each inner solve.
inline SolverResult l21_budget_solve(const ChannelMatrix& h, double budget,
                                     SolverConfig cfg, PrecodingMatrix v) {
    cfg.mu = 0.0;
    SolverResult res = solve_rls(h, cfg, v);
    if (l21_norm(res.v_matrix) <= budget) return res;

    double lo = 0.0;
    double hi = 0.0;
    for (Eigen::Index k = 0; k < h.users(); ++k)
        hi = std::max(hi, 2.0 * cfg.beta * h.column(k).norm());
    SolverResult feasible;
    bool have_feasible = false;
    for (int i = 0; i < 60; ++i) {
        cfg.mu = 0.5 * (lo + hi);
        res = solve_rls(h, cfg, res.v_matrix);
        if (l21_norm(res.v_matrix) <= budget) {
            hi = cfg.mu;
            feasible = res;
            have_feasible = true;
        } else {
            lo = cfg.mu;
        }
        if (hi - lo <= 1e-6 * std::max(hi, 1e-300)) break;
    }
    if (!have_feasible) {
        // mu at the upper bracket forces V = 0, which satisfies any
        // positive budget
        cfg.mu = hi;
        feasible = solve_rls(h, cfg, res.v_matrix);
        if (l21_norm(feasible.v_matrix) > budget)
            throw std::runtime_error("solve_constrained: failed to bracket the l21 budget");
    }
    return feasible;
}

}  // namespace detail

/// Solves the constrained program: minimize the data-fit term subject to
/// ||V||_{2,1} <= eta L and ||V||_F^2 <= P. The l21 budget is enforced
/// by bisection on mu; lambda escalates from cfg.lambda only while the
/// power constraint stays violated.
inline SolverResult solve_constrained(const ChannelMatrix& h, double power,
                                      int l_users, SolverConfig cfg) {
    cfg.validate();
    if (power <= 0.0) throw std::invalid_argument("solve_constrained: power <= 0");
    if (l_users < 1 || l_users > h.users())
        throw std::invalid_argument("solve_constrained: l_users out of range");

    const double budget = cfg.eta * static_cast<double>(l_users);
    const double power_cap = power * (1.0 + 1e-6);
    PrecodingMatrix v0 = PrecodingMatrix::Zero(h.antennas(), h.users());

    SolverResult res = detail::l21_budget_solve(h, budget, cfg, v0);
    if (res.v_matrix.squaredNorm() <= power_cap) return res;

    // power still violated: raise lambda until feasible, then bisect
    double lam_lo = cfg.lambda;
    double lam_hi = std::max(1.0, 2.0 * cfg.lambda);
    SolverConfig c = cfg;
    for (int i = 0; i < 60; ++i) {
        c.lambda = lam_hi;
        res = detail::l21_budget_solve(h, budget, c, res.v_matrix);
        if (res.v_matrix.squaredNorm() <= power_cap) break;
        lam_lo = lam_hi;
        lam_hi *= 2.0;
        if (lam_hi > 1e12)
            throw std::runtime_error("solve_constrained: power constraint did not bracket");
    }
    for (int i = 0; i < 40; ++i) {
        const double lam = 0.5 * (lam_lo + lam_hi);
        c.lambda = lam;
        SolverResult trial = detail::l21_budget_solve(h, budget, c, res.v_matrix);
        if (trial.v_matrix.squaredNorm() <= power_cap) {
            lam_hi = lam;
            res = std::move(trial);
        } else {
            lam_lo = lam;
        }
        if (lam_hi - lam_lo <= 1e-3 * lam_hi) break;
    }
    return res;
}

}  // namespace gsmimo
