#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gsmimo/channel.hpp"
#include "gsmimo/rng.hpp"
#include "gsmimo/solver.hpp"

namespace gsmimo {

/// Raised when the group-LASSO solve returns an all-zero precoder, which
/// signals a mis-tuned sparsity regularizer.
class DegenerateSolutionError : public std::runtime_error {
public:
    explicit DegenerateSolutionError(const std::string& what) : std::runtime_error(what) {}
};

struct PrecoderOutput {
    ComplexMatrix w_matrix;          // unit-norm beamforming columns (zero off-support)
    Eigen::VectorXd power_vector;    // per-user allocated power
    std::vector<int> selected_set;   // ascending user indices, |S| = L
    PrecodingMatrix v_matrix;        // V = W sqrt(diag(p))
};

/// Splits V into p_k = ||v_k||^2 and w_k = v_k/||v_k||; zero columns map
/// to p_k = 0, w_k = 0.
inline std::pair<ComplexMatrix, Eigen::VectorXd> decompose(const PrecodingMatrix& v) {
    ComplexMatrix w = ComplexMatrix::Zero(v.rows(), v.cols());
    Eigen::VectorXd p = Eigen::VectorXd::Zero(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double nrm = v.col(k).norm();
        if (nrm > 0.0) {
            p(k) = nrm * nrm;
            w.col(k) = v.col(k) / nrm;
        }
    }
    return {std::move(w), std::move(p)};
}

namespace detail {

// Indices of the l columns with largest l2 norms, ties to lower index.
inline std::vector<int> top_columns(const ComplexMatrix& v, int l) {
    std::vector<int> idx(static_cast<std::size_t>(v.cols()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return v.col(a).squaredNorm() > v.col(b).squaredNorm();
    });
    idx.resize(static_cast<std::size_t>(l));
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline PrecoderOutput finalize(PrecodingMatrix v, std::vector<int> selected) {
    PrecoderOutput out;
    auto [w, p] = decompose(v);
    out.w_matrix = std::move(w);
    out.power_vector = std::move(p);
    out.selected_set = std::move(selected);
    out.v_matrix = std::move(v);
    return out;
}

}  // namespace detail

/// Joint selection and precoding: solve the constrained group-LASSO
/// program, keep the L strongest columns, rescale to total power P, and
/// decompose into beams and powers.
inline PrecoderOutput algorithm1(const ChannelMatrix& h, double power, int l_users,
                                 const SolverConfig& cfg) {
    if (l_users < 1 || l_users > h.users())
        throw std::invalid_argument("algorithm1: l_users out of range");
    SolverResult sol = solve_constrained(h, power, l_users, cfg);
    PrecodingMatrix v = std::move(sol.v_matrix);
    if (l20_norm(v) == 0)
        throw DegenerateSolutionError(
            "algorithm1: solver returned the all-zero precoder (iterations=" +
            std::to_string(sol.iterations) +
            ", kkt=" + std::to_string(sol.kkt_residual) + "); retry with smaller mu");

    std::vector<int> selected = detail::top_columns(v, l_users);
    std::vector<char> keep(static_cast<std::size_t>(h.users()), 0);
    for (int k : selected) keep[static_cast<std::size_t>(k)] = 1;
    for (Eigen::Index k = 0; k < v.cols(); ++k)
        if (!keep[static_cast<std::size_t>(k)]) v.col(k).setZero();

    v *= std::sqrt(power) / v.norm();
    return detail::finalize(std::move(v), std::move(selected));
}

/// MRT baseline: uniformly random L-subset, conjugate beamforming with
/// equal power P/L per selected user.
inline PrecoderOutput mrt_random(const ChannelMatrix& h, double power, int l_users,
                                 SplitMix64& rng) {
    const int k_users = static_cast<int>(h.users());
    if (l_users < 1 || l_users > k_users)
        throw std::invalid_argument("mrt_random: l_users out of range");

    // partial Fisher-Yates draw of an L-subset
    std::vector<int> pool(static_cast<std::size_t>(k_users));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < l_users; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_users - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> selected(pool.begin(), pool.begin() + l_users);
    std::sort(selected.begin(), selected.end());

    PrecodingMatrix v = PrecodingMatrix::Zero(h.antennas(), h.users());
    const double amp = std::sqrt(power / static_cast<double>(l_users));
    for (int k : selected) {
        const double nrm = h.column(k).norm();
        if (nrm == 0.0)
            throw std::runtime_error("mrt_random: selected user " + std::to_string(k) +
                                     " has a zero channel");
        v.col(k) = amp * h.column(k).conjugate() / nrm;
    }
    return detail::finalize(std::move(v), std::move(selected));
}

}  // namespace gsmimo
