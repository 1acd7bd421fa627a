#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gsmimo/channel.hpp"
#include "gsmimo/precoder.hpp"

namespace gsmimo {

struct NoiseProfile {
    Eigen::VectorXd variances;  // sigma_k^2 per user

    static NoiseProfile uniform(Eigen::Index k_users, double variance) {
        NoiseProfile n;
        n.variances = Eigen::VectorXd::Constant(k_users, variance);
        n.validate();
        return n;
    }

    void validate() const {
        if (variances.size() < 1 || (variances.array() <= 0.0).any())
            throw std::invalid_argument("NoiseProfile: variances must be positive");
    }
};

struct MetricsReport {
    Eigen::VectorXd per_user_sinr;
    Eigen::VectorXd per_user_rate;
    double avg_throughput = 0.0;
    double leakage = 0.0;
    double rss = 0.0;
    double d_value = 0.0;
};

namespace detail {

inline bool is_selected(const PrecoderOutput& out, Eigen::Index user) {
    return std::binary_search(out.selected_set.begin(), out.selected_set.end(),
                              static_cast<int>(user));
}

}  // namespace detail

/// SINR of a selected user: |h_u^T v_u|^2 / (sigma_u^2 + sum of
/// |h_u^T v_j|^2 over the other selected users). All metrics here are
/// closed-form in (H, V, sigma^2); symbols and noise are never sampled.
inline double sinr(const ChannelMatrix& h, const PrecoderOutput& out,
                   const NoiseProfile& noise, Eigen::Index user) {
    noise.validate();
    if (noise.variances.size() != h.users())
        throw std::invalid_argument("sinr: noise profile size mismatch");
    if (!detail::is_selected(out, user))
        throw std::domain_error("sinr: user " + std::to_string(user) + " is not selected");

    const Eigen::RowVectorXcd row = h.column(user).transpose();
    double interference = 0.0;
    for (int j : out.selected_set)
        if (j != static_cast<int>(user)) interference += std::norm((row * out.v_matrix.col(j)).value());
    const double signal = std::norm((row * out.v_matrix.col(user)).value());
    return signal / (noise.variances(user) + interference);
}

/// (1/L) sum over selected users of w_l log2(1 + SINR_l).
inline double avg_throughput(const ChannelMatrix& h, const PrecoderOutput& out,
                             const NoiseProfile& noise, const Eigen::VectorXd& weights) {
    if (out.selected_set.empty()) throw std::domain_error("avg_throughput: empty selection");
    if (weights.size() != h.users())
        throw std::invalid_argument("avg_throughput: weights size mismatch");
    double sum = 0.0;
    for (int l : out.selected_set)
        sum += weights(l) * std::log2(1.0 + sinr(h, out, noise, l));
    return sum / static_cast<double>(out.selected_set.size());
}

/// Total interference power at the non-selected users,
/// sum_{k not in S} sum_{l in S} |h_k^T v_l|^2.
inline double power_leakage(const ChannelMatrix& h, const PrecoderOutput& out) {
    double q = 0.0;
    for (Eigen::Index k = 0; k < h.users(); ++k) {
        if (detail::is_selected(out, k)) continue;
        const Eigen::RowVectorXcd row = h.column(k).transpose();
        for (int l : out.selected_set) q += std::norm((row * out.v_matrix.col(l)).value());
    }
    return q;
}

/// ||H^T V - beta I||_F^2
inline double d_value(const ChannelMatrix& h, const PrecodingMatrix& v, double beta) {
    check_dims(h, v);
    ComplexMatrix r = h.matrix().transpose() * v;
    r.diagonal().array() -= beta;
    return r.squaredNorm();
}

/// RSS = D/K - (1 - L/K) beta^2
inline double rss(const ChannelMatrix& h, const PrecodingMatrix& v, double beta,
                  int l_users, int k_users) {
    if (l_users < 0 || l_users > k_users)
        throw std::invalid_argument("rss: l_users out of range");
    const double kd = static_cast<double>(k_users);
    return d_value(h, v, beta) / kd - (1.0 - static_cast<double>(l_users) / kd) * beta * beta;
}

/// Full report; SINR and rate are zero for non-selected users.
inline MetricsReport compute_metrics(const ChannelMatrix& h, const PrecoderOutput& out,
                                     const NoiseProfile& noise, double beta) {
    const Eigen::Index k_users = h.users();
    MetricsReport rep;
    rep.per_user_sinr = Eigen::VectorXd::Zero(k_users);
    rep.per_user_rate = Eigen::VectorXd::Zero(k_users);
    for (int l : out.selected_set) {
        rep.per_user_sinr(l) = sinr(h, out, noise, l);
        rep.per_user_rate(l) = std::log2(1.0 + rep.per_user_sinr(l));
    }
    rep.avg_throughput =
        avg_throughput(h, out, noise, Eigen::VectorXd::Ones(k_users));
    rep.leakage = power_leakage(h, out);
    rep.d_value = d_value(h, out.v_matrix, beta);
    rep.rss = rss(h, out.v_matrix, beta, static_cast<int>(out.selected_set.size()),
                  static_cast<int>(k_users));
    return rep;
}

}  // namespace gsmimo
