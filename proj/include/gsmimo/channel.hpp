#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "gsmimo/rng.hpp"

namespace gsmimo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// M x K channel matrix; column k is the channel vector of user k.
/// Immutable after construction and safe to share across threads.
class ChannelMatrix {
public:
    explicit ChannelMatrix(ComplexMatrix entries) : h_(std::move(entries)) {
        if (h_.rows() < 1 || h_.cols() < 1)
            throw std::invalid_argument("ChannelMatrix: dimensions must be >= 1");
        if (!h_.allFinite())
            throw std::invalid_argument("ChannelMatrix: entries must be finite");
    }

    Eigen::Index antennas() const { return h_.rows(); }
    Eigen::Index users() const { return h_.cols(); }
    const ComplexMatrix& matrix() const { return h_; }
    auto column(Eigen::Index k) const { return h_.col(k); }

private:
    ComplexMatrix h_;
};

/// Draws an i.i.d. Rayleigh channel, entries CN(0,1). Identical seed and
/// dimensions reproduce the identical matrix.
inline ChannelMatrix sample_rayleigh(Eigen::Index m_antennas, Eigen::Index k_users,
                                     SplitMix64& rng) {
    if (m_antennas < 1 || k_users < 1)
        throw std::invalid_argument("sample_rayleigh: dimensions must be >= 1");
    ComplexMatrix h(m_antennas, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k)
        for (Eigen::Index m = 0; m < m_antennas; ++m)
            h(m, k) = rng.complex_gaussian();
    return ChannelMatrix(std::move(h));
}

// Plain-text fixture format: first line "M K", then M*K lines "re im"
// in column-major (user-major) order.

inline void save_channel(const ChannelMatrix& ch, std::ostream& out) {
    out.precision(17);
    out << ch.antennas() << ' ' << ch.users() << '\n';
    for (Eigen::Index k = 0; k < ch.users(); ++k)
        for (Eigen::Index m = 0; m < ch.antennas(); ++m)
            out << ch.matrix()(m, k).real() << ' ' << ch.matrix()(m, k).imag() << '\n';
}

inline void save_channel(const ChannelMatrix& ch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_channel: cannot open " + path);
    out.imbue(std::locale::classic());
    save_channel(ch, out);
}

inline ChannelMatrix load_channel(std::istream& in) {
    Eigen::Index m = 0, k = 0;
    if (!(in >> m >> k) || m < 1 || k < 1)
        throw std::runtime_error("load_channel: malformed header");
    ComplexMatrix h(m, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < m; ++r) {
            double re, im;
            if (!(in >> re >> im))
                throw std::runtime_error("load_channel: truncated entry list");
            h(r, c) = Complex(re, im);
        }
    return ChannelMatrix(std::move(h));
}

inline ChannelMatrix load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_channel: cannot open " + path);
    in.imbue(std::locale::classic());
    return load_channel(in);
}

}  // namespace gsmimo
