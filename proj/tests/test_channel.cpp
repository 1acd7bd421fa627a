#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gsmimo/channel.hpp"

using namespace gsmimo;

TEST_CASE("sample_rayleigh is deterministic for equal (M, K, seed)") {
    SplitMix64 a(42), b(42);
    const ChannelMatrix h1 = sample_rayleigh(4, 4, a);
    const ChannelMatrix h2 = sample_rayleigh(4, 4, b);
    CHECK(h1.matrix() == h2.matrix());
}

TEST_CASE("sample_rayleigh rejects non-positive dimensions") {
    SplitMix64 rng(1);
    CHECK_THROWS_AS(sample_rayleigh(0, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_rayleigh(4, 0, rng), std::invalid_argument);
}

TEST_CASE("entries have unit second moment") {
    SplitMix64 rng(7);
    const ChannelMatrix h = sample_rayleigh(64, 64, rng);
    const double mean_sq = h.matrix().squaredNorm() / (64.0 * 64.0);
    CHECK(mean_sq == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("real and imaginary parts have CN(0,1) moments") {
    // direct Monte-Carlo moment estimator over a 32x32 draw
    SplitMix64 rng(11);
    const ChannelMatrix h = sample_rayleigh(32, 32, rng);
    const auto re = h.matrix().real();
    const auto im = h.matrix().imag();
    const double n = 32.0 * 32.0;
    CHECK(std::abs(re.mean()) < 0.06);
    CHECK(std::abs(im.mean()) < 0.06);
    const double var_re = (re.array() - re.mean()).square().sum() / n;
    const double var_im = (im.array() - im.mean()).square().sum() / n;
    CHECK(var_re == doctest::Approx(0.5).epsilon(0.1));
    CHECK(var_im == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("distributional sanity at scale") {
    // Var |h|^2 = 1 for CN(0,1), so the empirical mean must land within
    // 5 sigma of 1 with sigma = 1/sqrt(n)
    SplitMix64 rng(23);
    const int m = 50, k = 40;
    const ChannelMatrix h = sample_rayleigh(m, k, rng);
    const double n = static_cast<double>(m * k);
    const double mean_sq = h.matrix().squaredNorm() / n;
    CHECK(std::abs(mean_sq - 1.0) < 5.0 / std::sqrt(n));
}

TEST_CASE("distinct entries are uncorrelated") {
    SplitMix64 rng(31);
    const int m = 40, k = 40;
    const ChannelMatrix h = sample_rayleigh(m, k, rng);
    const double n = static_cast<double>(m * k);
    // correlate each real part with its right neighbour, column-major
    double acc = 0.0;
    long cnt = 0;
    const auto re = h.matrix().real();
    for (int c = 0; c + 1 < k; ++c)
        for (int r = 0; r < m; ++r) {
            acc += re(r, c) * re(r, c + 1);
            ++cnt;
        }
    const double corr = acc / cnt / 0.5;  // each part has variance 1/2
    CHECK(std::abs(corr) < 5.0 / std::sqrt(n));
}

TEST_CASE("different seeds give different matrices") {
    SplitMix64 a(1), b(2);
    CHECK(sample_rayleigh(8, 8, a).matrix() != sample_rayleigh(8, 8, b).matrix());
}

TEST_CASE("channel fixture round trip") {
    SplitMix64 rng(5);
    const ChannelMatrix h = sample_rayleigh(3, 5, rng);
    std::stringstream buf;
    save_channel(h, buf);
    const ChannelMatrix back = load_channel(buf);
    CHECK(back.antennas() == 3);
    CHECK(back.users() == 5);
    CHECK(back.matrix() == h.matrix());
}

TEST_CASE("load_channel rejects malformed input") {
    std::stringstream bad("2 2\n1.0 0.0\n");
    CHECK_THROWS_AS(load_channel(bad), std::runtime_error);
    std::stringstream bad2("0 3\n");
    CHECK_THROWS_AS(load_channel(bad2), std::runtime_error);
}

TEST_CASE("ChannelMatrix rejects non-finite entries") {
    ComplexMatrix m = ComplexMatrix::Ones(2, 2);
    m(0, 0) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(ChannelMatrix{m}, std::invalid_argument);
}
