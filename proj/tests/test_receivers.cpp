// Equalizer tests: ZF/MMSE behavior on known matrices, plus the bit-level
// parity between the delay-Doppler equalizers of the two spread waveforms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwf/channel.hpp"
#include "mwf/receivers.hpp"
#include "mwf/rng.hpp"
#include "mwf/transforms.hpp"

using namespace mwf;

namespace {

constexpr double kPi = std::numbers::pi;

Complex cis(double a) { return {std::cos(a), std::sin(a)}; }

CVec random_vec(size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CVec v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    return v;
}

Eigen::MatrixXcd random_matrix(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = Complex(u(rng), u(rng));
    return A;
}

double rel_err(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

CVec matvec(const Eigen::MatrixXcd& A, const CVec& x) {
    Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXcd y = A * xv;
    return CVec(y.data(), y.data() + y.size());
}

}  // namespace

TEST_CASE("identity channel passes estimates through") {
    CVec y = random_vec(16, 1);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(16, 16);
    CHECK(rel_err(equalize(I, y, {EqMode::zf, 0.0}), y) < 1e-12);
    CHECK(rel_err(equalize(I, y, {EqMode::mmse, 0.0}), y) < 1e-10);
}

TEST_CASE("zf inverts a unitary channel exactly") {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(12, 2));
    Eigen::MatrixXcd Q = qr.householderQ();
    CVec x = random_vec(12, 3);
    CHECK(rel_err(equalize(Q, matvec(Q, x), {EqMode::zf, 0.0}), x) < 1e-10);
}

TEST_CASE("zf is an exact inverse on full-rank square channels") {
    Eigen::MatrixXcd H = random_matrix(20, 4);
    CVec x = random_vec(20, 5);
    CHECK(rel_err(equalize(H, matvec(H, x), {EqMode::zf, 0.0}), x) < 1e-10);
}

TEST_CASE("large noise variance shrinks mmse estimates toward zero") {
    Eigen::MatrixXcd H = random_matrix(16, 6);
    CVec x = random_vec(16, 7);
    CVec est = equalize(H, matvec(H, x), {EqMode::mmse, 1e6});
    CHECK(std::sqrt(energy(est) / energy(x)) < 1e-3);
}

TEST_CASE("mmse converges to zf as the noise variance vanishes") {
    Eigen::MatrixXcd H = random_matrix(14, 8);
    CVec y = random_vec(14, 9);
    CVec zf = equalize(H, y, {EqMode::zf, 0.0});
    CVec mmse = equalize(H, y, {EqMode::mmse, 1e-12});
    CHECK(rel_err(mmse, zf) < 1e-8);
}

TEST_CASE("rank-deficient channels raise a diagnostic error under zf") {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(8, 8);
    CVec u = random_vec(8, 10), v = random_vec(8, 11);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) H(i, j) = u[size_t(i)] * v[size_t(j)];
    CHECK_THROWS_AS(Equalizer(H, {EqMode::zf, 0.0}), NumericalError);
    CHECK_NOTHROW(Equalizer(H, {EqMode::mmse, 0.01}));
    try {
        Equalizer eq(H, {EqMode::zf, 0.0});
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("rank") != std::string::npos);
    }
}

TEST_CASE("tall systems solve in least-squares sense and reject wide ones") {
    Eigen::MatrixXcd H = random_matrix(16, 12).topRows(16).leftCols(6);
    CVec x = random_vec(6, 13);
    CVec y = matvec(H, x);
    CHECK(rel_err(equalize(H, y, {EqMode::zf, 0.0}), x) < 1e-10);
    CHECK(rel_err(equalize(H, y, {EqMode::mmse, 0.0}), x) < 1e-8);
    Eigen::MatrixXcd W = H.transpose();
    CHECK_THROWS_AS(Equalizer(W, {EqMode::zf, 0.0}), std::invalid_argument);
}

TEST_CASE("cached equalizer matches one-shot solves across inputs") {
    Eigen::MatrixXcd H = random_matrix(10, 14);
    Equalizer eq(H, {EqMode::mmse, 0.05});
    for (unsigned s = 0; s < 4; ++s) {
        CVec y = random_vec(10, 20 + s);
        CHECK(rel_err(eq.apply(y), equalize(H, y, {EqMode::mmse, 0.05})) < 1e-13);
    }
}

TEST_CASE("detect_bits recovers bits inside the decision regions") {
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto c : {Constellation::qpsk, Constellation::qam16}) {
        const double dmin = (c == Constellation::qpsk) ? std::sqrt(2.0) : 2.0 / std::sqrt(10.0);
        std::vector<std::uint8_t> bits(size_t(512 * bits_per_symbol(c)));
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        CVec sym = map_bits(bits, c);
        for (auto& z : sym) {
            const double r = 0.45 * dmin * u(rng);
            const double a = 2.0 * kPi * u(rng);
            z += r * cis(a);
        }
        CHECK(detect_bits(sym, c) == bits);
    }
}

TEST_CASE("otfs and phase-conjugated sc_ifdm equalizers detect identical bits") {
    const int M = 8, N = 8, MN = 64;
    ChannelSpec spec{{{Complex(0.8, 0.1), 0, 1},
                      {Complex(-0.35, 0.44), 2, -3},
                      {Complex(0.1, -0.62), 4, 7}},
                     ChannelNormalization::unit_power};
    Eigen::MatrixXcd H = build_channel_matrix(spec, MN);
    Eigen::MatrixXcd Hot = effective_channel(H, EqDomain::otfs, M, N);
    Eigen::MatrixXcd Hsc = effective_channel(H, EqDomain::sc_ifdm, M, N);

    std::mt19937 rng(33);
    std::vector<std::uint8_t> bits(128);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    CVec x = map_bits(bits, Constellation::qpsk);

    // one physical received frame: s = idzt(X), y = H s + n
    LatticeGrid X(M, N);
    X.values = x;
    CVec s = idzt(X);
    CVec y_time = channel_apply(spec, s);
    Rng noise(derive_seed(5, 0, 0));
    const double sigma2 = 0.01;
    for (auto& z : y_time) z += noise.cgaussian(sigma2);

    // branch A: Zak-domain receiver
    LatticeGrid Ydd = dzt(y_time, M, N);
    CVec est_a = equalize(Hot, Ydd.values, {EqMode::mmse, sigma2});

    // branch B: interleaved-DFT receiver; its data convention differs by the
    // diagonal phase Psi, so the estimate comes back through Psi^H
    LatticeGrid Ysc = sc_ifdm_demodulate(y_time, M, N);
    CVec est_b = equalize(Hsc, Ysc.values, {EqMode::mmse, sigma2});
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < M; ++l)
            est_b[size_t(l + M * k)] *= cis(2.0 * kPi * double(k) * double(l) / MN);

    CHECK(rel_err(est_b, est_a) < 1e-10);
    CHECK(detect_bits(est_a, Constellation::qpsk) == detect_bits(est_b, Constellation::qpsk));
    CHECK(detect_bits(est_a, Constellation::qpsk) == bits);  // high-SNR sanity
}
