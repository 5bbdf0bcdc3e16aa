// Waveform synthesis and bit-mapping tests. The load-bearing claim checked
// here: for every derived kind, the lattice-configured mother modulator and
// the kind's own defining equation emit the same samples.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwf/modulation.hpp"
#include "mwf/waveforms.hpp"

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

double rel_err(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

std::vector<std::uint8_t> random_bits(size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

}  // namespace

TEST_CASE("qpsk anchor: bits 00 map to (1+j)/sqrt(2)") {
    CVec s = map_bits({0, 0}, Constellation::qpsk);
    CHECK(std::abs(s[0] - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("constellations have unit average energy") {
    // enumerate all symbols of each constellation
    for (auto c : {Constellation::qpsk, Constellation::qam16}) {
        const int bps = bits_per_symbol(c);
        const int count = 1 << bps;
        double e = 0.0;
        for (int v = 0; v < count; ++v) {
            std::vector<std::uint8_t> bits(static_cast<size_t>(bps));
            for (int i = 0; i < bps; ++i) bits[size_t(i)] = (v >> (bps - 1 - i)) & 1;
            e += std::norm(map_bits(bits, c)[0]);
        }
        CHECK(std::abs(e / count - 1.0) < 1e-12);
    }
}

TEST_CASE("bit mapping round-trips through hard demapping") {
    for (auto c : {Constellation::qpsk, Constellation::qam16}) {
        auto bits = random_bits(4096 / 2 * size_t(bits_per_symbol(c)), 5);
        CHECK(demap_symbols(map_bits(bits, c), c) == bits);
    }
}

TEST_CASE("demapping slices to the nearest point") {
    CVec noisy = {Complex(0.9, 0.9) / std::sqrt(2.0)};
    CHECK(demap_symbols(noisy, Constellation::qpsk) == std::vector<std::uint8_t>{0, 0});
    // 16-QAM: a point near +1/sqrt(10) on both axes decodes to Gray 11,11
    CVec q = {Complex(0.35, 0.28)};
    CHECK(demap_symbols(q, Constellation::qam16) == std::vector<std::uint8_t>{1, 1, 1, 1});
}

TEST_CASE("map_bits rejects ragged bit counts") {
    CHECK_THROWS_AS(map_bits({0, 1, 0}, Constellation::qpsk), std::invalid_argument);
}

TEST_CASE("ofdm synthesis is the unitary IDFT of the payload") {
    const int N = 64;
    WaveformSpec spec{WaveformKind::ofdm, 1, N, {}, {}};
    CVec x = random_vec(size_t(N), 7);
    CVec s = synthesize_mother(spec, x);
    for (int l = 0; l < N; ++l) {
        Complex want = 0.0;
        for (int k = 0; k < N; ++k) want += x[size_t(k)] * cis(2.0 * kPi * k * l / N);
        want /= std::sqrt(double(N));
        CHECK(std::abs(s[size_t(l)] - want) < 1e-12);
    }
    CHECK(rel_err(synthesize_reference(spec, x), s) < 1e-13);
}

TEST_CASE("ofdm kind requires the M=1 reduction") {
    WaveformSpec spec{WaveformKind::ofdm, 4, 16, {}, {}};
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("otfs mother path equals ISFFT+Heisenberg and the inverse Zak transform") {
    WaveformSpec spec{WaveformKind::otfs, 16, 16, {}, {}};
    CVec x = random_vec(256, 11);
    CVec mother = synthesize_mother(spec, x);
    CHECK(rel_err(mother, synthesize_reference(spec, x)) < 1e-12);
    LatticeGrid X(16, 16);
    X.values = x;
    CHECK(rel_err(mother, idzt(X)) < 1e-12);
}

TEST_CASE("fmcw mother path reproduces the quadratic ramp") {
    WaveformSpec spec{WaveformKind::fmcw, 32, 32, {}, {0}};
    CVec amp = {Complex(1.0)};
    CVec s = synthesize_mother(spec, amp);
    const int MN = 1024;
    for (int p = 0; p < MN; p += 37)
        CHECK(std::abs(s[size_t(p)] - cis(kPi * double(p) * p / MN)) < 1e-10);
    CHECK(rel_err(s, synthesize_reference(spec, amp)) < 1e-10);
}

TEST_CASE("ocdm single-chirp mother path matches the Fresnel column") {
    for (int i : {0, 16, 32}) {
        WaveformSpec spec{WaveformKind::ocdm, 32, 32, {}, {i}};
        CVec amp = {Complex(0.8, -0.3)};
        CVec mother = synthesize_mother(spec, amp);
        CVec ref = synthesize_reference(spec, amp);
        CHECK(rel_err(mother, ref) < 1e-10);
        // Fresnel columns are constant-modulus
        for (int p = 0; p < 1024; p += 101)
            CHECK(std::abs(std::abs(mother[size_t(p)]) - std::abs(amp[0]) / 32.0) < 1e-10);
    }
}

TEST_CASE("afdm single-chirp mother path matches the affine column across c1'") {
    for (int c1p : {1, 2, 4}) {
        for (int i : {0, 5, 16}) {
            WaveformSpec spec{WaveformKind::afdm, 32, 32, AfdmParams{c1p, 1.0}, {i}};
            CVec amp = {Complex(-0.6, 0.9)};
            CHECK(rel_err(synthesize_mother(spec, amp), synthesize_reference(spec, amp)) < 1e-10);
        }
    }
}

TEST_CASE("sc_ifdm mother path matches its direct scalar reference") {
    WaveformSpec spec{WaveformKind::sc_ifdm, 8, 16, {}, {}};
    CVec x = random_vec(128, 13);
    CHECK(rel_err(synthesize_mother(spec, x), synthesize_reference(spec, x)) < 1e-12);
}

TEST_CASE("demodulate inverts synthesize_mother for dense kinds") {
    WaveformSpec kinds[] = {
        {WaveformKind::ofdm, 1, 64, {}, {}},
        {WaveformKind::sc_ifdm, 16, 16, {}, {}},
        {WaveformKind::otfs, 16, 16, {}, {}},
    };
    unsigned seed = 17;
    for (const auto& spec : kinds) {
        CVec x = random_vec(spec.payload_size(), seed++);
        CHECK(rel_err(demodulate(spec, synthesize_mother(spec, x)), x) < 1e-12);
    }
}

TEST_CASE("matched projection recovers chirp amplitudes") {
    WaveformSpec spec{WaveformKind::ocdm, 32, 32, {}, {0, 16, 32}};
    CVec amps = {Complex(1.0, 0.5), Complex(-0.25, 0.75), Complex(0.1, -1.0)};
    CVec got = demodulate(spec, synthesize_mother(spec, amps));
    CHECK(rel_err(got, amps) < 1e-10);

    WaveformSpec aspec{WaveformKind::afdm, 32, 32, AfdmParams{2, 1.0}, {0, 16}};
    CVec am2 = {Complex(0.3, -0.4), Complex(1.2, 0.1)};
    CHECK(rel_err(demodulate(aspec, synthesize_mother(aspec, am2)), am2) < 1e-10);
}

TEST_CASE("mother equals reference across random payloads for every kind") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        WaveformSpec specs[] = {
            {WaveformKind::ofdm, 1, 32, {}, {}},
            {WaveformKind::sc_ifdm, 8, 8, {}, {}},
            {WaveformKind::otfs, 8, 8, {}, {}},
            {WaveformKind::fmcw, 8, 8, {}, {0}},
            {WaveformKind::ocdm, 8, 8, {}, {trial % 8}},
            {WaveformKind::afdm, 8, 8, AfdmParams{1, 1.0}, {trial % 8}},
        };
        for (const auto& spec : specs) {
            CVec payload(spec.payload_size());
            for (auto& z : payload) z = {u(rng), u(rng)};
            CHECK(rel_err(synthesize_mother(spec, payload), synthesize_reference(spec, payload)) < 1e-10);
        }
    }
}

TEST_CASE("payload length contract is enforced") {
    WaveformSpec spec{WaveformKind::otfs, 4, 4, {}, {}};
    CHECK_THROWS_AS(synthesize_mother(spec, CVec(5)), std::invalid_argument);
    WaveformSpec fm{WaveformKind::fmcw, 8, 8, {}, {0, 1}};
    CHECK_THROWS_AS(validate(fm), std::invalid_argument);
}
