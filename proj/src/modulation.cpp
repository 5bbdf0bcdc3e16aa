#include "mwf/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace mwf {
namespace {

constexpr double kQamScale = 0.31622776601683794;  // 1/sqrt(10)

// Gray pair -> PAM level index 0..3 (levels -3,-1,+1,+3).
int gray_to_level(int b_hi, int b_lo) {
    if (b_hi == 0) return b_lo == 0 ? 0 : 1;  // 00 -> -3, 01 -> -1
    return b_lo == 1 ? 2 : 3;                 // 11 -> +1, 10 -> +3
}

void level_to_gray(int level, std::uint8_t& b_hi, std::uint8_t& b_lo) {
    static const std::uint8_t hi[4] = {0, 0, 1, 1};
    static const std::uint8_t lo[4] = {0, 1, 1, 0};
    b_hi = hi[level];
    b_lo = lo[level];
}

double pam(int level) { return (2 * level - 3) * kQamScale; }

int slice_level(double v) {
    if (v < -2.0 * kQamScale) return 0;
    if (v < 0.0) return 1;
    if (v < 2.0 * kQamScale) return 2;
    return 3;
}

}  // namespace

int bits_per_symbol(Constellation c) { return c == Constellation::qpsk ? 2 : 4; }

CVec map_bits(const std::vector<std::uint8_t>& bits, Constellation c) {
    const int bps = bits_per_symbol(c);
    if (bits.size() % static_cast<size_t>(bps) != 0)
        throw std::invalid_argument("map_bits: bit count not a multiple of bits per symbol");
    CVec out(bits.size() / static_cast<size_t>(bps));
    const double r = 1.0 / std::sqrt(2.0);
    for (size_t s = 0; s < out.size(); ++s) {
        const std::uint8_t* b = &bits[s * static_cast<size_t>(bps)];
        if (c == Constellation::qpsk) {
            out[s] = Complex((1 - 2 * b[0]) * r, (1 - 2 * b[1]) * r);
        } else {
            out[s] = Complex(pam(gray_to_level(b[0], b[1])), pam(gray_to_level(b[2], b[3])));
        }
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const CVec& symbols, Constellation c) {
    const int bps = bits_per_symbol(c);
    std::vector<std::uint8_t> bits(symbols.size() * static_cast<size_t>(bps));
    for (size_t s = 0; s < symbols.size(); ++s) {
        std::uint8_t* b = &bits[s * static_cast<size_t>(bps)];
        if (c == Constellation::qpsk) {
            b[0] = symbols[s].real() < 0.0;
            b[1] = symbols[s].imag() < 0.0;
        } else {
            level_to_gray(slice_level(symbols[s].real()), b[0], b[1]);
            level_to_gray(slice_level(symbols[s].imag()), b[2], b[3]);
        }
    }
    return bits;
}

}  // namespace mwf
