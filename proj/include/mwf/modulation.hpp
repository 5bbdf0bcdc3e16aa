// modulation.hpp - bit/symbol mapping
//
// QPSK is Gray-mapped with bits (b0,b1) -> ((1-2 b0) + j(1-2 b1))/sqrt(2),
// so 00 -> (1+j)/sqrt(2). 16-QAM maps two Gray bits per axis,
// {00,01,11,10} -> {-3,-1,+1,+3}/sqrt(10). Both have unit average energy.

#pragma once

#include <cstdint>

#include "mwf/types.hpp"

namespace mwf {

enum class Constellation { qpsk, qam16 };

int bits_per_symbol(Constellation c);

// bits.size() must be a multiple of bits_per_symbol.
CVec map_bits(const std::vector<std::uint8_t>& bits, Constellation c);

// Hard nearest-neighbor decision back to bits.
std::vector<std::uint8_t> demap_symbols(const CVec& symbols, Constellation c);

}  // namespace mwf
