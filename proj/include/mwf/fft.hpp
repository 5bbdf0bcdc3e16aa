// fft.hpp - unitary DFT wrappers and exact twiddle helpers
//
// All callers get the unitary convention:
//   forward:  X(k) = (1/sqrt(n)) sum_p x(p) e^{-j2pi kp/n}
//   inverse:  x(p) = (1/sqrt(n)) sum_k X(k) e^{+j2pi kp/n}
// The FFTW backend never leaks its unscaled convention. Plans are cached per
// (size, direction) behind a mutex; execution is lock-free and safe from
// multiple threads on distinct buffers.

#pragma once

#include <cstdint>

#include "mwf/types.hpp"

namespace mwf::fft {

// out and in must not alias. n >= 1.
void forward_unitary(const Complex* in, Complex* out, int n);
void inverse_unitary(const Complex* in, Complex* out, int n);

CVec forward_unitary(const CVec& in);
CVec inverse_unitary(const CVec& in);

// e^{j2pi num/den} with the angle reduced in exact integer arithmetic before
// touching floating point. Quadratic chirp phases reach |num| ~ den^2, where
// naive 2*pi*num/den would lose ~1e-10 of phase; the reduced form keeps every
// twiddle accurate to machine epsilon.
Complex unit_phase(std::int64_t num, std::int64_t den);

}  // namespace mwf::fft
