// types.hpp - shared value types for the mother-waveform toolkit
//
// Conventions used throughout the library:
//   * all transforms are unitary (1/sqrt(n) scaling on both directions)
//   * LatticeGrid is the delay-Doppler lattice X(k,l), k Doppler / l delay,
//     vectorized delay-major: vec(X)[l + M*k] = X(k,l)
//   * TFGrid is the time-frequency grid X(n,m), n symbol / m subcarrier,
//     vectorized subcarrier-major: vec(X)[m + M*n] = X(n,m)

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwf {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Thrown when a computation (not its inputs) goes bad: singular equalizer
// matrix, non-finite samples, failed numerical cross-check. CLI maps it to
// exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Delay-Doppler lattice, N Doppler rows by M delay columns.
struct LatticeGrid {
    int M = 0;  // delay bins per Doppler row
    int N = 0;  // Doppler bins
    CVec values;  // values[l + M*k] = X(k,l)

    LatticeGrid() = default;
    LatticeGrid(int M_, int N_) : M(M_), N(N_), values(static_cast<size_t>(M_) * N_) {
        if (M_ <= 0 || N_ <= 0) throw std::invalid_argument("LatticeGrid: M and N must be positive");
    }

    Complex& operator()(int k, int l) { return values[static_cast<size_t>(l) + static_cast<size_t>(M) * k]; }
    const Complex& operator()(int k, int l) const {
        return values[static_cast<size_t>(l) + static_cast<size_t>(M) * k];
    }
    size_t size() const { return values.size(); }
};

// Time-frequency grid, N symbol rows by M subcarrier columns.
struct TFGrid {
    int M = 0;  // subcarriers per symbol
    int N = 0;  // symbols
    CVec values;  // values[m + M*n] = X(n,m)

    TFGrid() = default;
    TFGrid(int M_, int N_) : M(M_), N(N_), values(static_cast<size_t>(M_) * N_) {
        if (M_ <= 0 || N_ <= 0) throw std::invalid_argument("TFGrid: M and N must be positive");
    }

    Complex& operator()(int n, int m) { return values[static_cast<size_t>(m) + static_cast<size_t>(M) * n]; }
    const Complex& operator()(int n, int m) const {
        return values[static_cast<size_t>(m) + static_cast<size_t>(M) * n];
    }
    size_t size() const { return values.size(); }
};

enum class PrefixKind { none, cp, fcp, rcp };

// One frame of baseband samples. `samples` always holds the core M*N frame;
// prefix_kind/prefix_len describe the guard samples that are (or were)
// attached on air. cp and rcp are whole-frame prefixes, fcp is per-symbol.
struct TimeFrame {
    CVec samples;
    int prefix_len = 0;
    PrefixKind prefix_kind = PrefixKind::none;
};

inline double energy(const CVec& v) {
    double e = 0.0;
    for (const Complex& z : v) e += std::norm(z);
    return e;
}

inline double energy(const LatticeGrid& g) { return energy(g.values); }
inline double energy(const TFGrid& g) { return energy(g.values); }

}  // namespace mwf
