#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mwf/modulation.hpp"
#include "mwf/types.hpp"

namespace mwf {

enum class EqMode { zf, mmse };

struct EqualizerConfig {
    EqMode mode = EqMode::mmse;
    double noise_variance = 0.0;  // sigma^2; mmse always adds a 1e-12 floor
};

// Linear equalizer with a cached factorization, for reuse across trials that
// share (H_eff, sigma^2). Accepts tall H_eff (more observations than
// unknowns): zf solves least squares, mmse uses the Gram form.
class Equalizer {
public:
    Equalizer(const Eigen::MatrixXcd& H_eff, const EqualizerConfig& cfg);

    CVec apply(const CVec& y) const;

private:
    EqualizerConfig cfg_;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;  // zf
    Eigen::LLT<Eigen::MatrixXcd> llt_;                 // mmse: H^H H + (s2+floor) I
    Eigen::MatrixXcd Hh_;                              // H^H, mmse right-hand side
};

// One-shot convenience wrapper around Equalizer.
CVec equalize(const Eigen::MatrixXcd& H_eff, const CVec& y, const EqualizerConfig& cfg);

// Nearest-neighbor hard decision followed by Gray demapping.
std::vector<std::uint8_t> detect_bits(const CVec& estimates, Constellation constellation);

}  // namespace mwf
