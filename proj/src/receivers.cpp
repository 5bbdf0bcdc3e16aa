#include "mwf/receivers.hpp"

#include <sstream>
#include <stdexcept>

namespace mwf {

namespace {
constexpr double kMmseFloor = 1e-12;
}

Equalizer::Equalizer(const Eigen::MatrixXcd& H_eff, const EqualizerConfig& cfg)
    : cfg_(cfg), rows_(H_eff.rows()), cols_(H_eff.cols()) {
    if (rows_ < cols_)
        throw std::invalid_argument("equalizer needs at least as many observations as unknowns");
    if (cfg.noise_variance < 0.0)
        throw std::invalid_argument("noise variance must be nonnegative");

    if (cfg_.mode == EqMode::zf) {
        qr_.compute(H_eff);
        if (qr_.rank() < cols_) {
            std::ostringstream msg;
            msg << "zf equalizer: effective channel is numerically rank-deficient (rank "
                << qr_.rank() << " of " << cols_ << ", " << rows_ << "x" << cols_ << ")";
            throw NumericalError(msg.str());
        }
    } else {
        Hh_ = H_eff.adjoint();
        Eigen::MatrixXcd gram = Hh_ * H_eff;
        gram.diagonal().array() += cfg_.noise_variance + kMmseFloor;
        llt_.compute(gram);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("mmse equalizer: Gram matrix factorization failed");
    }
}

CVec Equalizer::apply(const CVec& y) const {
    if (static_cast<Eigen::Index>(y.size()) != rows_)
        throw std::invalid_argument("equalizer input length mismatch");
    Eigen::Map<const Eigen::VectorXcd> yv(y.data(), rows_);
    Eigen::VectorXcd x;
    if (cfg_.mode == EqMode::zf) {
        x = qr_.solve(yv);
    } else {
        x = llt_.solve(Hh_ * yv);
    }
    return CVec(x.data(), x.data() + x.size());
}

CVec equalize(const Eigen::MatrixXcd& H_eff, const CVec& y, const EqualizerConfig& cfg) {
    return Equalizer(H_eff, cfg).apply(y);
}

std::vector<std::uint8_t> detect_bits(const CVec& estimates, Constellation constellation) {
    return demap_symbols(estimates, constellation);
}

}  // namespace mwf
