// coexistence.hpp - two orthogonal waveform-sharing schemes on one frame
//
// Scheme 1 (time partition): precoded Zak-domain transmission owns every
// alpha-th symbol block, plain per-block OFDM owns the rest. Each block gets
// its own cyclic prefix (fcp) so the doubly-dispersive channel cannot leak
// energy across block boundaries.
//
// Scheme 2 (lattice partition): an interleaved-DFT (SC-IFDM) data frame
// donates M lattice bins per chirp to affine twisted chirps, plus a guard
// ring sized to the expected channel spread; the whole frame gets one cyclic
// prefix (rcp).
//
// Both receivers are genie-aided: the channel spec is an input. Equalization
// runs on the retained observations (owned time samples / kept lattice
// bins), where the AWGN stays white; the effective matrix is built by
// pushing payload basis vectors through the exact noiseless transmit chain,
// so every prefix and Doppler phase convention is absorbed automatically.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mwf/channel.hpp"
#include "mwf/lattice.hpp"
#include "mwf/types.hpp"

namespace mwf {

struct CoexOtfsOfdmConfig {
    int M = 0;      // samples per symbol block / OFDM subcarriers
    int N = 0;      // symbol blocks per frame
    int alpha = 2;  // every alpha-th block belongs to the Zak-domain user
    int q1 = 0;     // owned blocks satisfy [n - q1]_alpha == 0
    int l_fcp = 0;  // per-block cyclic prefix, >= channel delay spread

    int otfs_payload_size() const { return M * (N / alpha); }
    int ofdm_payload_size() const { return M * (N - N / alpha); }
};

void validate(const CoexOtfsOfdmConfig& cfg);

// Owned-block selector G1 (true where the Zak-domain user transmits);
// the OFDM selector G2 is its complement.
bool otfs_owns_block(const CoexOtfsOfdmConfig& cfg, int n);

// otfs_payload: (N/alpha) x M delay-Doppler data, delay-major.
// ofdm_payload: per remaining block, M subcarrier symbols, block-ascending.
TimeFrame compose_otfs_ofdm(const CVec& otfs_payload, const CVec& ofdm_payload,
                            const CoexOtfsOfdmConfig& cfg);

// Effective matrix from payload basis to owned time samples under the given
// channel (noiseless, fcp attached and stripped). Square MN/alpha.
Eigen::MatrixXcd otfs_branch_matrix(const CoexOtfsOfdmConfig& cfg, const ChannelSpec& channel);

struct OtfsBranchResult {
    LatticeGrid y_dd;  // Zak transform of the G1-masked frame
    CVec equalized;    // MN/alpha payload estimates
};

// rx must be the frame after transmit() stripped the per-block prefix.
// Pass a precomputed branch matrix to amortize it across trials.
OtfsBranchResult receive_otfs_branch(const TimeFrame& rx, const CoexOtfsOfdmConfig& cfg,
                                     const ChannelSpec& channel, double noise_variance,
                                     const Eigen::MatrixXcd* branch_matrix = nullptr);

struct OfdmBranchResult {
    TFGrid y_freq;      // per-block DFT on OFDM-owned rows, zero elsewhere
    CVec equalized;     // MN - MN/alpha payload estimates
    bool out_of_model;  // channel has Doppler: one-tap model no longer exact
};

// One-tap frequency-domain equalization per the static-user assumption; a
// Doppler-bearing channel is processed anyway but flagged out_of_model.
OfdmBranchResult receive_ofdm_branch(const TimeFrame& rx, const CoexOtfsOfdmConfig& cfg,
                                     const ChannelSpec& channel, double noise_variance);

struct CoexScifdmAfdmConfig {
    int M = 0;
    int N = 0;
    // Which chirp family rides on top of the SC-IFDM data. afdm gives the
    // twisted-chirp scheme; fmcw/ocdm reuse the same lattice partition for a
    // plain ramp or Fresnel chirps (afdm params then ignored).
    ChirpKind chirp_kind = ChirpKind::afdm;
    AfdmParams afdm;                 // c1' and c2 of the twisted chirps
    std::vector<int> chirp_indices;  // i per chirp, each owning M lattice bins
    int guard_doppler = 0;           // cyclic guard radius along k
    int guard_delay = 0;             // cyclic guard radius along l
    double power_ratio_db = 20.0;    // per-bin chirp power over data power
    int l_rcp = 0;                   // whole-frame cyclic prefix
};

enum class BinOwner : std::uint8_t { data, chirp, guard };

struct ScifdmAfdmLayout {
    int M = 0;
    int N = 0;
    std::vector<BinOwner> owner;    // delay-major, owner[l + M*k]
    std::vector<int> chirp_of_bin;  // position in cfg.chirp_indices, -1 off-support
    std::vector<ChirpIndexMap> maps;
    std::vector<int> data_bins;     // delay-major positions of data bins, ascending

    int data_size() const { return static_cast<int>(data_bins.size()); }
};

// Classifies every lattice bin; rejects chirp configurations whose supports
// collide (a bin cannot carry two different chirps).
ScifdmAfdmLayout scifdm_afdm_layout(const CoexScifdmAfdmConfig& cfg);

// data_payload fills the data bins in delay-major scan order. When
// chirp_symbols is given it must hold one symbol per configured chirp; the
// c-th chirp is scaled by sqrt(ratio) * chirp_symbols[c], so the chirps can
// carry data of their own. Default is a unit symbol on every chirp.
TimeFrame compose_scifdm_afdm(const CVec& data_payload, const CoexScifdmAfdmConfig& cfg,
                              const CVec* chirp_symbols = nullptr);

// Effective matrix from data payload to the data-bin observations
// (noiseless, rcp attached and stripped). Square data_size x data_size.
Eigen::MatrixXcd scifdm_afdm_data_matrix(const CoexScifdmAfdmConfig& cfg,
                                         const ChannelSpec& channel);

struct ScifdmAfdmRx {
    LatticeGrid y_grid;            // full demodulated lattice
    CVec data_estimates;           // equalized data bins, scan order
    std::vector<CVec> chirp_bins;  // raw Y(k(l), l) per configured chirp, l-ascending
};

ScifdmAfdmRx receive_scifdm_afdm(const TimeFrame& rx, const CoexScifdmAfdmConfig& cfg,
                                 const ChannelSpec& channel, double noise_variance,
                                 const Eigen::MatrixXcd* data_matrix = nullptr);

}  // namespace mwf
