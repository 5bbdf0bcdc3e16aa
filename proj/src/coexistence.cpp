#include "mwf/coexistence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mwf/fft.hpp"
#include "mwf/receivers.hpp"
#include "mwf/transforms.hpp"

namespace mwf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PrefixSpec fcp_of(const CoexOtfsOfdmConfig& cfg) {
    return PrefixSpec{PrefixKind::fcp, cfg.l_fcp, cfg.M};
}

PrefixSpec rcp_of(const CoexScifdmAfdmConfig& cfg) {
    return PrefixSpec{PrefixKind::rcp, cfg.l_rcp, 0};
}

// indices of the owned time samples, block-ascending
std::vector<int> owned_samples(const CoexOtfsOfdmConfig& cfg) {
    std::vector<int> kept;
    kept.reserve(static_cast<size_t>(cfg.otfs_payload_size()));
    for (int n = 0; n < cfg.N; ++n) {
        if (!otfs_owns_block(cfg, n)) continue;
        for (int l = 0; l < cfg.M; ++l) kept.push_back(l + n * cfg.M);
    }
    return kept;
}

// Zak-domain user's time frame, zero outside its blocks by construction.
CVec otfs_component(const CVec& otfs_payload, const CoexOtfsOfdmConfig& cfg) {
    LatticeGrid Xs(cfg.M, cfg.N / cfg.alpha);
    Xs.values = otfs_payload;
    PrecodeParams p{cfg.alpha, 1, cfg.q1, 0};
    LatticeGrid Xpr = precode_allocate(Xs, p, cfg.M, cfg.N);
    return sc_ifdm_modulate(otfs_phase_apply(Xpr, Direction::forward));
}

// Data-only composite lattice frame (chirps left out), used both by the
// composer and by the effective-matrix construction.
CVec scifdm_data_component(const CVec& data_payload, const ScifdmAfdmLayout& layout) {
    LatticeGrid X(layout.M, layout.N);
    for (size_t j = 0; j < layout.data_bins.size(); ++j)
        X.values[static_cast<size_t>(layout.data_bins[j])] = data_payload[j];
    return sc_ifdm_modulate(X);
}

}  // namespace

void validate(const CoexOtfsOfdmConfig& cfg) {
    if (cfg.M <= 0 || cfg.N <= 0)
        throw std::invalid_argument("coexistence grid dimensions must be positive");
    if (cfg.alpha < 2) throw std::invalid_argument("coexistence ratio alpha must be >= 2");
    if (cfg.N % cfg.alpha != 0) throw std::invalid_argument("alpha must divide N");
    if (cfg.q1 < 0 || cfg.q1 >= cfg.alpha)
        throw std::invalid_argument("q1 must lie in [0, alpha)");
    if (cfg.l_fcp < 0 || cfg.l_fcp > cfg.M)
        throw std::invalid_argument("per-block prefix length out of range");
}

bool otfs_owns_block(const CoexOtfsOfdmConfig& cfg, int n) {
    return ((n - cfg.q1) % cfg.alpha + cfg.alpha) % cfg.alpha == 0;
}

TimeFrame compose_otfs_ofdm(const CVec& otfs_payload, const CVec& ofdm_payload,
                            const CoexOtfsOfdmConfig& cfg) {
    validate(cfg);
    if (otfs_payload.size() != static_cast<size_t>(cfg.otfs_payload_size()))
        throw std::invalid_argument("otfs payload size mismatch");
    if (ofdm_payload.size() != static_cast<size_t>(cfg.ofdm_payload_size()))
        throw std::invalid_argument("ofdm payload size mismatch");

    CVec frame = otfs_component(otfs_payload, cfg);

    // remaining blocks: one OFDM symbol each, unitary IDFT of M subcarriers
    size_t consumed = 0;
    CVec symbol(static_cast<size_t>(cfg.M));
    for (int n = 0; n < cfg.N; ++n) {
        if (otfs_owns_block(cfg, n)) continue;
        std::copy(ofdm_payload.begin() + static_cast<std::ptrdiff_t>(consumed),
                  ofdm_payload.begin() + static_cast<std::ptrdiff_t>(consumed + cfg.M),
                  symbol.begin());
        consumed += static_cast<size_t>(cfg.M);
        CVec block = fft::inverse_unitary(symbol);
        for (int l = 0; l < cfg.M; ++l) frame[static_cast<size_t>(l + n * cfg.M)] += block[static_cast<size_t>(l)];
    }

    return TimeFrame{std::move(frame), 0, PrefixKind::none};
}

Eigen::MatrixXcd otfs_branch_matrix(const CoexOtfsOfdmConfig& cfg, const ChannelSpec& channel) {
    validate(cfg);
    const int P = cfg.otfs_payload_size();
    const std::vector<int> kept = owned_samples(cfg);
    const CVec silent_ofdm(static_cast<size_t>(cfg.ofdm_payload_size()), Complex(0.0));

    Eigen::MatrixXcd B(P, P);
    CVec basis(static_cast<size_t>(P), Complex(0.0));
    for (int j = 0; j < P; ++j) {
        basis[static_cast<size_t>(j)] = 1.0;
        TimeFrame tx = compose_otfs_ofdm(basis, silent_ofdm, cfg);
        TimeFrame rx = transmit(tx, channel, kInf, fcp_of(cfg), 0);
        for (int i = 0; i < P; ++i) B(i, j) = rx.samples[static_cast<size_t>(kept[static_cast<size_t>(i)])];
        basis[static_cast<size_t>(j)] = 0.0;
    }
    return B;
}

OtfsBranchResult receive_otfs_branch(const TimeFrame& rx, const CoexOtfsOfdmConfig& cfg,
                                     const ChannelSpec& channel, double noise_variance,
                                     const Eigen::MatrixXcd* branch_matrix) {
    validate(cfg);
    if (rx.samples.size() != static_cast<size_t>(cfg.M) * static_cast<size_t>(cfg.N))
        throw std::invalid_argument("received frame size mismatch");

    // G1 masking, then the Zak view of the isolated signal
    CVec masked(rx.samples.size(), Complex(0.0));
    for (int n = 0; n < cfg.N; ++n) {
        if (!otfs_owns_block(cfg, n)) continue;
        for (int l = 0; l < cfg.M; ++l) {
            const size_t p = static_cast<size_t>(l + n * cfg.M);
            masked[p] = rx.samples[p];
        }
    }

    OtfsBranchResult out;
    out.y_dd = dzt(masked, cfg.M, cfg.N);

    const std::vector<int> kept = owned_samples(cfg);
    CVec y(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) y[i] = rx.samples[static_cast<size_t>(kept[i])];

    Eigen::MatrixXcd local;
    if (!branch_matrix) {
        local = otfs_branch_matrix(cfg, channel);
        branch_matrix = &local;
    }
    out.equalized = Equalizer(*branch_matrix, {EqMode::mmse, noise_variance}).apply(y);
    return out;
}

OfdmBranchResult receive_ofdm_branch(const TimeFrame& rx, const CoexOtfsOfdmConfig& cfg,
                                     const ChannelSpec& channel, double noise_variance) {
    validate(cfg);
    if (rx.samples.size() != static_cast<size_t>(cfg.M) * static_cast<size_t>(cfg.N))
        throw std::invalid_argument("received frame size mismatch");

    const auto paths = effective_paths(channel);
    OfdmBranchResult out;
    out.out_of_model = false;
    for (const auto& p : paths)
        if (p.doppler != 0) out.out_of_model = true;

    // static per-subcarrier response H(m) = sum_r h_r e^{-j2pi m l_r / M}
    CVec H(static_cast<size_t>(cfg.M), Complex(0.0));
    for (const auto& p : paths)
        for (int m = 0; m < cfg.M; ++m)
            H[static_cast<size_t>(m)] +=
                p.gain * fft::unit_phase(-static_cast<std::int64_t>(m) * p.delay, cfg.M);

    out.y_freq = TFGrid(cfg.M, cfg.N);
    out.equalized.reserve(static_cast<size_t>(cfg.ofdm_payload_size()));
    CVec block(static_cast<size_t>(cfg.M));
    for (int n = 0; n < cfg.N; ++n) {
        if (otfs_owns_block(cfg, n)) continue;  // G2 drops the other user's rows
        std::copy(rx.samples.begin() + n * cfg.M, rx.samples.begin() + (n + 1) * cfg.M,
                  block.begin());
        CVec Y = fft::forward_unitary(block);
        for (int m = 0; m < cfg.M; ++m) {
            out.y_freq(n, m) = Y[static_cast<size_t>(m)];
            const Complex h = H[static_cast<size_t>(m)];
            out.equalized.push_back(std::conj(h) * Y[static_cast<size_t>(m)] /
                                    (std::norm(h) + noise_variance + 1e-12));
        }
    }
    return out;
}

ScifdmAfdmLayout scifdm_afdm_layout(const CoexScifdmAfdmConfig& cfg) {
    if (cfg.M <= 0 || cfg.N <= 0)
        throw std::invalid_argument("coexistence grid dimensions must be positive");
    if (cfg.guard_doppler < 0 || cfg.guard_delay < 0)
        throw std::invalid_argument("guard radii must be nonnegative");

    ScifdmAfdmLayout layout;
    layout.M = cfg.M;
    layout.N = cfg.N;
    const size_t total = static_cast<size_t>(cfg.M) * static_cast<size_t>(cfg.N);
    layout.owner.assign(total, BinOwner::data);
    layout.chirp_of_bin.assign(total, -1);

    for (size_t c = 0; c < cfg.chirp_indices.size(); ++c) {
        layout.maps.push_back(
            chirp_index_map(cfg.chirp_kind, cfg.M, cfg.N, cfg.chirp_indices[c], cfg.afdm));
        const auto& map = layout.maps.back();
        for (int l = 0; l < cfg.M; ++l) {
            const int k = map.doppler_of_delay[static_cast<size_t>(l)];
            const size_t pos = static_cast<size_t>(l + cfg.M * k);
            if (layout.owner[pos] == BinOwner::chirp)
                throw std::invalid_argument("chirp supports overlap on the lattice");
            layout.owner[pos] = BinOwner::chirp;
            layout.chirp_of_bin[pos] = static_cast<int>(c);
        }
    }

    // cyclic guard ring around every support bin
    for (size_t pos = 0; pos < total; ++pos) {
        if (layout.owner[pos] != BinOwner::chirp) continue;
        const int l = static_cast<int>(pos) % cfg.M;
        const int k = static_cast<int>(pos) / cfg.M;
        for (int dk = -cfg.guard_doppler; dk <= cfg.guard_doppler; ++dk) {
            for (int dl = -cfg.guard_delay; dl <= cfg.guard_delay; ++dl) {
                const int kk = ((k + dk) % cfg.N + cfg.N) % cfg.N;
                const int ll = ((l + dl) % cfg.M + cfg.M) % cfg.M;
                auto& owner = layout.owner[static_cast<size_t>(ll + cfg.M * kk)];
                if (owner == BinOwner::data) owner = BinOwner::guard;
            }
        }
    }

    for (size_t pos = 0; pos < total; ++pos)
        if (layout.owner[pos] == BinOwner::data) layout.data_bins.push_back(static_cast<int>(pos));
    return layout;
}

TimeFrame compose_scifdm_afdm(const CVec& data_payload, const CoexScifdmAfdmConfig& cfg,
                              const CVec* chirp_symbols) {
    const ScifdmAfdmLayout layout = scifdm_afdm_layout(cfg);
    if (data_payload.size() != static_cast<size_t>(layout.data_size()))
        throw std::invalid_argument("data payload size mismatch");
    if (chirp_symbols && chirp_symbols->size() != layout.maps.size())
        throw std::invalid_argument("need one chirp symbol per configured chirp");

    CVec frame = scifdm_data_component(data_payload, layout);

    if (!layout.maps.empty()) {
        LatticeGrid chirps(cfg.M, cfg.N);
        const double amplitude = std::sqrt(std::pow(10.0, cfg.power_ratio_db / 10.0));
        for (size_t c = 0; c < layout.maps.size(); ++c) {
            const Complex sym = chirp_symbols ? (*chirp_symbols)[c] : Complex(1.0, 0.0);
            embed_chirp(chirps, layout.maps[c], amplitude * sym);
        }
        CVec chirp_time = sc_ifdm_modulate(chirps);
        for (size_t p = 0; p < frame.size(); ++p) frame[p] += chirp_time[p];
    }

    return TimeFrame{std::move(frame), 0, PrefixKind::none};
}

Eigen::MatrixXcd scifdm_afdm_data_matrix(const CoexScifdmAfdmConfig& cfg,
                                         const ChannelSpec& channel) {
    const ScifdmAfdmLayout layout = scifdm_afdm_layout(cfg);
    const int P = layout.data_size();

    Eigen::MatrixXcd B(P, P);
    CVec basis(static_cast<size_t>(P), Complex(0.0));
    for (int j = 0; j < P; ++j) {
        basis[static_cast<size_t>(j)] = 1.0;
        TimeFrame tx{scifdm_data_component(basis, layout), 0, PrefixKind::none};
        TimeFrame rx = transmit(tx, channel, kInf, rcp_of(cfg), 0);
        LatticeGrid Y = sc_ifdm_demodulate(rx.samples, cfg.M, cfg.N);
        for (int i = 0; i < P; ++i)
            B(i, j) = Y.values[static_cast<size_t>(layout.data_bins[static_cast<size_t>(i)])];
        basis[static_cast<size_t>(j)] = 0.0;
    }
    return B;
}

ScifdmAfdmRx receive_scifdm_afdm(const TimeFrame& rx, const CoexScifdmAfdmConfig& cfg,
                                 const ChannelSpec& channel, double noise_variance,
                                 const Eigen::MatrixXcd* data_matrix) {
    const ScifdmAfdmLayout layout = scifdm_afdm_layout(cfg);
    if (rx.samples.size() != static_cast<size_t>(cfg.M) * static_cast<size_t>(cfg.N))
        throw std::invalid_argument("received frame size mismatch");

    ScifdmAfdmRx out;
    out.y_grid = sc_ifdm_demodulate(rx.samples, cfg.M, cfg.N);

    // raw support observations for the sensing side, one vector per chirp
    out.chirp_bins.resize(layout.maps.size());
    for (size_t c = 0; c < layout.maps.size(); ++c) {
        const auto& map = layout.maps[c];
        out.chirp_bins[c].resize(static_cast<size_t>(cfg.M));
        for (int l = 0; l < cfg.M; ++l)
            out.chirp_bins[c][static_cast<size_t>(l)] =
                out.y_grid(map.doppler_of_delay[static_cast<size_t>(l)], l);
    }

    CVec y(static_cast<size_t>(layout.data_size()));
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = out.y_grid.values[static_cast<size_t>(layout.data_bins[i])];

    Eigen::MatrixXcd local;
    if (!data_matrix) {
        local = scifdm_afdm_data_matrix(cfg, channel);
        data_matrix = &local;
    }
    out.data_estimates = Equalizer(*data_matrix, {EqMode::mmse, noise_variance}).apply(y);
    return out;
}

}  // namespace mwf
