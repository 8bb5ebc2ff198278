#pragma once

#include <utility>
#include <vector>

#include "deepofw/channel.hpp"
#include "deepofw/modem.hpp"
#include "deepofw/tensor.hpp"

namespace deepofw {

struct FrameConfig {
    int n = 32;                    // waveforms / symbols per block
    int cp_len = 8;                // cyclic prefix samples
    int blocks = 1;                // blocks per frame
    double sample_rate_hz = 1e6;

    int block_len() const { return n + cp_len; }
    void validate() const;
};

// N x N complex waveform basis; column k holds the samples of waveform k.
struct WaveformMatrix {
    int n = 0;
    std::vector<cplx> q;  // row-major

    cplx at(int row, int col) const { return q[row * n + col]; }
    std::vector<cplx> column(int k) const;
    // trace(Q Q^H) = sum of squared magnitudes
    double power_trace() const;

    static WaveformMatrix identity(int n);
    static WaveformMatrix unitary_idft(int n);
};

struct DetectorTaps {
    std::vector<cplx> q;
};

// Unnormalized N-point DFT of the channel taps (zero-padded).
std::vector<cplx> channel_freq_response(const ChannelRealization& h, int n);

// Per block: body = Q x_block, output = [tail cp | body].
std::vector<cplx> modulate(const WaveformMatrix& q, const std::vector<cplx>& x,
                           const FrameConfig& cfg);

// Per block: drop cp samples, r_block = Q^H y_body.
std::vector<cplx> matched_filter(const std::vector<cplx>& y, const WaveformMatrix& q,
                                 const FrameConfig& cfg);

// Lambda = Q^H C Q with C the circulant matrix of the channel taps. The
// noiseless matched-filter output equals Lambda x whenever the channel delay
// span fits inside the cyclic prefix (enforced, ContractError otherwise).
std::vector<cplx> effective_channel(const WaveformMatrix& q, const ChannelRealization& h,
                                    const FrameConfig& cfg);

// One-tap detection x~_n = r_n q_n, applied per block.
std::vector<cplx> detect(const std::vector<cplx>& r, const DetectorTaps& taps);

// Classical OFDM: Q = unitary IDFT, one-tap MMSE taps
// q_n = H_n^* / (|H_n|^2 + max(N0, 1e-12)).
std::pair<WaveformMatrix, DetectorTaps> ofdm_reference(const FrameConfig& cfg,
                                                       const ChannelRealization& h,
                                                       double n0);

// Root-raised-cosine taps at `os` samples per symbol spanning `span` symbol
// periods (length span*os + 1), normalized to unit energy.
std::vector<double> rrc_taps(double rolloff, int span, int os);

struct ScfdeResult {
    BitBlock bits_hat;
    std::vector<double> papr;   // linear, one per transmitted block
};

// Single-carrier block transmission with CP, RRC pulse shaping (roll-off
// 0.15, 2x oversampling, span 8) and frequency-domain one-tap MMSE
// equalization. PAPR is measured on the oversampled transmit body.
ScfdeResult scfde_reference(const BitBlock& bits, const FrameConfig& cfg,
                            const ChannelRealization& h, double n0, Rng& rng,
                            const Constellation& c);

}  // namespace deepofw
