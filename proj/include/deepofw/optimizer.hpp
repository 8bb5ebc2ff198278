#pragma once

#include <cstdint>
#include <vector>

#include "deepofw/channel.hpp"
#include "deepofw/modem.hpp"
#include "deepofw/tape.hpp"
#include "deepofw/transceiver.hpp"

namespace deepofw {

enum class WeightingMode { Uncertainty, Fixed };

struct StageConfig {
    int steps = 500;
    int batch_size = 64;       // S blocks per step
    double learning_rate = 1e-2;
    double ebn0_lo_db = 0.0;
    double ebn0_hi_db = 25.0;
    double eps_lo_db = 2.0;
    double eps_hi_db = 8.0;
};

struct OptimConfig {
    StageConfig stage1{};
    StageConfig fine_tune{500, 64, 1e-3, 20.0, 25.0, 2.0, 6.0};
    std::uint64_t seed = 1;
    WeightingMode weighting = WeightingMode::Uncertainty;
    // fixed-mode weights; not a paper-specified setting, Eq-style weights
    // are only exercised when weighting == Fixed
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double init_perturb_std = 0.01;
    double init_mmse_ebn0_db = 12.5;  // midpoint of the stage-1 SNR range
    // Waveform start point: 0 plans channel-adaptive spread groups;
    // g >= 1 forces uniform groups of that size (1 = plain IDFT start).
    int init_spread = 0;
};

// Q = IDFT * blockdiag(DFT blocks): within each contiguous frequency group a
// g-point DFT spreads g symbols over the group's bins, so each column is a
// time-localized packet. Uniform g = 1 is the plain IDFT basis; a single
// full-width group approaches serial (single-carrier) transmission.
WaveformMatrix dft_spread_basis(int n, int g);                       // uniform groups
WaveformMatrix grouped_spread_basis(int n, const std::vector<int>& sizes);

// Contiguous group plan adapted to one channel draw: a group may only span
// bins whose frequency response is flat enough for one-tap detection to
// survive the intra-group leakage; where the response is too selective, the
// two flattest quads are still spread. Flat channels collapse to one
// full-width group.
std::vector<int> plan_spread_groups(const std::vector<cplx>& freq_resp);

// Raw trainable state. eps_db = lo + (hi-lo) * logistic(eps_raw) keeps the
// PAPR threshold inside its stage bounds by construction; sigma values are
// clipped to [-10, 10] after every update.
struct TrainableParams {
    CTensor q_raw;     // N x N complex
    CTensor q_taps;    // N x 1 complex
    CTensor eps_raw;   // 1 x 1 real, unconstrained
    CTensor sigma_r;   // 1 x 1 real
    CTensor sigma_p;
    CTensor sigma_t;
    double eps_lo_db = 2.0;
    double eps_hi_db = 8.0;

    double eps_db() const;
    void set_eps_db(double db);
    void rebound_eps(double lo, double hi);  // re-maps eps_raw, value clamped into (lo, hi)
};

struct LossBreakdown {
    int step = 0;
    double r = 0.0;
    double p = 0.0;
    double theta = 0.0;
    double total = 0.0;
    double eps_db = 0.0;
    double sigma_r = 0.0, sigma_p = 0.0, sigma_t = 0.0;
    double papr_db_min = 0.0, papr_db_mean = 0.0, papr_db_max = 0.0;
    double power_trace_err = 0.0;  // |trace(QQ^H) - N| after normalization
    double ebn0_db = 0.0;
};

// Random inputs of one optimization step, all drawn from the stream derived
// from (seed, step) in a fixed order: per-block Eb/N0 values first, then
// bits, then noise. Each batch sample carries its own noise variance.
struct StepDraw {
    BitBlock bits;                    // (S*N) x M, block s occupies rows s*N .. s*N+N-1
    CTensor noise;                    // N x S complex, time-domain body noise
    std::vector<double> ebn0_db;      // one per block
    std::vector<double> n0;           // one per block
    double mean_ebn0_db = 0.0;
};

StepDraw draw_step(std::uint64_t seed, int step, const FrameConfig& frame,
                   const Constellation& c, int batch_size,
                   double ebn0_lo_db, double ebn0_hi_db);

// --- the spec'd loss pieces as tape builders --------------------------------

// Q = Q_raw * sqrt(n / trace(Q_raw Q_raw^H)); DegenerateInputError on zero input.
Var normalize_power_on_tape(Tape& tape, Var q_raw, int n);

// eps_db = lo + (hi - lo) * logistic(eps_raw)
Var eps_db_on_tape(Tape& tape, Var eps_raw, double lo_db, double hi_db);

// P = (1/(S*N)) sum_s sum_n max(p_s[n] / pbar_s - eps_lin, 0) over the
// columns of `bodies` (N x S complex, one transmit body per column).
Var papr_loss_on_tape(Tape& tape, Var bodies, Var eps_db);

// Theta: mean learned threshold; a single eps per channel in direct mode.
Var threshold_loss_on_tape(Tape& tape, Var eps_db);

// Uncertainty weighting: L = e^{-sr} R + e^{-sp} P + e^{-st} Theta + sr + sp + st.
Var total_loss_uncertainty(Tape& tape, Var r, Var p, Var theta,
                           Var sigma_r, Var sigma_p, Var sigma_t);

// Fixed weighting: L = alpha R + beta P + gamma Theta.
Var total_loss_fixed(Tape& tape, Var r, Var p, Var theta,
                     double alpha, double beta, double gamma);

struct TrainLeaves {
    Var q_raw, q_taps, eps_raw, sigma_r, sigma_p, sigma_t;
    double eps_lo_db = 2.0;   // bounds of the eps_raw -> eps_db mapping
    double eps_hi_db = 8.0;
};

struct ChainOutputs {
    Var total, r, p, theta, eps_db;
    Var q_normalized;   // N x N
    Var papr_ratio;     // N x S, p/pbar per block (for batch PAPR stats)
};

// Full differentiable chain for one step: normalize -> effective channel
// application -> matched-filter noise -> one-tap detect -> LLR -> BCE, plus
// the PAPR and threshold terms and the configured weighting.
ChainOutputs build_training_chain(Tape& tape, const TrainLeaves& leaves,
                                  const ChannelRealization& h,
                                  const FrameConfig& frame,
                                  const Constellation& c,
                                  const StepDraw& draw,
                                  const OptimConfig& cfg);

// Same chain computed through the plain (non-tape) signal path; used to pin
// the tape implementation against an independent route.
double reference_bce(const WaveformMatrix& q, const DetectorTaps& taps,
                     const ChannelRealization& h, const FrameConfig& frame,
                     const Constellation& c, const StepDraw& draw);

struct OptimizeResult {
    WaveformMatrix q;
    DetectorTaps taps;
    double eps_db = 0.0;
    std::vector<LossBreakdown> trace;
    double max_power_trace_err = 0.0;
    double eps_min_db_stage1 = 1e300, eps_max_db_stage1 = -1e300;
    double eps_min_db_ft = 1e300, eps_max_db_ft = -1e300;
    double sigma_min = 0.0, sigma_max = 0.0;
};

TrainableParams init_params(const ChannelRealization& h, const FrameConfig& frame,
                            const Constellation& c, const OptimConfig& cfg);

// Adam-style adaptive-moment descent over (Q_raw, q, eps_raw, sigmas) on the
// objective above; stage 1 then fine tune. Throws NumericError with a
// diagnostic dump if the loss stops being finite.
OptimizeResult optimize_for_channel(const ChannelRealization& h,
                                    const FrameConfig& frame,
                                    const Constellation& c,
                                    const OptimConfig& cfg);

}  // namespace deepofw
