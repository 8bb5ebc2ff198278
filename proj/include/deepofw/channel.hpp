#pragma once

#include <string>
#include <vector>

#include "deepofw/rng.hpp"
#include "deepofw/tensor.hpp"

namespace deepofw {

// Power-delay profile with delays in units of the RMS delay spread.
struct TdlProfile {
    std::string name;
    std::vector<double> delay_norm;   // nonnegative, ascending
    std::vector<double> power_db;     // relative tap powers

    // Linear powers normalized to sum 1.
    std::vector<double> linear_powers() const;

    // CSV with header "delay_norm,power_db"; rows are sorted by delay.
    static TdlProfile load_csv(const std::string& path);

    // 12 taps at unit delay spacing, powers proportional to e^{-delay}.
    // Built in so tests need no external table.
    static TdlProfile exponential();

    void validate() const;
};

// One discrete-time multipath draw: complex gain per integer sample delay.
struct ChannelRealization {
    std::vector<cplx> taps;   // index = sample delay; sum |tap|^2 = 1
    double rms_ds_s = 0.0;
    double sample_rate_hz = 0.0;

    int length() const { return static_cast<int>(taps.size()); }
    double power() const;
};

struct NoiseSpec {
    double ebn0_db = 0.0;
    double n0 = 0.0;   // linear, per complex sample
    double es = 1.0;
};

enum class ChannelNormalization { PerRealization, Ensemble };

// Draws circular Gaussian tap gains per profile entry, quantizes delays to
// the sample grid (colliding taps summed), and renormalizes to unit power
// (per realization by default). Throws ConfigError if the discrete channel
// delay span would exceed max_delay_samples.
ChannelRealization sample_channel(const TdlProfile& profile,
                                  double rms_ds_s,
                                  double sample_rate_hz,
                                  int max_delay_samples,
                                  Rng& rng,
                                  ChannelNormalization norm =
                                      ChannelNormalization::PerRealization);

// Linear convolution truncated to the input length.
std::vector<cplx> apply_channel(const std::vector<cplx>& xt,
                                const ChannelRealization& h);

// N0 = Es / (M * 10^(ebn0_db/10)).
NoiseSpec noise_from_ebn0(double ebn0_db, int bits_per_symbol, double es);

// Adds i.i.d. circular complex Gaussian noise, per-sample variance n0.
void add_awgn(std::vector<cplx>& y, double n0, Rng& rng);

// RMS delay spread of one realization, in seconds.
double realization_rms_ds(const ChannelRealization& h);

}  // namespace deepofw
