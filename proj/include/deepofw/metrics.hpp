#pragma once

#include <cstdint>
#include <vector>

#include "deepofw/modem.hpp"
#include "deepofw/tensor.hpp"

namespace deepofw {

struct PaprSamples {
    std::vector<double> values;  // linear ratios, each >= 1

    void merge(const PaprSamples& other) {
        values.insert(values.end(), other.values.begin(), other.values.end());
    }
};

struct CcdfCurve {
    std::vector<double> thresholds_db;  // ascending
    std::vector<double> prob;           // P(PAPR > threshold), non-increasing
    std::int64_t n_samples = 0;

    // Smallest grid threshold whose exceedance probability is <= p, i.e.
    // where the curve crosses below p. Returns the last threshold if the
    // curve never drops that low.
    double threshold_at(double p) const;
};

struct BerStats {
    std::int64_t bit_errors = 0;
    std::int64_t bits_total = 0;

    double rate() const { return bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / bits_total; }
    void merge(const BerStats& other) {
        bit_errors += other.bit_errors;
        bits_total += other.bits_total;
    }
};

// max |s_n|^2 / mean |s_n|^2 of one block.
double papr(const std::vector<cplx>& block);

std::vector<double> default_ccdf_grid();  // 0 to 12 dB in 0.1 dB steps

CcdfCurve ccdf(const PaprSamples& samples, const std::vector<double>& thresholds_db);

BerStats ber(const BitBlock& bits, const BitBlock& bits_hat);

}  // namespace deepofw
