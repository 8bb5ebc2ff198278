#include "deepofw/metrics.hpp"

#include <cmath>

#include "deepofw/errors.hpp"

namespace deepofw {

double papr(const std::vector<cplx>& block) {
    if (block.empty()) throw DegenerateInputError("papr: empty block");
    double peak = 0.0, mean = 0.0;
    for (const cplx& v : block) {
        const double p = std::norm(v);
        if (p > peak) peak = p;
        mean += p;
    }
    if (mean == 0.0) throw DegenerateInputError("papr: all-zero block");
    mean /= static_cast<double>(block.size());
    return peak / mean;
}

std::vector<double> default_ccdf_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 120; ++i) grid.push_back(0.1 * i);
    return grid;
}

CcdfCurve ccdf(const PaprSamples& samples, const std::vector<double>& thresholds_db) {
    if (samples.values.empty()) throw DegenerateInputError("ccdf: no samples");
    CcdfCurve curve;
    curve.thresholds_db = thresholds_db;
    curve.n_samples = static_cast<std::int64_t>(samples.values.size());
    curve.prob.resize(thresholds_db.size());
    for (std::size_t i = 0; i < thresholds_db.size(); ++i) {
        const double thr = std::pow(10.0, thresholds_db[i] / 10.0);
        std::int64_t count = 0;
        for (double v : samples.values)
            if (v > thr) ++count;
        curve.prob[i] = static_cast<double>(count) / static_cast<double>(curve.n_samples);
    }
    return curve;
}

double CcdfCurve::threshold_at(double p) const {
    for (std::size_t i = 0; i < prob.size(); ++i)
        if (prob[i] <= p) return thresholds_db[i];
    return thresholds_db.back();
}

BerStats ber(const BitBlock& bits, const BitBlock& bits_hat) {
    if (bits.bits.size() != bits_hat.bits.size())
        throw ShapeError("ber: bit streams have different lengths");
    BerStats s;
    s.bits_total = static_cast<std::int64_t>(bits.bits.size());
    for (std::size_t i = 0; i < bits.bits.size(); ++i)
        if (bits.bits[i] != bits_hat.bits[i]) ++s.bit_errors;
    return s;
}

}  // namespace deepofw
