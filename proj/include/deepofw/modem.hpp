#pragma once

#include <cstdint>
#include <vector>

#include "deepofw/tape.hpp"
#include "deepofw/tensor.hpp"

namespace deepofw {

// Gray-labeled square QAM with unit mean symbol energy.
//
// Labeling: a point's label is its bit pattern read as an integer with the
// first bit as MSB. The first M/2 bits select the in-phase level, the last
// M/2 bits the quadrature level. Each axis uses the reflected Gray code with
// the all-zero pattern on the most positive level, so neighbouring levels
// differ in exactly one bit and bit pattern 0...0 maps to the top-right
// corner point ((1+j)/sqrt(2) for QPSK). The `constellation-dump` CLI
// subcommand emits the full table.
struct Constellation {
    int bits_per_symbol = 0;    // M
    std::vector<cplx> points;   // 2^M entries indexed by label

    static Constellation square_qam(int bits_per_symbol);

    int size() const { return static_cast<int>(points.size()); }
    // Bit m (0 = first/MSB) of the label of point `index`.
    int label_bit(int index, int m) const {
        return (index >> (bits_per_symbol - 1 - m)) & 1;
    }
};

// N x M bit matrix, row n = bits of symbol n.
struct BitBlock {
    int n = 0;
    int m = 0;
    std::vector<std::uint8_t> bits;  // row-major

    static BitBlock random(int n, int m, class Rng& rng);
    std::uint8_t at(int row, int col) const { return bits[row * m + col]; }
};

// LLR convention: llr > 0 means bit 0 is more likely,
// llr = log P(b=0|x~) - log P(b=1|x~) in natural-log units, clamped to
// +/- kLlrClamp so downstream exp/log stay finite in double precision.
struct LlrBlock {
    int n = 0;
    int m = 0;
    std::vector<double> llr;  // row-major

    double at(int row, int col) const { return llr[row * m + col]; }
};

inline constexpr double kLlrClamp = 30.0;

std::vector<cplx> map_bits(const BitBlock& b, const Constellation& c);

// Exact log-sum-exp LLRs under a circular Gaussian posterior with per-symbol
// variance noise_var[n] (a single-element vector broadcasts to all symbols).
LlrBlock demap_llr(const std::vector<cplx>& xt,
                   const std::vector<double>& noise_var,
                   const Constellation& c);

// Hard decisions from LLR signs; llr >= 0 decides bit 0.
BitBlock hard_decisions(const LlrBlock& llrs);

// BCE in bits: -(1 / (N*M)) sum log2 P(B_nm | llr_nm).
double bce_loss(const LlrBlock& llrs, const BitBlock& bits);

// --- differentiable path ----------------------------------------------------

struct TapeDemap {
    std::vector<Var> llr_bits;  // one Bx1 node per bit position
    Var bce;                    // scalar, in bits per transmitted bit
};

// Demap + BCE recorded on a tape. `symbols` is a Bx1 complex node of
// detected symbols, `noise_var` a Bx1 real node of per-symbol variances,
// `bits` the matching B x M transmitted bits.
TapeDemap bce_loss_on_tape(Tape& tape,
                           Var symbols,
                           Var noise_var,
                           const BitBlock& bits,
                           const Constellation& c);

}  // namespace deepofw
