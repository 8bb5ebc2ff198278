#include "deepofw/modem.hpp"

#include <cmath>

#include "deepofw/errors.hpp"
#include "deepofw/rng.hpp"

namespace deepofw {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214582;

// Index i whose reflected Gray code equals v (prefix-xor inverse).
int gray_inverse(int v) {
    int i = v;
    for (int shift = 1; (v >> shift) != 0; ++shift) i ^= v >> shift;
    return i;
}

double stable_softplus(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace

Constellation Constellation::square_qam(int bits_per_symbol) {
    if (bits_per_symbol < 2 || bits_per_symbol % 2 != 0)
        throw DomainError("square_qam: bits per symbol must be even and >= 2");
    const int half = bits_per_symbol / 2;
    const int levels = 1 << half;
    // unit mean energy: per-axis mean level^2 of {+-1, +-3, ...} is (L^2-1)/3
    const double unit = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);

    Constellation c;
    c.bits_per_symbol = bits_per_symbol;
    c.points.resize(1 << bits_per_symbol);
    for (int label = 0; label < static_cast<int>(c.points.size()); ++label) {
        const int vi = label >> half;
        const int vq = label & (levels - 1);
        const double i_amp = (levels - 1 - 2 * gray_inverse(vi)) * unit;
        const double q_amp = (levels - 1 - 2 * gray_inverse(vq)) * unit;
        c.points[label] = {i_amp, q_amp};
    }
    return c;
}

BitBlock BitBlock::random(int n, int m, Rng& rng) {
    BitBlock b;
    b.n = n;
    b.m = m;
    b.bits.resize(static_cast<std::size_t>(n) * m);
    for (auto& bit : b.bits) bit = static_cast<std::uint8_t>(rng.bit());
    return b;
}

std::vector<cplx> map_bits(const BitBlock& b, const Constellation& c) {
    if (b.m != c.bits_per_symbol)
        throw ShapeError("map_bits: bit rows have " + std::to_string(b.m) +
                         " columns, constellation expects " +
                         std::to_string(c.bits_per_symbol));
    std::vector<cplx> x(b.n);
    for (int row = 0; row < b.n; ++row) {
        int label = 0;
        for (int col = 0; col < b.m; ++col) label = (label << 1) | b.at(row, col);
        x[row] = c.points[label];
    }
    return x;
}

LlrBlock demap_llr(const std::vector<cplx>& xt,
                   const std::vector<double>& noise_var,
                   const Constellation& c) {
    const int n = static_cast<int>(xt.size());
    const int m = c.bits_per_symbol;
    const int k = c.size();
    if (noise_var.size() != 1 && static_cast<int>(noise_var.size()) != n)
        throw ShapeError("demap_llr: noise_var must have 1 or N entries");
    for (double v : noise_var)
        if (v <= 0.0) throw DomainError("demap_llr: noise variance must be positive");

    LlrBlock out;
    out.n = n;
    out.m = m;
    out.llr.resize(static_cast<std::size_t>(n) * m);

    std::vector<double> metric(k);
    for (int row = 0; row < n; ++row) {
        const double nv = noise_var.size() == 1 ? noise_var[0] : noise_var[row];
        for (int i = 0; i < k; ++i) {
            const cplx d = xt[row] - c.points[i];
            metric[i] = -(d.real() * d.real() + d.imag() * d.imag()) / nv;
        }
        for (int bit = 0; bit < m; ++bit) {
            double mx0 = -1e300, mx1 = -1e300;
            for (int i = 0; i < k; ++i)
                (c.label_bit(i, bit) == 0 ? mx0 : mx1) =
                    std::max(c.label_bit(i, bit) == 0 ? mx0 : mx1, metric[i]);
            double s0 = 0.0, s1 = 0.0;
            for (int i = 0; i < k; ++i) {
                if (c.label_bit(i, bit) == 0)
                    s0 += std::exp(metric[i] - mx0);
                else
                    s1 += std::exp(metric[i] - mx1);
            }
            double llr = (mx0 + std::log(s0)) - (mx1 + std::log(s1));
            if (llr > kLlrClamp) llr = kLlrClamp;
            if (llr < -kLlrClamp) llr = -kLlrClamp;
            out.llr[row * m + bit] = llr;
        }
    }
    return out;
}

BitBlock hard_decisions(const LlrBlock& llrs) {
    BitBlock b;
    b.n = llrs.n;
    b.m = llrs.m;
    b.bits.resize(llrs.llr.size());
    for (std::size_t i = 0; i < llrs.llr.size(); ++i)
        b.bits[i] = llrs.llr[i] >= 0.0 ? 0 : 1;
    return b;
}

double bce_loss(const LlrBlock& llrs, const BitBlock& bits) {
    if (llrs.n != bits.n || llrs.m != bits.m)
        throw ShapeError("bce_loss: LLR and bit block shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < llrs.llr.size(); ++i) {
        // -ln P(b) = softplus(-llr) for b=0 and softplus(+llr) for b=1
        const double z = bits.bits[i] == 0 ? -llrs.llr[i] : llrs.llr[i];
        acc += stable_softplus(z);
    }
    return acc / (static_cast<double>(llrs.llr.size()) * kLn2);
}

TapeDemap bce_loss_on_tape(Tape& tape,
                           Var symbols,
                           Var noise_var,
                           const BitBlock& bits,
                           const Constellation& c) {
    const int rows = symbols.shape.rows;
    if (symbols.shape.cols != 1 || noise_var.shape.cols != 1 ||
        noise_var.shape.rows != rows)
        throw ShapeError("bce_loss_on_tape: symbols and noise_var must be Bx1");
    if (bits.n != rows || bits.m != c.bits_per_symbol)
        throw ShapeError("bce_loss_on_tape: bit block shape mismatch");
    const int m = c.bits_per_symbol;
    const int k = c.size();

    CTensor pts(Shape{1, k});
    for (int i = 0; i < k; ++i) {
        pts.re[i] = c.points[i].real();
        pts.im[i] = c.points[i].imag();
    }

    Var diff = tape.sub_outer(symbols, pts);
    Var dist = tape.abs2(diff);
    Var metric = tape.scale(tape.div_by_row_scalars(dist, noise_var), cplx{-1.0, 0.0});

    TapeDemap out;
    Var total{};
    bool have_total = false;
    for (int bit = 0; bit < m; ++bit) {
        std::vector<std::uint8_t> mask0(k), mask1(k);
        for (int i = 0; i < k; ++i) {
            mask0[i] = c.label_bit(i, bit) == 0;
            mask1[i] = c.label_bit(i, bit) == 1;
        }
        Var llr = tape.clamp(
            tape.sub(tape.lse_cols_masked(metric, mask0), tape.lse_cols_masked(metric, mask1)),
            -kLlrClamp, kLlrClamp);
        out.llr_bits.push_back(llr);

        CTensor sign(Shape{rows, 1});
        for (int row = 0; row < rows; ++row)
            sign.re[row] = bits.at(row, bit) == 0 ? -1.0 : 1.0;
        Var term = tape.sum(tape.softplus(tape.mul_elem_const(llr, sign)));
        total = have_total ? tape.add(total, term) : term;
        have_total = true;
    }
    out.bce = tape.scale(total, cplx{1.0 / (static_cast<double>(rows) * m * kLn2), 0.0});
    return out;
}

}  // namespace deepofw
