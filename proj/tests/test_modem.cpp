#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "deepofw/grad_check.hpp"
#include "deepofw/modem.hpp"
#include "deepofw/rng.hpp"

using namespace deepofw;

namespace {

// independent demapper: plain sums over all points, no max-shift; applies
// the same +-30 clamp the production demapper documents
double llr_bruteforce(cplx xt, double nv, const Constellation& c, int bit) {
    double s0 = 0.0, s1 = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        const double d = std::norm(xt - c.points[i]);
        const double w = std::exp(-d / nv);
        if (c.label_bit(i, bit) == 0)
            s0 += w;
        else
            s1 += w;
    }
    const double llr = std::log(s0) - std::log(s1);
    return std::min(std::max(llr, -kLlrClamp), kLlrClamp);
}

}  // namespace

TEST_CASE("QPSK bits 00 map to the top-right corner") {
    const Constellation c = Constellation::square_qam(2);
    BitBlock b;
    b.n = 1;
    b.m = 2;
    b.bits = {0, 0};
    const std::vector<cplx> x = map_bits(b, c);
    const double v = 1.0 / std::sqrt(2.0);
    CHECK(x[0].real() == doctest::Approx(v));
    CHECK(x[0].imag() == doctest::Approx(v));
}

TEST_CASE("mean energy of 16-QAM is exactly 1") {
    const Constellation c = Constellation::square_qam(4);
    double e = 0.0;
    for (const cplx& p : c.points) e += std::norm(p);
    CHECK(e / c.size() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gray property: grid neighbours differ in exactly one bit") {
    for (int m : {2, 4, 6}) {
        const Constellation c = Constellation::square_qam(m);
        const int levels = 1 << (m / 2);
        const double spacing = 2.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);
        for (int i = 0; i < c.size(); ++i)
            for (int j = i + 1; j < c.size(); ++j) {
                const cplx d = c.points[i] - c.points[j];
                const bool adjacent = std::abs(std::abs(d) - spacing) < 1e-9 &&
                                      (std::abs(d.real()) < 1e-9 || std::abs(d.imag()) < 1e-9);
                if (!adjacent) continue;
                int diff = 0;
                for (int bit = 0; bit < m; ++bit)
                    diff += c.label_bit(i, bit) != c.label_bit(j, bit);
                CHECK(diff == 1);
            }
    }
}

TEST_CASE("demap then map at vanishing noise recovers every label") {
    for (int m : {2, 4}) {
        const Constellation c = Constellation::square_qam(m);
        for (int label = 0; label < c.size(); ++label) {
            const LlrBlock llrs = demap_llr({c.points[label]}, {1e-6}, c);
            const BitBlock hat = hard_decisions(llrs);
            for (int bit = 0; bit < m; ++bit) {
                CHECK(static_cast<int>(hat.at(0, bit)) == c.label_bit(label, bit));
                CHECK(std::abs(llrs.at(0, bit)) == doctest::Approx(kLlrClamp));
            }
        }
    }
}

TEST_CASE("QPSK at the origin gives all-zero LLRs") {
    const Constellation c = Constellation::square_qam(2);
    const LlrBlock llrs = demap_llr({cplx{0.0, 0.0}}, {0.3}, c);
    CHECK(llrs.at(0, 0) == doctest::Approx(0.0));
    CHECK(llrs.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("16-QAM LLRs match the brute-force sum oracle") {
    const Constellation c = Constellation::square_qam(4);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const cplx xt{rng.normal(), rng.normal()};
        const LlrBlock llrs = demap_llr({xt}, {0.1}, c);
        for (int bit = 0; bit < 4; ++bit) {
            const double expect = llr_bruteforce(xt, 0.1, c, bit);
            CHECK(llrs.at(0, bit) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("demap rejects non-positive noise variance") {
    const Constellation c = Constellation::square_qam(2);
    CHECK_THROWS_AS(demap_llr({cplx{0.1, 0.1}}, {0.0}, c), DomainError);
    CHECK_THROWS_AS(demap_llr({cplx{0.1, 0.1}}, {-1.0}, c), DomainError);
}

TEST_CASE("demap is equivariant to a global phase") {
    const Constellation c = Constellation::square_qam(4);
    Constellation rotated = c;
    const cplx phase = std::polar(1.0, 0.73);
    for (cplx& p : rotated.points) p *= phase;

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx xt{rng.normal(), rng.normal()};
        const LlrBlock a = demap_llr({xt}, {0.2}, c);
        const LlrBlock b = demap_llr({xt * phase}, {0.2}, rotated);
        for (int bit = 0; bit < 4; ++bit)
            CHECK(a.at(0, bit) == doctest::Approx(b.at(0, bit)).epsilon(1e-12));
    }
}

TEST_CASE("bce at zero LLRs is one bit") {
    LlrBlock llrs;
    llrs.n = 4;
    llrs.m = 2;
    llrs.llr.assign(8, 0.0);
    BitBlock bits;
    bits.n = 4;
    bits.m = 2;
    bits.bits = {0, 1, 1, 0, 0, 0, 1, 1};
    CHECK(bce_loss(llrs, bits) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bce at saturated correct LLRs is below 1e-3") {
    const Constellation c = Constellation::square_qam(4);
    Rng rng(9);
    BitBlock bits = BitBlock::random(8, 4, rng);
    const std::vector<cplx> x = map_bits(bits, c);
    const LlrBlock llrs = demap_llr(x, {1e-9}, c);
    const double r = bce_loss(llrs, bits);
    CHECK(r >= 0.0);
    CHECK(r <= 1e-3);
}

TEST_CASE("bce single bit llr=+2 true bit 0") {
    LlrBlock llrs;
    llrs.n = 1;
    llrs.m = 1;
    llrs.llr = {2.0};
    BitBlock bits;
    bits.n = 1;
    bits.m = 1;
    bits.bits = {0};
    CHECK(bce_loss(llrs, bits) ==
          doctest::Approx(std::log2(1.0 + std::exp(-2.0))).epsilon(1e-12));
}

TEST_CASE("bce is nonnegative on random blocks") {
    const Constellation c = Constellation::square_qam(4);
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        BitBlock bits = BitBlock::random(16, 4, rng);
        std::vector<cplx> x = map_bits(bits, c);
        for (cplx& v : x) v += cplx{0.3 * rng.normal(), 0.3 * rng.normal()};
        CHECK(bce_loss(demap_llr(x, {0.18}, c), bits) >= 0.0);
    }
}

TEST_CASE("tape demap equals the plain demapper") {
    const Constellation c = Constellation::square_qam(4);
    Rng rng(23);
    const int n = 12;
    BitBlock bits = BitBlock::random(n, 4, rng);
    CTensor xt(Shape{n, 1});
    CTensor nv(Shape{n, 1});
    std::vector<cplx> xt_plain(n);
    std::vector<double> nv_plain(n);
    for (int i = 0; i < n; ++i) {
        const cplx v{rng.normal(), rng.normal()};
        xt.set(i, 0, v);
        xt_plain[i] = v;
        nv_plain[i] = 0.05 + 0.2 * rng.uniform();
        nv.re[i] = nv_plain[i];
    }

    Tape t;
    const TapeDemap d = bce_loss_on_tape(t, t.constant(xt), t.constant(nv), bits, c);
    const LlrBlock plain = demap_llr(xt_plain, nv_plain, c);
    for (int bit = 0; bit < 4; ++bit) {
        const CTensor& col = t.value(d.llr_bits[bit]);
        for (int i = 0; i < n; ++i)
            CHECK(col.re[i] == doctest::Approx(plain.at(i, bit)).epsilon(1e-12));
    }
    CHECK(t.scalar_value(d.bce) == doctest::Approx(bce_loss(plain, bits)).epsilon(1e-12));
}

TEST_CASE("gradient of bce with respect to detected symbols") {
    const Constellation c = Constellation::square_qam(4);
    Rng rng(31);
    const int n = 6;
    BitBlock bits = BitBlock::random(n, 4, rng);
    CTensor xt(Shape{n, 1});
    for (int i = 0; i < n; ++i) xt.set(i, 0, {0.8 * rng.normal(), 0.8 * rng.normal()});
    CTensor nv(Shape{n, 1});
    for (int i = 0; i < n; ++i) nv.re[i] = 0.15;

    auto build = [&](Tape& t, const std::vector<Var>& xs) {
        return bce_loss_on_tape(t, xs[0], t.constant(nv), bits, c).bce;
    };
    CHECK(gradient_check(build, {xt}, 1e-6) < 1e-5);
}
