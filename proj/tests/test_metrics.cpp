#include <doctest.h>

#include <cmath>
#include <vector>

#include "deepofw/metrics.hpp"
#include "deepofw/rng.hpp"

using namespace deepofw;

TEST_CASE("constant envelope has unit PAPR") {
    std::vector<cplx> block(16);
    for (int i = 0; i < 16; ++i) block[i] = std::polar(2.0, 0.3 * i);
    CHECK(papr(block) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit impulse of length N has PAPR N") {
    for (int n : {4, 16, 32}) {
        std::vector<cplx> block(n, cplx{0, 0});
        block[0] = {1, 0};
        CHECK(papr(block) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
    }
}

TEST_CASE("papr rejects degenerate blocks") {
    CHECK_THROWS_AS(papr({}), DegenerateInputError);
    CHECK_THROWS_AS(papr(std::vector<cplx>(8, cplx{0, 0})), DegenerateInputError);
}

TEST_CASE("papr is scale invariant") {
    Rng rng(3);
    std::vector<cplx> block(24);
    for (cplx& v : block) v = {rng.normal(), rng.normal()};
    const double base = papr(block);
    for (double a : {0.01, 3.0, -2.0}) {
        std::vector<cplx> scaled(block);
        for (cplx& v : scaled) v *= a;
        CHECK(papr(scaled) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("ccdf of identical samples is a step") {
    PaprSamples s;
    s.values.assign(100, 2.0);  // 3.01 dB
    const CcdfCurve curve = ccdf(s, default_ccdf_grid());
    for (std::size_t i = 0; i < curve.thresholds_db.size(); ++i) {
        const double expected = curve.thresholds_db[i] < 10.0 * std::log10(2.0) ? 1.0 : 0.0;
        CHECK(curve.prob[i] == expected);
    }
}

TEST_CASE("ccdf is monotone non-increasing and bounded") {
    Rng rng(5);
    PaprSamples s;
    for (int i = 0; i < 5000; ++i) {
        const double a = rng.normal(), b = rng.normal();
        s.values.push_back(1.0 + a * a + b * b);
    }
    const CcdfCurve curve = ccdf(s, default_ccdf_grid());
    CHECK(curve.prob.front() <= 1.0);
    for (std::size_t i = 1; i < curve.prob.size(); ++i) {
        CHECK(curve.prob[i] <= curve.prob[i - 1]);
        CHECK(curve.prob[i] >= 0.0);
    }
}

TEST_CASE("ccdf hand count on a two-point sample") {
    PaprSamples s;
    s.values = {2.0, 4.0};
    const CcdfCurve curve = ccdf(s, {3.0, 4.0, 6.1});
    CHECK(curve.prob[0] == doctest::Approx(1.0));   // 3 dB = 1.995 linear, both exceed
    CHECK(curve.prob[1] == doctest::Approx(0.5));   // 4 dB = 2.512, only 4.0 exceeds
    CHECK(curve.prob[2] == doctest::Approx(0.0));   // 6.1 dB = 4.074, none exceed
}

TEST_CASE("ccdf extremes") {
    PaprSamples s;
    s.values = {1.5, 2.5, 9.0};
    const CcdfCurve curve = ccdf(s, {-300.0, 300.0});
    CHECK(curve.prob[0] == 1.0);
    CHECK(curve.prob[1] == 0.0);
}

TEST_CASE("ber counts Hamming distance") {
    Rng rng(7);
    BitBlock a = BitBlock::random(64, 4, rng);
    CHECK(ber(a, a).bit_errors == 0);

    BitBlock flipped = a;
    for (auto& b : flipped.bits) b ^= 1;
    CHECK(ber(a, flipped).bit_errors == static_cast<std::int64_t>(a.bits.size()));

    BitBlock some = a;
    int k = 0;
    for (std::size_t i = 0; i < some.bits.size(); i += 7) {
        some.bits[i] ^= 1;
        ++k;
    }
    const BerStats s = ber(a, some);
    CHECK(s.bit_errors == k);
    CHECK(s.bits_total == static_cast<std::int64_t>(a.bits.size()));
}

TEST_CASE("ber merge adds counts both ways") {
    BerStats a{3, 100}, b{7, 250};
    BerStats ab = a;
    ab.merge(b);
    BerStats ba = b;
    ba.merge(a);
    CHECK(ab.bit_errors == 10);
    CHECK(ab.bits_total == 350);
    CHECK(ba.bit_errors == ab.bit_errors);
    CHECK(ba.bits_total == ab.bits_total);
}

TEST_CASE("ber rejects mismatched lengths") {
    Rng rng(9);
    BitBlock a = BitBlock::random(8, 2, rng);
    BitBlock b = BitBlock::random(9, 2, rng);
    CHECK_THROWS_AS(ber(a, b), ShapeError);
}
