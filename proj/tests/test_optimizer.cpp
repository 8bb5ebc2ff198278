#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "deepofw/grad_check.hpp"
#include "deepofw/metrics.hpp"
#include "deepofw/optimizer.hpp"
#include "deepofw/rng.hpp"

using namespace deepofw;

namespace {

ChannelRealization flat_channel() {
    ChannelRealization h;
    h.sample_rate_hz = 1e6;
    h.taps = {cplx{1.0, 0.0}};
    return h;
}

ChannelRealization random_channel(int taps, Rng& rng) {
    ChannelRealization h;
    h.sample_rate_hz = 1e6;
    h.taps.resize(taps);
    double p = 0.0;
    for (cplx& v : h.taps) {
        v = {rng.normal(), rng.normal()};
        p += std::norm(v);
    }
    for (cplx& v : h.taps) v /= std::sqrt(p);
    return h;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("normalize_power rescales 2I to I and pins the trace") {
    const int n = 4;
    Tape t;
    CTensor q(Shape{n, n});
    for (int i = 0; i < n; ++i) q.set(i, i, {2.0, 0.0});
    Var out = normalize_power_on_tape(t, t.constant(q), n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx expect = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            CHECK(std::abs(t.value(out).at(i, j) - expect) < 1e-12);
        }

    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        CTensor raw(Shape{n, n});
        for (int i = 0; i < raw.size(); ++i) {
            raw.re[i] = rng.normal();
            raw.im[i] = rng.normal();
        }
        Tape t2;
        const CTensor& qn = t2.value(normalize_power_on_tape(t2, t2.constant(raw), n));
        double tr = 0.0;
        for (int i = 0; i < qn.size(); ++i) tr += qn.re[i] * qn.re[i] + qn.im[i] * qn.im[i];
        CHECK(tr == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
    }

    Tape t3;
    CHECK_THROWS_AS(normalize_power_on_tape(t3, t3.constant(CTensor(Shape{n, n})), n),
                    DegenerateInputError);
}

TEST_CASE("normalized transmit energy is N in expectation") {
    const int n = 8;
    Rng rng(7);
    CTensor raw(Shape{n, n});
    for (int i = 0; i < raw.size(); ++i) {
        raw.re[i] = rng.normal();
        raw.im[i] = rng.normal();
    }
    Tape t;
    const CTensor& qn = t.value(normalize_power_on_tape(t, t.constant(raw), n));

    const Constellation c = Constellation::square_qam(4);
    const int trials = 100000;
    double acc = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        BitBlock bits = BitBlock::random(n, 4, rng);
        const std::vector<cplx> x = map_bits(bits, c);
        for (int row = 0; row < n; ++row) {
            cplx v{0, 0};
            for (int col = 0; col < n; ++col) v += qn.at(row, col) * x[col];
            acc += std::norm(v);
        }
    }
    CHECK(acc / trials == doctest::Approx(static_cast<double>(n)).epsilon(0.01));
}

TEST_CASE("papr loss on hand-checked inputs") {
    Tape t;
    // constant-envelope batch: ratio 1 everywhere, any eps >= 0 dB gives 0
    CTensor bodies(Shape{4, 3});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) bodies.set(i, j, std::polar(1.0, 0.4 * i + j));
    Var eps0 = t.constant(CTensor::scalar(0.0));
    CHECK(t.scalar_value(papr_loss_on_tape(t, t.constant(bodies), eps0)) ==
          doctest::Approx(0.0));

    // unit impulse of length 4 at eps = 0 dB: ratios (4,0,0,0), hinge sum 3
    Tape t2;
    CTensor impulse(Shape{4, 1});
    impulse.set(0, 0, {1.0, 0.0});
    Var eps = t2.constant(CTensor::scalar(0.0));
    CHECK(t2.scalar_value(papr_loss_on_tape(t2, t2.constant(impulse), eps)) ==
          doctest::Approx(0.75));

    Tape t3;
    CHECK_THROWS_AS(papr_loss_on_tape(t3, t3.constant(CTensor(Shape{4, 2})),
                                      t3.constant(CTensor::scalar(0.0))),
                    DegenerateInputError);
}

TEST_CASE("papr loss is non-increasing in the threshold") {
    Rng rng(9);
    CTensor bodies(Shape{8, 4});
    for (int i = 0; i < bodies.size(); ++i) {
        bodies.re[i] = rng.normal();
        bodies.im[i] = rng.normal();
    }
    double prev = 1e300;
    for (double eps_db : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        Tape t;
        const double p = t.scalar_value(papr_loss_on_tape(
            t, t.constant(bodies), t.constant(CTensor::scalar(eps_db))));
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
}

TEST_CASE("threshold loss passes through eps and its gradient checks out") {
    Tape t;
    Var eps_raw = t.input(CTensor::scalar(0.31), true);
    Var eps_db = eps_db_on_tape(t, eps_raw, 2.0, 8.0);
    Var theta = threshold_loss_on_tape(t, eps_db);
    const double expect = 2.0 + 6.0 / (1.0 + std::exp(-0.31));
    CHECK(t.scalar_value(theta) == doctest::Approx(expect).epsilon(1e-12));

    auto build = [](Tape& tp, const std::vector<Var>& xs) {
        return threshold_loss_on_tape(tp, eps_db_on_tape(tp, xs[0], 2.0, 8.0));
    };
    CHECK(gradient_check(build, {CTensor::scalar(0.31)}, 1e-6) < 1e-7);

    // at a hard lower clip of the raw value, eps_db sits at the bound
    Tape t2;
    Var low = eps_db_on_tape(t2, t2.constant(CTensor::scalar(-50.0)), 2.0, 8.0);
    CHECK(t2.scalar_value(low) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("total loss reduces to R+P+Theta at zero sigmas") {
    Tape t;
    Var r = t.constant(CTensor::scalar(0.37));
    Var p = t.constant(CTensor::scalar(0.11));
    Var th = t.constant(CTensor::scalar(4.0));
    Var z = t.constant(CTensor::scalar(0.0));
    Var total = total_loss_uncertainty(t, r, p, th, z, z, z);
    CHECK(t.scalar_value(total) == doctest::Approx(0.37 + 0.11 + 4.0).epsilon(1e-12));
}

TEST_CASE("sigma stationarity point of the uncertainty weighting") {
    // dL/dsigma_r = -e^{-s} R + 1 vanishes at s = ln R
    const double r_val = 0.42;
    auto grad_at = [r_val](double s) {
        Tape t;
        Var sr = t.input(CTensor::scalar(s), true);
        Var z = t.constant(CTensor::scalar(0.0));
        Var total = total_loss_uncertainty(t, t.constant(CTensor::scalar(r_val)),
                                           t.constant(CTensor::scalar(0.0)),
                                           t.constant(CTensor::scalar(0.0)), sr, z, z);
        t.backward(total);
        return t.grad(sr).re[0];
    };
    CHECK(grad_at(0.2) == doctest::Approx(-std::exp(-0.2) * r_val + 1.0).epsilon(1e-12));
    CHECK(grad_at(std::log(r_val)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fixed weighting with alpha only is pure BCE") {
    Tape t;
    Var r = t.constant(CTensor::scalar(0.9));
    Var p = t.constant(CTensor::scalar(123.0));
    Var th = t.constant(CTensor::scalar(7.0));
    Var total = total_loss_fixed(t, r, p, th, 1.0, 0.0, 0.0);
    CHECK(t.scalar_value(total) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("fixed mode with beta=gamma=0 sends no gradient into the PAPR path") {
    FrameConfig frame{8, 2, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    Rng rng(11);
    const ChannelRealization h = random_channel(2, rng);
    OptimConfig cfg;
    cfg.weighting = WeightingMode::Fixed;
    cfg.alpha = 1.0;
    cfg.beta = 0.0;
    cfg.gamma = 0.0;
    cfg.seed = 5;

    const StepDraw draw = draw_step(5, 0, frame, c, 4, 10.0, 10.0);
    TrainableParams params = init_params(h, frame, c, cfg);

    Tape t;
    TrainLeaves leaves;
    leaves.q_raw = t.input(params.q_raw, true);
    leaves.q_taps = t.input(params.q_taps, true);
    leaves.eps_raw = t.input(params.eps_raw, true);
    leaves.sigma_r = t.input(params.sigma_r, true);
    leaves.sigma_p = t.input(params.sigma_p, true);
    leaves.sigma_t = t.input(params.sigma_t, true);
    const ChainOutputs chain = build_training_chain(t, leaves, h, frame, c, draw, cfg);
    t.backward(chain.total);
    // eps only feeds P and Theta; with beta = gamma = 0 its gradient is zero
    CHECK(t.grad(leaves.eps_raw).re[0] == 0.0);
    CHECK(t.grad(leaves.sigma_p).re[0] == 0.0);
}

TEST_CASE("step draws are reproducible and respect the SNR range") {
    FrameConfig frame{8, 2, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    const StepDraw a = draw_step(42, 7, frame, c, 4, 0.0, 25.0);
    const StepDraw b = draw_step(42, 7, frame, c, 4, 0.0, 25.0);
    CHECK(a.bits.bits == b.bits.bits);
    CHECK(a.noise.re == b.noise.re);
    CHECK(a.noise.im == b.noise.im);
    CHECK(a.ebn0_db == b.ebn0_db);
    for (double e : a.ebn0_db) {
        CHECK(e >= 0.0);
        CHECK(e <= 25.0);
    }
    const StepDraw c2 = draw_step(42, 8, frame, c, 4, 0.0, 25.0);
    CHECK(a.bits.bits != c2.bits.bits);
}

TEST_CASE("full-chain gradients match finite differences at N=8") {
    FrameConfig frame{8, 2, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    Rng rng(13);
    const ChannelRealization h = random_channel(3, rng);
    OptimConfig cfg;
    cfg.seed = 17;

    // moderate SNR keeps LLRs off the clamp rails
    const StepDraw draw = draw_step(17, 3, frame, c, 2, 8.0, 12.0);
    TrainableParams params = init_params(h, frame, c, cfg);

    auto build = [&](Tape& t, const std::vector<Var>& xs) {
        TrainLeaves leaves;
        leaves.q_raw = xs[0];
        leaves.q_taps = xs[1];
        leaves.eps_raw = xs[2];
        leaves.sigma_r = xs[3];
        leaves.sigma_p = xs[4];
        leaves.sigma_t = xs[5];
        return build_training_chain(t, leaves, h, frame, c, draw, cfg).total;
    };
    const std::vector<CTensor> ps = {params.q_raw, params.q_taps, params.eps_raw,
                                     params.sigma_r, params.sigma_p, params.sigma_t};
    CHECK(gradient_check(build, ps, 1e-6) < 1e-5);
}

TEST_CASE("step-0 loss is invariant to pre-scaling of Q_raw") {
    FrameConfig frame{8, 2, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    Rng rng(19);
    const ChannelRealization h = random_channel(2, rng);
    OptimConfig cfg;
    const StepDraw draw = draw_step(23, 0, frame, c, 4, 5.0, 15.0);
    TrainableParams params = init_params(h, frame, c, cfg);

    auto loss_with_scale = [&](double s) {
        Tape t;
        CTensor scaled = params.q_raw;
        for (int i = 0; i < scaled.size(); ++i) {
            scaled.re[i] *= s;
            scaled.im[i] *= s;
        }
        TrainLeaves leaves;
        leaves.q_raw = t.input(scaled, false);
        leaves.q_taps = t.input(params.q_taps, false);
        leaves.eps_raw = t.input(params.eps_raw, false);
        leaves.sigma_r = t.input(params.sigma_r, false);
        leaves.sigma_p = t.input(params.sigma_p, false);
        leaves.sigma_t = t.input(params.sigma_t, false);
        return t.scalar_value(build_training_chain(t, leaves, h, frame, c, draw, cfg).total);
    };
    CHECK(loss_with_scale(1.0) == doctest::Approx(loss_with_scale(3.0)).epsilon(1e-9));
}

TEST_CASE("step-0 BCE with IDFT init equals the OFDM reference chain") {
    FrameConfig frame{16, 4, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    Rng rng(29);
    const ChannelRealization h = random_channel(3, rng);
    OptimConfig cfg;
    cfg.init_perturb_std = 0.0;  // exact IDFT start
    cfg.seed = 31;

    const StepDraw draw = draw_step(31, 0, frame, c, 8, 10.0, 10.0);
    TrainableParams params = init_params(h, frame, c, cfg);

    Tape t;
    TrainLeaves leaves;
    leaves.q_raw = t.input(params.q_raw, false);
    leaves.q_taps = t.input(params.q_taps, false);
    leaves.eps_raw = t.input(params.eps_raw, false);
    leaves.sigma_r = t.input(params.sigma_r, false);
    leaves.sigma_p = t.input(params.sigma_p, false);
    leaves.sigma_t = t.input(params.sigma_t, false);
    const ChainOutputs chain = build_training_chain(t, leaves, h, frame, c, draw, cfg);

    const double n0_init = noise_from_ebn0(cfg.init_mmse_ebn0_db, 4, 1.0).n0;
    const auto [q_ofdm, taps_ofdm] = ofdm_reference(frame, h, n0_init);
    const double ref = reference_bce(q_ofdm, taps_ofdm, h, frame, c, draw);
    CHECK(t.scalar_value(chain.r) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("flat-channel run: lower PAPR than OFDM at matched BCE") {
    FrameConfig frame{32, 8, 1, 1e6};
    const Constellation c = Constellation::square_qam(4);
    const ChannelRealization h = flat_channel();

    OptimConfig cfg;
    cfg.seed = 37;
    cfg.stage1.steps = 200;
    cfg.stage1.batch_size = 32;
    cfg.fine_tune.steps = 0;
    const OptimizeResult res = optimize_for_channel(h, frame, c, cfg);

    CHECK(res.max_power_trace_err < 1e-9);
    CHECK(res.eps_min_db_stage1 >= 2.0);
    CHECK(res.eps_max_db_stage1 <= 8.0);
    CHECK(res.sigma_min >= -10.0);
    CHECK(res.sigma_max <= 10.0);

    // loss trace shows optimization progress
    std::vector<double> early, late;
    for (const LossBreakdown& bd : res.trace) {
        if (bd.step < 50) early.push_back(bd.total);
        if (bd.step >= 150) late.push_back(bd.total);
    }
    CHECK(median(late) < median(early));

    // PAPR of the learned waveforms against OFDM on the same bit stream
    const WaveformMatrix idft = WaveformMatrix::unitary_idft(32);
    const FrameConfig body_only{32, 0, 1, 1e6};
    Rng rng(41);
    PaprSamples learned, ofdm;
    for (int b = 0; b < 4000; ++b) {
        const BitBlock bits = BitBlock::random(32, 4, rng);
        const std::vector<cplx> x = map_bits(bits, c);
        learned.values.push_back(papr(modulate(res.q, x, body_only)));
        ofdm.values.push_back(papr(modulate(idft, x, body_only)));
    }
    const CcdfCurve lc = ccdf(learned, default_ccdf_grid());
    const CcdfCurve oc = ccdf(ofdm, default_ccdf_grid());
    CHECK(lc.threshold_at(0.1) < oc.threshold_at(0.1));

    // detection quality stays within 5% of the OFDM reference
    const double eval_ebn0 = 15.0;
    const StepDraw eval = draw_step(43, 0, frame, c, 64, eval_ebn0, eval_ebn0);
    const double n0 = eval.n0[0];
    const auto [q_ofdm, taps_ofdm] = ofdm_reference(frame, h, n0);
    const double r_learned = reference_bce(res.q, res.taps, h, frame, c, eval);
    const double r_ofdm = reference_bce(q_ofdm, taps_ofdm, h, frame, c, eval);
    CHECK(r_learned <= 1.05 * r_ofdm);
}
