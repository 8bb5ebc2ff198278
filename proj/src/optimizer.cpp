#include "deepofw/optimizer.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "deepofw/errors.hpp"

namespace deepofw {

namespace {

constexpr double kLn10Over10 = 0.23025850929940456840179914546844;
constexpr double kNoiseVarFloor = 1e-30;
constexpr std::uint64_t kInitStream = 0x1717170000000001ULL;

double logit(double x) { return std::log(x / (1.0 - x)); }

struct AdamState {
    std::vector<double> m_re, v_re, m_im, v_im;

    void init(const CTensor& p) {
        m_re.assign(p.re.size(), 0.0);
        v_re.assign(p.re.size(), 0.0);
        m_im.assign(p.im.size(), 0.0);
        v_im.assign(p.im.size(), 0.0);
    }
};

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8; each complex entry is
// treated as two independent real parameters.
void adam_update(CTensor& p, const CTensor& g, AdamState& st, int t, double lr) {
    const double b1 = 0.9, b2 = 0.999, floor_eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<double>& x = comp == 0 ? p.re : p.im;
        const std::vector<double>& grad = comp == 0 ? g.re : g.im;
        std::vector<double>& m = comp == 0 ? st.m_re : st.m_im;
        std::vector<double>& v = comp == 0 ? st.v_re : st.v_im;
        for (std::size_t i = 0; i < x.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            x[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + floor_eps);
        }
    }
}

CTensor circulant_from_channel(const ChannelRealization& h, int n) {
    CTensor c(Shape{n, n});
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < h.length(); ++d) {
            const int j = ((i - d) % n + n) % n;
            c.re[i * n + j] += h.taps[d].real();
            c.im[i * n + j] += h.taps[d].imag();
        }
    return c;
}

}  // namespace

double TrainableParams::eps_db() const {
    const double u = eps_raw.re[0];
    const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    return eps_lo_db + (eps_hi_db - eps_lo_db) * s;
}

void TrainableParams::set_eps_db(double db) {
    double frac = (db - eps_lo_db) / (eps_hi_db - eps_lo_db);
    frac = std::min(std::max(frac, 1e-9), 1.0 - 1e-9);
    eps_raw.re[0] = logit(frac);
}

void TrainableParams::rebound_eps(double lo, double hi) {
    double current = eps_db();
    eps_lo_db = lo;
    eps_hi_db = hi;
    current = std::min(std::max(current, lo), hi);
    set_eps_db(current);
}

StepDraw draw_step(std::uint64_t seed, int step, const FrameConfig& frame,
                   const Constellation& c, int batch_size,
                   double ebn0_lo_db, double ebn0_hi_db) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(step)));
    StepDraw d;
    d.ebn0_db.resize(batch_size);
    d.n0.resize(batch_size);
    for (int s = 0; s < batch_size; ++s) {
        d.ebn0_db[s] = rng.uniform(ebn0_lo_db, ebn0_hi_db);
        d.n0[s] = noise_from_ebn0(d.ebn0_db[s], c.bits_per_symbol, 1.0).n0;
        d.mean_ebn0_db += d.ebn0_db[s] / batch_size;
    }
    d.bits = BitBlock::random(batch_size * frame.n, c.bits_per_symbol, rng);
    d.noise = CTensor(Shape{frame.n, batch_size});
    for (int s = 0; s < batch_size; ++s)
        for (int n = 0; n < frame.n; ++n) {
            const cplx z = rng.cnormal(d.n0[s]);
            d.noise.set(n, s, z);
        }
    return d;
}

Var normalize_power_on_tape(Tape& tape, Var q_raw, int n) {
    // trace(Q Q^H) = sum of |Q_ij|^2
    Var tr = tape.sum(tape.abs2(q_raw));
    if (tape.scalar_value(tr) <= 0.0)
        throw DegenerateInputError("normalize_power: zero waveform matrix");
    Var scale = tape.sqrt(tape.rdiv_const(static_cast<double>(n), tr));
    return tape.mul_scalar(q_raw, scale);
}

Var eps_db_on_tape(Tape& tape, Var eps_raw, double lo_db, double hi_db) {
    Var s = tape.sigmoid(eps_raw);
    return tape.add_const(tape.scale(s, cplx{hi_db - lo_db, 0.0}), lo_db);
}

Var papr_loss_on_tape(Tape& tape, Var bodies, Var eps_db) {
    const CTensor& v = tape.value(bodies);
    for (int s = 0; s < v.shape.cols; ++s) {
        double power = 0.0;
        for (int n = 0; n < v.shape.rows; ++n) {
            const cplx z = v.at(n, s);
            power += std::norm(z);
        }
        if (power == 0.0)
            throw DegenerateInputError("papr_loss: all-zero transmit block in batch");
    }
    Var p = tape.abs2(bodies);
    Var pbar = tape.mean_over_rows(p);
    Var ratio = tape.div_by_col_scalars(p, pbar);
    Var eps_lin = tape.exp(tape.scale(eps_db, cplx{kLn10Over10, 0.0}));
    Var hinge = tape.relu(tape.sub_scalar(ratio, eps_lin));
    return tape.mean(hinge);
}

Var threshold_loss_on_tape(Tape& tape, Var eps_db) {
    return tape.mean(eps_db);
}

Var total_loss_uncertainty(Tape& tape, Var r, Var p, Var theta,
                           Var sigma_r, Var sigma_p, Var sigma_t) {
    Var wr = tape.exp(tape.scale(sigma_r, cplx{-1.0, 0.0}));
    Var wp = tape.exp(tape.scale(sigma_p, cplx{-1.0, 0.0}));
    Var wt = tape.exp(tape.scale(sigma_t, cplx{-1.0, 0.0}));
    Var weighted = tape.add(tape.add(tape.cmul(wr, r), tape.cmul(wp, p)),
                            tape.cmul(wt, theta));
    Var reg = tape.add(tape.add(sigma_r, sigma_p), sigma_t);
    return tape.add(weighted, reg);
}

Var total_loss_fixed(Tape& tape, Var r, Var p, Var theta,
                     double alpha, double beta, double gamma) {
    return tape.add(tape.add(tape.scale(r, cplx{alpha, 0.0}), tape.scale(p, cplx{beta, 0.0})),
                    tape.scale(theta, cplx{gamma, 0.0}));
}

ChainOutputs build_training_chain(Tape& tape, const TrainLeaves& leaves,
                                  const ChannelRealization& h,
                                  const FrameConfig& frame,
                                  const Constellation& c,
                                  const StepDraw& draw,
                                  const OptimConfig& cfg) {
    const int n = frame.n;
    const int s = draw.noise.shape.cols;

    Var q = normalize_power_on_tape(tape, leaves.q_raw, n);
    Var qh = tape.hermitian(q);
    Var circ = tape.constant(circulant_from_channel(h, n));
    Var lam = tape.matmul(tape.matmul(qh, circ), q);

    CTensor x_mat(Shape{n, s});
    for (int blk = 0; blk < s; ++blk) {
        BitBlock rows;
        rows.n = n;
        rows.m = draw.bits.m;
        rows.bits.assign(
            draw.bits.bits.begin() + static_cast<std::ptrdiff_t>(blk) * n * draw.bits.m,
            draw.bits.bits.begin() + static_cast<std::ptrdiff_t>(blk + 1) * n * draw.bits.m);
        const std::vector<cplx> sym = map_bits(rows, c);
        for (int row = 0; row < n; ++row) x_mat.set(row, blk, sym[row]);
    }
    Var x = tape.constant(x_mat);
    Var bodies = tape.matmul(q, x);

    Var noise = tape.constant(draw.noise);
    Var r_mf = tape.add(tape.matmul(lam, x), tape.matmul(qh, noise));
    Var xt = tape.cmul_colbcast(r_mf, leaves.q_taps);

    // post-detection noise variance model: N0_s |q_n|^2 (orthonormal-column
    // matched filter approximation), floored to keep the division finite
    CTensor n0_row(Shape{1, s});
    for (int blk = 0; blk < s; ++blk) n0_row.re[blk] = draw.n0[blk];
    Var nv = tape.add_const(tape.matmul(tape.abs2(leaves.q_taps), tape.constant(n0_row)),
                            kNoiseVarFloor);
    Var xt_flat = tape.reshape(tape.transpose(xt), n * s, 1);
    Var nv_col = tape.reshape(tape.transpose(nv), n * s, 1);
    TapeDemap demap = bce_loss_on_tape(tape, xt_flat, nv_col, draw.bits, c);

    Var eps_db = eps_db_on_tape(tape, leaves.eps_raw, leaves.eps_lo_db, leaves.eps_hi_db);

    Var p_abs = tape.abs2(bodies);
    Var pbar = tape.mean_over_rows(p_abs);
    Var ratio = tape.div_by_col_scalars(p_abs, pbar);
    Var eps_lin = tape.exp(tape.scale(eps_db, cplx{kLn10Over10, 0.0}));
    Var papr_term = tape.mean(tape.relu(tape.sub_scalar(ratio, eps_lin)));

    Var theta = threshold_loss_on_tape(tape, eps_db);

    ChainOutputs out;
    out.r = demap.bce;
    out.p = papr_term;
    out.theta = theta;
    out.eps_db = eps_db;
    out.q_normalized = q;
    out.papr_ratio = ratio;
    out.total = cfg.weighting == WeightingMode::Uncertainty
                    ? total_loss_uncertainty(tape, out.r, out.p, out.theta,
                                             leaves.sigma_r, leaves.sigma_p, leaves.sigma_t)
                    : total_loss_fixed(tape, out.r, out.p, out.theta,
                                       cfg.alpha, cfg.beta, cfg.gamma);
    return out;
}

double reference_bce(const WaveformMatrix& q, const DetectorTaps& taps,
                     const ChannelRealization& h, const FrameConfig& frame,
                     const Constellation& c, const StepDraw& draw) {
    const int n = frame.n;
    const int s = draw.noise.shape.cols;
    const std::vector<cplx> lam = effective_channel(q, h, frame);

    double acc = 0.0;
    for (int blk = 0; blk < s; ++blk) {
        std::vector<double> nv(n);
        for (int k = 0; k < n; ++k)
            nv[k] = draw.n0[blk] * std::norm(taps.q[k]) + kNoiseVarFloor;
        BitBlock rows;
        rows.n = n;
        rows.m = draw.bits.m;
        rows.bits.assign(
            draw.bits.bits.begin() + static_cast<std::ptrdiff_t>(blk) * n * draw.bits.m,
            draw.bits.bits.begin() + static_cast<std::ptrdiff_t>(blk + 1) * n * draw.bits.m);
        const std::vector<cplx> sym = map_bits(rows, c);

        std::vector<cplx> r(n, cplx{0.0, 0.0});
        for (int row = 0; row < n; ++row) {
            cplx a{0.0, 0.0};
            for (int col = 0; col < n; ++col) a += lam[row * n + col] * sym[col];
            for (int i = 0; i < n; ++i)
                a += std::conj(q.q[i * n + row]) * draw.noise.at(i, blk);
            r[row] = a;
        }
        const std::vector<cplx> xt = detect(r, taps);
        const LlrBlock llrs = demap_llr(xt, nv, c);
        acc += bce_loss(llrs, rows);
    }
    return acc / s;
}

WaveformMatrix grouped_spread_basis(int n, const std::vector<int>& sizes) {
    int total = 0;
    for (int g : sizes) {
        if (g < 1) throw DomainError("grouped_spread_basis: group sizes must be >= 1");
        total += g;
    }
    if (total != n) throw ShapeError("grouped_spread_basis: group sizes must sum to n");

    const WaveformMatrix fh = WaveformMatrix::unitary_idft(n);
    WaveformMatrix q;
    q.n = n;
    q.q.assign(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
    const double pi2 = 6.283185307179586476925286766559;
    int first = 0;
    for (int g : sizes) {
        for (int pos = 0; pos < g; ++pos) {
            const int col = first + pos;
            for (int row = 0; row < n; ++row) {
                cplx acc{0.0, 0.0};
                for (int j = 0; j < g; ++j) {
                    const double ph = -pi2 * pos * j / g;
                    acc += fh.q[row * n + (first + j)] *
                           (cplx{std::cos(ph), std::sin(ph)} /
                            std::sqrt(static_cast<double>(g)));
                }
                q.q[row * n + col] = acc;
            }
        }
        first += g;
    }
    return q;
}

WaveformMatrix dft_spread_basis(int n, int g) {
    if (g < 1 || n % g != 0)
        throw DomainError("dft_spread_basis: group size must divide n");
    return grouped_spread_basis(n, std::vector<int>(n / g, g));
}

namespace {

// One-tap MMSE taps against the diagonal of the effective channel.
DetectorTaps diag_mmse_taps(const WaveformMatrix& q, const ChannelRealization& h,
                            const FrameConfig& frame, double n0) {
    const std::vector<cplx> lam = effective_channel(q, h, frame);
    DetectorTaps taps;
    taps.q.resize(frame.n);
    const double reg = std::max(n0, 1e-12);
    for (int k = 0; k < frame.n; ++k) {
        const cplx d = lam[k * frame.n + k];
        taps.q[k] = std::conj(d) / (std::norm(d) + reg);
    }
    return taps;
}


}  // namespace

namespace {

// normalized within-window variation of the frequency response; a proxy for
// the self-interference a spread group of that width would suffer
double window_variation(const std::vector<cplx>& resp, int start, int g) {
    cplx mean{0.0, 0.0};
    for (int j = 0; j < g; ++j) mean += resp[start + j];
    mean /= static_cast<double>(g);
    const double ref = std::norm(mean);
    double var = 0.0;
    for (int j = 0; j < g; ++j) var += std::norm(resp[start + j] - mean);
    return ref > 0.0 ? var / (g * ref) : 1e18;
}

}  // namespace

std::vector<int> plan_spread_groups(const std::vector<cplx>& freq_resp) {
    const int n = static_cast<int>(freq_resp.size());
    // -26 dB intra-group leakage bound keeps the one-tap error floor well
    // below the operating noise at the top of the training SNR range
    const double thr = std::pow(10.0, -26.0 / 10.0);

    std::vector<int> sizes;
    int i = 0, spread = 0;
    while (i < n) {
        int pick = 1;
        for (int g : {32, 16, 8, 4}) {
            if (g > n || i + g > n) continue;
            if (window_variation(freq_resp, i, g) < thr) {
                pick = g;
                break;
            }
        }
        sizes.push_back(pick);
        if (pick >= 4) spread += pick;
        i += pick;
    }
    if (spread >= 8 || n < 8) return sizes;

    // selective across the whole band: still spread the two flattest quads
    std::vector<std::pair<double, int>> cand;
    for (int s = 0; s + 4 <= n; ++s) cand.emplace_back(window_variation(freq_resp, s, 4), s);
    std::sort(cand.begin(), cand.end());
    std::vector<int> starts;
    for (const auto& [v, s] : cand) {
        bool disjoint = true;
        for (int t : starts)
            if (std::abs(t - s) < 4) disjoint = false;
        if (disjoint) starts.push_back(s);
        if (starts.size() == 2) break;
    }
    std::sort(starts.begin(), starts.end());
    sizes.clear();
    int pos = 0;
    for (int s : starts) {
        while (pos < s) {
            sizes.push_back(1);
            ++pos;
        }
        sizes.push_back(4);
        pos += 4;
    }
    while (pos < n) {
        sizes.push_back(1);
        ++pos;
    }
    return sizes;
}

TrainableParams init_params(const ChannelRealization& h, const FrameConfig& frame,
                            const Constellation& c, const OptimConfig& cfg) {
    const int n = frame.n;
    Rng rng(Rng::derive(cfg.seed, kInitStream));

    TrainableParams p;
    p.eps_lo_db = cfg.stage1.eps_lo_db;
    p.eps_hi_db = cfg.stage1.eps_hi_db;

    const WaveformMatrix start =
        cfg.init_spread >= 1
            ? dft_spread_basis(n, cfg.init_spread)
            : grouped_spread_basis(n, plan_spread_groups(channel_freq_response(h, n)));
    p.q_raw = CTensor(Shape{n, n});
    const double var = cfg.init_perturb_std * cfg.init_perturb_std;
    for (int i = 0; i < n * n; ++i) {
        cplx v = start.q[i];
        if (var > 0.0) v += rng.cnormal(var);
        p.q_raw.re[i] = v.real();
        p.q_raw.im[i] = v.imag();
    }

    const double n0 = noise_from_ebn0(cfg.init_mmse_ebn0_db, c.bits_per_symbol, 1.0).n0;
    const DetectorTaps mmse = diag_mmse_taps(start, h, frame, n0);
    p.q_taps = CTensor(Shape{n, 1});
    for (int k = 0; k < n; ++k) {
        p.q_taps.re[k] = mmse.q[k].real();
        p.q_taps.im[k] = mmse.q[k].imag();
    }

    p.eps_raw = CTensor(Shape{1, 1});
    p.set_eps_db(5.0);
    p.sigma_r = CTensor(Shape{1, 1});
    p.sigma_p = CTensor(Shape{1, 1});
    p.sigma_t = CTensor(Shape{1, 1});
    return p;
}

OptimizeResult optimize_for_channel(const ChannelRealization& h,
                                    const FrameConfig& frame,
                                    const Constellation& c,
                                    const OptimConfig& cfg) {
    frame.validate();
    if (h.length() - 1 > frame.cp_len)
        throw ContractError("optimize_for_channel: channel delay span exceeds cp_len");

    TrainableParams params = init_params(h, frame, c, cfg);
    OptimizeResult result;
    result.trace.reserve(cfg.stage1.steps + cfg.fine_tune.steps);
    result.sigma_min = 0.0;
    result.sigma_max = 0.0;

    Tape tape;
    int global_step = 0;
    for (int stage = 0; stage < 2; ++stage) {
        const StageConfig& sc = stage == 0 ? cfg.stage1 : cfg.fine_tune;
        if (stage == 1) {
            params.rebound_eps(sc.eps_lo_db, sc.eps_hi_db);
            // fresh loss balance for the tighter threshold clip and SNR range
            params.sigma_r.re[0] = 0.0;
            params.sigma_p.re[0] = 0.0;
            params.sigma_t.re[0] = 0.0;
        }

        AdamState adam_q, adam_taps, adam_eps, adam_sr, adam_sp, adam_st;
        adam_q.init(params.q_raw);
        adam_taps.init(params.q_taps);
        adam_eps.init(params.eps_raw);
        adam_sr.init(params.sigma_r);
        adam_sp.init(params.sigma_p);
        adam_st.init(params.sigma_t);

        for (int step = 0; step < sc.steps; ++step, ++global_step) {
            const StepDraw draw = draw_step(cfg.seed, global_step, frame, c,
                                            sc.batch_size, sc.ebn0_lo_db, sc.ebn0_hi_db);
            tape.reset();
            TrainLeaves leaves;
            leaves.q_raw = tape.input(params.q_raw, true);
            leaves.q_taps = tape.input(params.q_taps, true);
            leaves.eps_raw = tape.input(params.eps_raw, true);
            leaves.sigma_r = tape.input(params.sigma_r, true);
            leaves.sigma_p = tape.input(params.sigma_p, true);
            leaves.sigma_t = tape.input(params.sigma_t, true);
            leaves.eps_lo_db = params.eps_lo_db;
            leaves.eps_hi_db = params.eps_hi_db;

            const ChainOutputs chain = build_training_chain(tape, leaves, h, frame, c, draw, cfg);

            LossBreakdown bd;
            bd.step = global_step;
            bd.r = tape.scalar_value(chain.r);
            bd.p = tape.scalar_value(chain.p);
            bd.theta = tape.scalar_value(chain.theta);
            bd.total = tape.scalar_value(chain.total);
            bd.eps_db = tape.scalar_value(chain.eps_db);
            bd.sigma_r = params.sigma_r.re[0];
            bd.sigma_p = params.sigma_p.re[0];
            bd.sigma_t = params.sigma_t.re[0];
            bd.ebn0_db = draw.mean_ebn0_db;

            {
                const CTensor& ratio = tape.value(chain.papr_ratio);
                double lo = 1e300, hi = -1e300, mean = 0.0;
                for (int blk = 0; blk < ratio.shape.cols; ++blk) {
                    double peak = 0.0;
                    for (int row = 0; row < ratio.shape.rows; ++row)
                        peak = std::max(peak, ratio.at(row, blk).real());
                    const double db = 10.0 * std::log10(peak);
                    lo = std::min(lo, db);
                    hi = std::max(hi, db);
                    mean += db;
                }
                bd.papr_db_min = lo;
                bd.papr_db_max = hi;
                bd.papr_db_mean = mean / ratio.shape.cols;
            }
            {
                const CTensor& qv = tape.value(chain.q_normalized);
                double tr = 0.0;
                for (int i = 0; i < qv.size(); ++i)
                    tr += qv.re[i] * qv.re[i] + qv.im[i] * qv.im[i];
                bd.power_trace_err = std::abs(tr - static_cast<double>(frame.n));
                result.max_power_trace_err = std::max(result.max_power_trace_err,
                                                      bd.power_trace_err);
            }

            if (!std::isfinite(bd.total) || !std::isfinite(bd.r) || !std::isfinite(bd.p)) {
                std::ostringstream os;
                os << "optimize_for_channel: non-finite loss at step " << global_step
                   << " (R=" << bd.r << " P=" << bd.p << " Theta=" << bd.theta
                   << " total=" << bd.total << " eps_db=" << bd.eps_db
                   << " ebn0_db=" << bd.ebn0_db << ")";
                throw NumericError(os.str());
            }

            tape.backward(chain.total);
            adam_update(params.q_raw, tape.grad(leaves.q_raw), adam_q, step + 1,
                        sc.learning_rate);
            adam_update(params.q_taps, tape.grad(leaves.q_taps), adam_taps, step + 1,
                        sc.learning_rate);
            adam_update(params.eps_raw, tape.grad(leaves.eps_raw), adam_eps, step + 1,
                        sc.learning_rate);
            if (cfg.weighting == WeightingMode::Uncertainty) {
                adam_update(params.sigma_r, tape.grad(leaves.sigma_r), adam_sr, step + 1,
                            sc.learning_rate);
                adam_update(params.sigma_p, tape.grad(leaves.sigma_p), adam_sp, step + 1,
                            sc.learning_rate);
                adam_update(params.sigma_t, tape.grad(leaves.sigma_t), adam_st, step + 1,
                            sc.learning_rate);
                for (CTensor* s : {&params.sigma_r, &params.sigma_p, &params.sigma_t})
                    s->re[0] = std::min(std::max(s->re[0], -10.0), 10.0);
            }

            const double eps_now = params.eps_db();
            if (stage == 0) {
                result.eps_min_db_stage1 = std::min(result.eps_min_db_stage1, eps_now);
                result.eps_max_db_stage1 = std::max(result.eps_max_db_stage1, eps_now);
            } else {
                result.eps_min_db_ft = std::min(result.eps_min_db_ft, eps_now);
                result.eps_max_db_ft = std::max(result.eps_max_db_ft, eps_now);
            }
            for (const CTensor* s : {&params.sigma_r, &params.sigma_p, &params.sigma_t}) {
                result.sigma_min = std::min(result.sigma_min, s->re[0]);
                result.sigma_max = std::max(result.sigma_max, s->re[0]);
            }

            result.trace.push_back(bd);
        }
    }

    // export normalized waveforms and final detector
    const int n = frame.n;
    double tr = 0.0;
    for (int i = 0; i < n * n; ++i)
        tr += params.q_raw.re[i] * params.q_raw.re[i] +
              params.q_raw.im[i] * params.q_raw.im[i];
    const double scale = std::sqrt(static_cast<double>(n) / tr);
    result.q.n = n;
    result.q.q.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n * n; ++i)
        result.q.q[i] = cplx{params.q_raw.re[i] * scale, params.q_raw.im[i] * scale};
    result.taps.q.resize(n);
    for (int k = 0; k < n; ++k)
        result.taps.q[k] = cplx{params.q_taps.re[k], params.q_taps.im[k]};
    result.eps_db = params.eps_db();
    return result;
}

}  // namespace deepofw
