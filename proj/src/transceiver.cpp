#include "deepofw/transceiver.hpp"

#include <cmath>
#include <string>

#include "deepofw/errors.hpp"

namespace deepofw {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// direct O(n^2) transforms; block sizes here are <= 128
std::vector<cplx> dft(const std::vector<cplx>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> out(n);
    for (int k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            const double ph = -kTwoPi * k * i / n;
            acc += x[i] * cplx{std::cos(ph), std::sin(ph)};
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> idft(const std::vector<cplx>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) {
        cplx acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            const double ph = kTwoPi * k * i / n;
            acc += x[k] * cplx{std::cos(ph), std::sin(ph)};
        }
        out[i] = acc / static_cast<double>(n);
    }
    return out;
}

}  // namespace

void FrameConfig::validate() const {
    if (n < 2) throw ConfigError("frame.n must be >= 2");
    if (cp_len < 0 || cp_len >= n)
        throw ConfigError("frame.cp_len must satisfy 0 <= cp_len < n (got " +
                          std::to_string(cp_len) + ", n = " + std::to_string(n) + ")");
    if (blocks < 1) throw ConfigError("frame.blocks must be >= 1");
    if (sample_rate_hz <= 0.0) throw ConfigError("frame.sample_rate_hz must be positive");
}

std::vector<cplx> WaveformMatrix::column(int k) const {
    std::vector<cplx> col(n);
    for (int row = 0; row < n; ++row) col[row] = q[row * n + k];
    return col;
}

double WaveformMatrix::power_trace() const {
    double acc = 0.0;
    for (const cplx& v : q) acc += std::norm(v);
    return acc;
}

WaveformMatrix WaveformMatrix::identity(int n) {
    WaveformMatrix w;
    w.n = n;
    w.q.assign(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
    for (int i = 0; i < n; ++i) w.q[i * n + i] = cplx{1.0, 0.0};
    return w;
}

WaveformMatrix WaveformMatrix::unitary_idft(int n) {
    WaveformMatrix w;
    w.n = n;
    w.q.resize(static_cast<std::size_t>(n) * n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) {
            const double ph = kTwoPi * row * col / n;
            w.q[row * n + col] = cplx{std::cos(ph) * scale, std::sin(ph) * scale};
        }
    return w;
}

std::vector<cplx> channel_freq_response(const ChannelRealization& h, int n) {
    std::vector<cplx> resp(n);
    for (int k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (int d = 0; d < h.length(); ++d) {
            const double ph = -kTwoPi * k * d / n;
            acc += h.taps[d] * cplx{std::cos(ph), std::sin(ph)};
        }
        resp[k] = acc;
    }
    return resp;
}

std::vector<cplx> modulate(const WaveformMatrix& q, const std::vector<cplx>& x,
                           const FrameConfig& cfg) {
    const int n = cfg.n;
    if (q.n != n) throw ShapeError("modulate: waveform matrix size does not match frame");
    if (static_cast<int>(x.size()) != cfg.blocks * n)
        throw ShapeError("modulate: expected " + std::to_string(cfg.blocks * n) +
                         " symbols, got " + std::to_string(x.size()));
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(cfg.blocks) * cfg.block_len());
    std::vector<cplx> body(n);
    for (int b = 0; b < cfg.blocks; ++b) {
        for (int row = 0; row < n; ++row) {
            cplx acc{0.0, 0.0};
            for (int col = 0; col < n; ++col) acc += q.q[row * n + col] * x[b * n + col];
            body[row] = acc;
        }
        for (int i = n - cfg.cp_len; i < n; ++i) out.push_back(body[i]);
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

std::vector<cplx> matched_filter(const std::vector<cplx>& y, const WaveformMatrix& q,
                                 const FrameConfig& cfg) {
    const int n = cfg.n;
    if (q.n != n) throw ShapeError("matched_filter: waveform matrix size mismatch");
    if (static_cast<int>(y.size()) != cfg.blocks * cfg.block_len())
        throw ShapeError("matched_filter: expected " +
                         std::to_string(cfg.blocks * cfg.block_len()) + " samples, got " +
                         std::to_string(y.size()));
    std::vector<cplx> r(static_cast<std::size_t>(cfg.blocks) * n);
    for (int b = 0; b < cfg.blocks; ++b) {
        const cplx* body = y.data() + b * cfg.block_len() + cfg.cp_len;
        for (int col = 0; col < n; ++col) {
            cplx acc{0.0, 0.0};
            for (int row = 0; row < n; ++row)
                acc += std::conj(q.q[row * n + col]) * body[row];
            r[b * n + col] = acc;
        }
    }
    return r;
}

std::vector<cplx> effective_channel(const WaveformMatrix& q, const ChannelRealization& h,
                                    const FrameConfig& cfg) {
    const int n = cfg.n;
    if (q.n != n) throw ShapeError("effective_channel: waveform matrix size mismatch");
    if (h.length() - 1 > cfg.cp_len)
        throw ContractError("effective_channel: channel delay span " +
                            std::to_string(h.length() - 1) + " exceeds cp_len " +
                            std::to_string(cfg.cp_len));
    // T = C Q, row i of C holds tap h_d at column (i - d) mod n
    std::vector<cplx> t(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < h.length(); ++d) {
            const cplx a = h.taps[d];
            if (a == cplx{0.0, 0.0}) continue;
            const int j = ((i - d) % n + n) % n;
            for (int col = 0; col < n; ++col)
                t[i * n + col] += a * q.q[j * n + col];
        }
    // Lambda = Q^H T
    std::vector<cplx> lam(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
    for (int row = 0; row < n; ++row)
        for (int i = 0; i < n; ++i) {
            const cplx qc = std::conj(q.q[i * n + row]);
            for (int col = 0; col < n; ++col)
                lam[row * n + col] += qc * t[i * n + col];
        }
    return lam;
}

std::vector<cplx> detect(const std::vector<cplx>& r, const DetectorTaps& taps) {
    const int n = static_cast<int>(taps.q.size());
    if (n == 0 || r.size() % n != 0)
        throw ShapeError("detect: input length must be a multiple of the tap count");
    std::vector<cplx> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] * taps.q[i % n];
    return out;
}

std::pair<WaveformMatrix, DetectorTaps> ofdm_reference(const FrameConfig& cfg,
                                                       const ChannelRealization& h,
                                                       double n0) {
    WaveformMatrix q = WaveformMatrix::unitary_idft(cfg.n);
    const std::vector<cplx> resp = channel_freq_response(h, cfg.n);
    DetectorTaps taps;
    taps.q.resize(cfg.n);
    const double reg = std::max(n0, 1e-12);  // guards spectral nulls
    for (int k = 0; k < cfg.n; ++k)
        taps.q[k] = std::conj(resp[k]) / (std::norm(resp[k]) + reg);
    return {std::move(q), std::move(taps)};
}

std::vector<double> rrc_taps(double rolloff, int span, int os) {
    if (rolloff <= 0.0 || rolloff >= 1.0)
        throw DomainError("rrc_taps: roll-off must be in (0, 1)");
    if (span < 1 || os < 1) throw DomainError("rrc_taps: span and os must be >= 1");
    const int half = span * os / 2;
    std::vector<double> g(2 * half + 1);
    const double pi = kTwoPi / 2.0;
    for (int i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / os;  // in symbol periods
        double v;
        if (i == 0) {
            v = 1.0 - rolloff + 4.0 * rolloff / pi;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * rolloff)) < 1e-9) {
            v = (rolloff / std::sqrt(2.0)) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * rolloff)) +
                 (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * rolloff)));
        } else {
            const double num = std::sin(pi * t * (1.0 - rolloff)) +
                               4.0 * rolloff * t * std::cos(pi * t * (1.0 + rolloff));
            const double den = pi * t * (1.0 - 16.0 * rolloff * rolloff * t * t);
            v = num / den;
        }
        g[i + half] = v;
    }
    double energy = 0.0;
    for (double v : g) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : g) v *= scale;
    return g;
}

ScfdeResult scfde_reference(const BitBlock& bits, const FrameConfig& cfg,
                            const ChannelRealization& h, double n0, Rng& rng,
                            const Constellation& c) {
    cfg.validate();
    const int n = cfg.n;
    const int os = 2;
    const int nos = os * n;
    const int cp_os = os * cfg.cp_len;
    if (bits.n % n != 0 || bits.m != c.bits_per_symbol)
        throw ShapeError("scfde_reference: bit block must hold whole blocks of N symbols");
    const int blocks = bits.n / n;

    // centered circular pulse; block length far exceeds the filter span
    const std::vector<double> g = rrc_taps(0.15, 8, os);
    const int half = (static_cast<int>(g.size()) - 1) / 2;
    std::vector<cplx> g_circ(nos, cplx{0.0, 0.0});
    for (int i = -half; i <= half; ++i)
        g_circ[((i % nos) + nos) % nos] += cplx{g[i + half], 0.0};

    // channel taps land on the oversampled grid at os * delay
    ChannelRealization h2;
    h2.rms_ds_s = h.rms_ds_s;
    h2.sample_rate_hz = h.sample_rate_hz * os;
    h2.taps.assign(static_cast<std::size_t>(os) * (h.length() - 1) + 1, cplx{0.0, 0.0});
    for (int d = 0; d < h.length(); ++d) h2.taps[os * d] = h.taps[d];

    const std::vector<cplx> g_f = dft(g_circ);
    std::vector<cplx> h_f(nos);
    {
        const std::vector<cplx> full = channel_freq_response(h2, nos);
        h_f = full;
    }

    // folded symbol-rate response and MMSE weights
    std::vector<cplx> fold_c(n);
    std::vector<double> fold_nu(n);
    const double reg = std::max(n0, 1e-12);
    std::vector<cplx> w(n);
    for (int k = 0; k < n; ++k) {
        const double g0 = std::norm(g_f[k]);
        const double g1 = std::norm(g_f[k + n]);
        fold_c[k] = g0 * h_f[k] + g1 * h_f[k + n];
        fold_nu[k] = g0 + g1;
        w[k] = std::conj(fold_c[k]) / (std::norm(fold_c[k]) + os * reg * fold_nu[k]);
    }
    cplx bias{0.0, 0.0};
    for (int k = 0; k < n; ++k) bias += w[k] * fold_c[k];
    bias /= static_cast<double>(n);
    double err_var = 0.0;
    for (int k = 0; k < n; ++k) {
        err_var += n * std::norm(w[k] * fold_c[k] - bias);
        err_var += std::norm(w[k]) * nos * n0 * fold_nu[k];
    }
    err_var /= static_cast<double>(n) * n;

    ScfdeResult out;
    out.bits_hat.n = bits.n;
    out.bits_hat.m = bits.m;
    out.bits_hat.bits.resize(bits.bits.size());
    out.papr.reserve(blocks);

    for (int b = 0; b < blocks; ++b) {
        BitBlock blk;
        blk.n = n;
        blk.m = bits.m;
        blk.bits.assign(bits.bits.begin() + static_cast<std::ptrdiff_t>(b) * n * bits.m,
                        bits.bits.begin() + static_cast<std::ptrdiff_t>(b + 1) * n * bits.m);
        const std::vector<cplx> s = map_bits(blk, c);

        // zero-stuffed upsampling + circular pulse shaping
        std::vector<cplx> tx(nos, cplx{0.0, 0.0});
        for (int m = 0; m < n; ++m) {
            const cplx sym = s[m];
            for (int i = -half; i <= half; ++i) {
                const int idx = ((os * m + i) % nos + nos) % nos;
                tx[idx] += sym * g_circ[(i % nos + nos) % nos];
            }
        }

        double peak = 0.0, mean = 0.0;
        for (const cplx& v : tx) {
            const double p = std::norm(v);
            peak = std::max(peak, p);
            mean += p;
        }
        mean /= nos;
        out.papr.push_back(peak / mean);

        std::vector<cplx> frame;
        frame.reserve(cp_os + nos);
        frame.insert(frame.end(), tx.end() - cp_os, tx.end());
        frame.insert(frame.end(), tx.begin(), tx.end());

        std::vector<cplx> y = apply_channel(frame, h2);
        add_awgn(y, n0, rng);

        std::vector<cplx> body(y.begin() + cp_os, y.begin() + cp_os + nos);
        const std::vector<cplx> y_f = dft(body);

        // RRC matched filter, alias fold to symbol rate, one-tap MMSE
        std::vector<cplx> s_hat_f(n);
        for (int k = 0; k < n; ++k) {
            const cplx u = y_f[k] * std::conj(g_f[k]) + y_f[k + n] * std::conj(g_f[k + n]);
            s_hat_f[k] = w[k] * u;
        }
        const std::vector<cplx> s_hat = idft(s_hat_f);

        std::vector<cplx> cal(n);
        for (int m = 0; m < n; ++m) cal[m] = s_hat[m] / bias;
        // floor keeps the exp() of squared distances finite in the noiseless case
        const double nv = std::max(err_var / std::norm(bias), 1e-12);
        const LlrBlock llrs = demap_llr(cal, {nv}, c);
        const BitBlock dec = hard_decisions(llrs);
        std::copy(dec.bits.begin(), dec.bits.end(),
                  out.bits_hat.bits.begin() + static_cast<std::ptrdiff_t>(b) * n * bits.m);
    }
    return out;
}

}  // namespace deepofw
