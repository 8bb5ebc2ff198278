#include "deepofw/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "deepofw/errors.hpp"

namespace deepofw {

std::vector<double> TdlProfile::linear_powers() const {
    std::vector<double> p(power_db.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::pow(10.0, power_db[i] / 10.0);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

void TdlProfile::validate() const {
    if (delay_norm.empty() || delay_norm.size() != power_db.size())
        throw ConfigError("profile '" + name + "': needs at least one (delay, power) pair");
    double prev = -1.0;
    for (double d : delay_norm) {
        if (d < 0.0) throw ConfigError("profile '" + name + "': negative delay");
        if (d < prev) throw ConfigError("profile '" + name + "': delays not ascending");
        prev = d;
    }
}

TdlProfile TdlProfile::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("profile file not found: " + path);
    TdlProfile p;
    p.name = path;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("profile file empty: " + path);
    // tolerate trailing CR from files edited on other platforms
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "delay_norm,power_db")
        throw ConfigError("profile file " + path +
                          ": expected header 'delay_norm,power_db', got '" + line + "'");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ConfigError("profile file " + path + ": bad row at line " +
                              std::to_string(lineno));
        try {
            p.delay_norm.push_back(std::stod(a));
            p.power_db.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ConfigError("profile file " + path + ": unparsable number at line " +
                              std::to_string(lineno));
        }
    }
    // sort rows by delay, keeping (delay, power) pairs together
    std::vector<std::size_t> order(p.delay_norm.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&p](std::size_t i, std::size_t j) {
        return p.delay_norm[i] < p.delay_norm[j];
    });
    TdlProfile sorted;
    sorted.name = p.name;
    for (std::size_t idx : order) {
        sorted.delay_norm.push_back(p.delay_norm[idx]);
        sorted.power_db.push_back(p.power_db[idx]);
    }
    sorted.validate();
    return sorted;
}

TdlProfile TdlProfile::exponential() {
    TdlProfile p;
    p.name = "builtin:exp";
    for (int i = 0; i < 12; ++i) {
        p.delay_norm.push_back(static_cast<double>(i));
        p.power_db.push_back(10.0 * std::log10(std::exp(-static_cast<double>(i))));
    }
    return p;
}

double ChannelRealization::power() const {
    double acc = 0.0;
    for (const cplx& t : taps) acc += std::norm(t);
    return acc;
}

ChannelRealization sample_channel(const TdlProfile& profile,
                                  double rms_ds_s,
                                  double sample_rate_hz,
                                  int max_delay_samples,
                                  Rng& rng,
                                  ChannelNormalization norm) {
    profile.validate();
    if (rms_ds_s < 0.0) throw DomainError("sample_channel: negative delay spread");
    if (sample_rate_hz <= 0.0) throw DomainError("sample_channel: sample rate must be positive");

    const std::vector<double> powers = profile.linear_powers();
    const int last_delay = static_cast<int>(std::lround(
        profile.delay_norm.back() * rms_ds_s * sample_rate_hz));
    if (last_delay > max_delay_samples)
        throw ConfigError("sample_channel: discrete channel spans " +
                          std::to_string(last_delay) +
                          " sample delays, exceeding the cyclic prefix length " +
                          std::to_string(max_delay_samples));

    ChannelRealization h;
    h.rms_ds_s = rms_ds_s;
    h.sample_rate_hz = sample_rate_hz;
    h.taps.assign(last_delay + 1, cplx{0.0, 0.0});
    for (std::size_t l = 0; l < powers.size(); ++l) {
        const int d = static_cast<int>(std::lround(
            profile.delay_norm[l] * rms_ds_s * sample_rate_hz));
        h.taps[d] += rng.cnormal(powers[l]);
    }

    if (norm == ChannelNormalization::PerRealization) {
        const double p = h.power();
        if (p <= 0.0) throw NumericError("sample_channel: zero-power realization");
        const double scale = 1.0 / std::sqrt(p);
        for (cplx& t : h.taps) t *= scale;
    }
    return h;
}

std::vector<cplx> apply_channel(const std::vector<cplx>& xt,
                                const ChannelRealization& h) {
    std::vector<cplx> y(xt.size(), cplx{0.0, 0.0});
    const int n = static_cast<int>(xt.size());
    const int taps = h.length();
    for (int d = 0; d < taps; ++d) {
        const cplx a = h.taps[d];
        if (a == cplx{0.0, 0.0}) continue;
        for (int i = d; i < n; ++i) y[i] += a * xt[i - d];
    }
    return y;
}

NoiseSpec noise_from_ebn0(double ebn0_db, int bits_per_symbol, double es) {
    if (bits_per_symbol < 1) throw DomainError("noise_from_ebn0: M must be >= 1");
    if (es <= 0.0) throw DomainError("noise_from_ebn0: Es must be positive");
    NoiseSpec s;
    s.ebn0_db = ebn0_db;
    s.es = es;
    s.n0 = es / (bits_per_symbol * std::pow(10.0, ebn0_db / 10.0));
    return s;
}

void add_awgn(std::vector<cplx>& y, double n0, Rng& rng) {
    if (n0 < 0.0) throw DomainError("add_awgn: negative noise variance");
    if (n0 == 0.0) return;
    for (cplx& v : y) v += rng.cnormal(n0);
}

double realization_rms_ds(const ChannelRealization& h) {
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    const double ts = 1.0 / h.sample_rate_hz;
    for (int d = 0; d < h.length(); ++d) {
        const double pd = std::norm(h.taps[d]);
        const double tau = d * ts;
        p += pd;
        m1 += pd * tau;
        m2 += pd * tau * tau;
    }
    if (p <= 0.0) throw DegenerateInputError("realization_rms_ds: zero-power channel");
    m1 /= p;
    m2 /= p;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

}  // namespace deepofw
