#include "ase/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ase/io.hpp"

namespace ase {

double Rng::uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void BgNoiseSpec::validate() const {
    if (!(p_r >= 0.0 && p_r <= 1.0)) {
        throw std::invalid_argument("BgNoiseSpec: p_r must lie in [0, 1]");
    }
    if (!(std::isfinite(sigma2) && sigma2 > 0.0)) {
        throw std::invalid_argument("BgNoiseSpec: sigma2 must be positive");
    }
}

std::vector<double> gen_system(std::size_t length, std::uint64_t seed) {
    if (length == 0) {
        throw std::invalid_argument("gen_system: length must be >= 1");
    }
    Rng rng(seed);
    std::vector<double> w(length);
    double norm2 = 0.0;
    // Redraw in the (measure-zero) all-zero case.
    while (norm2 == 0.0) {
        for (auto& v : w) {
            v = rng.normal();
        }
        norm2 = 0.0;
        for (double v : w) {
            norm2 += v * v;
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : w) {
        v *= inv;
    }
    return w;
}

std::vector<double> gen_wgn(std::size_t n, double variance, std::uint64_t seed) {
    if (!(std::isfinite(variance) && variance >= 0.0)) {
        throw std::invalid_argument("gen_wgn: variance must be non-negative");
    }
    Rng rng(seed);
    const double sd = std::sqrt(variance);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = sd * rng.normal();
    }
    return out;
}

std::vector<double> gen_bg_noise(const BgNoiseSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const double sd = std::sqrt(spec.sigma2);
    std::vector<double> out(n);
    for (auto& v : out) {
        // Both draws happen every sample so streams stay aligned across p_r.
        const bool hit = rng.uniform() < spec.p_r;
        const double g = rng.normal();
        v = hit ? sd * g : 0.0;
    }
    return out;
}

std::vector<double> gen_background(std::size_t n, double snr_db, double signal_power,
                                   std::uint64_t seed) {
    if (!std::isfinite(snr_db) || !(signal_power >= 0.0)) {
        throw std::invalid_argument("gen_background: invalid SNR or signal power");
    }
    return gen_wgn(n, signal_power * std::pow(10.0, -snr_db / 10.0), seed);
}

std::vector<double> iir_shape(std::span<const double> input, double a1) {
    std::vector<double> out(input.size());
    double prev = 0.0;
    for (std::size_t t = 0; t < input.size(); ++t) {
        out[t] = input[t] - a1 * prev;
        prev = input[t];
    }
    return out;
}

void PdPulseSpec::validate() const {
    if (!(std::isfinite(amplitude) && amplitude > 0.0) || !(tau > 0.0) || !(freq > 0.0 && freq < 0.5) ||
        support < 2) {
        throw std::invalid_argument("PdPulseSpec: invalid pulse parameters");
    }
}

std::vector<double> pd_pulse_shape(const PdPulseSpec& spec) {
    spec.validate();
    std::vector<double> shape(spec.support);
    double peak = 0.0;
    for (std::size_t t = 0; t < spec.support; ++t) {
        const double tt = static_cast<double>(t);
        shape[t] = std::exp(-tt / spec.tau) * std::sin(2.0 * std::numbers::pi * spec.freq * tt);
        peak = std::max(peak, std::abs(shape[t]));
    }
    if (peak == 0.0) {
        throw std::invalid_argument("PdPulseSpec: degenerate pulse shape");
    }
    for (auto& v : shape) {
        v *= spec.amplitude / peak;
    }
    return shape;
}

std::vector<double> gen_pd_pulses(std::size_t n, double pulse_rate, std::uint64_t seed,
                                  const PdPulseSpec& spec) {
    if (!(pulse_rate >= 0.0 && pulse_rate <= 1.0)) {
        throw std::invalid_argument("gen_pd_pulses: pulse_rate must lie in [0, 1]");
    }
    const std::vector<double> shape = pd_pulse_shape(spec);
    std::vector<double> out(n, 0.0);
    Rng rng(seed);
    std::size_t t = 0;
    while (t < n) {
        if (rng.uniform() < pulse_rate) {
            for (std::size_t k = 0; k < shape.size() && t + k < n; ++k) {
                out[t + k] = shape[k];
            }
            t += shape.size();
        } else {
            ++t;
        }
    }
    return out;
}

void regressor_at(std::span<const double> signal, std::size_t k, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (i <= k && k - i < signal.size()) ? signal[k - i] : 0.0;
    }
}

void DelayLine::push(double sample) noexcept {
    if (taps_.empty()) {
        return;
    }
    std::shift_right(taps_.begin(), taps_.end(), 1);
    taps_[0] = sample;
}

std::vector<double> compose_desired(std::span<const double> system, std::span<const double> input,
                                    std::span<const double> noise) {
    if (noise.size() != input.size()) {
        throw std::invalid_argument("compose_desired: input and noise lengths differ");
    }
    std::vector<double> d(input.size());
    std::vector<double> x(system.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        regressor_at(input, k, x);
        double y = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            y += system[i] * x[i];
        }
        d[k] = y + noise[k];
    }
    return d;
}

void write_waveform_csv(const std::filesystem::path& path, std::span<const double> samples) {
    std::string body;
    body.reserve(samples.size() * 24);
    for (double v : samples) {
        append_number(body, v);
        body.push_back('\n');
    }
    write_file_atomic(path, body);
}

std::vector<double> read_waveform_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open waveform file: " + path.string());
    }
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto first = line.find_first_not_of(" \t");
        const auto last = line.find_last_not_of(" \t");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": not a finite number");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace ase
