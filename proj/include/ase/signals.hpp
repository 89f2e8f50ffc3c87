#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace ase {

/// Seedable generator used by every signal model.
///
/// The bit stream is std::mt19937_64 (its output sequence is fixed by the
/// standard). Uniform and normal variates are derived here rather than with
/// the <random> distributions, whose algorithms are implementation-defined,
/// so the same seed gives the same samples on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal (Box-Muller, both outputs used).
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

/// splitmix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Seed of Monte Carlo run `run`: base seed xor run index.
[[nodiscard]] constexpr std::uint64_t run_seed(std::uint64_t base, std::uint64_t run) noexcept {
    return base ^ run;
}

struct BgNoiseSpec {
    double p_r{0.1};
    double sigma2{1e4};

    void validate() const;
};

/// Random unknown system: standard-normal taps rescaled to unit l2 norm.
[[nodiscard]] std::vector<double> gen_system(std::size_t length, std::uint64_t seed);

/// White Gaussian noise with the given variance.
[[nodiscard]] std::vector<double> gen_wgn(std::size_t n, double variance, std::uint64_t seed);

/// Bernoulli-Gaussian impulses b(k) g(k), b ~ Bernoulli(p_r), g ~ N(0, sigma2).
[[nodiscard]] std::vector<double> gen_bg_noise(const BgNoiseSpec& spec, std::size_t n,
                                               std::uint64_t seed);

/// WGN of variance signal_power * 10^(-snr_db / 10).
[[nodiscard]] std::vector<double> gen_background(std::size_t n, double snr_db, double signal_power,
                                                 std::uint64_t seed);

/// y(t) = x(t) - a1 x(t-1), zero prehistory.
[[nodiscard]] std::vector<double> iir_shape(std::span<const double> input, double a1 = 0.2);

/// Damped-oscillation pulse A e^(-t/tau) sin(2 pi f t), rescaled so its peak
/// equals `amplitude`. `tau` and `support` are in samples, `freq` in cycles
/// per sample.
struct PdPulseSpec {
    double amplitude{12.0};
    double tau{4.0};
    double freq{0.12};
    std::size_t support{32};

    void validate() const;
};

[[nodiscard]] std::vector<double> pd_pulse_shape(const PdPulseSpec& spec);

/// Sparse PD-like pulse train. Each sample starts a pulse with probability
/// `pulse_rate`, except while the previous pulse is still ringing, so pulses
/// never overlap.
[[nodiscard]] std::vector<double> gen_pd_pulses(std::size_t n, double pulse_rate, std::uint64_t seed,
                                                const PdPulseSpec& spec = {});

/// d(k) = w_o^T x(k) + noise(k) with tapped-delay-line regressors and zero
/// prehistory.
[[nodiscard]] std::vector<double> compose_desired(std::span<const double> system,
                                                  std::span<const double> input,
                                                  std::span<const double> noise);

/// Fills `out` with [x(k), x(k-1), ..., x(k-L+1)], zero before the start.
void regressor_at(std::span<const double> signal, std::size_t k, std::span<double> out) noexcept;

/// Shift register holding the most recent L input samples, newest first.
class DelayLine {
public:
    explicit DelayLine(std::size_t length) : taps_(length, 0.0) {}

    void push(double sample) noexcept;
    [[nodiscard]] std::span<const double> taps() const noexcept { return taps_; }

private:
    std::vector<double> taps_;
};

/// One sample per line, shortest round-trip decimal representation.
void write_waveform_csv(const std::filesystem::path& path, std::span<const double> samples);
/// Reads one sample per line; blank lines are skipped. Throws
/// std::runtime_error naming the file on missing input or a bad line.
[[nodiscard]] std::vector<double> read_waveform_csv(const std::filesystem::path& path);

}  // namespace ase
