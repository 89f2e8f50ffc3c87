#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ase/dcd.hpp"
#include "ase/filters.hpp"
#include "ase/op_count.hpp"
#include "ase/signals.hpp"

namespace ase {

/// One algorithm taking part in an experiment.
struct AlgorithmSpec {
    std::string id;
    FilterKind kind{FilterKind::kIwfAse};
    FilterConfig config{};
};

enum class Execution {
    kParallel,  ///< Monte Carlo runs spread over OpenMP threads
    kSerial,    ///< reference path, one run after another
};

/// Per-iteration operation counts averaged over an instrumented run.
struct MeasuredCost {
    double adds{0.0};
    double mults{0.0};
    double comparisons{0.0};
    double shifts{0.0};
    double transcendental{0.0};
};

/// Running mean, m_k = m_{k-1} + (x - m_{k-1}) / k. Averaging k identical
/// values returns that value exactly.
class EnsembleMean {
public:
    explicit EnsembleMean(std::size_t n = 0) : mean_(n, 0.0) {}

    void add(std::span<const double> sample);
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }

private:
    std::vector<double> mean_;
    std::size_t count_{0};
};

/// Ensemble-averaged learning curves of one algorithm.
struct RunRecord {
    std::string algorithm;
    /// Mean of ||w - w_o||^2 / ||w_o||^2 over runs (system identification only).
    std::vector<double> nmsd_linear;
    /// 10 log10 of nmsd_linear, floored at kNmsdFloorDb.
    std::vector<double> nmsd_db;
    /// System identification: excess a-priori error ((w_o - w)^T x)^2.
    /// Noise cancellation: (v1 - y)^2, the uncancelled interference.
    std::vector<double> mse;
    /// Fraction of runs whose sample passed the weighting gate at each step.
    std::vector<double> update_fraction;
    /// Gate pass rate over all runs and steps.
    double update_ratio{0.0};
    /// Time spent in filter steps, summed over runs.
    std::chrono::duration<double> wall_time{0.0};
    /// Filled only when operation counting is enabled.
    std::optional<MeasuredCost> op_counts;
};

inline constexpr double kNmsdFloorDb = -400.0;
inline constexpr double kSteadyStateFraction = 0.1;

/// 10 log10(||w - w_o||^2 / ||w_o||^2), floored at kNmsdFloorDb.
[[nodiscard]] double nmsd(std::span<const double> w, std::span<const double> w_o);
[[nodiscard]] double ratio_to_db(double ratio) noexcept;

/// Mean of the last `fraction` of a series (at least one sample).
[[nodiscard]] double tail_mean(std::span<const double> series,
                               double fraction = kSteadyStateFraction);
/// Steady-state NMSD in dB: tail mean of the linear curve, then dB.
[[nodiscard]] double steady_state_nmsd_db(const RunRecord& rec);
[[nodiscard]] double steady_state_mse_db(const RunRecord& rec);
[[nodiscard]] double steady_state_update_ratio(const RunRecord& rec);

struct SysIdScenario {
    std::vector<double> system;
    std::size_t horizon{5000};
    std::size_t mc_runs{100};
    std::uint64_t seed{1};
    double input_variance{1.0};
    double snr_db{0.0};
    bool impulses{true};
    BgNoiseSpec impulse_noise{0.1, 1e4};
    bool count_ops{false};
    /// Start with L - 1 samples of input history in the delay line instead
    /// of zeros.
    bool primed_delay_line{true};

    void validate() const;
    [[nodiscard]] double signal_power() const;
    [[nodiscard]] double background_sd() const;
};

/// Default system-identification scenario: ten random taps, unit-variance
/// WGN input, BG impulses (P_r = 0.1, variance 1e4) on top of 0 dB WGN.
[[nodiscard]] SysIdScenario default_sysid_scenario(std::uint64_t seed = 1);

/// lambda = 0.999, rho = 1e-4, c = 2, H = 2, M_b = 8, N_u = 8.
[[nodiscard]] FilterConfig default_filter_config(std::size_t length);

/// RMCC entries without an explicit kernel width get 2 * background_sd.
void resolve_kernel_widths(std::vector<AlgorithmSpec>& algorithms, double background_sd);

/// Monte Carlo system identification. Every algorithm sees the same data in
/// each run; run r draws its signals from run_seed(seed, r). Runs are
/// reduced in index order, so both execution modes give bit-identical
/// records. Throws std::invalid_argument on a length mismatch and
/// std::runtime_error on a non-finite metric.
[[nodiscard]] std::vector<RunRecord> run_sysid(const SysIdScenario& scenario,
                                               std::span<const AlgorithmSpec> algorithms,
                                               Execution exec = Execution::kParallel);

struct AncScenario {
    std::size_t horizon{5000};
    std::size_t mc_runs{20};
    std::uint64_t seed{1};
    /// Impulsive interference source, BG(P_r = 0.1, variance 25).
    BgNoiseSpec interference{0.1, 25.0};
    /// Reference channel x = (1 - a1 z^-1) s.
    double shaping_a1{0.2};
    double pulse_rate{0.004};
    PdPulseSpec pulse{};
    /// Primary-only sensor noise variance.
    double sensor_noise_var{0.01};

    void validate() const;
};

struct AncResult {
    std::vector<RunRecord> records;
    // Waveforms of run 0.
    std::vector<double> clean;
    std::vector<double> primary;
    std::vector<double> reference;
    std::vector<std::vector<double>> denoised;
};

/// Adaptive noise cancellation on synthetic data. Primary channel
/// d = h + s + u (PD pulses h, interference s, sensor noise u), reference
/// x = (1 - a1 z^-1) s. The denoised output is d - y.
[[nodiscard]] AncResult run_anc(const AncScenario& scenario,
                                std::span<const AlgorithmSpec> algorithms,
                                Execution exec = Execution::kParallel);

/// Noise cancellation on recorded channels. With no clean signal available,
/// `mse` holds the squared output e^2.
[[nodiscard]] AncResult run_anc_streams(std::span<const double> primary,
                                        std::span<const double> reference,
                                        std::span<const AlgorithmSpec> algorithms);

/// Nominal per-iteration cost models, one per algorithm family.
enum class CostModel { kRmcc, kIwf, kDcdRmcc, kIwfAse, kDcdAse };

struct NominalCost {
    double adds{0.0};
    double mults{0.0};
    std::string other;
};

[[nodiscard]] NominalCost count_ops(CostModel model, std::size_t length, const DcdParams& dcd);
[[nodiscard]] std::optional<CostModel> cost_model_for(FilterKind kind) noexcept;

/// Average per-iteration tally of an instrumented filter run on an impulsive
/// system-identification stream of the configured length.
[[nodiscard]] MeasuredCost measure_ops(FilterKind kind, const FilterConfig& cfg, std::size_t steps,
                                       std::uint64_t seed);

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double r2{0.0};
};

/// Ordinary least-squares line through (xs, ys).
[[nodiscard]] LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace ase

namespace ase {

/// Random symmetric positive definite matrix Q diag(s) Q^T with eigenvalues
/// log-spaced on [1, cond] and Q a random orthogonal matrix.
[[nodiscard]] Matrix random_spd(std::size_t n, double cond, std::uint64_t seed);

struct DcdAccuracyRow {
    int n_updates{0};
    double mean_error{0.0};  ///< mean over systems of ||dw - x*||_inf
    double max_error{0.0};
    /// mean over systems of ||dw - x*||_R / ||x*||_R; nonincreasing in N_u
    /// because every accepted update lowers the quadratic cost
    double mean_energy_error{0.0};
    double mean_updates_used{0.0};
};

/// Solve-error sweep of dcd_solve over random SPD systems with known
/// solutions x* in [-1, 1]^n (rhs = R x*, h = 2).
[[nodiscard]] std::vector<DcdAccuracyRow> dcd_accuracy_sweep(std::size_t n, int m_bits,
                                                             std::span<const int> n_updates_list,
                                                             std::size_t systems, double cond,
                                                             std::uint64_t seed);

}  // namespace ase
