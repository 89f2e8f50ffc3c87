#include "ase/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ase {

namespace {

// Seed streams within one Monte Carlo run.
enum Stream : std::uint64_t {
    kInputStream = 1,
    kBackgroundStream = 2,
    kImpulseStream = 3,
    kPulseStream = 4,
    kSensorStream = 5,
};

// Runs are simulated in chunks: each chunk fills per-run buffers (possibly
// in parallel), then the buffers are folded into the ensemble in run order.
constexpr std::size_t kChunk = 16;

struct AlgoTrace {
    std::vector<double> ratio;
    std::vector<double> mse;
    std::vector<double> applied;
    double seconds{0.0};
    OpCounts ops{};
};

struct RunTrace {
    std::vector<AlgoTrace> algos;
    std::vector<std::vector<double>> denoised;  // ANC only
};

struct Accumulator {
    EnsembleMean ratio;
    EnsembleMean mse;
    EnsembleMean applied;
    double seconds{0.0};
    OpCounts ops{};
};

template <class Simulate>
void for_each_chunk(std::size_t runs, Execution exec, Simulate&& simulate,
                    std::vector<RunTrace>& buffer, auto&& fold) {
    for (std::size_t base = 0; base < runs; base += kChunk) {
        const std::size_t count = std::min(kChunk, runs - base);
        buffer.assign(count, RunTrace{});
        if (exec == Execution::kParallel) {
            std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
                try {
                    buffer[static_cast<std::size_t>(i)] = simulate(base + static_cast<std::size_t>(i));
                } catch (...) {
#pragma omp critical(ase_harness_failure)
                    {
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            }
            if (failure) {
                std::rethrow_exception(failure);
            }
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                buffer[i] = simulate(base + i);
            }
        }
        for (std::size_t i = 0; i < count; ++i) {
            fold(base + i, buffer[i]);
        }
    }
}

std::vector<RunRecord> finish(std::span<const AlgorithmSpec> algorithms,
                              std::vector<Accumulator>& acc, std::size_t horizon, bool with_nmsd,
                              bool with_ops) {
    std::vector<RunRecord> out;
    out.reserve(algorithms.size());
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        RunRecord rec;
        rec.algorithm = algorithms[a].id;
        if (with_nmsd) {
            rec.nmsd_linear = acc[a].ratio.mean();
            rec.nmsd_db.resize(horizon);
            std::transform(rec.nmsd_linear.begin(), rec.nmsd_linear.end(), rec.nmsd_db.begin(),
                           ratio_to_db);
        }
        rec.mse = acc[a].mse.mean();
        rec.update_fraction = acc[a].applied.mean();
        double total = 0.0;
        for (double v : rec.update_fraction) {
            total += v;
        }
        rec.update_ratio = horizon > 0 ? total / static_cast<double>(horizon) : 0.0;
        rec.wall_time = std::chrono::duration<double>(acc[a].seconds);
        if (with_ops) {
            const double steps = static_cast<double>(horizon) * static_cast<double>(acc[a].ratio.count()
                                                                                     ? acc[a].ratio.count()
                                                                                     : acc[a].mse.count());
            const OpCounts& o = acc[a].ops;
            rec.op_counts = MeasuredCost{static_cast<double>(o.adds) / steps,
                                         static_cast<double>(o.mults) / steps,
                                         static_cast<double>(o.comparisons) / steps,
                                         static_cast<double>(o.shifts) / steps,
                                         static_cast<double>(o.transcendental) / steps};
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void check_lengths(std::span<const AlgorithmSpec> algorithms, std::size_t length) {
    if (algorithms.empty()) {
        throw std::invalid_argument("no algorithms selected");
    }
    for (const auto& a : algorithms) {
        a.config.validate();
        if (a.config.length != length) {
            throw std::invalid_argument("algorithm '" + a.id + "' has length " +
                                        std::to_string(a.config.length) + ", scenario needs " +
                                        std::to_string(length));
        }
        if (a.kind == FilterKind::kRmcc && !a.config.kernel_sigma) {
            throw std::invalid_argument("algorithm '" + a.id + "' needs a kernel width");
        }
    }
}

[[noreturn]] void non_finite(const std::string& what, const std::string& algo, std::size_t run,
                             std::size_t k) {
    throw std::runtime_error(what + " became non-finite for '" + algo + "' in run " +
                             std::to_string(run) + " at iteration " + std::to_string(k));
}

}  // namespace

void EnsembleMean::add(std::span<const double> sample) {
    if (count_ == 0 && mean_.empty()) {
        mean_.assign(sample.size(), 0.0);
    }
    if (sample.size() != mean_.size()) {
        throw std::invalid_argument("EnsembleMean: sample length mismatch");
    }
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        mean_[i] += (sample[i] - mean_[i]) * inv;
    }
}

double ratio_to_db(double ratio) noexcept {
    if (!(ratio > 0.0)) {
        return kNmsdFloorDb;
    }
    return std::max(kNmsdFloorDb, 10.0 * std::log10(ratio));
}

double nmsd(std::span<const double> w, std::span<const double> w_o) {
    if (w.size() != w_o.size()) {
        throw std::invalid_argument("nmsd: dimension mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += (w[i] - w_o[i]) * (w[i] - w_o[i]);
        den += w_o[i] * w_o[i];
    }
    if (den == 0.0) {
        throw std::invalid_argument("nmsd: reference system has zero norm");
    }
    return ratio_to_db(num / den);
}

double tail_mean(std::span<const double> series, double fraction) {
    if (series.empty()) {
        throw std::invalid_argument("tail_mean: empty series");
    }
    const auto n = series.size();
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
    double acc = 0.0;
    for (std::size_t i = n - std::min(count, n); i < n; ++i) {
        acc += series[i];
    }
    return acc / static_cast<double>(std::min(count, n));
}

double steady_state_nmsd_db(const RunRecord& rec) { return ratio_to_db(tail_mean(rec.nmsd_linear)); }
double steady_state_mse_db(const RunRecord& rec) { return ratio_to_db(tail_mean(rec.mse)); }
double steady_state_update_ratio(const RunRecord& rec) { return tail_mean(rec.update_fraction); }

void SysIdScenario::validate() const {
    if (system.empty()) {
        throw std::invalid_argument("scenario: empty system");
    }
    double n2 = 0.0;
    for (double v : system) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("scenario: non-finite system tap");
        }
        n2 += v * v;
    }
    if (n2 == 0.0) {
        throw std::invalid_argument("scenario: system has zero norm");
    }
    if (horizon < 1 || mc_runs < 1) {
        throw std::invalid_argument("scenario: horizon and mc_runs must be >= 1");
    }
    if (!(std::isfinite(input_variance) && input_variance > 0.0) || !std::isfinite(snr_db)) {
        throw std::invalid_argument("scenario: invalid input variance or SNR");
    }
    impulse_noise.validate();
}

double SysIdScenario::signal_power() const {
    double n2 = 0.0;
    for (double v : system) {
        n2 += v * v;
    }
    return n2 * input_variance;
}

double SysIdScenario::background_sd() const {
    return std::sqrt(signal_power() * std::pow(10.0, -snr_db / 10.0));
}

SysIdScenario default_sysid_scenario(std::uint64_t seed) {
    SysIdScenario s;
    s.seed = seed;
    s.system = gen_system(10, mix_seed(seed, 0));
    return s;
}

FilterConfig default_filter_config(std::size_t length) {
    FilterConfig cfg;
    cfg.length = length;
    cfg.lambda = 0.999;
    cfg.rho = 1e-4;
    cfg.ase = AseParams{2.0, 1e-4};
    cfg.dcd = DcdParams{2.0, 8, 8};
    return cfg;
}

void resolve_kernel_widths(std::vector<AlgorithmSpec>& algorithms, double background_sd) {
    for (auto& a : algorithms) {
        if (a.kind == FilterKind::kRmcc && !a.config.kernel_sigma) {
            a.config.kernel_sigma = background_sd > 0.0 ? 2.0 * background_sd : 1.0;
        }
    }
}

std::vector<RunRecord> run_sysid(const SysIdScenario& scenario,
                                 std::span<const AlgorithmSpec> algorithms, Execution exec) {
    scenario.validate();
    const std::size_t length = scenario.system.size();
    check_lengths(algorithms, length);
    const std::size_t horizon = scenario.horizon;
    const double w_norm2 = scenario.signal_power() / scenario.input_variance;
    const double bg_var = scenario.background_sd() * scenario.background_sd();

    auto simulate = [&](std::size_t run) {
        const std::uint64_t seed = run_seed(scenario.seed, run);
        // With a primed delay line the first regressor is already full.
        const std::size_t lead = scenario.primed_delay_line ? length - 1 : 0;
        const std::size_t total = horizon + lead;
        const auto input = gen_wgn(total, scenario.input_variance, mix_seed(seed, kInputStream));
        auto noise = gen_wgn(total, bg_var, mix_seed(seed, kBackgroundStream));
        if (scenario.impulses) {
            const auto imp = gen_bg_noise(scenario.impulse_noise, total, mix_seed(seed, kImpulseStream));
            for (std::size_t k = 0; k < total; ++k) {
                noise[k] += imp[k];
            }
        }
        const auto desired = compose_desired(scenario.system, input, noise);

        RunTrace trace;
        trace.algos.resize(algorithms.size());
        Vector x(length);
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            const AlgorithmSpec& spec = algorithms[a];
            AlgoTrace& t = trace.algos[a];
            t.ratio.resize(horizon);
            t.mse.resize(horizon);
            t.applied.resize(horizon);
            AdaptiveFilter filter(spec.kind, spec.config);
            OpCounts* counts = scenario.count_ops ? &t.ops : nullptr;
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t k = 0; k < horizon; ++k) {
                regressor_at(input, k + lead, x);
                const StepOutput out = filter.step(x, desired[k + lead], counts);
                const double excess = out.prior_error - noise[k + lead];
                const auto w = filter.weights();
                double dev = 0.0;
                for (std::size_t i = 0; i < length; ++i) {
                    const double diff = w[i] - scenario.system[i];
                    dev += diff * diff;
                }
                t.ratio[k] = dev / w_norm2;
                t.mse[k] = excess * excess;
                t.applied[k] = out.applied ? 1.0 : 0.0;
                if (!std::isfinite(t.ratio[k]) || !std::isfinite(t.mse[k])) {
                    non_finite("NMSD", spec.id, run, k);
                }
            }
            t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        return trace;
    };

    std::vector<Accumulator> acc(algorithms.size());
    std::vector<RunTrace> buffer;
    for_each_chunk(scenario.mc_runs, exec, simulate, buffer, [&](std::size_t, const RunTrace& tr) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            acc[a].ratio.add(tr.algos[a].ratio);
            acc[a].mse.add(tr.algos[a].mse);
            acc[a].applied.add(tr.algos[a].applied);
            acc[a].seconds += tr.algos[a].seconds;
            acc[a].ops += tr.algos[a].ops;
        }
    });
    return finish(algorithms, acc, horizon, true, scenario.count_ops);
}

void AncScenario::validate() const {
    if (horizon < 1 || mc_runs < 1) {
        throw std::invalid_argument("anc scenario: horizon and mc_runs must be >= 1");
    }
    interference.validate();
    pulse.validate();
    if (!std::isfinite(shaping_a1) || !(pulse_rate >= 0.0 && pulse_rate <= 1.0) ||
        !(std::isfinite(sensor_noise_var) && sensor_noise_var >= 0.0)) {
        throw std::invalid_argument("anc scenario: invalid shaping, pulse rate or sensor noise");
    }
}

namespace {

RunTrace cancel(std::span<const double> primary, std::span<const double> reference,
                std::span<const double> interference, std::span<const AlgorithmSpec> algorithms,
                std::size_t run, bool keep_output) {
    const std::size_t horizon = primary.size();
    RunTrace trace;
    trace.algos.resize(algorithms.size());
    if (keep_output) {
        trace.denoised.resize(algorithms.size());
    }
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        const AlgorithmSpec& spec = algorithms[a];
        AlgoTrace& t = trace.algos[a];
        t.mse.resize(horizon);
        t.applied.resize(horizon);
        if (keep_output) {
            trace.denoised[a].resize(horizon);
        }
        AdaptiveFilter filter(spec.kind, spec.config);
        DelayLine line(spec.config.length);
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t k = 0; k < horizon; ++k) {
            line.push(reference[k]);
            const StepOutput out = filter.step(line.taps(), primary[k]);
            // e = d - y is the denoised sample.
            const double y = primary[k] - out.prior_error;
            const double miss = interference.empty() ? out.prior_error : interference[k] - y;
            t.mse[k] = miss * miss;
            t.applied[k] = out.applied ? 1.0 : 0.0;
            if (!std::isfinite(t.mse[k])) {
                non_finite("MSE", spec.id, run, k);
            }
            if (keep_output) {
                trace.denoised[a][k] = out.prior_error;
            }
        }
        t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return trace;
}

}  // namespace

AncResult run_anc(const AncScenario& scenario, std::span<const AlgorithmSpec> algorithms,
                  Execution exec) {
    scenario.validate();
    if (algorithms.empty()) {
        throw std::invalid_argument("no algorithms selected");
    }
    check_lengths(algorithms, algorithms.front().config.length);
    const std::size_t horizon = scenario.horizon;

    struct Channels {
        std::vector<double> clean, interference, primary, reference;
    };
    auto make_channels = [&](std::size_t run) {
        const std::uint64_t seed = run_seed(scenario.seed, run);
        Channels ch;
        ch.clean = gen_pd_pulses(horizon, scenario.pulse_rate, mix_seed(seed, kPulseStream), scenario.pulse);
        ch.interference = gen_bg_noise(scenario.interference, horizon, mix_seed(seed, kImpulseStream));
        ch.reference = iir_shape(ch.interference, scenario.shaping_a1);
        const auto sensor = gen_wgn(horizon, scenario.sensor_noise_var, mix_seed(seed, kSensorStream));
        ch.primary.resize(horizon);
        for (std::size_t k = 0; k < horizon; ++k) {
            ch.primary[k] = ch.clean[k] + ch.interference[k] + sensor[k];
        }
        return ch;
    };

    AncResult result;
    auto simulate = [&](std::size_t run) {
        const Channels ch = make_channels(run);
        return cancel(ch.primary, ch.reference, ch.interference, algorithms, run, run == 0);
    };
    std::vector<Accumulator> acc(algorithms.size());
    std::vector<RunTrace> buffer;
    for_each_chunk(scenario.mc_runs, exec, simulate, buffer, [&](std::size_t run, RunTrace& tr) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            acc[a].mse.add(tr.algos[a].mse);
            acc[a].applied.add(tr.algos[a].applied);
            acc[a].seconds += tr.algos[a].seconds;
        }
        if (run == 0) {
            result.denoised = std::move(tr.denoised);
        }
    });
    result.records = finish(algorithms, acc, horizon, false, false);
    Channels first = make_channels(0);
    result.clean = std::move(first.clean);
    result.primary = std::move(first.primary);
    result.reference = std::move(first.reference);
    return result;
}

AncResult run_anc_streams(std::span<const double> primary, std::span<const double> reference,
                          std::span<const AlgorithmSpec> algorithms) {
    if (primary.size() != reference.size()) {
        throw std::invalid_argument("primary and reference channels differ in length (" +
                                    std::to_string(primary.size()) + " vs " +
                                    std::to_string(reference.size()) + ")");
    }
    if (primary.empty()) {
        throw std::invalid_argument("empty input channels");
    }
    if (algorithms.empty()) {
        throw std::invalid_argument("no algorithms selected");
    }
    check_lengths(algorithms, algorithms.front().config.length);
    RunTrace tr = cancel(primary, reference, {}, algorithms, 0, true);
    std::vector<Accumulator> acc(algorithms.size());
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        acc[a].mse.add(tr.algos[a].mse);
        acc[a].applied.add(tr.algos[a].applied);
        acc[a].seconds = tr.algos[a].seconds;
    }
    AncResult result;
    result.records = finish(algorithms, acc, primary.size(), false, false);
    result.primary.assign(primary.begin(), primary.end());
    result.reference.assign(reference.begin(), reference.end());
    result.denoised = std::move(tr.denoised);
    return result;
}

NominalCost count_ops(CostModel model, std::size_t length, const DcdParams& dcd) {
    if (length < 1) {
        throw std::invalid_argument("count_ops: length must be >= 1");
    }
    const double l = static_cast<double>(length);
    const double nu = static_cast<double>(dcd.n_updates);
    const double mb = static_cast<double>(dcd.m_bits);
    switch (model) {
        case CostModel::kRmcc:
            return {3 * l * l + 7 * l + 4, 3 * l * l + 13 * l + 12, "exponential"};
        case CostModel::kIwf:
            return {3 * l * l + 4 * l, 3.5 * l * l + 6 * l, ""};
        case CostModel::kDcdRmcc:
            return {3 * l + 2 * nu * l + mb, 7 * l + 5, "exponential"};
        case CostModel::kIwfAse:
            return {3 * l * l + 4 * l, 3.5 * l * l + 8 * l + 3, "comparison, sine"};
        case CostModel::kDcdAse:
            return {3 * l + 2 * nu * l + mb + 1, 7 * l + 6, "comparison, sine"};
    }
    throw std::invalid_argument("count_ops: unknown cost model");
}

std::optional<CostModel> cost_model_for(FilterKind kind) noexcept {
    switch (kind) {
        case FilterKind::kIwf: return CostModel::kIwf;
        case FilterKind::kIwfAse: return CostModel::kIwfAse;
        case FilterKind::kDcdAse: return CostModel::kDcdAse;
        case FilterKind::kRmcc: return CostModel::kRmcc;
        case FilterKind::kExactAse: return std::nullopt;
    }
    return std::nullopt;
}

MeasuredCost measure_ops(FilterKind kind, const FilterConfig& cfg, std::size_t steps,
                         std::uint64_t seed) {
    if (steps == 0) {
        throw std::invalid_argument("measure_ops: steps must be >= 1");
    }
    SysIdScenario scenario;
    scenario.system = gen_system(cfg.length, mix_seed(seed, 0));
    scenario.horizon = steps;
    scenario.mc_runs = 1;
    scenario.seed = seed;
    scenario.count_ops = true;
    std::vector<AlgorithmSpec> algos{{std::string(to_string(kind)), kind, cfg}};
    resolve_kernel_widths(algos, scenario.background_sd());
    const auto records = run_sysid(scenario, algos, Execution::kSerial);
    return *records.front().op_counts;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("fit_line: need two or more paired points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace ase

namespace ase {

Matrix random_spd(std::size_t n, double cond, std::uint64_t seed) {
    if (n == 0 || !(cond >= 1.0)) {
        throw std::invalid_argument("random_spd: need n >= 1 and cond >= 1");
    }
    Rng rng(seed);
    // Modified Gram-Schmidt on a Gaussian matrix; rows of q are orthonormal.
    std::vector<Vector> q(n, Vector(n));
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        while (norm < 1e-8) {
            for (auto& v : q[i]) {
                v = rng.normal();
            }
            for (std::size_t k = 0; k < i; ++k) {
                const double proj = dot(q[i], q[k]);
                for (std::size_t j = 0; j < n; ++j) {
                    q[i][j] -= proj * q[k][j];
                }
            }
            norm = std::sqrt(dot(q[i], q[i]));
        }
        for (auto& v : q[i]) {
            v /= norm;
        }
    }
    Vector eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        eig[i] = std::pow(cond, t);
    }
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += q[k][i] * eig[k] * q[k][j];
            }
            m(i, j) = acc;
            m(j, i) = acc;
        }
    }
    return m;
}

std::vector<DcdAccuracyRow> dcd_accuracy_sweep(std::size_t n, int m_bits,
                                               std::span<const int> n_updates_list,
                                               std::size_t systems, double cond, std::uint64_t seed) {
    if (n_updates_list.empty()) {
        throw std::invalid_argument("dcd_accuracy_sweep: empty N_u list");
    }
    if (systems == 0) {
        throw std::invalid_argument("dcd_accuracy_sweep: need at least one system");
    }
    std::vector<DcdAccuracyRow> rows;
    for (int nu : n_updates_list) {
        DcdAccuracyRow row;
        row.n_updates = nu;
        DcdParams p{2.0, m_bits, nu};
        p.validate();
        for (std::size_t s = 0; s < systems; ++s) {
            const Matrix r = random_spd(n, cond, mix_seed(seed, 2 * s));
            Rng rng(mix_seed(seed, 2 * s + 1));
            Vector truth(n);
            for (auto& v : truth) {
                v = 2.0 * rng.uniform() - 1.0;
            }
            const Vector rhs = matvec(r, truth);
            const DcdSolveResult res = dcd_solve(r, rhs, p);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                err = std::max(err, std::abs(res.delta_w[i] - truth[i]));
            }
            Vector diff(n);
            for (std::size_t i = 0; i < n; ++i) {
                diff[i] = res.delta_w[i] - truth[i];
            }
            const double energy = std::sqrt(dot(diff, matvec(r, diff)) / dot(truth, rhs));
            row.mean_energy_error += energy / static_cast<double>(systems);
            row.mean_error += err / static_cast<double>(systems);
            row.max_error = std::max(row.max_error, err);
            row.mean_updates_used += static_cast<double>(res.updates_used) / static_cast<double>(systems);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ase
