#include "ase/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ase/harness.hpp"
#include "ase/io.hpp"
#include "ase/svg_plot.hpp"

namespace fs = std::filesystem;

namespace ase {

namespace {

// Bad flag values or config contents; maps to kExitConfig.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text, const std::string& what) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            throw UsageError(what + ": empty entry in list '" + text + "'");
        }
        items.push_back(item.substr(b, e - b + 1));
    }
    if (items.empty()) {
        throw UsageError(what + ": list must not be empty");
    }
    return items;
}

template <class T>
std::vector<T> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<T> values;
    for (const auto& item : split_list(text, what)) {
        T v{};
        if (!CLI::detail::lexical_cast(item, v)) {
            throw UsageError(what + ": not a number: '" + item + "'");
        }
        values.push_back(v);
    }
    return values;
}

struct FilterOptions {
    std::string algos;
    std::size_t length{10};
    double lambda{0.999};
    double rho{1e-4};
    double c{2.0};
    double zeta{1e-4};
    double h{2.0};
    int mb{8};
    int nu{8};
    double sigma{0.0};  // 0 picks a width from the noise level
    std::string delta{"decaying"};
};

void add_filter_options(CLI::App* sub, FilterOptions& f) {
    sub->add_option("--algo", f.algos, "Comma-separated algorithms (iwf, iwf_ase, dcd_ase, "
                                       "exact_ase, rmcc)")
        ->capture_default_str();
    sub->add_option("--length", f.length, "Filter length L")->capture_default_str();
    sub->add_option("--lambda", f.lambda, "Forgetting factor")->capture_default_str();
    sub->add_option("--rho", f.rho, "Regularization")->capture_default_str();
    sub->add_option("--c", f.c, "ASE threshold parameter")->capture_default_str();
    sub->add_option("--zeta", f.zeta, "ASE weight guard")->capture_default_str();
    sub->add_option("--range", f.h, "DCD amplitude range H")->capture_default_str();
    sub->add_option("--mb", f.mb, "DCD bits M_b")->capture_default_str();
    sub->add_option("--nu", f.nu, "DCD updates per sample N_u")->capture_default_str();
    sub->add_option("--sigma", f.sigma, "RMCC kernel width (0 = twice the background sd)")
        ->capture_default_str();
    sub->add_option("--delta", f.delta, "DCD regularization schedule")
        ->check(CLI::IsMember({"decaying", "constant"}))
        ->capture_default_str();
}

FilterConfig make_filter_config(const FilterOptions& f) {
    FilterConfig cfg = default_filter_config(f.length);
    cfg.lambda = f.lambda;
    cfg.rho = f.rho;
    cfg.ase = AseParams{f.c, f.zeta};
    cfg.dcd = DcdParams{f.h, f.mb, f.nu};
    cfg.delta_schedule = f.delta == "constant" ? DeltaSchedule::kConstant : DeltaSchedule::kDecaying;
    if (f.sigma > 0.0) {
        cfg.kernel_sigma = f.sigma;
    } else if (f.sigma < 0.0) {
        throw UsageError("--sigma must be nonnegative");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

std::vector<AlgorithmSpec> make_algorithms(const FilterOptions& f) {
    const FilterConfig cfg = make_filter_config(f);
    std::vector<AlgorithmSpec> algos;
    for (const auto& name : split_list(f.algos, "--algo")) {
        const auto kind = parse_filter_kind(name);
        if (!kind) {
            throw UsageError("--algo: unknown algorithm '" + name + "'");
        }
        for (const auto& a : algos) {
            if (a.id == name) {
                throw UsageError("--algo: duplicate algorithm '" + name + "'");
            }
        }
        algos.push_back({name, *kind, cfg});
    }
    return algos;
}

struct SysIdOptions {
    std::uint64_t seed{1};
    std::size_t runs{100};
    std::size_t horizon{5000};
    double snr_db{0.0};
    bool impulses{true};
    double p_r{0.1};
    double impulse_var{1e4};
    double input_var{1.0};
    bool primed{true};
    bool serial{false};
};

void add_sysid_options(CLI::App* sub, SysIdOptions& s) {
    sub->add_option("--seed", s.seed, "Base seed")->capture_default_str();
    sub->add_option("--runs", s.runs, "Monte Carlo runs")->capture_default_str();
    sub->add_option("--horizon", s.horizon, "Samples per run")->capture_default_str();
    sub->add_option("--snr", s.snr_db, "Signal to background noise ratio, dB")
        ->capture_default_str();
    sub->add_flag("--impulses,!--no-impulses", s.impulses, "Add Bernoulli-Gaussian impulses")
        ->default_str(s.impulses ? "true" : "false");
    sub->add_option("--pr", s.p_r, "Impulse probability")->capture_default_str();
    sub->add_option("--impulse-var", s.impulse_var, "Impulse variance")->capture_default_str();
    sub->add_option("--input-var", s.input_var, "Input variance")->capture_default_str();
    sub->add_flag("--primed,!--zero-history", s.primed,
                  "Fill the delay line with input history before the first step")
        ->default_str(s.primed ? "true" : "false");
    sub->add_flag("--serial", s.serial, "Use the serial reference path")->default_str("false");
}

SysIdScenario make_sysid_scenario(const SysIdOptions& s, std::size_t length) {
    SysIdScenario sc;
    sc.seed = s.seed;
    sc.system = gen_system(length, mix_seed(s.seed, 0));
    sc.mc_runs = s.runs;
    sc.horizon = s.horizon;
    sc.snr_db = s.snr_db;
    sc.impulses = s.impulses;
    sc.impulse_noise = BgNoiseSpec{s.p_r, s.impulse_var};
    sc.input_variance = s.input_var;
    sc.primed_delay_line = s.primed;
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return sc;
}

double seconds(std::chrono::duration<double> d) { return d.count(); }

std::string format_row(std::initializer_list<double> values) {
    std::string line;
    for (double v : values) {
        line.push_back(' ');
        append_number(line, v);
    }
    return line;
}

std::vector<double> iteration_axis(std::size_t n) {
    std::vector<double> it(n);
    for (std::size_t i = 0; i < n; ++i) {
        it[i] = static_cast<double>(i + 1);
    }
    return it;
}

struct Context {
    fs::path out_dir;
    std::string effective_config;
    std::ostream& out;
};

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
}

void cmd_sysid(const Context& ctx, const SysIdOptions& so, const FilterOptions& fo) {
    auto algos = make_algorithms(fo);
    const SysIdScenario sc = make_sysid_scenario(so, fo.length);
    resolve_kernel_widths(algos, sc.background_sd());
    const auto records =
        run_sysid(sc, algos, so.serial ? Execution::kSerial : Execution::kParallel);

    prepare_out_dir(ctx.out_dir);
    CsvTable table;
    table.header.push_back("iteration");
    table.columns.push_back(iteration_axis(sc.horizon));
    LinePlot plot{"Learning curves", "iteration", "NMSD (dB)", 1.0, 1.0, {}};
    std::string summary = ctx.effective_config;
    summary += "\n# algorithm steady_state_nmsd_db steady_state_mse_db update_ratio "
               "steady_state_update_ratio wall_time_s\n";
    for (const auto& rec : records) {
        table.header.push_back(rec.algorithm);
        table.columns.push_back(rec.nmsd_db);
        plot.series.push_back({rec.algorithm, rec.nmsd_db});
        summary += "# " + rec.algorithm +
                   format_row({steady_state_nmsd_db(rec), steady_state_mse_db(rec),
                               rec.update_ratio, steady_state_update_ratio(rec),
                               seconds(rec.wall_time)}) +
                   "\n";
    }
    write_file_atomic(ctx.out_dir / "nmsd.csv", table.render());
    write_file_atomic(ctx.out_dir / "nmsd.svg", render_svg(plot));
    write_file_atomic(ctx.out_dir / "summary.txt", summary);
    ctx.out << summary.substr(ctx.effective_config.size() + 1);
}

struct AncOptions {
    std::uint64_t seed{1};
    std::size_t runs{20};
    std::size_t horizon{5000};
    double p_r{0.1};
    double interference_var{25.0};
    double a1{0.2};
    double pulse_rate{0.004};
    double amplitude{12.0};
    double tau{4.0};
    double freq{0.12};
    std::size_t support{32};
    double sensor_noise_var{0.01};
    std::string primary_file;
    std::string reference_file;
    bool serial{false};
};

void cmd_anc(const Context& ctx, const AncOptions& ao, const FilterOptions& fo) {
    auto algos = make_algorithms(fo);
    const bool recorded = !ao.primary_file.empty() || !ao.reference_file.empty();
    AncResult result;
    if (recorded) {
        if (ao.primary_file.empty() || ao.reference_file.empty()) {
            throw UsageError("recorded data needs both --primary-file and --reference-file");
        }
        for (const auto& [flag, path] : {std::pair{"--primary-file", ao.primary_file},
                                         std::pair{"--reference-file", ao.reference_file}}) {
            if (!fs::is_regular_file(path)) {
                throw UsageError(std::string(flag) + ": input file not found: " + path);
            }
        }
        const auto primary = read_waveform_csv(ao.primary_file);
        const auto reference = read_waveform_csv(ao.reference_file);
        resolve_kernel_widths(algos, 0.0);
        result = run_anc_streams(primary, reference, algos);
    } else {
        AncScenario sc;
        sc.seed = ao.seed;
        sc.mc_runs = ao.runs;
        sc.horizon = ao.horizon;
        sc.interference = BgNoiseSpec{ao.p_r, ao.interference_var};
        sc.shaping_a1 = ao.a1;
        sc.pulse_rate = ao.pulse_rate;
        sc.pulse = PdPulseSpec{ao.amplitude, ao.tau, ao.freq, ao.support};
        sc.sensor_noise_var = ao.sensor_noise_var;
        try {
            sc.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        resolve_kernel_widths(algos, std::sqrt(sc.sensor_noise_var));
        result = run_anc(sc, algos, ao.serial ? Execution::kSerial : Execution::kParallel);
    }

    prepare_out_dir(ctx.out_dir);
    const std::size_t n = result.primary.size();
    CsvTable table;
    table.header.push_back("iteration");
    table.columns.push_back(iteration_axis(n));
    LinePlot mse_plot{"Noise cancellation", "iteration", "MSE (dB)", 1.0, 1.0, {}};
    LinePlot wave_plot{"Denoised output", "sample", "amplitude", 0.0, 1.0, {}};
    if (!result.clean.empty()) {
        wave_plot.series.push_back({"clean", result.clean});
    }
    std::string summary = ctx.effective_config;
    summary += "\n# algorithm steady_state_mse_db update_ratio wall_time_s\n";
    for (std::size_t a = 0; a < result.records.size(); ++a) {
        const auto& rec = result.records[a];
        std::vector<double> mse_db(rec.mse.size());
        for (std::size_t i = 0; i < mse_db.size(); ++i) {
            mse_db[i] = ratio_to_db(rec.mse[i]);
        }
        table.header.push_back(rec.algorithm);
        table.columns.push_back(mse_db);
        mse_plot.series.push_back({rec.algorithm, std::move(mse_db)});
        wave_plot.series.push_back({rec.algorithm, result.denoised[a]});
        write_waveform_csv(ctx.out_dir / ("denoised_" + rec.algorithm + ".csv"),
                           result.denoised[a]);
        summary += "# " + rec.algorithm +
                   format_row({steady_state_mse_db(rec), rec.update_ratio,
                               seconds(rec.wall_time)}) +
                   "\n";
    }
    if (!result.clean.empty()) {
        write_waveform_csv(ctx.out_dir / "clean.csv", result.clean);
    }
    write_waveform_csv(ctx.out_dir / "primary.csv", result.primary);
    write_waveform_csv(ctx.out_dir / "reference.csv", result.reference);
    write_file_atomic(ctx.out_dir / "mse.csv", table.render());
    write_file_atomic(ctx.out_dir / "mse.svg", render_svg(mse_plot));
    write_file_atomic(ctx.out_dir / "denoised.svg", render_svg(wave_plot));
    write_file_atomic(ctx.out_dir / "summary.txt", summary);
    ctx.out << summary.substr(ctx.effective_config.size() + 1);
}

struct DcdBenchOptions {
    std::uint64_t seed{1};
    std::size_t length{10};
    int mb{16};
    std::string nu_list{"1,2,4,8,16,32,64,128,256,640"};
    std::size_t systems{100};
    double cond{100.0};
    std::string sysid_nu_list{"1,2,4,8"};
    int sysid_mb{8};
    std::size_t runs{20};
    std::size_t horizon{5000};
    std::string op_lengths{"8,16,32,64"};
    std::size_t op_steps{200};
};

void cmd_dcd_bench(const Context& ctx, const DcdBenchOptions& bo) {
    const auto nus = parse_numbers<int>(bo.nu_list, "--nu-list");
    const auto sysid_nus = parse_numbers<int>(bo.sysid_nu_list, "--sysid-nu-list");
    const auto op_lengths = parse_numbers<std::size_t>(bo.op_lengths, "--op-lengths");
    if (bo.length == 0 || bo.systems == 0 || !(bo.cond >= 1.0)) {
        throw UsageError("dcd-bench: need --length >= 1, --systems >= 1, --cond >= 1");
    }
    for (int nu : nus) {
        if (nu < 1) {
            throw UsageError("--nu-list: N_u must be >= 1");
        }
    }
    for (std::size_t l : op_lengths) {
        if (l == 0) {
            throw UsageError("--op-lengths: length must be >= 1");
        }
    }
    if (bo.mb < 1 || bo.mb > 62 || bo.sysid_mb < 1 || bo.sysid_mb > 62) {
        throw UsageError("dcd-bench: M_b must be in [1, 62]");
    }

    const auto accuracy =
        dcd_accuracy_sweep(bo.length, bo.mb, nus, bo.systems, bo.cond, bo.seed);
    CsvTable acc;
    acc.header = {"n_updates", "mean_error", "max_error", "mean_energy_error", "mean_updates_used"};
    acc.columns.resize(5);
    for (const auto& row : accuracy) {
        acc.columns[0].push_back(row.n_updates);
        acc.columns[1].push_back(row.mean_error);
        acc.columns[2].push_back(row.max_error);
        acc.columns[3].push_back(row.mean_energy_error);
        acc.columns[4].push_back(row.mean_updates_used);
    }

    SysIdOptions so;
    so.seed = bo.seed;
    so.runs = bo.runs;
    so.horizon = bo.horizon;
    SysIdScenario sc = make_sysid_scenario(so, bo.length);
    std::vector<AlgorithmSpec> algos;
    for (int nu : sysid_nus) {
        if (nu < 1) {
            throw UsageError("--sysid-nu-list: N_u must be >= 1");
        }
        FilterConfig cfg = default_filter_config(bo.length);
        cfg.dcd = DcdParams{2.0, bo.sysid_mb, nu};
        algos.push_back({"dcd_ase_nu" + std::to_string(nu), FilterKind::kDcdAse, cfg});
    }
    const auto records = run_sysid(sc, algos);
    CsvTable sys;
    sys.header = {"n_updates", "steady_state_nmsd_db", "update_ratio"};
    sys.columns.resize(3);
    for (std::size_t i = 0; i < records.size(); ++i) {
        sys.columns[0].push_back(sysid_nus[i]);
        sys.columns[1].push_back(steady_state_nmsd_db(records[i]));
        sys.columns[2].push_back(records[i].update_ratio);
    }

    std::string ops = "algorithm,length,nominal_adds,nominal_mults,measured_adds,measured_mults,"
                      "measured_comparisons,measured_shifts\n";
    const DcdParams nominal_dcd{2.0, bo.sysid_mb, 8};
    for (FilterKind kind : {FilterKind::kIwf, FilterKind::kIwfAse, FilterKind::kDcdAse,
                            FilterKind::kRmcc}) {
        for (std::size_t l : op_lengths) {
            FilterConfig cfg = default_filter_config(l);
            cfg.dcd = nominal_dcd;
            const NominalCost nom = count_ops(*cost_model_for(kind), l, nominal_dcd);
            const MeasuredCost mc = measure_ops(kind, cfg, bo.op_steps, bo.seed);
            ops += to_string(kind);
            for (double v : {static_cast<double>(l), nom.adds, nom.mults, mc.adds, mc.mults,
                             mc.comparisons, mc.shifts}) {
                ops.push_back(',');
                append_number(ops, v);
            }
            ops.push_back('\n');
        }
    }

    prepare_out_dir(ctx.out_dir);
    write_file_atomic(ctx.out_dir / "dcd_accuracy.csv", acc.render());
    write_file_atomic(ctx.out_dir / "dcd_sysid.csv", sys.render());
    write_file_atomic(ctx.out_dir / "op_counts.csv", ops);
    std::string summary = ctx.effective_config;
    summary += "\n# n_updates mean_error max_error mean_energy_error\n";
    for (const auto& row : accuracy) {
        summary += "# solve" + format_row({static_cast<double>(row.n_updates), row.mean_error,
                                        row.max_error, row.mean_energy_error}) +
                   "\n";
    }
    summary += "# n_updates steady_state_nmsd_db update_ratio\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        summary += "# sysid" + format_row({static_cast<double>(sysid_nus[i]),
                                        steady_state_nmsd_db(records[i]),
                                        records[i].update_ratio}) +
                   "\n";
    }
    write_file_atomic(ctx.out_dir / "summary.txt", summary);
    ctx.out << summary.substr(ctx.effective_config.size() + 1);
}

struct SweepOptions {
    std::string param{"c"};
    std::string values{"0.5,1,2,5,20,200"};
};

void cmd_sweep(const Context& ctx, const SweepOptions& wo, const SysIdOptions& so,
               FilterOptions fo) {
    const auto values = parse_numbers<double>(wo.values, "--values");
    CsvTable table;
    table.header.push_back(wo.param);
    table.columns.emplace_back();
    std::string summary = ctx.effective_config;
    summary += "\n# " + wo.param + " algorithm steady_state_nmsd_db update_ratio\n";
    bool first = true;
    for (double v : values) {
        SysIdOptions s = so;
        if (wo.param == "c") {
            fo.c = v;
        } else if (wo.param == "nu") {
            fo.nu = static_cast<int>(v);
        } else if (wo.param == "mb") {
            fo.mb = static_cast<int>(v);
        } else if (wo.param == "lambda") {
            fo.lambda = v;
        } else if (wo.param == "snr") {
            s.snr_db = v;
        } else {
            s.p_r = v;
        }
        if ((wo.param == "nu" || wo.param == "mb") && v != static_cast<int>(v)) {
            throw UsageError("--values: " + wo.param + " needs integer values");
        }
        auto algos = make_algorithms(fo);
        const SysIdScenario sc = make_sysid_scenario(s, fo.length);
        resolve_kernel_widths(algos, sc.background_sd());
        const auto records =
            run_sysid(sc, algos, s.serial ? Execution::kSerial : Execution::kParallel);
        table.columns[0].push_back(v);
        for (std::size_t a = 0; a < records.size(); ++a) {
            if (first) {
                table.header.push_back(records[a].algorithm + "_nmsd_db");
                table.header.push_back(records[a].algorithm + "_update_ratio");
                table.columns.emplace_back();
                table.columns.emplace_back();
            }
            table.columns[1 + 2 * a].push_back(steady_state_nmsd_db(records[a]));
            table.columns[2 + 2 * a].push_back(records[a].update_ratio);
            summary += "#" + format_row({v}) + " " + records[a].algorithm +
                       format_row({steady_state_nmsd_db(records[a]), records[a].update_ratio}) +
                       "\n";
        }
        first = false;
    }
    prepare_out_dir(ctx.out_dir);
    write_file_atomic(ctx.out_dir / "sweep.csv", table.render());
    write_file_atomic(ctx.out_dir / "summary.txt", summary);
    ctx.out << summary.substr(ctx.effective_config.size() + 1);
}

// key=value lines of the values each option ends up with, in INI syntax.
std::string echo_options(const CLI::App& sub) {
    std::string text;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt == sub.get_help_ptr() || opt->get_lnames().empty()) {
            continue;
        }
        std::string value;
        if (opt->get_expected_min() == 0) {
            const bool set = opt->count() > 0 ? opt->as<bool>() : opt->get_default_str() == "true";
            value = set ? "true" : "false";
        } else {
            value = CLI::detail::convert_arg_for_ini(opt->as<std::string>());
        }
        text += opt->get_lnames().front() + "=" + value + "\n";
    }
    return text;
}

std::string default_out_dir() {
    const char* env = std::getenv("ASE_OUTPUT_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string("results");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust adaptive filtering experiments"};
    app.name(args.empty() ? "ase_cli" : args.front());
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "INI file; sections name subcommands");
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string out_dir = default_out_dir();
    app.add_option("--out", out_dir, "Output directory (default $ASE_OUTPUT_DIR or results)")
        ->capture_default_str();

    SysIdOptions sysid_opts;
    FilterOptions sysid_filters;
    sysid_filters.algos = "iwf,iwf_ase,dcd_ase,rmcc";
    auto* sysid = app.add_subcommand("sysid", "Monte Carlo system identification");
    add_sysid_options(sysid, sysid_opts);
    add_filter_options(sysid, sysid_filters);

    AncOptions anc_opts;
    FilterOptions anc_filters;
    anc_filters.algos = "iwf,iwf_ase,dcd_ase,rmcc";
    anc_filters.length = 5;
    auto* anc = app.add_subcommand("anc", "Adaptive noise cancellation");
    anc->add_option("--seed", anc_opts.seed, "Base seed")->capture_default_str();
    anc->add_option("--runs", anc_opts.runs, "Monte Carlo runs")->capture_default_str();
    anc->add_option("--horizon", anc_opts.horizon, "Samples per run")->capture_default_str();
    anc->add_option("--pr", anc_opts.p_r, "Interference impulse probability")
        ->capture_default_str();
    anc->add_option("--interference-var", anc_opts.interference_var, "Impulse variance")
        ->capture_default_str();
    anc->add_option("--a1", anc_opts.a1, "Reference shaping x = (1 - a1 z^-1) s")
        ->capture_default_str();
    anc->add_option("--pulse-rate", anc_opts.pulse_rate, "Pulse start probability per sample")
        ->capture_default_str();
    anc->add_option("--amplitude", anc_opts.amplitude, "Pulse peak")->capture_default_str();
    anc->add_option("--tau", anc_opts.tau, "Pulse decay, samples")->capture_default_str();
    anc->add_option("--freq", anc_opts.freq, "Pulse oscillation, cycles per sample")
        ->capture_default_str();
    anc->add_option("--support", anc_opts.support, "Pulse length, samples")
        ->capture_default_str();
    anc->add_option("--sensor-noise-var", anc_opts.sensor_noise_var, "Primary sensor noise")
        ->capture_default_str();
    anc->add_option("--primary-file", anc_opts.primary_file, "Recorded primary channel CSV");
    anc->add_option("--reference-file", anc_opts.reference_file,
                    "Recorded reference channel CSV");
    anc->add_flag("--serial", anc_opts.serial, "Use the serial reference path")
        ->default_str("false");
    add_filter_options(anc, anc_filters);

    DcdBenchOptions bench_opts;
    auto* bench = app.add_subcommand("dcd-bench", "DCD solver accuracy and operation counts");
    bench->add_option("--seed", bench_opts.seed, "Base seed")->capture_default_str();
    bench->add_option("--length", bench_opts.length, "System size")->capture_default_str();
    bench->add_option("--mb", bench_opts.mb, "Solver bits for the accuracy sweep")
        ->capture_default_str();
    bench->add_option("--nu-list", bench_opts.nu_list, "N_u values for the accuracy sweep")
        ->capture_default_str();
    bench->add_option("--systems", bench_opts.systems, "Random SPD systems per N_u")
        ->capture_default_str();
    bench->add_option("--cond", bench_opts.cond, "Condition number of the systems")
        ->capture_default_str();
    bench->add_option("--sysid-nu-list", bench_opts.sysid_nu_list,
                      "N_u values for DCD-ASE system identification")
        ->capture_default_str();
    bench->add_option("--sysid-mb", bench_opts.sysid_mb, "Bits for DCD-ASE runs")
        ->capture_default_str();
    bench->add_option("--runs", bench_opts.runs, "Monte Carlo runs")->capture_default_str();
    bench->add_option("--horizon", bench_opts.horizon, "Samples per run")->capture_default_str();
    bench->add_option("--op-lengths", bench_opts.op_lengths, "Filter lengths for op counts")
        ->capture_default_str();
    bench->add_option("--op-steps", bench_opts.op_steps, "Instrumented steps per length")
        ->capture_default_str();

    SweepOptions sweep_opts;
    SysIdOptions sweep_sysid;
    sweep_sysid.runs = 20;
    FilterOptions sweep_filters;
    sweep_filters.algos = "iwf_ase,dcd_ase";
    auto* sweep = app.add_subcommand("sweep", "Steady-state NMSD over one parameter");
    sweep->add_option("--param", sweep_opts.param, "Swept parameter")
        ->check(CLI::IsMember({"c", "nu", "mb", "lambda", "snr", "pr"}))
        ->capture_default_str();
    sweep->add_option("--values", sweep_opts.values, "Comma-separated values")
        ->capture_default_str();
    add_sysid_options(sweep, sweep_sysid);
    add_filter_options(sweep, sweep_filters);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) {
        argv.push_back("ase_cli");
    }
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* chosen = app.get_subcommands().front();
    std::string effective = "out=" + CLI::detail::convert_arg_for_ini(out_dir) + "\n\n[" +
                            chosen->get_name() + "]\n" + echo_options(*chosen);
    const Context ctx{out_dir, effective, out};

    try {
        if (chosen == sysid) {
            cmd_sysid(ctx, sysid_opts, sysid_filters);
        } else if (chosen == anc) {
            cmd_anc(ctx, anc_opts, anc_filters);
        } else if (chosen == bench) {
            cmd_dcd_bench(ctx, bench_opts);
        } else {
            cmd_sweep(ctx, sweep_opts, sweep_sysid, sweep_filters);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace ase
