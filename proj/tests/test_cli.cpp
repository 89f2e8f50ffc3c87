#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ase/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "ase_cli");
    std::ostringstream out;
    std::ostringstream err;
    const int code = ase::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ase_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

// Steady-state value of `algo` from a summary.txt result line "# algo v ...".
double summary_value(const fs::path& summary, const std::string& algo) {
    for (const auto& line : lines(slurp(summary))) {
        const std::string prefix = "# " + algo + " ";
        if (line.rfind(prefix, 0) == 0) {
            return std::stod(line.substr(prefix.size()));
        }
    }
    FAIL("no summary line for " << algo);
    return 0.0;
}

}  // namespace

TEST_CASE("sysid writes the learning-curve table, summary and plot") {
    const auto dir = scratch("sysid");
    const auto r = run({"sysid", "--runs", "2", "--horizon", "300", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto csv = lines(slurp(dir / "nmsd.csv"));
    REQUIRE(csv.size() == 301);
    CHECK(csv.front() == "iteration,iwf,iwf_ase,dcd_ase,rmcc");
    CHECK(csv[1].rfind("1,", 0) == 0);
    CHECK(slurp(dir / "nmsd.csv").find('\r') == std::string::npos);
    const auto summary = slurp(dir / "summary.txt");
    CHECK(summary.find("runs=2") != std::string::npos);
    CHECK(summary.find("horizon=300") != std::string::npos);
    CHECK(summary.find("# iwf_ase ") != std::string::npos);
    CHECK(slurp(dir / "nmsd.svg").rfind("<svg", 0) == 0);
    CHECK_FALSE(fs::exists(dir / "nmsd.csv.tmp"));
}

TEST_CASE("repeated invocations with one seed give byte-identical CSVs") {
    const auto a = scratch("repeat_a");
    const auto b = scratch("repeat_b");
    REQUIRE(run({"sysid", "--runs", "1", "--seed", "7", "--horizon", "500", "--out", a.string()}).code == 0);
    REQUIRE(run({"sysid", "--runs", "1", "--seed", "7", "--horizon", "500", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "nmsd.csv") == slurp(b / "nmsd.csv"));
    REQUIRE(run({"sysid", "--runs", "1", "--seed", "8", "--horizon", "500", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "nmsd.csv") != slurp(b / "nmsd.csv"));
}

TEST_CASE("small c beats large c under impulses") {
    const auto a = scratch("c2");
    const auto b = scratch("c200");
    const std::vector<std::string> common{"sysid", "--algo", "iwf_ase", "--runs", "10", "--horizon", "3000"};
    auto args = common;
    args.insert(args.end(), {"--c", "2", "--out", a.string()});
    REQUIRE(run(args).code == 0);
    args = common;
    args.insert(args.end(), {"--c", "200", "--out", b.string()});
    REQUIRE(run(args).code == 0);
    CHECK(summary_value(a / "summary.txt", "iwf_ase") < summary_value(b / "summary.txt", "iwf_ase"));
}

TEST_CASE("anc writes its outputs and favours iwf_ase over iwf") {
    const auto dir = scratch("anc");
    REQUIRE(run({"anc", "--runs", "3", "--horizon", "3000", "--out", dir.string()}).code == 0);
    for (const char* f : {"mse.csv", "clean.csv", "primary.csv", "reference.csv", "denoised_iwf.csv",
                          "denoised_iwf_ase.csv", "denoised_dcd_ase.csv", "denoised_rmcc.csv",
                          "mse.svg", "denoised.svg", "summary.txt"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    CHECK(lines(slurp(dir / "mse.csv")).front() == "iteration,iwf,iwf_ase,dcd_ase,rmcc");
    CHECK(lines(slurp(dir / "denoised_iwf.csv")).size() == 3000);

    const auto a = scratch("anc_iwf");
    const auto b = scratch("anc_iwf_ase");
    REQUIRE(run({"anc", "--algo", "iwf", "--runs", "3", "--out", a.string()}).code == 0);
    REQUIRE(run({"anc", "--algo", "iwf_ase", "--runs", "3", "--out", b.string()}).code == 0);
    CHECK(summary_value(b / "summary.txt", "iwf_ase") < summary_value(a / "summary.txt", "iwf"));
}

TEST_CASE("anc on recorded files") {
    const auto src = scratch("anc_src");
    REQUIRE(run({"anc", "--runs", "1", "--horizon", "400", "--out", src.string()}).code == 0);
    const auto dir = scratch("anc_rec");
    const auto ok = run({"anc", "--primary-file", (src / "primary.csv").string(), "--reference-file",
                         (src / "reference.csv").string(), "--out", dir.string()});
    REQUIRE(ok.code == 0);
    CHECK(fs::exists(dir / "denoised_iwf_ase.csv"));
    CHECK_FALSE(fs::exists(dir / "clean.csv"));

    const auto missing = (src / "nope.csv").string();
    const auto bad = run({"anc", "--primary-file", (src / "primary.csv").string(), "--reference-file",
                          missing, "--out", dir.string()});
    CHECK(bad.code == ase::kExitConfig);
    CHECK(bad.err.find(missing) != std::string::npos);
}

TEST_CASE("dcd-bench") {
    const auto dir = scratch("bench");
    REQUIRE(run({"dcd-bench", "--mb", "16", "--systems", "20", "--runs", "2", "--horizon", "500",
                 "--op-steps", "50", "--out", dir.string()})
                .code == 0);
    const auto acc = lines(slurp(dir / "dcd_accuracy.csv"));
    REQUIRE(acc.size() > 2);
    CHECK(acc.front() == "n_updates,mean_error,max_error,mean_energy_error,mean_updates_used");
    double prev = 1e300;
    for (std::size_t i = 1; i < acc.size(); ++i) {
        std::istringstream row(acc[i]);
        std::string cell;
        for (int col = 0; col < 4; ++col) {
            std::getline(row, cell, ',');
        }
        const double err = std::stod(cell);
        CHECK(err <= prev);
        prev = err;
    }
    CHECK(lines(slurp(dir / "dcd_sysid.csv")).size() == 5);
    CHECK(lines(slurp(dir / "op_counts.csv")).front().rfind("algorithm,length,", 0) == 0);

    const auto empty = run({"dcd-bench", "--nu-list", "", "--out", dir.string()});
    CHECK(empty.code == ase::kExitConfig);
    CHECK(run({"dcd-bench", "--nu-list", "1,,4", "--out", dir.string()}).code == ase::kExitConfig);
}

TEST_CASE("sweep") {
    const auto dir = scratch("sweep");
    REQUIRE(run({"sweep", "--param", "c", "--values", "1,2", "--runs", "2", "--horizon", "300",
                 "--out", dir.string()})
                .code == 0);
    const auto csv = lines(slurp(dir / "sweep.csv"));
    REQUIRE(csv.size() == 3);
    CHECK(csv.front() == "c,iwf_ase_nmsd_db,iwf_ase_update_ratio,dcd_ase_nmsd_db,dcd_ase_update_ratio");
    CHECK(run({"sweep", "--values", "", "--out", dir.string()}).code == ase::kExitConfig);
    CHECK(run({"sweep", "--param", "bogus", "--out", dir.string()}).code == ase::kExitConfig);
}

TEST_CASE("config files: sections, precedence and unknown keys") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    const auto ini = dir / "run.ini";
    std::ofstream(ini) << "[sysid]\nruns=1\nhorizon=120\nseed=5\n";
    REQUIRE(run({"--config", ini.string(), "sysid", "--out", (dir / "a").string()}).code == 0);
    CHECK(lines(slurp(dir / "a" / "nmsd.csv")).size() == 121);

    REQUIRE(run({"--config", ini.string(), "sysid", "--horizon", "80", "--out", (dir / "b").string()})
                .code == 0);
    CHECK(lines(slurp(dir / "b" / "nmsd.csv")).size() == 81);
    CHECK(slurp(dir / "b" / "summary.txt").find("seed=5") != std::string::npos);

    // The echoed configuration is itself a valid config file.
    REQUIRE(run({"--config", (dir / "b" / "summary.txt").string(), "sysid", "--out",
                 (dir / "c").string()})
                .code == 0);
    CHECK(slurp(dir / "b" / "nmsd.csv") == slurp(dir / "c" / "nmsd.csv"));

    const auto bad = dir / "bad.ini";
    std::ofstream(bad) << "[sysid]\nrunz=3\n";
    const auto r = run({"--config", bad.string(), "sysid", "--out", (dir / "d").string()});
    CHECK(r.code == ase::kExitConfig);
    CHECK(r.err.find("runz") != std::string::npos);
}

TEST_CASE("usage errors and help") {
    CHECK(run({}).code == ase::kExitConfig);
    CHECK(run({"sysid", "--runs", "zero"}).code == ase::kExitConfig);
    CHECK(run({"sysid", "--algo", "lms"}).code == ase::kExitConfig);
    CHECK(run({"sysid", "--lambda", "2"}).code == ase::kExitConfig);
    CHECK(run({"sysid", "--horizon", "0"}).code == ase::kExitConfig);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("sysid") != std::string::npos);
}

TEST_CASE("output directory defaults to the environment variable") {
    const auto dir = scratch("env");
    REQUIRE(setenv("ASE_OUTPUT_DIR", dir.string().c_str(), 1) == 0);
    const auto r = run({"sysid", "--runs", "1", "--horizon", "50"});
    unsetenv("ASE_OUTPUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "nmsd.csv"));
}

TEST_CASE("runtime failures map to exit code 3") {
    const auto dir = scratch("runtime");
    fs::create_directories(dir);
    std::ofstream(dir / "blocker") << "file, not a directory";
    const auto r = run({"sysid", "--runs", "1", "--horizon", "20", "--out", (dir / "blocker").string()});
    CHECK(r.code == ase::kExitRuntime);
}
