#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "ase/estimator.hpp"
#include "ase/filters.hpp"

using ase::FilterConfig;
using ase::FilterKind;
using ase::FilterState;
using ase::Vector;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd to_eigen(const ase::Matrix& m) {
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out(i, j) = m(i, j);
        }
    }
    return out;
}

Eigen::VectorXd to_eigen(const Vector& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Tapped-delay-line stream d = w_o^T x + noise, optionally with rare
// large outliers, drawn from std::mt19937 (independent of the library RNG).
struct Stream {
    std::vector<Vector> x;
    std::vector<double> d;
    Vector w_o;
};

Stream make_stream(std::size_t length, std::size_t n, double noise_sd, double outlier_prob,
                   unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    Stream s;
    s.w_o.resize(length);
    for (auto& v : s.w_o) {
        v = nd(gen);
    }
    std::vector<double> input(n + length);
    for (auto& v : input) {
        v = nd(gen);
    }
    for (std::size_t k = 0; k < n; ++k) {
        Vector x(length);
        for (std::size_t i = 0; i < length; ++i) {
            x[i] = input[k + length - 1 - i];
        }
        double d = noise_sd * nd(gen);
        for (std::size_t i = 0; i < length; ++i) {
            d += s.w_o[i] * x[i];
        }
        if (ud(gen) < outlier_prob) {
            d += 100.0 * nd(gen);
        }
        s.x.push_back(std::move(x));
        s.d.push_back(d);
    }
    return s;
}

double nmsd_db(const Vector& w, const Eigen::VectorXd& ref) {
    return 10.0 * std::log10((to_eigen(w) - ref).squaredNorm() / ref.squaredNorm());
}

}  // namespace

TEST_CASE("filter_init") {
    FilterConfig cfg;
    cfg.length = 2;
    cfg.rho = 1e-4;
    const FilterState s = ase::filter_init(cfg);
    CHECK(s.r_matrix(0, 0) == 1e-4);
    CHECK(s.r_matrix(1, 1) == 1e-4);
    CHECK(s.r_matrix(0, 1) == 0.0);
    CHECK(s.w == Vector{0.0, 0.0});
    CHECK(s.updates_total == 0);
    CHECK(s.updates_applied == 0);
    CHECK_FALSE(ase::update_ratio(s).has_value());

    cfg.length = 1;
    cfg.rho = 1.0;
    CHECK(ase::filter_init(cfg).r_matrix(0, 0) == 1.0);

    cfg.length = 0;
    CHECK_THROWS_AS((void)ase::filter_init(cfg), std::invalid_argument);
    cfg.length = 3;
    cfg.lambda = 1.5;
    CHECK_THROWS_AS((void)ase::filter_init(cfg), std::invalid_argument);
}

TEST_CASE("correlation_update") {
    FilterConfig cfg;
    cfg.length = 1;
    cfg.rho = 1.0;
    FilterState s = ase::filter_init(cfg);
    ase::correlation_update(s, 0.5, Vector{2.0}, 1.0, 1.0);
    CHECK(s.r_matrix(0, 0) == 4.5);
    CHECK(s.theta[0] == 2.0);

    ase::correlation_update(s, 0.5, Vector{7.0}, 3.0, 0.0);
    CHECK(s.r_matrix(0, 0) == 2.25);
    CHECK(s.theta[0] == 1.0);
}

TEST_CASE("correlation_update with lambda = 1 equals the plain sum") {
    FilterConfig cfg;
    cfg.length = 4;
    cfg.rho = 0.25;
    FilterState s = ase::filter_init(cfg);
    const Stream st = make_stream(4, 50, 0.1, 0.0, 3);
    Eigen::MatrixXd r = 0.25 * Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(4);
    for (std::size_t k = 0; k < st.x.size(); ++k) {
        ase::correlation_update(s, 1.0, st.x[k], st.d[k], 1.0);
        const Eigen::VectorXd x = to_eigen(st.x[k]);
        r += x * x.transpose();
        theta += st.d[k] * x;
    }
    CHECK((to_eigen(s.r_matrix) - r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((to_eigen(s.theta) - theta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.r_matrix.is_symmetric());
}

TEST_CASE("IWF step takes the exact line-search step along the residual") {
    FilterConfig cfg;
    cfg.length = 5;
    FilterState s = ase::filter_init(cfg);
    const Stream st = make_stream(5, 60, 0.3, 0.0, 5);
    for (std::size_t k = 0; k < st.x.size(); ++k) {
        FilterState before = s;
        ase::correlation_update(before, cfg.lambda, st.x[k], st.d[k], 1.0);
        const Eigen::MatrixXd r = to_eigen(before.r_matrix);
        const Eigen::VectorXd w0 = to_eigen(before.w);
        const Eigen::VectorXd res = to_eigen(before.theta) - r * w0;
        const double mu = res.squaredNorm() / (res.dot(r * res) + cfg.vss_guard);

        const auto out = ase::iwf_step(s, cfg, st.x[k], st.d[k]);
        CHECK(out.applied);
        CHECK(out.step_size == doctest::Approx(mu).epsilon(1e-9));
        const Eigen::VectorXd expect = w0 + mu * res;
        CHECK((to_eigen(s.w) - expect).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + expect.norm()));

        // J(w) = w^T R w / 2 - theta^T w is smallest at the chosen step.
        auto j = [&](double m) {
            const Eigen::VectorXd w = w0 + m * res;
            return 0.5 * w.dot(r * w) - to_eigen(before.theta).dot(w);
        };
        CHECK(j(mu) <= j(0.95 * mu) + 1e-12);
        CHECK(j(mu) <= j(1.05 * mu) + 1e-12);
    }
    CHECK(ase::update_ratio(s).value() == 1.0);
}

TEST_CASE("IWF-ASE skips the statistics update for gross errors") {
    FilterConfig cfg;
    cfg.length = 3;
    cfg.ase.c = 2.0;
    FilterState s = ase::filter_init(cfg);
    const Stream st = make_stream(3, 20, 0.1, 0.0, 9);
    for (std::size_t k = 0; k < st.x.size(); ++k) {
        (void)ase::iwf_ase_step(s, cfg, st.x[k], st.d[k]);
    }
    const FilterState before = s;
    const Vector x{1.0, -0.5, 0.25};
    double y = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        y += s.w[i] * x[i];
    }
    const auto out = ase::iwf_ase_step(s, cfg, x, y + 10.0 * kPi * cfg.ase.c);
    CHECK_FALSE(out.applied);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.theta[i] == cfg.lambda * before.theta[i]);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(s.r_matrix(i, j) == cfg.lambda * before.r_matrix(i, j));
        }
    }
    CHECK(s.updates_applied == before.updates_applied);
    CHECK(s.updates_total == before.updates_total + 1);
}

TEST_CASE("IWF-ASE with zero prior error") {
    FilterConfig cfg;
    cfg.length = 2;
    FilterState s = ase::filter_init(cfg);
    (void)ase::iwf_ase_step(s, cfg, Vector{1.0, 0.5}, 0.7);
    const FilterState before = s;
    const Vector x{0.3, 1.0};
    const double d = s.w[0] * x[0] + s.w[1] * x[1];
    const auto out = ase::iwf_ase_step(s, cfg, x, d);
    CHECK(out.prior_error == 0.0);
    CHECK(out.applied);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(s.theta[i] == cfg.lambda * before.theta[i]);
    }
    const Eigen::VectorXd r = to_eigen(s.residual);
    (void)r;
    const double drift = (to_eigen(s.w) - to_eigen(before.w)).norm();
    FilterState probe = before;
    ase::correlation_update(probe, cfg.lambda, x, d, 0.0);
    const Eigen::VectorXd res = to_eigen(probe.theta) - to_eigen(probe.r_matrix) * to_eigen(probe.w);
    CHECK(drift <= out.step_size * res.norm() * (1.0 + 1e-12));
}

TEST_CASE("update ratio extremes") {
    FilterConfig cfg;
    cfg.length = 1;
    cfg.ase.c = 0.01;
    FilterState s = ase::filter_init(cfg);
    for (int k = 0; k < 10; ++k) {
        (void)ase::iwf_ase_step(s, cfg, Vector{1.0}, 100.0);
    }
    CHECK(ase::update_ratio(s).value() == 0.0);
}

TEST_CASE("correntropy weight") {
    CHECK(ase::correntropy_weight(0.0, 2.0) == 1.0);
    CHECK(ase::correntropy_weight(2.0, 2.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(ase::correntropy_weight(2.0, 2.0) == doctest::Approx(0.6065).epsilon(1e-4));
}

TEST_CASE("Gaussian run: IWF-ASE tracks the weighted least-squares solution") {
    FilterConfig cfg;
    cfg.length = 10;
    cfg.ase.c = 20.0;
    FilterState s = ase::filter_init(cfg);
    const Stream st = make_stream(10, 5000, 0.3, 0.0, 17);
    for (std::size_t k = 0; k < st.x.size(); ++k) {
        CHECK(ase::iwf_ase_step(s, cfg, st.x[k], st.d[k]).applied);
    }
    const Eigen::VectorXd oracle = to_eigen(s.r_matrix).ldlt().solve(to_eigen(s.theta));
    CHECK(nmsd_db(s.w, oracle) <= -25.0);
    CHECK(nmsd_db(s.w, to_eigen(st.w_o)) <= -25.0);
}

TEST_CASE("DCD-ASE single step by hand") {
    FilterConfig cfg;
    cfg.length = 1;
    cfg.lambda = 0.999;
    cfg.rho = 1e-4;
    cfg.ase.c = 1000.0;
    cfg.dcd = {2.0, 16, 64};
    FilterState s = ase::filter_init(cfg);
    const auto out = ase::dcd_ase_step(s, cfg, Vector{1.0}, 1.0);
    const double phi = ase::ase_weight(1.0, cfg.ase);
    const double r = cfg.lambda * cfg.rho + phi;
    CHECK(out.prior_error == 1.0);
    CHECK(s.r_matrix(0, 0) == doctest::Approx(r).epsilon(1e-15));
    CHECK(std::abs(s.w[0] - phi / r) <= 2.0 * cfg.dcd.h / 65536.0);
    CHECK(s.residual[0] == doctest::Approx(phi - r * s.w[0]).epsilon(1e-12));

    FilterState e = ase::filter_init(cfg);
    (void)ase::exact_ase_step(e, cfg, Vector{1.0}, 1.0);
    CHECK(e.w[0] == doctest::Approx(phi / r).epsilon(1e-14));
}

TEST_CASE("constant regularization keeps R at rho I while every sample is rejected") {
    FilterConfig cfg;
    cfg.length = 3;
    cfg.rho = 0.5;
    cfg.ase.c = 0.01;
    cfg.delta_schedule = ase::DeltaSchedule::kConstant;
    FilterState s = ase::filter_init(cfg);
    for (int k = 0; k < 20; ++k) {
        (void)ase::dcd_ase_step(s, cfg, Vector{1.0, 2.0, 3.0}, 50.0);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.r_matrix(i, i) == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(s.w == Vector{0.0, 0.0, 0.0});
}

TEST_CASE("carried residual equals theta - R w") {
    for (auto schedule : {ase::DeltaSchedule::kDecaying, ase::DeltaSchedule::kConstant}) {
        for (auto kind : {FilterKind::kDcdAse, FilterKind::kExactAse}) {
            FilterConfig cfg;
            cfg.length = 6;
            cfg.delta_schedule = schedule;
            ase::AdaptiveFilter f(kind, cfg);
            const Stream st = make_stream(6, 400, 0.5, 0.05, 21);
            Eigen::VectorXd theta = Eigen::VectorXd::Zero(6);
            for (std::size_t k = 0; k < st.x.size(); ++k) {
                const auto out = f.step(st.x[k], st.d[k]);
                const double phi = out.applied ? ase::ase_weight(out.prior_error, cfg.ase) : 0.0;
                theta = cfg.lambda * theta + phi * st.d[k] * to_eigen(st.x[k]);
            }
            const auto& s = f.state();
            const Eigen::VectorXd expect = theta - to_eigen(s.r_matrix) * to_eigen(s.w);
            CHECK((to_eigen(s.residual) - expect).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("R stays symmetric with eigenvalues above the decayed regularization") {
    for (auto kind : {FilterKind::kIwf, FilterKind::kIwfAse, FilterKind::kDcdAse}) {
        FilterConfig cfg;
        cfg.length = 8;
        cfg.lambda = 0.99;
        cfg.rho = 1e-2;
        ase::AdaptiveFilter f(kind, cfg);
        const Stream st = make_stream(8, 300, 1.0, 0.1, 33);
        for (std::size_t k = 0; k < st.x.size(); ++k) {
            (void)f.step(st.x[k], st.d[k]);
            if (k % 50 == 49) {
                const auto& r = f.state().r_matrix;
                REQUIRE(r.is_symmetric());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(r));
                const double floor = std::pow(cfg.lambda, static_cast<double>(k + 1)) * cfg.rho;
                CHECK(es.eigenvalues().minCoeff() >= floor * (1.0 - 1e-9));
            }
        }
    }
}

TEST_CASE("shift-structured covariance matches the full update for near-constant weights") {
    FilterConfig cfg;
    cfg.length = 5;
    cfg.rho = 1e-14;
    cfg.ase = {1e4, 1e-12};
    FilterConfig shifted = cfg;
    shifted.covariance = ase::CovarianceUpdate::kShiftStructured;
    ase::AdaptiveFilter full(FilterKind::kExactAse, cfg);
    ase::AdaptiveFilter fast(FilterKind::kExactAse, shifted);
    // Zero prehistory: the first regressors are [x0, 0, ...], [x1, x0, 0, ...].
    std::mt19937 gen(4);
    std::normal_distribution<double> nd;
    std::vector<double> input(200);
    std::vector<double> noise(200);
    for (std::size_t k = 0; k < input.size(); ++k) {
        input[k] = nd(gen);
        noise[k] = nd(gen);
    }
    Vector x(5, 0.0);
    for (std::size_t k = 0; k < input.size(); ++k) {
        for (std::size_t i = 4; i > 0; --i) {
            x[i] = x[i - 1];
        }
        x[0] = input[k];
        // Unit-scale noise keeps |e| >> zeta, so phi stays ~2/c^2 throughout.
        (void)full.step(x, 0.1 * input[k] + noise[k]);
        (void)fast.step(x, 0.1 * input[k] + noise[k]);
    }
    const Eigen::MatrixXd a = to_eigen(full.state().r_matrix);
    const Eigen::MatrixXd b = to_eigen(fast.state().r_matrix);
    CHECK((a - b).norm() <= 1e-6 * a.norm());
}

TEST_CASE("identical streams give identical trajectories") {
    const Stream st = make_stream(4, 300, 1.0, 0.1, 41);
    for (auto kind : {FilterKind::kIwf, FilterKind::kIwfAse, FilterKind::kDcdAse,
                      FilterKind::kExactAse, FilterKind::kRmcc}) {
        FilterConfig cfg;
        cfg.length = 4;
        cfg.kernel_sigma = 2.0;
        ase::AdaptiveFilter a(kind, cfg);
        ase::AdaptiveFilter b(kind, cfg);
        for (std::size_t k = 0; k < st.x.size(); ++k) {
            const auto oa = a.step(st.x[k], st.d[k]);
            const auto ob = b.step(st.x[k], st.d[k]);
            REQUIRE(oa.prior_error == ob.prior_error);
        }
        CHECK(a.state().w == b.state().w);
        CHECK(a.state().r_matrix == b.state().r_matrix);
        CHECK(*ase::parse_filter_kind(ase::to_string(kind)) == kind);
    }
}

TEST_CASE("input validation") {
    FilterConfig cfg;
    cfg.length = 2;
    CHECK_THROWS_AS(ase::AdaptiveFilter(FilterKind::kRmcc, cfg), std::invalid_argument);
    ase::AdaptiveFilter f(FilterKind::kIwfAse, cfg);
    CHECK_THROWS_AS((void)f.step(Vector{1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)f.step(Vector{1.0, 2.0}, std::nan("")), std::invalid_argument);
    CHECK_FALSE(ase::parse_filter_kind("lms").has_value());
}
