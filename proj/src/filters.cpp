#include "ase/filters.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ase {

std::string_view to_string(FilterKind kind) noexcept {
    switch (kind) {
        case FilterKind::kIwf: return "iwf";
        case FilterKind::kIwfAse: return "iwf_ase";
        case FilterKind::kDcdAse: return "dcd_ase";
        case FilterKind::kExactAse: return "exact_ase";
        case FilterKind::kRmcc: return "rmcc";
    }
    return "unknown";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept {
    for (FilterKind k : {FilterKind::kIwf, FilterKind::kIwfAse, FilterKind::kDcdAse,
                         FilterKind::kExactAse, FilterKind::kRmcc}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

void FilterConfig::validate() const {
    if (length < 1) {
        throw std::invalid_argument("FilterConfig: length must be >= 1");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("FilterConfig: lambda must lie in (0, 1)");
    }
    if (!(std::isfinite(rho) && rho > 0.0)) {
        throw std::invalid_argument("FilterConfig: rho must be positive");
    }
    if (!(std::isfinite(vss_guard) && vss_guard >= 0.0)) {
        throw std::invalid_argument("FilterConfig: vss_guard must be non-negative");
    }
    if (kernel_sigma && !(std::isfinite(*kernel_sigma) && *kernel_sigma > 0.0)) {
        throw std::invalid_argument("FilterConfig: kernel_sigma must be positive");
    }
    ase.validate();
    dcd.validate();
}

FilterState filter_init(const FilterConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.length;
    FilterState s;
    s.w.assign(n, 0.0);
    s.r_matrix = Matrix::identity(n, cfg.rho);
    s.theta.assign(n, 0.0);
    s.residual.assign(n, 0.0);
    s.delta_prev = cfg.delta_schedule == DeltaSchedule::kDecaying ? cfg.lambda * cfg.rho : cfg.rho;
    s.scratch_a.assign(n, 0.0);
    s.scratch_b.assign(n, 0.0);
    return s;
}

std::optional<double> update_ratio(const FilterState& state) noexcept {
    if (state.updates_total == 0) {
        return std::nullopt;
    }
    return static_cast<double>(state.updates_applied) / static_cast<double>(state.updates_total);
}

double correntropy_weight(double e, double sigma) noexcept {
    return std::exp(-(e * e) / (2.0 * sigma * sigma));
}

namespace {

void check_step_inputs(const FilterState& state, std::span<const double> x, double d) {
    if (x.size() != state.w.size()) {
        throw std::invalid_argument("filter step: regressor length " + std::to_string(x.size()) +
                                    " does not match filter length " +
                                    std::to_string(state.w.size()));
    }
    if (!std::isfinite(d)) {
        throw std::invalid_argument("filter step: non-finite desired sample");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("filter step: non-finite regressor entry");
        }
    }
}

template <class Counter>
double prior_error(const FilterState& s, std::span<const double> x, double d, Counter& c) {
    double y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y += s.w[i] * x[i];
    }
    c.mul(x.size());
    c.add(x.size());
    return d - y;
}

template <class Counter>
void full_update(FilterState& s, double lambda, std::span<const double> x, double d, double phi,
                 Counter& c) {
    const std::size_t n = x.size();
    Matrix& r = s.r_matrix;
    if (phi == 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                r(i, j) *= lambda;
                r(j, i) = r(i, j);
            }
            s.theta[i] *= lambda;
        }
        c.mul(n * (n + 1) / 2 + n);
        return;
    }
    Vector& px = s.scratch_a;
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = phi * x[i];
    }
    c.mul(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            r(i, j) = lambda * r(i, j) + px[i] * x[j];
            r(j, i) = r(i, j);
        }
        s.theta[i] = lambda * s.theta[i] + px[i] * d;
    }
    c.mul(n * (n + 1) + 2 * n);
    c.add(n * (n + 1) / 2 + n);
}

// The IWF family: refresh R, theta with the weight returned by `weigh`
// (nullopt freezes the rank-one term), then one steepest-descent step along
// r = theta - R w with the exact line-search step size.
template <class Counter, class Weigh>
StepOutput iwf_family_step(FilterState& s, const FilterConfig& cfg, std::span<const double> x,
                           double d, Weigh&& weigh, Counter c) {
    check_step_inputs(s, x, d);
    const std::size_t n = x.size();
    StepOutput out;
    out.prior_error = prior_error(s, x, d, c);
    c.add();
    const std::optional<double> phi = weigh(out.prior_error, c);
    out.applied = phi.has_value();
    full_update(s, cfg.lambda, x, d, phi.value_or(0.0), c);

    const Matrix& r = s.r_matrix;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = s.theta[i];
        for (std::size_t j = 0; j < n; ++j) {
            acc -= r(i, j) * s.w[j];
        }
        s.residual[i] = acc;
    }
    c.mul(n * n);
    c.add(n * n);

    Vector& rr_vec = s.scratch_b;
    double rr = 0.0;
    double rrr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += r(i, j) * s.residual[j];
        }
        rr_vec[i] = acc;
        rr += s.residual[i] * s.residual[i];
        rrr += s.residual[i] * acc;
    }
    c.mul(n * n + 2 * n);
    c.add(n * n + 2 * n);

    double mu = 0.0;
    if (rr > 0.0) {
        mu = rr / (rrr + cfg.vss_guard);
        c.add();
        c.mul();
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.w[i] += mu * s.residual[i];
    }
    c.mul(n);
    c.add(n);
    out.step_size = mu;

    ++s.step_index;
    ++s.updates_total;
    if (out.applied) {
        ++s.updates_applied;
    }
    if (cfg.snapshot_weights) {
        out.weights_snapshot = s.w;
    }
    return out;
}

template <class Counter>
std::optional<double> gated_ase_weight(double e, const AseParams& p, Counter& c) {
    c.cmp();
    if (std::abs(e) > p.cutoff()) {
        return std::nullopt;
    }
    // e/c, (2/c) * sin, denominator add, division.
    c.mul(3);
    c.add();
    c.nonlinear();
    return ase_weight(e, p);
}

template <class Counter>
void shift_structured_update(FilterState& s, double lambda, std::span<const double> x, double phi,
                             double correction, Counter& c) {
    const std::size_t n = x.size();
    Matrix& r = s.r_matrix;
    for (std::size_t i = n; i-- > 1;) {
        for (std::size_t j = n; j-- > 1;) {
            r(i, j) = r(i - 1, j - 1);
        }
    }
    const double px0 = phi * x[0];
    for (std::size_t j = 0; j < n; ++j) {
        r(0, j) = lambda * r(0, j) + px0 * x[j];
        r(j, 0) = r(0, j);
    }
    c.mul(2 * n + 1);
    c.add(n);
    if (correction != 0.0) {
        r(0, 0) += correction;
        c.add();
    }
}

enum class Solver { kDcd, kExact };

// Shared DCD/exact recursion:
//   R(n)    = lambda R(n-1) + phi x x^T + (delta(n) - lambda delta(n-1)) I
//   zeta(n) = lambda r(n-1) + phi e x - (delta(n) - lambda delta(n-1)) w(n-1)
//   solve R(n) dw = zeta(n); w(n) = w(n-1) + dw; r(n) = zeta(n) - R(n) dw.
template <class Counter>
StepOutput regularized_step(FilterState& s, const FilterConfig& cfg, std::span<const double> x,
                            double d, Solver solver, OpCounts* counts, Counter c) {
    check_step_inputs(s, x, d);
    const std::size_t n = x.size();
    StepOutput out;
    out.prior_error = prior_error(s, x, d, c);
    c.add();
    const std::optional<double> gated = gated_ase_weight(out.prior_error, cfg.ase, c);
    out.applied = gated.has_value();
    const double phi = gated.value_or(0.0);

    const double delta = cfg.delta_schedule == DeltaSchedule::kDecaying ? cfg.lambda * s.delta_prev
                                                                     : cfg.rho;
    const double correction = delta - cfg.lambda * s.delta_prev;
    s.delta_prev = delta;

    if (cfg.covariance == CovarianceUpdate::kShiftStructured) {
        shift_structured_update(s, cfg.lambda, x, phi, correction, c);
    } else {
        Matrix& r = s.r_matrix;
        for (std::size_t i = 0; i < n; ++i) {
            const double pxi = phi * x[i];
            for (std::size_t j = i; j < n; ++j) {
                r(i, j) = cfg.lambda * r(i, j) + pxi * x[j];
                r(j, i) = r(i, j);
            }
        }
        c.mul(n + n * (n + 1));
        c.add(n * (n + 1) / 2);
        if (correction != 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                r(i, i) += correction;
            }
            c.add(n);
        }
    }

    Vector& zeta = s.residual;
    const double pe = phi * out.prior_error;
    for (std::size_t i = 0; i < n; ++i) {
        zeta[i] = cfg.lambda * zeta[i] + pe * x[i];
    }
    c.mul(2 * n + 1);
    c.add(n);
    if (correction != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            zeta[i] -= correction * s.w[i];
        }
        c.mul(n);
        c.add(n);
    }

    Vector& dw = s.scratch_a;
    if (solver == Solver::kDcd) {
        dcd_solve_inplace(s.r_matrix, zeta, dw, cfg.dcd, counts);
    } else {
        dw = solve_spd(s.r_matrix, zeta);
        const Vector rdw = matvec(s.r_matrix, dw);
        for (std::size_t i = 0; i < n; ++i) {
            zeta[i] -= rdw[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.w[i] += dw[i];
    }
    c.add(n);

    ++s.step_index;
    ++s.updates_total;
    if (out.applied) {
        ++s.updates_applied;
    }
    if (cfg.snapshot_weights) {
        out.weights_snapshot = s.w;
    }
    return out;
}

}  // namespace

void correlation_update(FilterState& state, double lambda, std::span<const double> x, double d,
                        double phi) {
    if (x.size() != state.w.size()) {
        throw std::invalid_argument("correlation_update: dimension mismatch");
    }
    if (!std::isfinite(d) || !std::isfinite(phi) || phi < 0.0) {
        throw std::invalid_argument("correlation_update: invalid desired sample or weight");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("correlation_update: non-finite regressor entry");
        }
    }
    detail::NullCounter c;
    full_update(state, lambda, x, d, phi, c);
}

StepOutput iwf_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x, double d,
                    OpCounts* counts) {
    auto unit = [](double, auto&) -> std::optional<double> { return 1.0; };
    if (counts != nullptr) {
        return iwf_family_step(state, cfg, x, d, unit, detail::TallyCounter{counts});
    }
    return iwf_family_step(state, cfg, x, d, unit, detail::NullCounter{});
}

StepOutput iwf_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                        double d, OpCounts* counts) {
    auto weigh = [&cfg](double e, auto& c) { return gated_ase_weight(e, cfg.ase, c); };
    if (counts != nullptr) {
        return iwf_family_step(state, cfg, x, d, weigh, detail::TallyCounter{counts});
    }
    return iwf_family_step(state, cfg, x, d, weigh, detail::NullCounter{});
}

StepOutput rmcc_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x, double d,
                     double kernel_sigma, OpCounts* counts) {
    if (!(std::isfinite(kernel_sigma) && kernel_sigma > 0.0)) {
        throw std::invalid_argument("rmcc_step: kernel_sigma must be positive");
    }
    const double inv_two_sigma2 = 1.0 / (2.0 * kernel_sigma * kernel_sigma);
    auto weigh = [inv_two_sigma2](double e, auto& c) -> std::optional<double> {
        c.mul(2);
        c.nonlinear();
        return std::exp(-(e * e) * inv_two_sigma2);
    };
    if (counts != nullptr) {
        return iwf_family_step(state, cfg, x, d, weigh, detail::TallyCounter{counts});
    }
    return iwf_family_step(state, cfg, x, d, weigh, detail::NullCounter{});
}

StepOutput dcd_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                        double d, OpCounts* counts) {
    if (counts != nullptr) {
        return regularized_step(state, cfg, x, d, Solver::kDcd, counts, detail::TallyCounter{counts});
    }
    return regularized_step(state, cfg, x, d, Solver::kDcd, nullptr, detail::NullCounter{});
}

StepOutput exact_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                          double d, OpCounts* counts) {
    if (counts != nullptr) {
        return regularized_step(state, cfg, x, d, Solver::kExact, counts,
                                detail::TallyCounter{counts});
    }
    return regularized_step(state, cfg, x, d, Solver::kExact, nullptr, detail::NullCounter{});
}

AdaptiveFilter::AdaptiveFilter(FilterKind kind, FilterConfig cfg)
    : kind_(kind), cfg_(std::move(cfg)), state_(filter_init(cfg_)) {
    if (kind_ == FilterKind::kRmcc && !cfg_.kernel_sigma) {
        throw std::invalid_argument("AdaptiveFilter: rmcc requires kernel_sigma");
    }
}

StepOutput AdaptiveFilter::step(std::span<const double> x, double d, OpCounts* counts) {
    switch (kind_) {
        case FilterKind::kIwf: return iwf_step(state_, cfg_, x, d, counts);
        case FilterKind::kIwfAse: return iwf_ase_step(state_, cfg_, x, d, counts);
        case FilterKind::kDcdAse: return dcd_ase_step(state_, cfg_, x, d, counts);
        case FilterKind::kExactAse: return exact_ase_step(state_, cfg_, x, d, counts);
        case FilterKind::kRmcc: return rmcc_step(state_, cfg_, x, d, *cfg_.kernel_sigma, counts);
    }
    throw std::logic_error("AdaptiveFilter: unknown kind");
}

double AdaptiveFilter::predict(std::span<const double> x) const {
    if (x.size() != state_.w.size()) {
        throw std::invalid_argument("predict: dimension mismatch");
    }
    return dot(state_.w, x);
}

}  // namespace ase
