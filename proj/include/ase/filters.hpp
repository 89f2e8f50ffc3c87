#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "ase/dcd.hpp"
#include "ase/estimator.hpp"
#include "ase/linalg.hpp"
#include "ase/op_count.hpp"

namespace ase {

enum class FilterKind {
    kIwf,       ///< iterative Wiener filter, unit weighting
    kIwfAse,    ///< iterative Wiener filter with ASE weighting
    kDcdAse,    ///< ASE-weighted recursion solved by leading DCD
    kExactAse,  ///< same recursion as kDcdAse with a dense Cholesky solve
    kRmcc,      ///< IWF recursion with a Gaussian-kernel (correntropy) weight
};

[[nodiscard]] std::string_view to_string(FilterKind kind) noexcept;
[[nodiscard]] std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept;

/// Regularization schedule delta(n) of the DCD recursion.
///
/// kDecaying uses delta(n) = lambda^(n+1) rho, for which the per-step
/// correction delta(n) - lambda delta(n-1) is identically zero.
/// kConstant keeps delta(n) = rho, adding (1 - lambda) rho per step.
enum class DeltaSchedule { kDecaying, kConstant };

/// How the DCD recursions refresh R(n).
///
/// kFull applies the rank-one update to the whole matrix (O(L^2)).
/// kShiftStructured assumes tapped-delay-line regressors: only the first
/// row/column is recomputed and the rest is the previous matrix shifted
/// down the diagonal (O(L)). The two agree exactly when the weighting factor
/// is constant.
enum class CovarianceUpdate { kFull, kShiftStructured };

struct FilterConfig {
    std::size_t length{10};
    double lambda{0.999};
    double rho{1e-4};
    AseParams ase{};
    DcdParams dcd{};
    double vss_guard{1e-12};
    std::optional<double> kernel_sigma;  // kRmcc only
    DeltaSchedule delta_schedule{DeltaSchedule::kDecaying};
    CovarianceUpdate covariance{CovarianceUpdate::kFull};
    bool snapshot_weights{false};

    void validate() const;
};

struct FilterState {
    Vector w;
    Matrix r_matrix;
    /// Weighted cross-correlation. Not maintained by the DCD/exact
    /// recursions, which carry theta - R w in `residual` instead.
    Vector theta;
    /// theta - R w. Recomputed by the IWF family each step; carried across
    /// steps by the DCD recursion.
    Vector residual;
    double delta_prev{0.0};
    std::uint64_t step_index{0};
    std::uint64_t updates_total{0};
    std::uint64_t updates_applied{0};

    // Scratch space reused across steps.
    Vector scratch_a;
    Vector scratch_b;
};

struct StepOutput {
    double prior_error{0.0};
    bool applied{false};
    /// Variable step size used by the IWF family; 0 for the DCD/exact solvers.
    double step_size{0.0};
    std::optional<Vector> weights_snapshot;
};

[[nodiscard]] FilterState filter_init(const FilterConfig& cfg);

/// R = lambda R + phi x x^T, theta = lambda theta + phi d x. The upper
/// triangle is computed and mirrored, so R stays exactly symmetric.
void correlation_update(FilterState& state, double lambda, std::span<const double> x, double d,
                        double phi);

StepOutput iwf_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x, double d,
                    OpCounts* counts = nullptr);
StepOutput iwf_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                        double d, OpCounts* counts = nullptr);
StepOutput rmcc_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x, double d,
                     double kernel_sigma, OpCounts* counts = nullptr);
StepOutput dcd_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                        double d, OpCounts* counts = nullptr);
StepOutput exact_ase_step(FilterState& state, const FilterConfig& cfg, std::span<const double> x,
                          double d, OpCounts* counts = nullptr);

/// Fraction of steps that updated the correlation statistics; nullopt before
/// the first step.
[[nodiscard]] std::optional<double> update_ratio(const FilterState& state) noexcept;

/// Gaussian-kernel weight exp(-e^2 / (2 sigma^2)).
[[nodiscard]] double correntropy_weight(double e, double sigma) noexcept;

/// Kind-dispatching wrapper owning one filter's configuration and state.
class AdaptiveFilter {
public:
    AdaptiveFilter(FilterKind kind, FilterConfig cfg);

    StepOutput step(std::span<const double> x, double d, OpCounts* counts = nullptr);
    [[nodiscard]] double predict(std::span<const double> x) const;

    [[nodiscard]] FilterKind kind() const noexcept { return kind_; }
    [[nodiscard]] const FilterConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const FilterState& state() const noexcept { return state_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return state_.w; }

private:
    FilterKind kind_;
    FilterConfig cfg_;
    FilterState state_;
};

}  // namespace ase
