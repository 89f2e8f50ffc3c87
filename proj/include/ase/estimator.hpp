#pragma once

#include <numbers>

namespace ase {

/// Shape parameters of the Andrew's sine estimator.
///
/// `c` sets the saturation point |e| = pi*c; `zeta` keeps the weighting
/// factor's denominator away from zero.
struct AseParams {
    double c{2.0};
    double zeta{1e-4};

    /// Throws std::invalid_argument unless c > 0 and zeta > 0 (both finite).
    void validate() const;

    [[nodiscard]] double cutoff() const noexcept { return std::numbers::pi * c; }
};

/// A(e) = 4 sin^2(e / 2c) for |e| <= pi*c, 4 otherwise.
[[nodiscard]] double ase_cost(double e, const AseParams& p) noexcept;

/// psi(e) = dA/de = (2/c) sin(e/c) for |e| <= pi*c, 0 otherwise.
[[nodiscard]] double ase_score(double e, const AseParams& p) noexcept;

/// Weighting factor phi(e) = (2/c) sin(e/c) / (e + sign(e) zeta) inside the
/// cutoff, 0 outside. sign(0) = +1, so phi >= 0 for every finite e.
[[nodiscard]] double ase_weight(double e, const AseParams& p) noexcept;

}  // namespace ase
