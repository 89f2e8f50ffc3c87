#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ase/linalg.hpp"
#include "ase/op_count.hpp"

namespace ase {

/// Parameters of the leading dichotomous coordinate descent solver.
///
/// The solution is assumed to lie in [-h, h] and is represented with
/// `m_bits` bits, so step sizes run h/2, h/4, ..., h/2^m_bits.
/// `n_updates` bounds the number of successful coordinate updates.
struct DcdParams {
    double h{2.0};
    int m_bits{8};
    int n_updates{8};

    void validate() const;
};

struct DcdSolveResult {
    Vector delta_w;
    Vector residual_out;
    std::size_t updates_used{0};
    bool exhausted_bits{false};
};

struct DcdSolveStats {
    std::size_t updates_used{0};
    bool exhausted_bits{false};
};

/// The m_bits step sizes h/2, h/4, ..., h/2^m_bits.
[[nodiscard]] std::vector<double> quantize_grid(const DcdParams& p);

/// Approximately solves R * dw = rhs with leading DCD.
///
/// Starting from dw = 0 and r = rhs, each pass picks the coordinate with the
/// largest |r_l| (lowest index on ties), halves the step m while
/// |r_l| <= (m/2) R_ll, and then moves dw_l by m*sign(r_l), subtracting the
/// matching multiple of column l from r. Exits after n_updates successful
/// updates or when the bit budget is exhausted. The returned residual is
/// rhs - R * dw up to the rounding of the subtractions performed.
///
/// Throws std::invalid_argument on dimension mismatch, non-finite rhs, or a
/// non-positive diagonal entry.
[[nodiscard]] DcdSolveResult dcd_solve(const Matrix& r_matrix, std::span<const double> rhs,
                                       const DcdParams& p, OpCounts* counts = nullptr);

/// In-place variant used by the streaming filters: `residual` holds rhs on
/// entry and the solver residual on exit; `delta_w` is overwritten.
DcdSolveStats dcd_solve_inplace(const Matrix& r_matrix, std::span<double> residual,
                                std::span<double> delta_w, const DcdParams& p,
                                OpCounts* counts = nullptr);

/// Integer-only shadow of dcd_solve for realizability checks.
///
/// Works in units of u = h / 2^m_bits: the caller supplies an integer matrix
/// and rhs / u as integers; the result holds dw / u and r / u. Only
/// additions, comparisons and shifts are used.
struct FixedDcdResult {
    std::vector<std::int64_t> delta_units;
    std::vector<std::int64_t> residual_units;
    std::size_t updates_used{0};
    bool exhausted_bits{false};
};

[[nodiscard]] FixedDcdResult dcd_solve_fixed(std::span<const std::int64_t> r_matrix, std::size_t n,
                                             std::span<const std::int64_t> rhs_units, int m_bits,
                                             int n_updates);

}  // namespace ase
