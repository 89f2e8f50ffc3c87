#include "ase/dcd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ase {

void DcdParams::validate() const {
    if (!(std::isfinite(h) && h > 0.0)) {
        throw std::invalid_argument("DcdParams: h must be a positive finite number");
    }
    if (m_bits < 1) {
        throw std::invalid_argument("DcdParams: m_bits must be >= 1");
    }
    if (n_updates < 1) {
        throw std::invalid_argument("DcdParams: n_updates must be >= 1");
    }
}

std::vector<double> quantize_grid(const DcdParams& p) {
    p.validate();
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(p.m_bits));
    double m = p.h / 2.0;
    for (int q = 1; q <= p.m_bits; ++q) {
        grid.push_back(m);
        m /= 2.0;
    }
    return grid;
}

namespace {

template <class Counter>
DcdSolveStats leading_dcd(const Matrix& r_matrix, std::span<double> r, std::span<double> dw,
                          const DcdParams& p, Counter counter) {
    const std::size_t n = r.size();
    for (auto& v : dw) {
        v = 0.0;
    }
    DcdSolveStats stats;
    int q = 1;
    double m = p.h / 2.0;
    for (int j = 0; j < p.n_updates; ++j) {
        std::size_t l = 0;
        double best = std::abs(r[0]);
        for (std::size_t k = 1; k < n; ++k) {
            const double a = std::abs(r[k]);
            counter.cmp();
            if (a > best) {
                best = a;
                l = k;
            }
        }
        // m/2 * R_ll is a power-of-two scaling.
        while (q <= p.m_bits && best <= 0.5 * m * r_matrix(l, l)) {
            counter.cmp(2);
            counter.shift(2);
            counter.add();
            ++q;
            m *= 0.5;
        }
        counter.cmp();
        if (q > p.m_bits) {
            stats.exhausted_bits = true;
            break;
        }
        const double step = r[l] < 0.0 ? -m : m;
        dw[l] += step;
        counter.add();
        const std::span<const double> col = r_matrix.row(l);  // symmetric
        for (std::size_t k = 0; k < n; ++k) {
            r[k] -= step * col[k];
        }
        counter.shift(n);
        counter.add(n);
        ++stats.updates_used;
    }
    return stats;
}

void check_inputs(const Matrix& r_matrix, std::span<const double> rhs, std::size_t dw_size) {
    const std::size_t n = r_matrix.size();
    if (n == 0) {
        throw std::invalid_argument("dcd_solve: empty system");
    }
    if (rhs.size() != n || dw_size != n) {
        throw std::invalid_argument("dcd_solve: dimension mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rhs[i])) {
            throw std::invalid_argument("dcd_solve: non-finite rhs entry " + std::to_string(i));
        }
        const double d = r_matrix(i, i);
        if (!(std::isfinite(d) && d > 0.0)) {
            throw std::invalid_argument("dcd_solve: diagonal entry " + std::to_string(i) +
                                        " is not positive");
        }
    }
}

}  // namespace

DcdSolveStats dcd_solve_inplace(const Matrix& r_matrix, std::span<double> residual,
                                std::span<double> delta_w, const DcdParams& p, OpCounts* counts) {
    p.validate();
    check_inputs(r_matrix, residual, delta_w.size());
    DcdSolveStats stats = counts != nullptr
                              ? leading_dcd(r_matrix, residual, delta_w, p, detail::TallyCounter{counts})
                              : leading_dcd(r_matrix, residual, delta_w, p, detail::NullCounter{});
    for (double v : residual) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("dcd_solve: non-finite matrix entries");
        }
    }
    return stats;
}

DcdSolveResult dcd_solve(const Matrix& r_matrix, std::span<const double> rhs, const DcdParams& p,
                         OpCounts* counts) {
    DcdSolveResult out;
    out.residual_out.assign(rhs.begin(), rhs.end());
    out.delta_w.assign(rhs.size(), 0.0);
    const DcdSolveStats stats = dcd_solve_inplace(r_matrix, out.residual_out, out.delta_w, p, counts);
    out.updates_used = stats.updates_used;
    out.exhausted_bits = stats.exhausted_bits;
    return out;
}

FixedDcdResult dcd_solve_fixed(std::span<const std::int64_t> r_matrix, std::size_t n,
                               std::span<const std::int64_t> rhs_units, int m_bits, int n_updates) {
    if (n == 0 || r_matrix.size() != n * n || rhs_units.size() != n) {
        throw std::invalid_argument("dcd_solve_fixed: dimension mismatch");
    }
    if (m_bits < 1 || m_bits > 48 || n_updates < 1) {
        throw std::invalid_argument("dcd_solve_fixed: invalid bit depth or update budget");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (r_matrix[i * n + i] <= 0) {
            throw std::invalid_argument("dcd_solve_fixed: diagonal entry is not positive");
        }
    }
    FixedDcdResult out;
    out.delta_units.assign(n, 0);
    out.residual_units.assign(rhs_units.begin(), rhs_units.end());
    auto& r = out.residual_units;
    auto& dw = out.delta_units;
    int q = 1;
    for (int j = 0; j < n_updates; ++j) {
        std::size_t l = 0;
        std::int64_t best = r[0] < 0 ? -r[0] : r[0];
        for (std::size_t k = 1; k < n; ++k) {
            const std::int64_t a = r[k] < 0 ? -r[k] : r[k];
            if (a > best) {
                best = a;
                l = k;
            }
        }
        // m = 2^(m_bits - q) units; |r_l| <= (m/2) R_ll  <=>  2|r_l| <= R_ll << (m_bits - q).
        const std::int64_t diag = r_matrix[l * n + l];
        while (q <= m_bits && (best << 1) <= (diag << (m_bits - q))) {
            ++q;
        }
        if (q > m_bits) {
            out.exhausted_bits = true;
            break;
        }
        const int shift = m_bits - q;
        const bool negative = r[l] < 0;
        dw[l] += negative ? -(std::int64_t{1} << shift) : (std::int64_t{1} << shift);
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t delta = r_matrix[l * n + k] << shift;
            r[k] = negative ? r[k] + delta : r[k] - delta;
        }
        ++out.updates_used;
    }
    return out;
}

}  // namespace ase
