#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ase {

using Vector = std::vector<double>;

/// Dense row-major square matrix. Small sizes only (filter lengths in the
/// tens); no expression templates.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static Matrix identity(std::size_t n, double scale = 1.0);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * n_, n_};
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] bool is_symmetric() const noexcept;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_{0};
    std::vector<double> data_;
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] Vector matvec(const Matrix& m, std::span<const double> v);

/// Solves m * x = b for symmetric positive definite m (Cholesky).
/// Throws std::domain_error if m is not numerically positive definite.
[[nodiscard]] Vector solve_spd(const Matrix& m, std::span<const double> b);

}  // namespace ase
