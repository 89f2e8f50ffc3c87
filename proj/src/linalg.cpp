#include "ase/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ase {

Matrix Matrix::identity(std::size_t n, double scale) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = scale;
    }
    return m;
}

bool Matrix::is_symmetric() const noexcept {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if ((*this)(i, j) != (*this)(j, i)) {
                return false;
            }
        }
    }
    return true;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

Vector matvec(const Matrix& m, std::span<const double> v) {
    Vector out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i] = dot(m.row(i), v);
    }
    return out;
}

Vector solve_spd(const Matrix& m, std::span<const double> b) {
    const std::size_t n = m.size();
    if (b.size() != n) {
        throw std::invalid_argument("solve_spd: dimension mismatch");
    }
    // Lower-triangular factor, row-major.
    Matrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0)) {
            throw std::domain_error("solve_spd: matrix is not positive definite");
        }
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / l(j, j);
        }
    }
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= l(i, k) * y[k];
        }
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= l(k, ii) * x[k];
        }
        x[ii] = s / l(ii, ii);
    }
    return x;
}

}  // namespace ase
