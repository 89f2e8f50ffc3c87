#pragma once

#include <cstdint>

namespace ase {

/// Arithmetic operation tally. Divisions are folded into `mults`, matching
/// the usual "x / div" column of complexity tables. Multiplications by a
/// power of two are tallied as `shifts`.
struct OpCounts {
    std::uint64_t adds{0};
    std::uint64_t mults{0};
    std::uint64_t comparisons{0};
    std::uint64_t shifts{0};
    std::uint64_t transcendental{0};

    OpCounts& operator+=(const OpCounts& o) noexcept {
        adds += o.adds;
        mults += o.mults;
        comparisons += o.comparisons;
        shifts += o.shifts;
        transcendental += o.transcendental;
        return *this;
    }

    bool operator==(const OpCounts&) const = default;
};

namespace detail {

// Counting policies for the instrumented kernels. NullCounter compiles to
// nothing so the uninstrumented path pays no cost.
struct NullCounter {
    void add(std::uint64_t = 1) noexcept {}
    void mul(std::uint64_t = 1) noexcept {}
    void cmp(std::uint64_t = 1) noexcept {}
    void shift(std::uint64_t = 1) noexcept {}
    void nonlinear(std::uint64_t = 1) noexcept {}
};

struct TallyCounter {
    OpCounts* out;
    void add(std::uint64_t n = 1) noexcept { out->adds += n; }
    void mul(std::uint64_t n = 1) noexcept { out->mults += n; }
    void cmp(std::uint64_t n = 1) noexcept { out->comparisons += n; }
    void shift(std::uint64_t n = 1) noexcept { out->shifts += n; }
    void nonlinear(std::uint64_t n = 1) noexcept { out->transcendental += n; }
};

}  // namespace detail

}  // namespace ase
