// tridiagonal.hpp - Sturm-sequence bisection for real symmetric tridiagonal
// pencils (T - lambda M), M diagonal positive.
//
// The eigenvalue count below lambda equals the number of negative pivots of
// the LDL^T factorization of T - lambda M (Sylvester inertia). Bisection on
// the count gives certified brackets for every requested eigenvalue.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace tprsm::linalg {

/// Symmetric tridiagonal pencil: diag (n), off (n-1), optional mass (n).
struct TridiagonalPencil {
    std::vector<double> diag;
    std::vector<double> off;
    std::vector<double> mass;  // empty means identity

    std::size_t size() const noexcept { return diag.size(); }
};

namespace detail {

inline double pivot_floor(std::span<const double> diag, std::span<const double> off) {
    double scale = 0.0;
    for (double d : diag) scale = std::max(scale, std::abs(d));
    for (double e : off) scale = std::max(scale, std::abs(e));
    return std::max(scale, 1.0) * std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
}

}  // namespace detail

/// Number of eigenvalues of (T, M) strictly below lambda.
/// off2 holds the squared off-diagonal entries.
inline std::size_t count_below(std::span<const double> diag, std::span<const double> off2,
                               std::span<const double> mass, double lambda,
                               double tiny = 1e-300) {
    const std::size_t n = diag.size();
    std::size_t count = 0;
    double q = 0.0;
    const bool has_mass = !mass.empty();
    for (std::size_t i = 0; i < n; ++i) {
        const double shifted = diag[i] - lambda * (has_mass ? mass[i] : 1.0);
        q = (i == 0) ? shifted : shifted - off2[i - 1] / q;
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Eigenvalue interval bisection solver. Holds squared couplings so repeated
/// counts are cheap; brackets are shared between indices as counts accrue.
class SturmSolver {
public:
    explicit SturmSolver(const TridiagonalPencil& pencil)
        : diag_(pencil.diag), mass_(pencil.mass) {
        if (diag_.empty()) {
            throw std::invalid_argument("SturmSolver: empty matrix");
        }
        if (pencil.off.size() + 1 != diag_.size()) {
            throw std::invalid_argument("SturmSolver: off-diagonal length must be n-1");
        }
        if (!mass_.empty() && mass_.size() != diag_.size()) {
            throw std::invalid_argument("SturmSolver: mass length must be n");
        }
        off2_.resize(pencil.off.size());
        for (std::size_t i = 0; i < off2_.size(); ++i) off2_[i] = pencil.off[i] * pencil.off[i];
        tiny_ = detail::pivot_floor(diag_, pencil.off);
        gershgorin(pencil.off);
    }

    std::size_t size() const noexcept { return diag_.size(); }
    double lower_bound() const noexcept { return lo_; }
    double upper_bound() const noexcept { return hi_; }

    std::size_t count_below(double lambda) const {
        return tprsm::linalg::count_below(diag_, off2_, mass_, lambda, tiny_);
    }

    /// The `count` lowest eigenvalues in ascending order, bisected until the
    /// bracket cannot shrink in double precision.
    std::vector<double> lowest(std::size_t count) const {
        count = std::min(count, diag_.size());
        std::vector<double> lower(count, lo_);
        std::vector<double> upper(count, hi_);
        std::vector<double> out(count);
        for (std::size_t k = 0; k < count; ++k) {
            double a = lower[k];
            double b = upper[k];
            for (int it = 0; it < 2000; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const std::size_t c = count_below(mid);
                // c eigenvalues lie below mid
                for (std::size_t j = k; j < count; ++j) {
                    if (j < c) {
                        upper[j] = std::min(upper[j], mid);
                    } else {
                        lower[j] = std::max(lower[j], mid);
                    }
                }
                a = lower[k];
                b = upper[k];
            }
            out[k] = 0.5 * (a + b);
            for (std::size_t j = k + 1; j < count; ++j) lower[j] = std::max(lower[j], a);
        }
        return out;
    }

    /// k-th eigenvalue (0-based).
    double eigenvalue(std::size_t k) const {
        if (k >= diag_.size()) throw std::out_of_range("SturmSolver: index beyond matrix size");
        double a = lo_;
        double b = hi_;
        for (int it = 0; it < 2000; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (count_below(mid) > k) b = mid; else a = mid;
        }
        return 0.5 * (a + b);
    }

private:
    void gershgorin(std::span<const double> off) {
        const std::size_t n = diag_.size();
        lo_ = std::numeric_limits<double>::infinity();
        hi_ = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < n) r += std::abs(off[i]);
            const double m = mass_.empty() ? 1.0 : mass_[i];
            if (!(m > 0.0)) throw std::invalid_argument("SturmSolver: mass must be positive");
            // discs of M^{-1/2} T M^{-1/2}; off-diagonal scaled by the smaller mass
            double mmin = m;
            if (i > 0 && !mass_.empty()) mmin = std::min(mmin, mass_[i - 1]);
            if (i + 1 < n && !mass_.empty()) mmin = std::min(mmin, mass_[i + 1]);
            const double rr = r / std::sqrt(m * mmin);
            lo_ = std::min(lo_, diag_[i] / m - rr);
            hi_ = std::max(hi_, diag_[i] / m + rr);
        }
        const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
        lo_ -= pad;
        hi_ += pad;
    }

    std::vector<double> diag_;
    std::vector<double> off2_;
    std::vector<double> mass_;
    double tiny_ = 1e-300;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

}  // namespace tprsm::linalg
