// ed.hpp - exact diagonalization in a truncated photon basis.
//
// In the sigma_x eigenbasis {|n, s>} the coupling g sigma_z (a^2 + a^dag^2)
// links (n, s) to (n + 2, -s), so p = s (-1)^floor(n/2) is conserved together
// with the photon-number parity. Each of the four (q, p) sectors is a
// symmetric tridiagonal chain indexed by k = floor(n/2):
//
//   d_k = n_k - s_k (Delta/2 + U n_k),   t_k = g sqrt((n_k + 1)(n_k + 2))
//
// with n_k = 2k (q = 1/4) or 2k + 1 (q = 3/4) and s_k = p (-1)^k.

#pragma once

#include "tprsm/model.hpp"
#include "tprsm/tridiagonal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tprsm::ed {

struct SectorMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;
    SectorLabel sector;
    std::size_t truncation = 0;
};

inline std::size_t photon_number(Bargmann q, std::size_t k) noexcept {
    return 2 * k + (q == Bargmann::quarter ? 0 : 1);
}

inline SectorMatrix build_sector(const ModelParams& p, SectorLabel s, std::size_t K) {
    if (K < 2) throw std::invalid_argument("build_sector: truncation must be >= 2");
    SectorMatrix m;
    m.sector = s;
    m.truncation = K;
    m.diag.resize(K);
    m.offdiag.resize(K - 1);
    const double half_delta = 0.5 * p.delta();
    const double u = p.stark();
    const double g = p.coupling();
    for (std::size_t k = 0; k < K; ++k) {
        const double n = static_cast<double>(photon_number(s.q, k));
        const double sx = (k % 2 == 0) ? s.parity : -s.parity;
        m.diag[k] = n - sx * (half_delta + u * n);
        if (k + 1 < K) m.offdiag[k] = g * std::sqrt((n + 1.0) * (n + 2.0));
    }
    return m;
}

inline linalg::TridiagonalPencil as_pencil(const SectorMatrix& m) {
    return {m.diag, m.offdiag, {}};
}

/// The M lowest eigenvalues of the finite sector matrix.
inline std::vector<double> eigenvalues(const SectorMatrix& m, std::size_t M) {
    if (M > m.truncation) throw std::invalid_argument("eigenvalues: M exceeds truncation");
    linalg::SturmSolver solver(as_pencil(m));
    return solver.lowest(M);
}

struct ConvergeOptions {
    std::size_t initial_truncation = 256;
    std::size_t max_truncation = std::size_t{1} << 20;
    // Aitken extrapolation over the last three doublings (opt-in).
    bool extrapolate = false;
};

struct ConvergedSpectrum {
    std::vector<double> energies;
    std::size_t K_used = 0;
    double residual = 0.0;  // max level shift in the last doubling
    bool converged = false;
    // sector of each level (all-sector runs); equals the requested sector otherwise
    std::vector<SectorLabel> sectors;
};

namespace detail {

inline double max_shift(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        r = std::max(r, std::abs(a[i] - b[i]));
    }
    return r;
}

inline std::vector<double> aitken(const std::vector<double>& e0, const std::vector<double>& e1,
                                  const std::vector<double>& e2) {
    std::vector<double> out(e2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d1 = e1[i] - e0[i];
        const double d2 = e2[i] - e1[i];
        const double den = d2 - d1;
        if (den != 0.0 && std::abs(d2) < std::abs(d1)) out[i] = e2[i] - d2 * d2 / den;
    }
    return out;
}

}  // namespace detail

/// Doubles K from the initial truncation until the M lowest eigenvalues of the
/// sector move by less than tol. Gives up at max_truncation and returns the
/// last result flagged unconverged.
inline ConvergedSpectrum converge(const ModelParams& p, SectorLabel s, std::size_t M, double tol,
                                  const ConvergeOptions& opt = {}) {
    if (M == 0) throw std::invalid_argument("converge: M must be positive");
    std::size_t K = std::max<std::size_t>(opt.initial_truncation, std::max<std::size_t>(2, M + 1));
    std::vector<std::vector<double>> history;
    ConvergedSpectrum out;
    out.residual = std::numeric_limits<double>::infinity();
    while (true) {
        history.push_back(eigenvalues(build_sector(p, s, K), M));
        out.K_used = K;
        if (history.size() >= 2) {
            const auto& prev = history[history.size() - 2];
            out.residual = detail::max_shift(prev, history.back());
            if (out.residual < tol) {
                out.converged = true;
                break;
            }
        }
        if (2 * K > opt.max_truncation) break;
        K *= 2;
    }
    out.energies = history.back();
    if (opt.extrapolate && history.size() >= 3) {
        const auto n = history.size();
        out.energies = detail::aitken(history[n - 3], history[n - 2], history[n - 1]);
    }
    out.sectors.assign(out.energies.size(), s);
    return out;
}

/// Lowest M levels over the union of all four sectors.
inline ConvergedSpectrum converge_all(const ModelParams& p, std::size_t M, double tol,
                                      const ConvergeOptions& opt = {}) {
    struct Level {
        double e;
        SectorLabel s;
    };
    std::vector<Level> levels;
    ConvergedSpectrum out;
    out.converged = true;
    for (std::size_t i = 0; i < kSectorCount; ++i) {
        const auto s = sector_at(i);
        auto part = converge(p, s, M, tol, opt);
        out.K_used = std::max(out.K_used, part.K_used);
        out.residual = std::max(out.residual, part.residual);
        out.converged = out.converged && part.converged;
        for (double e : part.energies) levels.push_back({e, s});
    }
    std::stable_sort(levels.begin(), levels.end(),
                     [](const Level& a, const Level& b) { return a.e < b.e; });
    levels.resize(std::min(levels.size(), M));
    for (const auto& l : levels) {
        out.energies.push_back(l.e);
        out.sectors.push_back(l.s);
    }
    return out;
}

/// Closed-form g = 0 spectrum of a sector: n (1 - s U) - s Delta / 2 over the
/// sector's basis states, sorted.
inline std::vector<double> decoupled_levels(double delta, double stark, SectorLabel s,
                                            std::size_t count) {
    std::vector<double> out;
    // with |U| < 1 every diagonal entry grows with k, so the lowest `count`
    // are among the first 2*count+2 entries
    for (std::size_t k = 0; k < 2 * count + 2; ++k) {
        const double n = static_cast<double>(photon_number(s.q, k));
        const double sx = (k % 2 == 0) ? s.parity : -s.parity;
        out.push_back(n * (1.0 - sx * stark) - sx * 0.5 * delta);
    }
    std::sort(out.begin(), out.end());
    out.resize(count);
    return out;
}

}  // namespace tprsm::ed
