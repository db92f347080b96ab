// collapse.hpp - spectrum at the collapse point g = g_c.
//
// At g_c the bound-state problem reduces to a 1D Schroedinger equation
//
//   -phi'' + V(x) phi = -kappa^4 phi,   V(x) = -U^2 [kappa^2 + (1 - Delta/U)/2]^2 / (x^2 + 1)
//
// with kappa^2 = -gamma^2 (E - E_thr) > 0 in the bound regime. Delta = U gives
// full collapse (no bound states); otherwise the x^-2 tail supports a ladder
// accumulating at the threshold.

#pragma once

#include "tprsm/ed.hpp"
#include "tprsm/model.hpp"
#include "tprsm/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace tprsm::collapse {

enum class CollapseKind { full_collapse, infinite_bound_states };

inline const char* kind_name(CollapseKind k) {
    return k == CollapseKind::full_collapse ? "FullCollapse" : "InfiniteBoundStates";
}

inline constexpr double kCollapseTolerance = 1e-12;

struct CollapseClassification {
    CollapseKind kind;
    double threshold_energy;         // E_n^(c) = -1/(2 gamma^2) - U Delta / 2
    double collapse_energy_if_full;  // -1/2
};

inline CollapseClassification classify(double delta, double stark) {
    if (std::abs(stark) >= 1.0) throw ModelError("Stark coupling must satisfy |U| < 1");
    if (delta < 0.0) throw ModelError("qubit splitting Delta must be non-negative");
    const bool full = std::abs(delta - stark) < kCollapseTolerance;
    return {full ? CollapseKind::full_collapse : CollapseKind::infinite_bound_states,
            threshold_energy(delta, stark), -0.5};
}

/// U^2 [kappa^2 + (1 - Delta/U)/2]^2, written as [U kappa^2 + (U - Delta)/2]^2
/// so that U = 0 is regular.
inline double depth_coefficient(double delta, double stark, double kappa2) {
    const double b = stark * kappa2 + 0.5 * (stark - delta);
    return b * b;
}

struct EffectivePotential {
    double u;
    double delta;
    double kappa2;
    double depth;

    EffectivePotential(double delta_, double stark, double kappa2_)
        : u(stark), delta(delta_), kappa2(kappa2_), depth(depth_coefficient(delta_, stark, kappa2_)) {
        if (kappa2 < 0.0) throw std::invalid_argument("EffectivePotential: kappa^2 must be >= 0");
    }

    double operator()(double x) const { return -depth / (x * x + 1.0); }
};

/// nu^2 = 1/4 - U^2 [kappa^2 + (1 - Delta/U)/2]^2.
inline double nu_squared(double delta, double stark, double kappa2) {
    if (stark == 0.0 && delta != 0.0) throw ModelError("nu^2 undefined: Delta/U with U = 0");
    if (kappa2 < 0.0) throw std::invalid_argument("nu_squared: kappa^2 must be >= 0");
    return 0.25 - depth_coefficient(delta, stark, kappa2);
}

struct BoundLadder {
    double nu2;
    std::vector<double> ratios;  // kappa_n^2 / kappa_0^2, n = 0..n_max
    double decay_rate() const { return std::numbers::pi / std::sqrt(-nu2); }
};

/// kappa_n^2 / kappa_0^2 = exp(-pi n / |nu|) with nu^2 in the kappa^2 -> 0 limit.
inline BoundLadder ladder_ratios(double delta, double stark, std::size_t n_max) {
    BoundLadder b{nu_squared(delta, stark, 0.0), {}};
    if (b.nu2 >= 0.0) {
        throw ModelError("no exponential ladder: nu^2 >= 0 (zero bound states at Delta = U, or outside the approximation)");
    }
    const double rate = b.decay_rate();
    for (std::size_t n = 0; n <= n_max; ++n) b.ratios.push_back(std::exp(-rate * static_cast<double>(n)));
    return b;
}

// ---------------------------------------------------------------------------
// Finite-difference bound levels

struct FdOptions {
    double x_max = 1e9;           // half width of the domain, Dirichlet edge
    std::size_t grid_points = 40001;
    std::size_t levels = 10;
    double convergence_tol = 1e-6;  // relative level shift under grid refinement
    bool check_refinement = true;
};

struct FdLevels {
    std::vector<double> kappa2;
    std::vector<double> residuals;     // |lambda_k(kappa^2) + kappa^4| at each level
    std::vector<double> refinement_shift;  // relative change when dt is halved
    bool converged = true;
    std::size_t grid_points = 0;
};

namespace detail {

/// Even-parity discretization of -d^2/dx^2 + V on x = sinh(t), t in [0, t_max],
/// Neumann at t = 0 and Dirichlet at t_max. The quadratic form
///   int phi_t^2 / cosh(t) dt + int V cosh(t) phi^2 dt
/// against the mass int cosh(t) phi^2 dt gives a tridiagonal pencil.
class MappedGrid {
public:
    MappedGrid(double x_max, std::size_t points) {
        if (points < 3) throw std::invalid_argument("fd grid needs at least 3 points");
        if (!(x_max > 0.0)) throw std::invalid_argument("fd domain must be positive");
        const std::size_t n = points - 1;  // last node carries the Dirichlet condition
        dt_ = std::asinh(x_max) / static_cast<double>(points - 1);
        x_.resize(n);
        kinetic_diag_.resize(n);
        off_.resize(n - 1);
        mass_.resize(n);
        pot_weight_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = dt_ * static_cast<double>(i);
            const double w = (i == 0) ? 0.5 : 1.0;
            const double right = 1.0 / (std::cosh(t + 0.5 * dt_) * dt_);
            const double left = (i == 0) ? 0.0 : 1.0 / (std::cosh(t - 0.5 * dt_) * dt_);
            x_[i] = std::sinh(t);
            kinetic_diag_[i] = left + right;
            if (i + 1 < n) off_[i] = -right;
            mass_[i] = std::cosh(t) * w * dt_;
            pot_weight_[i] = mass_[i];
        }
        off2_.resize(off_.size());
        for (std::size_t i = 0; i < off_.size(); ++i) off2_[i] = off_[i] * off_[i];
        diag_.resize(n);
    }

    std::size_t size() const noexcept { return x_.size(); }

    void set_potential(const EffectivePotential& v) {
        for (std::size_t i = 0; i < x_.size(); ++i) diag_[i] = kinetic_diag_[i] + v(x_[i]) * pot_weight_[i];
    }

    std::size_t count_below(double lambda) const {
        return linalg::count_below(diag_, off2_, mass_, lambda);
    }

    linalg::TridiagonalPencil pencil() const { return {diag_, off_, mass_}; }

private:
    double dt_ = 0.0;
    std::vector<double> x_, kinetic_diag_, off_, off2_, mass_, pot_weight_, diag_;
};

/// Self-consistent kappa^2 for level k: largest root of
/// F_k(kappa^2) = lambda_k(kappa^2) + kappa^4, with sign read off a Sturm count.
inline double solve_level(MappedGrid& grid, double delta, double stark, std::size_t k, double hi) {
    auto negative = [&](double kappa2) {
        grid.set_potential(EffectivePotential(delta, stark, kappa2));
        return grid.count_below(-kappa2 * kappa2) > k;  // lambda_k < -kappa^4
    };
    // walk down from the upper bound (where F > 0) until F < 0
    double upper = hi;
    double lower = hi;
    bool found = false;
    while (lower > 1e-300) {
        lower = upper / 1.5;
        if (negative(lower)) {
            found = true;
            break;
        }
        upper = lower;
    }
    if (!found) return 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lower + upper);
        if (mid <= lower || mid >= upper) break;
        if (negative(mid)) lower = mid; else upper = mid;
    }
    return 0.5 * (lower + upper);
}

inline FdLevels solve_levels(double delta, double stark, double x_max, std::size_t points, std::size_t levels) {
    FdLevels out;
    out.grid_points = points;
    MappedGrid grid(x_max, points);
    // F_k > 0 once kappa^4 exceeds the well depth
    const double hi = 1.01 * std::abs(stark - delta) / (2.0 * (1.0 - std::abs(stark))) + 1e-12;
    for (std::size_t k = 0; k < levels; ++k) {
        const double kappa2 = solve_level(grid, delta, stark, k, hi);
        if (kappa2 <= 0.0) break;  // no further bound level in this domain
        grid.set_potential(EffectivePotential(delta, stark, kappa2));
        const linalg::SturmSolver solver(grid.pencil());
        const double lambda = solver.eigenvalue(k);
        out.kappa2.push_back(kappa2);
        out.residuals.push_back(std::abs(lambda + kappa2 * kappa2));
    }
    return out;
}

}  // namespace detail

/// Even-parity (q = 1/4) bound levels kappa_n^2 of the self-consistent
/// inverse-square problem, descending. Empty at Delta = U.
inline FdLevels fd_bound_levels(double delta, double stark, const FdOptions& opt = {}) {
    if (classify(delta, stark).kind == CollapseKind::full_collapse) {
        FdLevels empty;
        empty.grid_points = opt.grid_points;
        return empty;
    }
    auto out = detail::solve_levels(delta, stark, opt.x_max, opt.grid_points, opt.levels);
    if (opt.check_refinement) {
        const auto fine = detail::solve_levels(delta, stark, opt.x_max, 2 * opt.grid_points - 1, opt.levels);
        const std::size_t n = std::min(out.kappa2.size(), fine.kappa2.size());
        if (n < out.kappa2.size()) out.converged = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double shift = std::abs(fine.kappa2[i] - out.kappa2[i]) / out.kappa2[i];
            out.refinement_shift.push_back(shift);
            if (shift > opt.convergence_tol) out.converged = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Faddeev criterion

/// int_{-X}^{X} |V^-(x)| (1 + |x|) dx by composite Simpson in t = asinh(x).
inline double faddeev_integral(const EffectivePotential& v, double X, std::size_t panels = 4096) {
    if (!(X > 0.0)) throw std::invalid_argument("faddeev_integral: X must be positive");
    if (panels % 2 == 1) ++panels;
    const double T = std::asinh(X);
    const double h = T / static_cast<double>(panels);
    auto integrand = [&](double t) {
        const double x = std::sinh(t);
        const double vm = std::min(0.0, v(x));
        return -vm * (1.0 + x) * std::cosh(t);
    };
    double s = integrand(0.0) + integrand(T);
    for (std::size_t i = 1; i < panels; ++i) {
        s += integrand(h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return 2.0 * s * h / 3.0;  // even integrand
}

/// d I / d ln X between X1 and X2; tends to 2 * depth for the x^-2 tail.
inline double faddeev_log_slope(const EffectivePotential& v, double X1, double X2) {
    return (faddeev_integral(v, X2) - faddeev_integral(v, X1)) / (std::log(X2) - std::log(X1));
}

// ---------------------------------------------------------------------------
// Positivity of H_0 = H_c + 1/2 at Delta = U

struct PositivityCertificate {
    std::size_t samples = 0;
    double min_expectation = 0.0;
    double min_eigenvalue = 0.0;        // of the truncated H_0, all sectors
    std::size_t levels_below_trial = 0;  // eigenvalues of the truncated H_c below E_trial
    bool holds = false;
};

/// Samples <Psi|H_0|Psi> over random normalized states supported on photon
/// numbers < 2K in each sector. The truncated matrix is the compression of
/// H_0, so every sample is an exact expectation of the unbounded operator.
inline PositivityCertificate positivity_witness(double stark, double e_trial, std::size_t K,
                                               std::size_t samples = 1000, std::uint64_t seed = 12345,
                                               double tol = 1e-10) {
    if (e_trial >= -0.5) throw std::invalid_argument("positivity_witness: E_trial must lie below -1/2");
    if (stark < 0.0) throw ModelError("positivity witness needs Delta = U >= 0");
    const ModelParams p(stark, stark, critical_coupling(stark));
    std::vector<ed::SectorMatrix> blocks;
    for (std::size_t i = 0; i < kSectorCount; ++i) {
        auto m = ed::build_sector(p, sector_at(i), K);
        for (double& d : m.diag) d += 0.5;
        blocks.push_back(std::move(m));
    }
    PositivityCertificate cert;
    cert.samples = samples;
    cert.min_expectation = std::numeric_limits<double>::infinity();
    cert.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
        const linalg::SturmSolver solver(ed::as_pencil(b));
        cert.min_eigenvalue = std::min(cert.min_eigenvalue, solver.lowest(1).front());
        cert.levels_below_trial += solver.count_below(e_trial + 0.5);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> psi(blocks.size(), std::vector<double>(K));
    for (std::size_t s = 0; s < samples; ++s) {
        double norm = 0.0;
        for (auto& v : psi) {
            for (double& c : v) {
                c = normal(rng);
                norm += c * c;
            }
        }
        double expectation = 0.0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& m = blocks[b];
            const auto& v = psi[b];
            for (std::size_t k = 0; k < K; ++k) {
                double hv = m.diag[k] * v[k];
                if (k > 0) hv += m.offdiag[k - 1] * v[k - 1];
                if (k + 1 < K) hv += m.offdiag[k] * v[k + 1];
                expectation += v[k] * hv;
            }
        }
        cert.min_expectation = std::min(cert.min_expectation, expectation / norm);
    }
    cert.holds = cert.min_expectation >= -tol && cert.min_eigenvalue >= -tol && cert.levels_below_trial == 0;
    return cert;
}

}  // namespace tprsm::collapse
