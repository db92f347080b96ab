// model.hpp - parameters, derived quantities, pole lines and crossing points
// of the two-photon Rabi-Stark Hamiltonian
//
//   H = a^dag a + g sigma_z [a^2 + (a^dag)^2] - sigma_x (Delta/2 + U a^dag a)
//
// All energies are in units of the cavity frequency (omega = 1).

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace tprsm {

/// Raised for parameter combinations outside the domain of the model.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Critical coupling g_c = sqrt(1 - U^2) / 2 at which beta vanishes.
inline double critical_coupling(double stark) {
    return 0.5 * std::sqrt(1.0 - stark * stark);
}

/// Physical inputs (Delta, U, g). Construction enforces |U| < 1, Delta >= 0
/// and 0 <= g <= g_c.
class ModelParams {
public:
    ModelParams(double delta, double stark, double coupling)
        : delta_(delta), stark_(stark), coupling_(coupling) {
        if (!std::isfinite(delta) || !std::isfinite(stark) || !std::isfinite(coupling)) {
            throw ModelError("parameters must be finite");
        }
        if (std::abs(stark) >= 1.0) {
            throw ModelError("Stark coupling must satisfy |U| < 1");
        }
        if (delta < 0.0) {
            throw ModelError("qubit splitting Delta must be non-negative");
        }
        if (coupling < 0.0) {
            throw ModelError("coupling g must be non-negative");
        }
        if (coupling > critical_coupling(stark)) {
            throw ModelError("coupling exceeds critical value g_c");
        }
    }

    double delta() const noexcept { return delta_; }
    double stark() const noexcept { return stark_; }
    double coupling() const noexcept { return coupling_; }
    double g_crit() const noexcept { return critical_coupling(stark_); }

    ModelParams with_coupling(double g) const { return {delta_, stark_, g}; }

private:
    double delta_;
    double stark_;
    double coupling_;
};

struct DerivedParams {
    double gamma;       // 1 / sqrt(1 - U^2)
    double beta;        // sqrt(1 - 4 gamma^2 g^2)
    double tanh_theta;  // sqrt((1 - beta) / (1 + beta))
    double theta;       // +inf at g_c
    double g_crit;
    bool at_critical;   // beta == 0, G-function undefined
};

inline DerivedParams derive_params(const ModelParams& p) {
    const double u = p.stark();
    const double g = p.coupling();
    DerivedParams d{};
    d.gamma = 1.0 / std::sqrt(1.0 - u * u);
    d.g_crit = p.g_crit();
    // 1 - (g/g_c)^2 == 1 - 4 gamma^2 g^2, written to avoid cancellation near g_c
    const double r = g / d.g_crit;
    d.beta = std::sqrt(std::max(0.0, (1.0 - r) * (1.0 + r)));
    d.tanh_theta = std::sqrt((1.0 - d.beta) / (1.0 + d.beta));
    d.theta = d.beta > 0.0 ? std::atanh(d.tanh_theta) : std::numeric_limits<double>::infinity();
    d.at_critical = d.beta == 0.0;
    return d;
}

/// Bargmann index: q = 1/4 (even photon numbers) or q = 3/4 (odd).
enum class Bargmann { quarter, three_quarter };

inline double bargmann_value(Bargmann q) noexcept {
    return q == Bargmann::quarter ? 0.25 : 0.75;
}

inline Bargmann bargmann_from_value(double q) {
    if (q == 0.25) return Bargmann::quarter;
    if (q == 0.75) return Bargmann::three_quarter;
    throw ModelError("Bargmann index must be 1/4 or 3/4");
}

/// Symmetry sector: Bargmann index plus the Z2 branch (+1 selects G_+, -1 G_-).
/// In the exact-diagonalization basis the same branch is the sign
/// p = s (-1)^floor(n/2), with s the sigma_x eigenvalue.
struct SectorLabel {
    Bargmann q = Bargmann::quarter;
    int parity = +1;

    SectorLabel() = default;
    SectorLabel(Bargmann q_, int parity_) : q(q_), parity(parity_) {
        if (parity != 1 && parity != -1) {
            throw ModelError("parity branch must be +1 or -1");
        }
    }
    double q_value() const noexcept { return bargmann_value(q); }

    friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

inline constexpr std::size_t kSectorCount = 4;

inline SectorLabel sector_at(std::size_t i) {
    return {i < 2 ? Bargmann::quarter : Bargmann::three_quarter, (i % 2 == 0) ? +1 : -1};
}

/// Pole line E_n^pole. n > 0 uses the vanishing prefactor of the f-recurrence,
/// n = 0 the vanishing denominator of Omega_0 (requires U != 0).
inline double pole_energy(std::size_t n, Bargmann q, const ModelParams& p) {
    const auto d = derive_params(p);
    const double qq = bargmann_value(q);
    const double u = p.stark();
    const double delta = p.delta();
    if (n == 0) {
        if (u == 0.0) {
            throw ModelError("zeroth pole undefined for U = 0");
        }
        return 2.0 * qq * d.beta / d.gamma - delta / (2.0 * u) -
               (1.0 - delta / u) / (2.0 * d.gamma);
    }
    const double g2 = d.gamma * d.gamma;
    return 2.0 * (static_cast<double>(n) + qq) * d.beta / g2 - 0.5 / g2 - 0.5 * u * delta;
}

/// Common limit of all n > 0 pole lines at g = g_c.
inline double threshold_energy(double delta, double stark) {
    return -0.5 * (1.0 - stark * stark) - 0.5 * stark * delta;
}

struct CrossingPoint {
    std::size_t n;
    double beta_c;
    double g_at_crossing;
    double energy;
};

/// Lowest doubly degenerate point on pole line n: beta_c = (1 - Delta/U)/(4(n+q)),
/// E_cross = -Delta/(2U).
inline CrossingPoint crossing_point(std::size_t n, Bargmann q, double delta, double stark) {
    if (stark == 0.0) {
        throw ModelError("crossing point requires U != 0");
    }
    const double ratio = delta / stark;
    if (ratio > 1.0) {
        throw ModelError("no crossing on pole line: requires Delta/U <= 1");
    }
    CrossingPoint c{};
    c.n = n;
    c.beta_c = (1.0 - ratio) / (4.0 * (static_cast<double>(n) + bargmann_value(q)));
    if (c.beta_c > 1.0) {
        throw ModelError("no crossing on pole line: beta_c exceeds 1");
    }
    c.g_at_crossing = 0.5 * std::sqrt((1.0 - c.beta_c * c.beta_c) * (1.0 - stark * stark));
    c.energy = -0.5 * ratio;
    return c;
}

/// E' = [gamma^2 (E + U Delta/2) + 1/2] / (2 beta) - q. Maps pole line n > 0 to n.
inline double scaled_energy(double energy, const ModelParams& p, Bargmann q) {
    const auto d = derive_params(p);
    if (d.beta == 0.0) {
        throw ModelError("scaled energy undefined at g_c (beta = 0)");
    }
    const double g2 = d.gamma * d.gamma;
    return (g2 * (energy + 0.5 * p.stark() * p.delta()) + 0.5) / (2.0 * d.beta) -
           bargmann_value(q);
}

/// x = -log10(1 - g/g_c).
inline double log_distance(double g, double g_crit) {
    return 0.0 - std::log10(1.0 - g / g_crit);  // keeps x = +0 at g = 0
}

inline double coupling_from_log_distance(double x, double g_crit) {
    return g_crit * (1.0 - std::pow(10.0, -x));
}

/// Rigorous lower bound on the spectrum for g <= g_c:
/// H >= -1/2 - |U|/2 - Delta/2.
inline double spectrum_lower_bound(const ModelParams& p) {
    return -0.5 * (1.0 + std::abs(p.stark()) + p.delta());
}

}  // namespace tprsm
