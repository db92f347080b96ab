// criticality.hpp - energy gaps near the collapse point and their scaling.

#pragma once

#include "tprsm/ed.hpp"
#include "tprsm/model.hpp"
#include "tprsm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tprsm::crit {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (syy == 0.0) ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    f.points = x.size();
    return f;
}

struct GapResult {
    double gap = 0.0;
    double ground = 0.0;
    double excited = 0.0;
    SectorLabel ground_sector{};
    SectorLabel excited_sector{};
    bool converged = false;
    std::size_t K_used = 0;
    double residual = 0.0;
};

/// E_1 - E_0 over the union of all four sectors.
inline GapResult gap(const ModelParams& p, double tol = 1e-11, const ed::ConvergeOptions& opt = {}) {
    if (p.coupling() >= p.g_crit()) throw ModelError("gap requires g < g_c");
    const auto s = ed::converge_all(p, 2, tol, opt);
    GapResult r;
    r.ground = s.energies[0];
    r.excited = s.energies[1];
    r.gap = r.excited - r.ground;
    r.ground_sector = s.sectors[0];
    r.excited_sector = s.sectors[1];
    r.converged = s.converged;
    r.K_used = s.K_used;
    r.residual = s.residual;
    return r;
}

struct GapSample {
    double x = 0.0;  // -log10(1 - g/g_c); or Delta for Delta sweeps
    double coupling = 0.0;
    GapResult result;
};

struct GapCurve {
    double delta = 0.0;
    double stark = 0.0;
    std::vector<GapSample> samples;
    std::vector<GapSample> excluded;  // unconverged samples, not fitted
};

struct ExponentFit {
    LinearFit fit;        // log10(gap) against x
    double z_nu = 0.0;    // -slope
    double x_min = 0.0;
    double x_max = 0.0;
    GapCurve curve;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {a};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

/// Coupling-direction gap exponent at Delta = U from a fit of log10(gap) on
/// x = -log10(1 - g/g_c).
inline ExponentFit gap_exponent(double stark, double x_min = 1.5, double x_max = 4.0, std::size_t n_points = 11,
                                double tol = 1e-12, unsigned threads = 0, const ed::ConvergeOptions& opt = {}) {
    if (!(x_max > x_min) || x_min <= 0.0) throw std::invalid_argument("gap_exponent: need 0 < x_min < x_max");
    if (n_points < 2) throw std::invalid_argument("gap_exponent: need at least two points");
    const double delta = stark;
    const double gc = critical_coupling(stark);
    const auto xs = linspace(x_min, x_max, n_points);
    auto samples = parallel_map<GapSample>(
        xs.size(),
        [&](std::size_t i) {
            const double g = coupling_from_log_distance(xs[i], gc);
            return GapSample{xs[i], g, gap(ModelParams(delta, stark, g), tol, opt)};
        },
        threads);
    ExponentFit out;
    out.x_min = x_min;
    out.x_max = x_max;
    out.curve.delta = delta;
    out.curve.stark = stark;
    std::vector<double> fx, fy;
    for (auto& s : samples) {
        if (s.result.converged && s.result.gap > 0.0) {
            fx.push_back(s.x);
            fy.push_back(std::log10(s.result.gap));
            out.curve.samples.push_back(s);
        } else {
            out.curve.excluded.push_back(s);
        }
    }
    if (fx.size() < 2) throw std::runtime_error("gap_exponent: fewer than two converged samples");
    out.fit = linear_fit(fx, fy);
    out.z_nu = -out.fit.slope;
    return out;
}

struct DeltaSweep {
    GapCurve curve;          // samples[i].x holds Delta
    LinearFit quadratic;     // gap against (Delta - U)^2, Delta < U only
    double relative_offset;  // gaps evaluated at g = g_c (1 - relative_offset)
    double coupling;
};

/// Gap as a function of Delta at fixed U, near g_c. ED cannot sit exactly at
/// g_c, so the coupling is g_c (1 - relative_offset).
inline DeltaSweep gap_vs_delta(double stark, const std::vector<double>& delta_grid, double relative_offset = 1e-6,
                               double tol = 1e-12, unsigned threads = 0, const ed::ConvergeOptions& opt = {}) {
    if (!(relative_offset > 0.0 && relative_offset < 1.0)) {
        throw std::invalid_argument("gap_vs_delta: relative offset must lie in (0, 1)");
    }
    const double g = critical_coupling(stark) * (1.0 - relative_offset);
    auto samples = parallel_map<GapSample>(
        delta_grid.size(),
        [&](std::size_t i) {
            return GapSample{delta_grid[i], g, gap(ModelParams(delta_grid[i], stark, g), tol, opt)};
        },
        threads);
    DeltaSweep out{{}, {}, relative_offset, g};
    out.curve.stark = stark;
    out.curve.delta = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> fx, fy;
    for (auto& s : samples) {
        if (!s.result.converged) {
            out.curve.excluded.push_back(s);
            continue;
        }
        if (s.x < stark) {
            fx.push_back((s.x - stark) * (s.x - stark));
            fy.push_back(s.result.gap);
        }
        out.curve.samples.push_back(s);
    }
    if (fx.size() >= 2) out.quadratic = linear_fit(fx, fy);
    return out;
}

struct SystemSize {
    double L;
};

/// L = 1 / |Delta/U - 1|; infinite at Delta = U.
inline SystemSize system_size(double delta, double stark) {
    if (stark == 0.0) throw ModelError("system size undefined for U = 0");
    const double d = std::abs(delta / stark - 1.0);
    return {d == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / d};
}

}  // namespace tprsm::crit
