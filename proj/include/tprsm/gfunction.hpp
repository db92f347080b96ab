// gfunction.hpp - G-function of the two-photon Rabi-Stark model.
//
//   G_{+-}(E) = sum_n (e_n -+ f_n) [2(n + q - 1/4)]! / (2^n n!) tanh^n(theta)
//
// with e_n = Omega_n f_n and f_n from the three-term recurrence. Writing
// Omega_n = N_n / D_n and f_n = D_n h_n turns the recurrence into
//
//   c_n P_{n+1} h_{n+1} = (A_n D_n - B_n N_n) h_n - g P_{n-1} h_{n-1}
//
// where P_n = (gamma + 1) D_n - U gamma N_n = 2 (E_n^pole - E). The zeros of
// D_n for n >= 1 are removable and never appear in a denominator; the only
// singularities left are the pole lines (P_n = 0, n >= 1) and the zeroth pole
// (D_0 = 0) that enters through the normalization f_0 = 1.

#pragma once

#include "tprsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tprsm::gfunc {

class PoleHit : public std::domain_error {
public:
    PoleHit() : std::domain_error("pole hit - choose a bracket excluding poles") {}
};

class NotConverged : public std::runtime_error {
public:
    NotConverged() : std::runtime_error("G-function did not converge: raise n_max or move away from g_c") {}
};

/// Initial condition of the recurrence.
struct Seed {
    enum class Kind { standard, special, special_zeroth };
    Kind kind = Kind::standard;
    std::size_t m = 0;  // first index of the special series

    static Seed standard() { return {}; }
    static Seed special(std::size_t m) {
        if (m == 0) throw std::invalid_argument("special seed needs m >= 1; use special_zeroth");
        return {Kind::special, m};
    }
    static Seed special_zeroth() { return {Kind::special_zeroth, 0}; }

    std::size_t start() const noexcept { return kind == Kind::special ? m : 0; }
};

struct RecurrenceRow {
    double omega;      // Omega_n = N_n / D_n, may be infinite
    double e;          // e_n * exp(-log_scale)
    double f;          // f_n * exp(-log_scale)
    double log_scale;  // natural log of the common factor removed from (e_n, f_n)
};

struct RecurrenceTable {
    std::size_t first_index = 0;  // row i holds n = first_index + i
    std::vector<RecurrenceRow> rows;
};

struct GValue {
    int sign = 0;
    double log_magnitude = -std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t terms_used = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

struct SeriesOptions {
    double tol = 1e-14;
    std::size_t n_max = 5000;
    std::size_t quiet_terms = 10;  // consecutive small terms required
};

namespace detail {

/// Per-index coefficients of the recurrence at fixed (E, Delta, U, g, q).
class Coefficients {
public:
    Coefficients(double energy, const ModelParams& p, Bargmann q)
        : E_(energy), delta_(p.delta()), u_(p.stark()), g_(p.coupling()), q_(bargmann_value(q)) {
        const auto d = derive_params(p);
        gamma_ = d.gamma;
        beta_ = d.beta;
        tanh_theta_ = d.tanh_theta;
        if (beta_ == 0.0) throw ModelError("G-function undefined at g_c");
        ug_ = u_ * gamma_ / (gamma_ + 1.0);
        g4_ = 4.0 * gamma_ * g_ * g_;
    }

    double coupling() const noexcept { return g_; }
    double tanh_theta() const noexcept { return tanh_theta_; }

    struct Row {
        double N, D, P, P_scale;
    };

    Row at(std::size_t n) const {
        const double k = static_cast<double>(n) + q_;
        const double stark_part = 0.5 * delta_ + 2.0 * u_ * k / beta_ - 0.5 * u_;
        const double upper = 2.0 * (1.0 + g4_) * k / beta_ - 0.5 - E_;
        const double lower = 2.0 * (1.0 - g4_) * k / beta_ - 0.5 - E_;
        Row r{};
        r.N = stark_part - ug_ * upper;
        r.D = lower - ug_ * stark_part;
        r.P = (gamma_ + 1.0) * r.D - u_ * gamma_ * r.N;
        r.P_scale = (gamma_ + 1.0) * (std::abs(lower) + std::abs(ug_ * stark_part)) +
                    std::abs(u_ * gamma_) * (std::abs(stark_part) + std::abs(ug_ * upper));
        return r;
    }

    double A(std::size_t n) const {
        const double k = static_cast<double>(n) + q_;
        return 2.0 * (1.0 + g4_) * k - beta_ * (0.5 + E_);
    }
    double B(std::size_t n) const {
        const double k = static_cast<double>(n) + q_;
        return 0.5 * beta_ * (delta_ - u_) + 2.0 * u_ * k;
    }
    double C(std::size_t n) const {
        const double k = static_cast<double>(n) + q_;
        return 4.0 * g_ * (k + 0.25) * (k + 0.75);
    }

    /// log of [2(n + q - 1/4)]! / (2^n n!) tanh^n(theta)
    double log_weight(std::size_t n) const {
        const double nn = static_cast<double>(n);
        const double lt = n == 0 ? 0.0 : nn * std::log(tanh_theta_);
        return std::lgamma(2.0 * (nn + q_ - 0.25) + 1.0) - nn * std::log(2.0) -
               std::lgamma(nn + 1.0) + lt;
    }

private:
    double E_, delta_, u_, g_, q_;
    double gamma_ = 1.0, beta_ = 1.0, tanh_theta_ = 0.0;
    double ug_ = 0.0, g4_ = 0.0;
};

inline bool is_pole_hit(const Coefficients::Row& r) {
    return std::abs(r.P) <= 16.0 * std::numeric_limits<double>::epsilon() * r.P_scale;
}

/// Steps the h-form recurrence, rescaling (h_{n-1}, h_n) together when they
/// drift out of range. True h_n = h * exp(log_scale).
class Stepper {
public:
    Stepper(const Coefficients& c, Seed seed) : c_(c), seed_(seed) {
        n_ = seed.start();
        row_ = c_.at(n_);
        if (seed.kind == Seed::Kind::special_zeroth) row_.D = 0.0;  // E pinned on the zeroth pole
        h_ = 1.0;
        h_prev_ = 0.0;
    }

    std::size_t index() const noexcept { return n_; }
    const Coefficients::Row& row() const noexcept { return row_; }
    double h() const noexcept { return h_; }
    double log_scale() const noexcept { return log_scale_; }

    void advance() {
        const auto next = c_.at(n_ + 1);
        if (is_pole_hit(next)) throw PoleHit();
        const double drive = c_.A(n_) * row_.D - c_.B(n_) * row_.N;
        const double back = (n_ > seed_.start()) ? c_.coupling() * prev_P_ * h_prev_ : 0.0;
        const double h_next = (drive * h_ - back) / (c_.C(n_) * next.P);
        prev_P_ = row_.P;
        h_prev_ = h_;
        h_ = h_next;
        row_ = next;
        ++n_;
        const double big = std::max(std::abs(h_), std::abs(h_prev_));
        if (big > 1e150 || (big < 1e-150 && big > 0.0)) {
            h_ /= big;
            h_prev_ /= big;
            log_scale_ += std::log(big);
        }
    }

private:
    const Coefficients& c_;
    Seed seed_;
    std::size_t n_ = 0;
    Coefficients::Row row_{};
    double prev_P_ = 0.0;
    double h_ = 1.0;
    double h_prev_ = 0.0;
    double log_scale_ = 0.0;
};

/// log|.| and sign of the factor that turns h-form seed h_start = 1 into the
/// published normalization (f_0 = 1, f_m = 1 or e_0 = 1).
inline std::pair<int, double> seed_normalization(const Coefficients& c, Seed seed) {
    const auto r = c.at(seed.start());
    double v = 0.0;
    switch (seed.kind) {
        case Seed::Kind::standard:
        case Seed::Kind::special:
            v = r.D;
            break;
        case Seed::Kind::special_zeroth:
            v = r.N;
            break;
    }
    const double scale = std::abs(r.P_scale) + 1.0;
    if (std::abs(v) <= 16.0 * std::numeric_limits<double>::epsilon() * scale) throw PoleHit();
    return {v > 0.0 ? 1 : -1, -std::log(std::abs(v))};  // multiply by 1/v
}

/// Sum in the log domain: value = mant * exp(ref).
class LogAccumulator {
public:
    void add(int sign, double log_mag) {
        if (sign == 0 || !std::isfinite(log_mag)) return;
        if (mant_ == 0.0) {
            mant_ = sign;
            ref_ = log_mag;
        } else {
            if (log_mag > ref_ + 300.0) {
                mant_ *= std::exp(ref_ - log_mag);
                ref_ = log_mag;
            }
            mant_ += sign * std::exp(log_mag - ref_);
        }
        if (mant_ != 0.0 && (std::abs(mant_) > 1e100 || std::abs(mant_) < 1e-100)) {
            ref_ += std::log(std::abs(mant_));
            mant_ = mant_ > 0 ? 1.0 : -1.0;
        }
        if (mant_ != 0.0) max_log_ = std::max(max_log_, log_abs());
    }
    int sign() const { return mant_ > 0 ? 1 : (mant_ < 0 ? -1 : 0); }
    double log_abs() const {
        return mant_ == 0.0 ? -std::numeric_limits<double>::infinity() : ref_ + std::log(std::abs(mant_));
    }
    double max_log() const { return max_log_; }

private:
    double mant_ = 0.0;
    double ref_ = 0.0;
    double max_log_ = -std::numeric_limits<double>::infinity();
};

/// Weighted series with the h-form seed (h_start = 1); no normalization.
inline GValue reduced_series(const Coefficients& c, Seed seed, int branch, const SeriesOptions& opt) {
    GValue out;
    LogAccumulator sum;
    if (c.coupling() == 0.0) {
        // tanh(theta) = 0: only the n = 0 term survives
        if (seed.kind == Seed::Kind::special) throw ModelError("special G-function needs g > 0");
        const auto r = c.at(0);
        const double t = (seed.kind == Seed::Kind::special_zeroth ? r.N : r.N - branch * r.D);
        out.sign = t > 0 ? 1 : (t < 0 ? -1 : 0);
        out.log_magnitude = std::log(std::abs(t));
        out.converged = true;
        out.terms_used = 1;
        return out;
    }
    Stepper st(c, seed);
    const double log_tol = std::log(opt.tol);
    std::size_t quiet = 0;
    std::size_t used = 0;
    while (true) {
        const auto& r = st.row();
        const double D = r.D;
        const double coeff = r.N - branch * D;
        ++used;
        if (coeff != 0.0 && st.h() != 0.0) {
            const double lt = std::log(std::abs(coeff)) + std::log(std::abs(st.h())) + st.log_scale() +
                              c.log_weight(st.index());
            const int s = ((coeff > 0) == (st.h() > 0)) ? 1 : -1;
            sum.add(s, lt);
            if (lt < log_tol + sum.max_log()) ++quiet; else quiet = 0;
        } else {
            ++quiet;
        }
        if (quiet >= opt.quiet_terms) {
            out.converged = true;
            break;
        }
        if (used >= opt.n_max) break;
        st.advance();
    }
    out.sign = sum.sign();
    out.log_magnitude = sum.log_abs();
    out.terms_used = used;
    return out;
}

}  // namespace detail

/// Rows (Omega_n, e_n, f_n) for n = seed start .. n_max in the published
/// normalization, each row carrying its own log rescale factor.
inline RecurrenceTable recurrence(double energy, const ModelParams& p, Bargmann q, std::size_t n_max,
                                  Seed seed = Seed::standard()) {
    const detail::Coefficients c(energy, p, q);
    RecurrenceTable t;
    t.first_index = seed.start();
    if (n_max < seed.start()) return t;
    const auto [norm_sign, norm_log] = detail::seed_normalization(c, seed);
    const std::size_t last = (p.coupling() == 0.0) ? seed.start() : n_max;
    detail::Stepper st(c, seed);
    while (true) {
        const auto& r = st.row();
        RecurrenceRow row{};
        row.omega = r.N / r.D;
        row.log_scale = st.log_scale() + norm_log;
        row.e = norm_sign * r.N * st.h();
        row.f = norm_sign * r.D * st.h();
        if (seed.kind == Seed::Kind::special_zeroth && st.index() == 0) {
            row.omega = std::numeric_limits<double>::infinity();
            row.e = 1.0;
            row.f = 0.0;
            row.log_scale = 0.0;
        } else if (seed.kind != Seed::Kind::special_zeroth && st.index() == seed.start()) {
            row.f = 1.0;
            row.e = row.omega;
            row.log_scale = 0.0;
        }
        t.rows.push_back(row);
        if (st.index() >= last) break;
        st.advance();
    }
    return t;
}

/// G_{branch}(E) with the published normalization for the given seed.
inline GValue g_eval(double energy, const ModelParams& p, SectorLabel s,
                     const SeriesOptions& opt = {}, Seed seed = Seed::standard()) {
    const detail::Coefficients c(energy, p, s.q);
    const auto [norm_sign, norm_log] = detail::seed_normalization(c, seed);
    auto v = detail::reduced_series(c, seed, s.parity, opt);
    v.sign *= norm_sign;
    v.log_magnitude += norm_log;
    return v;
}

/// G multiplied by the Omega_0 denominator D_0: same zeros as G, no pole at
/// the zeroth pole line. Used for root isolation.
inline GValue g_eval_reduced(double energy, const ModelParams& p, SectorLabel s,
                             const SeriesOptions& opt = {}) {
    const detail::Coefficients c(energy, p, s.q);
    return detail::reduced_series(c, Seed::standard(), s.parity, opt);
}

enum class Method { gfunction, ed };

inline const char* method_name(Method m) { return m == Method::gfunction ? "gfunction" : "ed"; }

struct EigenvalueList {
    std::vector<double> energies;
    SectorLabel sector;
    Method method = Method::gfunction;
    double bracket_tolerance = 0.0;
};

struct ZeroSearchOptions {
    std::size_t grid_density = 2000;  // samples per inter-pole interval
    double pole_window = 1e-8;
    double refine_tol = 1e-11;
    double verify_limit = 1e-7;  // widest re-verification window
    SeriesOptions series{};
};

/// Pole lines n >= 1 inside (lo, hi), ascending.
inline std::vector<double> poles_in(const ModelParams& p, Bargmann q, double lo, double hi) {
    std::vector<double> out;
    if (p.coupling() == 0.0) return out;  // series truncates; no singular lines
    const auto d = derive_params(p);
    const double step = 2.0 * d.beta / (d.gamma * d.gamma);
    const double first = pole_energy(1, q, p);
    double start = std::ceil((lo - first) / step);
    if (start < 0.0) start = 0.0;
    for (std::size_t n = 1 + static_cast<std::size_t>(start);; ++n) {
        const double e = pole_energy(n, q, p);
        if (e >= hi) break;
        if (e > lo) out.push_back(e);
    }
    return out;
}

/// All zeros of G_{+-} in [e_min, e_max]: sign changes on a pole-aware grid,
/// refined by bisection, each re-verified at zero +- refine_tol.
inline EigenvalueList find_zeros(const ModelParams& p, SectorLabel s, double e_min, double e_max,
                                 const ZeroSearchOptions& opt = {}) {
    if (!(e_min < e_max) || !std::isfinite(e_min) || !std::isfinite(e_max)) {
        throw std::invalid_argument("find_zeros: need finite e_min < e_max");
    }
    if (opt.grid_density < 2) throw std::invalid_argument("find_zeros: grid_density must be >= 2");
    EigenvalueList out;
    out.sector = s;
    out.method = Method::gfunction;
    out.bracket_tolerance = opt.refine_tol;

    auto sign_at = [&](double e) {
        const auto v = g_eval_reduced(e, p, s, opt.series);
        if (!v.converged) throw NotConverged();
        return v.sign;
    };

    std::vector<double> edges{e_min};
    for (double pole : poles_in(p, s.q, e_min, e_max)) edges.push_back(pole);
    edges.push_back(e_max);

    for (std::size_t iv = 0; iv + 1 < edges.size(); ++iv) {
        const double a = edges[iv] + (iv == 0 ? 0.0 : opt.pole_window);
        const double b = edges[iv + 1] - (iv + 2 == edges.size() ? 0.0 : opt.pole_window);
        if (!(a < b)) continue;
        const std::size_t N = opt.grid_density;
        double x_prev = a;
        int s_prev = sign_at(a);
        for (std::size_t i = 1; i < N; ++i) {
            const double x = (i + 1 == N) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(N - 1);
            const int sx = sign_at(x);
            if (sx == 0) {
                out.energies.push_back(x);
            } else if (s_prev != 0 && sx != s_prev) {
                double lo = x_prev, hi = x;
                int s_lo = s_prev;
                while (hi - lo > opt.refine_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const int sm = sign_at(mid);
                    if (sm == 0) {
                        lo = hi = mid;
                        break;
                    }
                    if (sm == s_lo) lo = mid; else hi = mid;
                }
                const double z = 0.5 * (lo + hi);
                // near high-lying zeros G is small against its own terms, so the
                // check widens until it clears the roundoff band
                for (double w = opt.refine_tol; w <= opt.verify_limit; w *= 10.0) {
                    const int left = sign_at(std::max(x_prev, z - w));
                    const int right = sign_at(std::min(x, z + w));
                    if (left != right || left == 0) {
                        out.energies.push_back(z);
                        break;
                    }
                }
            }
            x_prev = x;
            s_prev = sx;
        }
    }
    std::sort(out.energies.begin(), out.energies.end());
    out.energies.erase(std::unique(out.energies.begin(), out.energies.end()), out.energies.end());
    return out;
}

/// The `count` lowest zeros, widening the search window upward from the
/// analytic lower bound of the spectrum.
inline EigenvalueList lowest_zeros(const ModelParams& p, SectorLabel s, std::size_t count,
                                   const ZeroSearchOptions& opt = {}) {
    const double lo = spectrum_lower_bound(p) - 1e-3;
    double width = 4.0;
    while (true) {
        auto z = find_zeros(p, s, lo, lo + width, opt);
        if (z.energies.size() >= count || width > 1e4) {
            if (z.energies.size() > count) z.energies.resize(count);
            return z;
        }
        width *= 2.0;
    }
}

struct NondegeneratePoint {
    double g;
    double x;       // -log10(1 - g/g_c)
    double energy;  // pole energy at g
};

struct CouplingGrid {
    double x_min = 0.5;
    double x_max = 6.0;
    std::size_t points = 400;
};

/// Couplings where a single level meets pole line m without degeneracy: zeros
/// in g of the special G-function at E pinned to E_m^pole(g).
inline std::vector<NondegeneratePoint> find_nondegenerate_points(std::size_t m, const CouplingGrid& grid,
                                                                 double delta, double stark, SectorLabel s,
                                                                 const SeriesOptions& series = {.tol = 1e-14,
                                                                                                .n_max = 2000000,
                                                                                                .quiet_terms = 10},
                                                                 double x_tol = 1e-10) {
    if (grid.points < 2 || !(grid.x_min < grid.x_max)) {
        throw std::invalid_argument("find_nondegenerate_points: bad coupling grid");
    }
    const double gc = critical_coupling(stark);
    const Seed seed = (m == 0) ? Seed::special_zeroth() : Seed::special(m);

    struct Sample {
        int sign;
        int d_sign;  // sign of the normalization denominator
    };
    auto sample = [&](double x) {
        const ModelParams p(delta, stark, coupling_from_log_distance(x, gc));
        const double e = pole_energy(m, s.q, p);
        const detail::Coefficients c(e, p, s.q);
        const auto r = c.at(m);
        const auto v = g_eval(e, p, s, series, seed);
        if (!v.converged) throw NotConverged();
        const double d = (m == 0) ? r.N : r.D;
        return Sample{v.sign, d > 0 ? 1 : -1};
    };

    std::vector<NondegeneratePoint> out;
    const std::size_t N = grid.points;
    double x_prev = grid.x_min;
    Sample s_prev = sample(x_prev);
    for (std::size_t i = 1; i < N; ++i) {
        const double x = grid.x_min + (grid.x_max - grid.x_min) * static_cast<double>(i) / static_cast<double>(N - 1);
        const Sample sx = sample(x);
        // a sign flip of the normalization is a pole in g, not a zero
        if (sx.sign != s_prev.sign && sx.d_sign == s_prev.d_sign && sx.sign != 0 && s_prev.sign != 0) {
            double lo = x_prev, hi = x;
            while (hi - lo > x_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (sample(mid).sign == s_prev.sign) lo = mid; else hi = mid;
            }
            const double xz = 0.5 * (lo + hi);
            const double gz = coupling_from_log_distance(xz, gc);
            out.push_back({gz, xz, pole_energy(m, s.q, ModelParams(delta, stark, gz))});
        }
        x_prev = x;
        s_prev = sx;
    }
    return out;
}

struct CrossingZeros {
    CrossingPoint point;
    double plus;   // G_+ zero next to pole line n, extrapolated to the crossing
    double minus;  // same for G_-
    double offset;
};

/// The G_+ and G_- zeros that run through pole line n as g -> g_cross. At the
/// crossing the zero merges with the removable pole, so each branch is tracked
/// at g_cross (1 - h) and g_cross (1 - 2h) and extrapolated linearly to h = 0.
inline CrossingZeros crossing_zeros(std::size_t n, Bargmann q, double delta, double stark, double h = 1e-7,
                                    const ZeroSearchOptions& opt = {}) {
    const auto cp = crossing_point(n, q, delta, stark);
    if (!(h > 0.0 && h < 0.25)) throw std::invalid_argument("crossing_zeros: offset must lie in (0, 1/4)");
    auto nearest = [&](int parity, double rel) {
        const ModelParams p(delta, stark, cp.g_at_crossing * (1.0 - rel));
        const double pole = pole_energy(n, q, p);
        const double w = std::max(1e-3, 1e3 * rel);
        const auto z = find_zeros(p, SectorLabel(q, parity), pole - w, pole + w, opt);
        if (z.energies.empty()) throw std::runtime_error("crossing_zeros: no zero next to the pole line");
        double best = z.energies.front();
        for (double e : z.energies) {
            if (std::abs(e - pole) < std::abs(best - pole)) best = e;
        }
        return best;
    };
    CrossingZeros out{cp, 0.0, 0.0, h};
    out.plus = 2.0 * nearest(+1, h) - nearest(+1, 2.0 * h);
    out.minus = 2.0 * nearest(-1, h) - nearest(-1, 2.0 * h);
    return out;
}

}  // namespace tprsm::gfunc
