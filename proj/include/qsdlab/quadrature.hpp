#pragma once

// Adaptive Gauss-Kronrod (7-15) panels, in plain and log domain.
//
// The log-domain variant integrates a positive function given by its log,
// accumulating panel sums with log-sum-exp so that integrands like e^{Q}
// never leave the representable range.

#include "qsdlab/logval.hpp"
#include "qsdlab/tolerances.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>
#include <algorithm>
#include <functional>

namespace qsdlab {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Kronrod abscissae on [0,1] side (symmetric) with weights,
// 7-point Gauss weights on the odd-indexed nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelLin {
    double a, b, integral, err;
};

struct PanelLog {
    double a, b;
    double lg_integral, lg_err;
};

template <class F>
inline PanelLin gk15_lin(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        double v;
        if (i == 7) {
            v = f(c);
            fk += kWgk[7] * v;
            fg += kWg[3] * v;
        } else {
            double v1 = f(c - h * kXgk[i]);
            double v2 = f(c + h * kXgk[i]);
            v = v1 + v2;
            fk += kWgk[i] * v;
            if (i % 2 == 1) fg += kWg[i / 2] * v;
        }
    }
    double ik = fk * h, ig = fg * h;
    return {a, b, ik, std::fabs(ik - ig)};
}

template <class LF>
inline PanelLog gk15_log(LF&& lf, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double lh = std::log(h);
    double lk = kNegInf, lg = kNegInf;
    auto add = [&](double w_kron, double w_gauss, double lfx) {
        lk = log_add(lk, std::log(w_kron) + lfx);
        if (w_gauss > 0) lg = log_add(lg, std::log(w_gauss) + lfx);
    };
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            add(kWgk[7], kWg[3], lf(c));
        } else {
            double g = (i % 2 == 1) ? kWg[i / 2] : 0.0;
            add(kWgk[i], g, lf(c - h * kXgk[i]));
            add(kWgk[i], g, lf(c + h * kXgk[i]));
        }
    }
    lk += lh;
    lg += lh;
    double le = (lk >= lg) ? log_sub(lk, lg) : log_sub(lg, lk);
    return {a, b, lk, le};
}

} // namespace detail

// Signed integrand. Throws QuadratureError when the panel budget is exhausted
// before reaching max(abs_tol, rel_tol * |I|).
template <class F>
inline double integrate(F&& f, double a, double b, const Tolerances& tol = {}) {
    if (a == b) return 0.0;
    std::vector<detail::PanelLin> panels{detail::gk15_lin(f, a, b)};
    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].integral;
            err += panels[i].err;
            if (panels[i].err > panels[worst].err) worst = i;
        }
        if (err <= std::max(tol.quad_abs, tol.quad_rel * std::fabs(total))) return total;
        if ((int)panels.size() >= tol.quad_max_panels)
            throw QuadratureError("quadrature did not converge on [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]");
        auto p = panels[worst];
        double m = 0.5 * (p.a + p.b);
        panels[worst] = detail::gk15_lin(f, p.a, m);
        panels.push_back(detail::gk15_lin(f, m, p.b));
    }
}

// Positive integrand given as log f; returns log of the integral.
template <class LF>
inline double integrate_log(LF&& lf, double a, double b, const Tolerances& tol = {}) {
    if (a == b) return kNegInf;
    std::vector<detail::PanelLog> panels{detail::gk15_log(lf, a, b)};
    const double lg_rel = std::log(tol.quad_rel);
    const double lg_abs = tol.quad_abs > 0 ? std::log(tol.quad_abs) : kNegInf;
    for (;;) {
        double lg_total = kNegInf, lg_err = kNegInf;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            lg_total = log_add(lg_total, panels[i].lg_integral);
            lg_err = log_add(lg_err, panels[i].lg_err);
            if (panels[i].lg_err > panels[worst].lg_err) worst = i;
        }
        if (lg_err <= std::max(lg_abs, lg_total + lg_rel)) return lg_total;
        if ((int)panels.size() >= tol.quad_max_panels)
            throw QuadratureError("log-domain quadrature did not converge on [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]");
        auto p = panels[worst];
        double m = 0.5 * (p.a + p.b);
        panels[worst] = detail::gk15_log(lf, p.a, m);
        panels.push_back(detail::gk15_log(lf, m, p.b));
    }
}

// ---------------------------------------------------------------------------
// Improper integrals over [x0, inf) of a positive integrand.

enum class ImpStatus { Converged, Diverged, Undecided };

inline const char* to_string(ImpStatus s) {
    switch (s) {
        case ImpStatus::Converged: return "converged";
        case ImpStatus::Diverged: return "diverged";
        default: return "undecided";
    }
}

struct ImproperLogResult {
    ImpStatus status = ImpStatus::Undecided;
    double lg = kNegInf;                            // log of the value when converged;
                                                    // log of the partial sum otherwise
    double truncation = 0.0;                        // last truncation point reached
    std::vector<std::pair<double, double>> evidence; // (X, log partial integral)

    bool converged() const { return status == ImpStatus::Converged; }
    bool diverged() const { return status == ImpStatus::Diverged; }
    double value() const { return std::exp(lg); }
};

// Truncate at X, double the distance past x0, and classify by the increment
// sequence (see Tolerances for the exact rule).
template <class LF>
inline ImproperLogResult improper_integral_log(LF&& lf, double x0, const Tolerances& tol = {}) {
    ImproperLogResult res;
    double span = 16.0;
    double lo = x0;
    double lg_total = kNegInf;
    double lg_prev_inc = kNegInf;
    double lf_prev = lf(x0 + span);
    double x_prev = x0 + span;
    bool have_prev = false;
    int nondec = 0, shallow = 0;
    for (;;) {
        double hi = x0 + span;
        double lg_inc = integrate_log(lf, lo, hi, tol);
        lg_total = log_add(lg_total, lg_inc);
        res.evidence.emplace_back(hi, lg_total);
        res.truncation = hi;
        res.lg = lg_total;
        if (lg_inc <= lg_total + std::log(tol.improper_rel)) {
            res.status = ImpStatus::Converged;
            return res;
        }
        if (have_prev) {
            nondec = (lg_inc >= lg_prev_inc - 1e-12) ? nondec + 1 : 0;
            // local power exponent of the integrand between truncation points
            double lf_here = lf(hi);
            double p_hat = kPosInf;
            if (std::isfinite(lf_here) && std::isfinite(lf_prev) && hi > 0 && x_prev > 0)
                p_hat = -(lf_here - lf_prev) / (std::log(hi) - std::log(x_prev));
            shallow = (p_hat <= 1.0 + tol.improper_power_margin) ? shallow + 1 : 0;
            lf_prev = lf_here;
            x_prev = hi;
            if ((nondec >= tol.improper_div_runs || shallow >= tol.improper_div_runs) &&
                hi >= tol.improper_div_past) {
                res.status = ImpStatus::Diverged;
                res.lg = kPosInf;
                return res;
            }
        }
        lg_prev_inc = lg_inc;
        have_prev = true;
        if (hi - x0 >= tol.improper_cap) {
            res.status = ImpStatus::Undecided;
            return res;
        }
        lo = hi;
        span *= 2.0;
    }
}

} // namespace qsdlab
