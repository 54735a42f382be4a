#pragma once

// Scale and speed machinery for the killed diffusion dX = dB - q(X)dt:
//
//   Q(y)      = int_0^y 2 q
//   Lambda(x) = int_0^x e^{Q}          (scale function, log-domain)
//   mu tail   = int_x^inf e^{-Q}       (speed measure tail)
//   delta     = sup_x Lambda(x) * 2 * mu([x,inf))
//   S         = int_0^inf e^{Q(y)} mu([y,inf)) dy
//
// plus the boundary classification report assembled from them.

#include "qsdlab/drift.hpp"
#include "qsdlab/quadrature.hpp"
#include "qsdlab/tolerances.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qsdlab {

enum class Verdict { Holds, Fails, Undecided };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        default: return "undecided";
    }
}

// Finite / infinite / undecided scalar produced by a truncation heuristic.
struct ExtendedValue {
    ImpStatus status = ImpStatus::Undecided;
    double lg = kNegInf;   // log of the value when finite
    std::vector<std::pair<double, double>> evidence;

    bool finite() const { return status == ImpStatus::Converged; }
    bool infinite() const { return status == ImpStatus::Diverged; }
    double value() const { return infinite() ? kPosInf : std::exp(lg); }
};

struct ClassificationReport {
    Verdict h1 = Verdict::Undecided;   // Lambda(inf) = inf
    Verdict h2 = Verdict::Undecided;   // S = inf
    std::vector<std::pair<double, double>> h1_evidence;  // (X, log partial Lambda)
    std::vector<std::pair<double, double>> h2_evidence;  // (X, log partial S)
    ExtendedValue delta;
    ExtendedValue mu_total;
    double delta_argmax = 0.0;
    bool regular_at_zero = false;
    double lg_int_exp_q = kNegInf;    // log int_0^1 e^{Q}
    double lg_int_exp_mq = kNegInf;   // log int_0^1 e^{-Q}
    bool consistent = true;           // delta finite => mu_total finite

    bool hypothesis_h() const { return h1 == Verdict::Holds && h2 == Verdict::Holds; }
    bool any_undecided() const {
        return h1 == Verdict::Undecided || h2 == Verdict::Undecided ||
               delta.status == ImpStatus::Undecided || mu_total.status == ImpStatus::Undecided;
    }
};

// Lazily extended piecewise table of Q with per-call tail quadrature inside
// the final panel. Thread-safe; evaluation is pure.
class CachedQ {
public:
    CachedQ(const DriftSpec& spec, const Tolerances& tol) : spec_(spec), tol_(tol) {
        bounds_ = {0.0};
        cum_ = {0.0};
    }

    double operator()(double x) const {
        if (x == 0.0) return 0.0;
        if (x < 0.0) throw DriftEvalError("Q requires x >= 0");
        std::scoped_lock lock(mutex_);
        extend(x);
        auto it = std::upper_bound(bounds_.begin(), bounds_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - bounds_.begin()) - 1;
        if (bounds_[i] == x) return cum_[i];
        return cum_[i] + integrate([this](double y) { return 2.0 * spec_(y); },
                                   bounds_[i], x, tol_);
    }

private:
    void extend(double x) const {
        while (bounds_.back() < x) {
            double b = bounds_.back();
            double w = std::clamp(b / 8.0, 0.5, 512.0);
            double seg = integrate([this](double y) { return 2.0 * spec_(y); }, b, b + w, tol_);
            bounds_.push_back(b + w);
            cum_.push_back(cum_.back() + seg);
        }
    }

    const DriftSpec& spec_;
    Tolerances tol_;
    mutable std::mutex mutex_;
    mutable std::vector<double> bounds_;
    mutable std::vector<double> cum_;
};

class Measures {
public:
    explicit Measures(const DriftSpec& spec, const Tolerances& tol = {})
        : spec_(spec), tol_(tol), q_(spec_, tol) {}

    const DriftSpec& spec() const { return spec_; }
    const Tolerances& tolerances() const { return tol_; }

    // Q(x) = int_0^x 2q; Q(0) = 0 exactly.
    double big_q(double x) const { return q_(x); }

    // log Lambda(x); Lambda(0) = 0 maps to the -inf sentinel.
    double log_scale(double x) const {
        if (x == 0.0) return kNegInf;
        if (x < 0.0) throw DriftEvalError("scale function requires x >= 0");
        return integrate_log([this](double y) { return q_(y); }, 0.0, x, tol_);
    }

    // mu([x, inf)) = int_x^inf e^{-Q}.
    ImproperLogResult mu_tail(double x) const {
        if (x < 0.0) throw DriftEvalError("mu tail requires x >= 0");
        return improper_integral_log([this](double z) { return -q_(z); }, x, tol_);
    }

    // delta = sup_{x>0} Lambda(x) * 2 * mu([x, inf)), Eq-level existence constant.
    ExtendedValue delta_sup(double* argmax_out = nullptr) const {
        ExtendedValue out;
        ImproperLogResult t0 = mu_tail(0.0);
        if (t0.status != ImpStatus::Converged) {
            out.status = t0.status;
            out.evidence = t0.evidence;
            if (argmax_out) *argmax_out = 0.0;
            return out;
        }

        auto lg_product = [this](double x) {
            ImproperLogResult t = mu_tail(x);
            if (t.status != ImpStatus::Converged) return kPosInf;  // cannot happen once t0 converges
            return log_scale(x) + std::log(2.0) + t.lg;
        };

        double X = 16.0;
        double prev_sup = kNegInf;
        double prev_inc = kNegInf;
        int stable = 0, nondec = 0;
        double best_x = 0.0;
        for (;;) {
            double lo = std::min(0.25, X / 4096.0);
            double sup = kNegInf;
            int n = tol_.delta_grid;
            double ratio = std::log(X / lo) / (n - 1);
            for (int i = 0; i < n; ++i) {
                double x = lo * std::exp(ratio * i);
                double v = lg_product(x);
                if (v > sup) {
                    sup = v;
                    best_x = x;
                }
            }
            // golden-section polish around the best grid point (log-x space)
            {
                double la = std::log(std::max(lo, best_x * std::exp(-ratio)));
                double lb = std::log(std::min(X, best_x * std::exp(ratio)));
                const double gr = 0.618033988749894848;
                double c1 = lb - gr * (lb - la), c2 = la + gr * (lb - la);
                double f1 = lg_product(std::exp(c1)), f2 = lg_product(std::exp(c2));
                for (int it = 0; it < 60 && lb - la > 1e-12; ++it) {
                    if (f1 < f2) {
                        la = c1; c1 = c2; f1 = f2;
                        c2 = la + gr * (lb - la);
                        f2 = lg_product(std::exp(c2));
                    } else {
                        lb = c2; c2 = c1; f2 = f1;
                        c1 = lb - gr * (lb - la);
                        f1 = lg_product(std::exp(c1));
                    }
                }
                double xm = std::exp(0.5 * (la + lb));
                double fm = lg_product(xm);
                if (fm > sup) {
                    sup = fm;
                    best_x = xm;
                }
            }
            out.evidence.emplace_back(X, sup);
            out.lg = sup;

            double inc = sup - prev_sup;
            if (prev_sup != kNegInf) {
                stable = (std::fabs(inc) <= tol_.delta_stable_rel) ? stable + 1 : 0;
                if (stable >= 2) {
                    out.status = ImpStatus::Converged;
                    break;
                }
                nondec = (inc >= prev_inc - 1e-12 && inc > 0) ? nondec + 1 : 0;
                if (nondec >= tol_.improper_div_runs && X >= tol_.improper_div_past) {
                    out.status = ImpStatus::Diverged;
                    out.lg = kPosInf;
                    break;
                }
                prev_inc = inc;
            }
            prev_sup = sup;
            if (X >= tol_.improper_cap) {
                out.status = ImpStatus::Undecided;
                break;
            }
            X *= 2.0;
        }
        if (argmax_out) *argmax_out = best_x;
        return out;
    }

    // S = int_0^inf e^{Q(y)} mu([y,inf)) dy; divergence of S is hypothesis (H2).
    ExtendedValue s_integral() const {
        ExtendedValue out;
        ImproperLogResult t0 = mu_tail(0.0);
        if (t0.status == ImpStatus::Diverged) {
            // inner tail infinite for every y, so S is trivially infinite
            out.status = ImpStatus::Diverged;
            out.lg = kPosInf;
            out.evidence = t0.evidence;
            return out;
        }
        if (t0.status == ImpStatus::Undecided) {
            out.status = ImpStatus::Undecided;
            out.evidence = t0.evidence;
            return out;
        }
        auto lg_integrand = [this](double y) {
            ImproperLogResult t = mu_tail(y);
            return q_(y) + t.lg;
        };
        ImproperLogResult s = improper_integral_log(lg_integrand, 0.0, tol_);
        out.status = s.status;
        out.lg = s.diverged() ? kPosInf : s.lg;
        out.evidence = s.evidence;
        return out;
    }

    // Divergence probe for Lambda(inf); hypothesis (H1).
    ImproperLogResult scale_divergence() const {
        return improper_integral_log([this](double y) { return q_(y); }, 0.0, tol_);
    }

    ClassificationReport classify() const {
        ClassificationReport rep;

        ImproperLogResult lam = scale_divergence();
        rep.h1_evidence = lam.evidence;
        rep.h1 = lam.diverged() ? Verdict::Holds
                                : (lam.converged() ? Verdict::Fails : Verdict::Undecided);

        ExtendedValue s = s_integral();
        rep.h2_evidence = s.evidence;
        rep.h2 = s.infinite() ? Verdict::Holds
                              : (s.finite() ? Verdict::Fails : Verdict::Undecided);

        rep.delta = delta_sup(&rep.delta_argmax);

        ImproperLogResult mt = mu_tail(0.0);
        rep.mu_total.status = mt.status;
        rep.mu_total.lg = mt.diverged() ? kPosInf : mt.lg;
        rep.mu_total.evidence = mt.evidence;

        rep.lg_int_exp_q = integrate_log([this](double y) { return q_(y); }, 0.0, 1.0, tol_);
        rep.lg_int_exp_mq = integrate_log([this](double y) { return -q_(y); }, 0.0, 1.0, tol_);
        rep.regular_at_zero = std::isfinite(rep.lg_int_exp_q) && std::isfinite(rep.lg_int_exp_mq);

        rep.consistent = !(rep.delta.finite() && rep.mu_total.infinite());
        return rep;
    }

private:
    DriftSpec spec_;
    Tolerances tol_;
    CachedQ q_;
};

// Free-function forms of the per-operation contracts.
inline double big_q(const DriftSpec& spec, double x, const Tolerances& tol = {}) {
    return Measures(spec, tol).big_q(x);
}
inline double scale_function_log(const DriftSpec& spec, double x, const Tolerances& tol = {}) {
    return Measures(spec, tol).log_scale(x);
}
inline ImproperLogResult mu_tail(const DriftSpec& spec, double x, const Tolerances& tol = {}) {
    return Measures(spec, tol).mu_tail(x);
}
inline ExtendedValue delta_sup(const DriftSpec& spec, const Tolerances& tol = {}) {
    return Measures(spec, tol).delta_sup();
}
inline ExtendedValue s_integral(const DriftSpec& spec, const Tolerances& tol = {}) {
    return Measures(spec, tol).s_integral();
}
inline ClassificationReport classify_boundaries(const DriftSpec& spec, const Tolerances& tol = {}) {
    return Measures(spec, tol).classify();
}

} // namespace qsdlab
