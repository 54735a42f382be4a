#pragma once

#include <cstdint>

namespace qsdlab {

// Every numeric threshold used by the library, with its default pinned here.
// CLI configs may override individual fields (see config.hpp).
struct Tolerances {
    // adaptive Gauss-Kronrod quadrature
    double quad_abs = 1e-12;
    double quad_rel = 1e-10;
    int    quad_max_panels = 4000;

    // improper integrals: truncate at X, double the truncation distance.
    // Convergent when the last increment drops below improper_rel of the
    // running total; divergent when increments are nondecreasing for
    // improper_div_runs consecutive doublings past improper_div_past;
    // undecided at improper_cap.
    double improper_rel = 1e-10;
    int    improper_div_runs = 4;
    double improper_div_past = 1024.0;   // 2^10
    double improper_cap = 16384.0;       // 2^14
    // Also divergent when the integrand's local power exponent stays at or
    // below 1 + margin (integrals of y^{-p} with p <= 1 diverge; increments
    // of log-divergent integrals decrease toward a constant and would slip
    // past the nondecreasing rule).
    double improper_power_margin = 0.05;

    // delta = sup_x Lambda(x) * 2 * mu([x,inf)) maximization
    int    delta_grid = 256;
    double delta_stable_rel = 1e-10;

    // eigenfunction shooting
    double ode_rtol = 1e-10;
    double ode_atol = 1e-13;
    double rescale_threshold = 1e10;
    double zero_touch_rel = 1e-14;   // |eta| below this times the envelope counts as a zero
    double zero_loc_abs = 1e-9;      // sign-change location refinement
    double horizon_start = 16.0;
    double horizon_cap = 4096.0;     // 2^12
    double bisect_rel = 1e-6;
    double bracket_margin = 0.10;

    // QSD construction
    double defect_tol = 1e-6;        // normalization defect bound
    double tail_error_target = 1e-7; // absolute error target for the tail completion
    double support_cap = 8192.0;
    double dense_dx = 0.02;          // grid floor in the bulk of the support

    // drift validation
    double x_cap = 50.0;
    double smooth_jump_ratio = 100.0;

    // R-positivity criterion ladder
    double criterion_ratio = 1e-6;   // "limit is zero" when product < ratio * peak
    double plateau_rel = 1e-3;       // plateau when relative change stays below this
    int    plateau_runs = 3;
    double criterion_cap = 4096.0;

    // Monte Carlo
    double ks_alpha = 0.01;
    int    bootstrap_samples = 200;
    double clamp_rate_limit = 1e-3;  // conditioned-simulation step clamps
};

} // namespace qsdlab
