#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "zrp/common.hpp"
#include "zrp/marginal.hpp"

namespace zrp {

// Exponentially tilted, truncated single-site law: p_k e^{sk} / Z for k <= cap.
struct TiltedMarginal {
    std::size_t cap = 0;   // per-site cap (== support end if uncapped)
    bool capped = false;
    double s = 0.0;
    double log_Z = 0.0;
    double rho = 0.0;      // mean under the tilt
    double sigma2 = 0.0;   // variance under the tilt
    std::vector<double> probs;  // normalized, 0..cap

    double Z() const { return std::exp(log_Z); }
};

namespace detail {

struct TiltMoments {
    double log_Z, rho, sigma2;
};

inline TiltMoments tilt_moments(std::span<const double> log_p, std::size_t cap,
                                double s) {
    cap = std::min(cap, log_p.size() - 1);
    double m = neg_inf;
    for (std::size_t k = 0; k <= cap; ++k)
        m = std::max(m, log_p[k] + s * static_cast<double>(k));
    double z = 0, zk = 0, zk2 = 0;
    for (std::size_t k = 0; k <= cap; ++k) {
        if (log_p[k] == neg_inf) continue;
        double w = std::exp(log_p[k] + s * static_cast<double>(k) - m);
        double kk = static_cast<double>(k);
        z += w;
        zk += kk * w;
        zk2 += kk * kk * w;
    }
    double rho = zk / z;
    return {m + std::log(z), rho, zk2 / z - rho * rho};
}

}  // namespace detail

// Tilt parameter s_* with rho_cap(s_*) = target mean. Newton with bisection
// safeguard; Unreachable when the target is outside the attainable range.
inline TiltedMarginal solve_tilt(const Marginal& marg, std::size_t cap,
                                 double target_mean, double tol = 1e-10) {
    std::size_t a = std::min(cap, marg.K);
    std::size_t lo_supp = 0;
    while (lo_supp <= a && marg.log_p[lo_supp] == neg_inf) ++lo_supp;
    std::size_t hi_supp = a;
    while (hi_supp > 0 && marg.log_p[hi_supp] == neg_inf) --hi_supp;
    if (target_mean <= static_cast<double>(lo_supp) ||
        target_mean >= static_cast<double>(hi_supp))
        throw Unreachable("tilt target mean outside attainable range");

    auto mean_at = [&](double s) { return detail::tilt_moments(marg.log_p, a, s).rho; };
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (mean_at(hi) < target_mean) {
        hi *= 2.0;
        if (++guard > 80) throw Unreachable("tilt bracket expansion failed (high)");
    }
    guard = 0;
    while (mean_at(lo) > target_mean) {
        lo *= 2.0;
        if (++guard > 80) throw Unreachable("tilt bracket expansion failed (low)");
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        auto mm = detail::tilt_moments(marg.log_p, a, s);
        double err = mm.rho - target_mean;
        if (std::fabs(err) < tol) break;
        if (err > 0.0)
            hi = s;
        else
            lo = s;
        double step = mm.sigma2 > 1e-14 ? s - err / mm.sigma2 : 0.5 * (lo + hi);
        s = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    auto mm = detail::tilt_moments(marg.log_p, a, s);
    TiltedMarginal t;
    t.cap = a;
    t.capped = cap <= marg.K;
    t.s = s;
    t.log_Z = mm.log_Z;
    t.rho = mm.rho;
    t.sigma2 = mm.sigma2;
    t.probs.resize(a + 1, 0.0);
    for (std::size_t k = 0; k <= a; ++k)
        if (marg.log_p[k] != neg_inf)
            t.probs[k] = std::exp(marg.log_p[k] + s * static_cast<double>(k) - mm.log_Z);
    return t;
}

// Tilted local-CLT estimate of log P[S_L = N, all sites <= cap]. The tilt is
// solved to put the mean exactly at N/L, where the lattice LLT error is O(1/L).
inline double tilted_llt(const Marginal& marg, std::size_t cap, std::size_t L,
                         std::int64_t N) {
    if (N < 0) return neg_inf;
    double target = static_cast<double>(N) / static_cast<double>(L);
    std::size_t a = std::min(cap, marg.K);
    std::size_t lo_supp = 0;
    while (lo_supp <= a && marg.log_p[lo_supp] == neg_inf) ++lo_supp;
    std::size_t hi_supp = a;
    while (hi_supp > 0 && marg.log_p[hi_supp] == neg_inf) --hi_supp;
    if (target <= static_cast<double>(lo_supp) + 1e-12 ||
        target >= static_cast<double>(hi_supp) - 1e-12)
        return neg_inf;  // boundary-degenerate; treated as negligible mass
    TiltedMarginal t;
    try {
        t = solve_tilt(marg, cap, target);
    } catch (const Unreachable&) {
        return neg_inf;
    }
    if (t.sigma2 < 1e-12) return neg_inf;
    return static_cast<double>(L) * t.log_Z - t.s * static_cast<double>(N) -
           0.5 * std::log(2.0 * M_PI * static_cast<double>(L) * t.sigma2);
}

}  // namespace zrp
