#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "zrp/common.hpp"
#include "zrp/model.hpp"

namespace zrp {

// Certified bound on sum_{n>K} w(n) phi^n. Uses the closed beta-function tail
// for power-law rates at phi=1; otherwise dyadic windows with the single-step
// ratio bounded by its value at each window's right end (g is decreasing).
inline double weight_tail_bound(const ModelSpec& spec, std::span<const double> lw,
                                std::size_t K, double phi) {
    if (phi == 0.0) return 0.0;
    if (spec.is_power_law() && phi == 1.0) {
        if (spec.b <= 1.0) throw NonConvergent("z(1) diverges for lambda=1, b<=1");
        double lt = std::log(spec.b) + std::lgamma(static_cast<double>(K) + 2.0) +
                    std::lgamma(spec.b - 1.0) -
                    std::lgamma(static_cast<double>(K) + 1.0 + spec.b);
        return std::exp(lt);
    }
    double lphi = std::log(phi);
    double lstart = lw[K] + static_cast<double>(K) * lphi;
    double total = 0.0;
    std::size_t M = K;
    for (int j = 0; j < 200; ++j) {
        double lr = lphi - spec.log_g(static_cast<std::int64_t>(2 * M));
        if (lr >= 0.0) throw NonConvergent("tail bound window ratio >= 1");
        double r = std::exp(lr);
        double win = std::exp(lstart + lr) / (1.0 - r);
        total += win;
        if (win < 1e-4 * total || win == 0.0) break;
        lstart += static_cast<double>(M) * lr;
        M *= 2;
    }
    return total;
}

struct Partition {
    double log_z;
    double truncation_bound;  // bound on the omitted tail of the series
    double z() const { return std::exp(log_z); }
};

// z(phi) = sum w(n) phi^n over the stored support, log-domain accumulation.
inline Partition partition(const ModelSpec& spec, std::span<const double> lw,
                           double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("fugacity must be in [0,1]");
    if (spec.is_power_law() && spec.b <= 1.0 && phi == 1.0)
        throw NonConvergent("z(1) diverges for lambda=1, b<=1");
    if (phi == 0.0) return {0.0, 0.0};
    std::size_t K = lw.size() - 1;
    double lphi = std::log(phi);
    double m = neg_inf;
    for (std::size_t n = 0; n <= K; ++n)
        m = std::max(m, lw[n] + static_cast<double>(n) * lphi);
    double s = 0.0;
    for (std::size_t n = 0; n <= K; ++n)
        s += std::exp(lw[n] + static_cast<double>(n) * lphi - m);
    return {m + std::log(s), weight_tail_bound(spec, lw, K, phi)};
}

// R(phi) = sum n w(n) phi^n / z(phi); strictly increasing, R(0)=0.
inline double density(const ModelSpec& spec, std::span<const double> lw, double phi) {
    if (phi == 0.0) return 0.0;
    auto part = partition(spec, lw, phi);
    std::size_t K = lw.size() - 1;
    double lphi = std::log(phi);
    double s = 0.0;
    for (std::size_t n = 1; n <= K; ++n)
        s += static_cast<double>(n) * std::exp(lw[n] + static_cast<double>(n) * lphi - part.log_z);
    return s;
}

// Critical single-site law p_k = w(k)/z(1) with moments and tail prefactor.
struct Marginal {
    ModelSpec spec;
    std::size_t K = 0;          // support cutoff (inclusive)
    std::vector<double> log_w;  // log weights, 0..K
    std::vector<double> log_p;  // log probabilities at phi_c = 1
    std::vector<double> p;      // probabilities (underflows to 0 in far tail)
    double log_z1 = 0.0;        // log z(1)
    double rho_c = 0.0;
    double sigma2 = 0.0;
    double kappa3 = 0.0;  // NaN when the moment diverges (power law b<=4)
    double kappa4 = 0.0;  // NaN when b<=5
    double A_tail = 0.0;  // probability-level tail prefactor; NaN if undefined
    double tail_bound = 0.0;

    double z1() const { return std::exp(log_z1); }
    bool has_A_tail() const { return std::isfinite(A_tail); }
    double a_tail() const {
        if (!has_A_tail())
            throw ConfigError(
                "tail prefactor undefined: stretched rate family with lambda <= 1/2 "
                "does not follow the pure stretched-exponential asymptote");
        return A_tail;
    }

    // tail distribution T(m) = P[eta > m], exact over the stored support
    double log_tail(double m) const;

    nlohmann::json to_json(std::size_t max_p = 4096) const;

    // Test marginals with explicit probabilities (moments recomputed).
    static Marginal from_probabilities(const std::vector<double>& probs);
};

namespace detail {

// Least-squares line a + b*u; returns intercept a.
inline double fit_intercept(std::span<const double> u, std::span<const double> y) {
    double n = static_cast<double>(u.size());
    double su = 0, sy = 0, suu = 0, suy = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sy += y[i];
        suu += u[i] * u[i];
        suy += u[i] * y[i];
    }
    double denom = n * suu - su * su;
    double slope = (n * suy - su * sy) / denom;
    return (sy - slope * su) / n;
}

// Weight-level prefactor from a window [lo,hi]: extrapolates the residual of
// log w against the family's leading correction exponent.
inline double a_weight_window(const ModelSpec& spec, std::span<const double> lw,
                              std::size_t lo, std::size_t hi) {
    std::vector<double> u, y;
    u.reserve(hi - lo + 1);
    y.reserve(hi - lo + 1);
    for (std::size_t n = lo; n <= hi; ++n) {
        double nn = static_cast<double>(n);
        if (spec.is_power_law()) {
            // p-level fit happens on w*n^b directly; corrections O(1/n)
            u.push_back(1.0 / nn);
            y.push_back(std::exp(lw[n] + spec.b * std::log(nn)));
        } else {
            u.push_back(std::pow(nn, 1.0 - 2.0 * spec.lambda));
            y.push_back(lw[n] + spec.b / (1.0 - spec.lambda) *
                                    std::pow(nn, 1.0 - spec.lambda));
        }
    }
    double ic = fit_intercept(u, y);
    return spec.is_power_law() ? ic : std::exp(ic);
}

}  // namespace detail

// Weight-level tail prefactor A_w with w(n) ~ A_w n^{-b} (power law) or
// A_w exp(-(b/(1-lambda)) n^{1-lambda}) (stretched). Richardson-style fit on
// the last decade of support; undefined for stretched rates with lambda<=1/2.
inline std::optional<double> weight_prefactor(const ModelSpec& spec,
                                              std::span<const double> lw) {
    if (spec.family == Family::ExplicitStretchedWeights) return 1.0;
    if (spec.family == Family::StretchedRates && spec.lambda <= 0.5)
        return std::nullopt;
    std::size_t K = lw.size() - 1;
    return detail::a_weight_window(spec, lw, K / 2, K);
}

inline double Marginal::log_tail(double m) const {
    if (m < 0.0) return 0.0;
    auto i = static_cast<std::size_t>(m);
    if (i >= K) return neg_inf;
    // exact integer tails, log-linear interpolation in between
    auto tail_from = [&](std::size_t j) {
        std::vector<double> xs(log_p.begin() + static_cast<std::ptrdiff_t>(j),
                               log_p.end());
        return log_sum(xs);
    };
    double t0 = tail_from(i + 1);  // P[eta > i]
    double f = m - static_cast<double>(i);
    if (f == 0.0) return t0;
    double t1 = i + 2 <= K ? tail_from(i + 2) : neg_inf;
    if (t1 == neg_inf) return t0;
    return t0 * (1.0 - f) + t1 * f;
}

struct MarginalOptions {
    std::size_t min_support = 0;   // extend support at least this far
    std::size_t initial_K = 256;
    std::size_t max_K = 1u << 26;
};

// Build the critical marginal: adaptive support growth until the certified
// tail-mass bound drops below the cutoff policy, then moments and prefactor.
inline Marginal critical_stats(const ModelSpec& spec, MarginalOptions opt = {}) {
    spec.validate();
    if (spec.is_power_law() && spec.b <= 3.0)
        throw InfiniteVariance("power-law statistics require b > 3");

    std::size_t K = std::max(opt.initial_K, std::size_t{16});
    std::vector<double> lw;
    double tb = 0.0;
    for (;;) {
        lw = build_weights(spec, K);
        tb = weight_tail_bound(spec, lw, K, 1.0);
        if (tb < spec.cutoff_policy || K >= opt.max_K) break;
        K *= 2;
    }
    if (tb >= spec.cutoff_policy)
        throw ResourceBudget("support cutoff exceeds max_K");
    if (opt.min_support > K) {
        K = opt.min_support;
        lw = build_weights(spec, K);
    }

    Marginal m;
    m.spec = spec;
    m.K = K;
    m.tail_bound = tb;
    auto part = partition(spec, lw, 1.0);
    m.log_z1 = part.log_z;
    m.log_w = std::move(lw);
    m.log_p.resize(K + 1);
    m.p.resize(K + 1);
    for (std::size_t n = 0; n <= K; ++n) {
        m.log_p[n] = m.log_w[n] - m.log_z1;
        m.p[n] = std::exp(m.log_p[n]);
    }
    double ex = 0, ex2 = 0;
    for (std::size_t n = 1; n <= K; ++n) {
        double nn = static_cast<double>(n);
        ex += nn * m.p[n];
        ex2 += nn * nn * m.p[n];
    }
    m.rho_c = ex;
    m.sigma2 = ex2 - ex * ex;
    double c3 = 0, c4 = 0;
    for (std::size_t n = 0; n <= K; ++n) {
        double d = static_cast<double>(n) - m.rho_c;
        c3 += d * d * d * m.p[n];
        c4 += d * d * d * d * m.p[n];
    }
    bool fin3 = !spec.is_power_law() || spec.b > 4.0;
    bool fin4 = !spec.is_power_law() || spec.b > 5.0;
    m.kappa3 = fin3 ? c3 : std::numeric_limits<double>::quiet_NaN();
    m.kappa4 = fin4 ? c4 - 3.0 * m.sigma2 * m.sigma2
                    : std::numeric_limits<double>::quiet_NaN();

    // prefactor fit on an extended window so slow 1/n^{2 lambda - 1} corrections
    // are resolved even when K itself is small
    if (spec.family == Family::StretchedRates && spec.lambda <= 0.5) {
        m.A_tail = std::numeric_limits<double>::quiet_NaN();
    } else if (spec.family == Family::ExplicitStretchedWeights) {
        m.A_tail = std::exp(-m.log_z1);
    } else {
        std::size_t Kf = std::max<std::size_t>(K, 4096);
        std::vector<double> lwf =
            Kf == K ? m.log_w : build_weights(spec, Kf);
        auto aw = weight_prefactor(spec, lwf);
        m.A_tail = aw ? *aw * std::exp(-m.log_z1)
                      : std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

// Unique phi with R(phi) = rho, bisection on [0,1].
inline double solve_fugacity(const Marginal& m, double rho) {
    if (rho < 0.0) throw ConfigError("density must be nonnegative");
    if (rho > m.rho_c * (1.0 + 1e-12))
        throw Supercritical("no fugacity: density above rho_c");
    if (rho == 0.0) return 0.0;
    if (rho >= m.rho_c) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (density(m.spec, m.log_w, mid) < rho)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

inline nlohmann::json Marginal::to_json(std::size_t max_p) const {
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    j["b"] = spec.b;
    j["lambda"] = spec.lambda;
    j["K"] = K;
    j["rho_c"] = rho_c;
    j["sigma2"] = sigma2;
    j["kappa3"] = kappa3;
    j["A_tail"] = A_tail;
    std::size_t n = std::min(max_p, K + 1);
    j["p"] = std::vector<double>(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
    return j;
}

inline Marginal Marginal::from_probabilities(const std::vector<double>& probs) {
    Marginal m;
    double s = 0.0;
    for (double x : probs) s += x;
    m.K = probs.size() - 1;
    m.p.resize(probs.size());
    m.log_p.resize(probs.size());
    m.log_w.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        m.p[i] = probs[i] / s;
        m.log_p[i] = m.p[i] > 0.0 ? std::log(m.p[i]) : neg_inf;
        m.log_w[i] = m.log_p[i] - (probs[0] > 0.0 ? std::log(probs[0] / s) : 0.0);
    }
    m.log_z1 = -(m.p[0] > 0.0 ? std::log(m.p[0]) : 0.0);
    double ex = 0, ex2 = 0;
    for (std::size_t n = 0; n < probs.size(); ++n) {
        double nn = static_cast<double>(n);
        ex += nn * m.p[n];
        ex2 += nn * nn * m.p[n];
    }
    m.rho_c = ex;
    m.sigma2 = ex2 - ex * ex;
    double c3 = 0, c4 = 0;
    for (std::size_t n = 0; n < probs.size(); ++n) {
        double d = static_cast<double>(n) - m.rho_c;
        c3 += d * d * d * m.p[n];
        c4 += d * d * d * d * m.p[n];
    }
    m.kappa3 = c3;
    m.kappa4 = c4 - 3.0 * m.sigma2 * m.sigma2;
    m.A_tail = std::numeric_limits<double>::quiet_NaN();
    m.spec.family = Family::ExplicitStretchedWeights;
    return m;
}

}  // namespace zrp
