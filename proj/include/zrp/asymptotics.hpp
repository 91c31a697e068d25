#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zrp/common.hpp"
#include "zrp/marginal.hpp"
#include "zrp/tilted.hpp"

namespace zrp {

// c_lambda = (1+lambda) (2 lambda)^{-lambda/(1+lambda)} (b/(1-lambda))^{1/(1+lambda)}
inline double c_lambda(double lambda, double b) {
    if (!(lambda > 0.0 && lambda < 1.0) || b <= 0.0)
        throw ConfigError("c_lambda requires lambda in (0,1), b > 0");
    return (1.0 + lambda) * std::pow(2.0 * lambda, -lambda / (1.0 + lambda)) *
           std::pow(b / (1.0 - lambda), 1.0 / (1.0 + lambda));
}

// Critical excess-mass scale Delta_L.
inline double critical_scale(const Marginal& m, std::size_t L) {
    double Ld = static_cast<double>(L);
    if (m.spec.is_power_law()) {
        if (m.spec.b <= 3.0) throw InfiniteVariance("Delta_L requires b > 3");
        return std::sqrt(m.sigma2) * std::sqrt((m.spec.b - 3.0) * Ld * std::log(Ld));
    }
    return c_lambda(m.spec.lambda, m.spec.b) *
           std::pow(m.sigma2 * Ld, 1.0 / (1.0 + m.spec.lambda));
}

// Cramer truncation order t = floor(1/lambda) - 1 (empty series for lambda > 1/2).
inline int cramer_order(double lambda) {
    return static_cast<int>(std::floor(1.0 / lambda + 1e-12)) - 1;
}

// First Cramer coefficients; only lambda_0 = kappa3 / (6 sigma^6) is built in.
inline std::vector<double> cramer_series(const Marginal& m, int order) {
    if (order <= 0) return {};
    if (order >= 2)
        throw UnsupportedCramer("coefficients beyond lambda_0 must be user-supplied");
    if (!std::isfinite(m.kappa3))
        throw UnsupportedCramer("lambda_0 needs a finite third cumulant");
    double s6 = m.sigma2 * m.sigma2 * m.sigma2;
    return {m.kappa3 / (6.0 * s6)};
}

inline double cramer_poly(std::span<const double> coef, double z) {
    double v = 0.0;
    for (std::size_t j = coef.size(); j-- > 0;) v = coef[j] + z * v;
    return v;
}

// ------------------------------------------------------------ alpha roots

// a(t): 1 - alpha where alpha is the smallest root of alpha(1-alpha)^lambda
// = b / t^{1+lambda}, taken on the increasing branch alpha < 1/(1+lambda).
inline double alpha_of_t(double lambda, double b, double t) {
    double rhs = b / std::pow(t, 1.0 + lambda);
    double amax = 1.0 / (1.0 + lambda);
    double fmax = amax * std::pow(1.0 - amax, lambda);
    if (rhs > fmax)
        throw NoRoot("no condensate fraction root: t below existence threshold");
    double lo = 0.0, hi = amax;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid * std::pow(1.0 - mid, lambda) < rhs)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double a_of_t(double lambda, double b, double t) {
    return 1.0 - alpha_of_t(lambda, b, t);
}

// Finite-L root including the R_lambda correction for lambda in (1/3, 1/2].
inline double alpha_root(const Marginal& m, std::size_t L, double k,
                         std::span<const double> cramer = {}) {
    double lambda = m.spec.lambda, b = m.spec.b;
    double s2L = m.sigma2 * static_cast<double>(L);
    double target = s2L / std::pow(k, 1.0 + lambda);
    auto Rl = [&](double x) {
        double r = 0.0;
        for (std::size_t j = 0; j < cramer.size(); ++j)
            r += cramer[j] * static_cast<double>(j + 3) * std::pow(x, static_cast<double>(j + 1));
        return m.sigma2 * r;
    };
    double amax = 1.0 / (1.0 + lambda);
    auto f = [&](double al) {
        return al * std::pow(1.0 - al, lambda) *
               (1.0 - Rl(al * k / static_cast<double>(L))) / b;
    };
    if (f(amax) < target) throw NoRoot("no root of the condensate-fraction equation");
    double lo = 0.0, hi = amax;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------- phase mixtures

// Limit Bernoulli parameter on the power-law critical scale; p = P[condensed].
inline double p_gamma_powerlaw(const Marginal& m, double gamma) {
    double b = m.spec.b;
    if (!m.spec.is_power_law() || b <= 3.0)
        throw ConfigError("p_gamma_powerlaw requires lambda=1, b>3");
    double ell = std::pow(std::sqrt(m.sigma2), b - 1.0) * std::pow(b - 3.0, b / 2.0) *
                 std::exp(-(b - 3.0) * gamma) /
                 (std::sqrt(2.0 * M_PI) * m.a_tail());
    return 1.0 / (1.0 + ell);
}

// Stretched-exponential analogue. ell_gamma is the fluid/condensate weight
// ratio, increasing in gamma (larger gamma means smaller N on the sub-leading
// scale), so P[condensed] = 1/(1+ell) tends to 1 as gamma -> -infinity.
inline double p_gamma_stretched(const Marginal& m, double gamma) {
    double lambda = m.spec.lambda;
    if (m.spec.is_power_law())
        throw ConfigError("p_gamma_stretched requires lambda < 1");
    double ell = std::sqrt(1.0 + lambda) * std::exp(gamma) /
                 (2.0 * m.a_tail() * std::sqrt(M_PI * m.sigma2));
    return 1.0 / (1.0 + ell);
}

// ------------------------------------------------- two-channel estimator

// Finite-L decomposition of P[S_L = N] by the maximum: a tilted-LLT fluid
// channel (all sites <= thr) plus a single-big-site channel summed exactly
// over the condensate occupation. Near-exact at desk scale; the component
// ratio converges to the limit ratios ell_gamma.
struct TwoChannel {
    double log_fluid = neg_inf;
    double log_cond = neg_inf;
    double log_total() const { return log_add(log_fluid, log_cond); }
    double p_condensed() const {
        return 1.0 / (1.0 + std::exp(log_fluid - log_cond));
    }
};

inline TwoChannel two_channel_estimate(const Marginal& m, std::size_t L,
                                       std::int64_t N, std::size_t thr) {
    if (static_cast<std::size_t>(N) > m.K)
        throw ConfigError("marginal support smaller than N; rebuild with min_support");
    TwoChannel r;
    r.log_fluid = tilted_llt(m, thr, L, N);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(N) - thr);
    for (std::size_t mm = thr + 1; mm <= static_cast<std::size_t>(N); ++mm) {
        if (m.log_p[mm] == neg_inf) continue;
        double lb = L > 1 ? tilted_llt(m, thr, L - 1, N - static_cast<std::int64_t>(mm))
                          : (static_cast<std::int64_t>(mm) == N ? 0.0 : neg_inf);
        if (lb == neg_inf) continue;
        terms.push_back(m.log_p[mm] + lb);
    }
    r.log_cond = log_sum(terms) + std::log(static_cast<double>(L));
    return r;
}

// Finite-L condensed-phase probability at the critical scale.
inline double p_condensed_finite(const Marginal& m, std::size_t L, std::int64_t N,
                                 std::size_t thr) {
    return two_channel_estimate(m, L, N, thr).p_condensed();
}

// ------------------------------------------------------------ regimes

enum class CaseLabel {
    PLa, PLb, PLc, PLdownA, PLdownB, PLdownC, SEa, SEb, SEc, SEdown
};

inline std::string case_name(CaseLabel c) {
    switch (c) {
        case CaseLabel::PLa: return "PL-a";
        case CaseLabel::PLb: return "PL-b";
        case CaseLabel::PLc: return "PL-c";
        case CaseLabel::PLdownA: return "PL-down-a";
        case CaseLabel::PLdownB: return "PL-down-b";
        case CaseLabel::PLdownC: return "PL-down-c";
        case CaseLabel::SEa: return "SE-a";
        case CaseLabel::SEb: return "SE-b";
        case CaseLabel::SEc: return "SE-c";
        case CaseLabel::SEdown: return "SE-down";
    }
    return "?";
}

struct RegimeThresholds {
    double gamma_ab = 3.0;        // |gamma_L| beyond which PL side is a/b
    double delta_factor = 0.1;    // delta = delta_factor * c_lambda
    double theta_mult = 1.0;      // theta_L = theta_mult * log log L
    double omega_lo = 0.5;        // PL downside case boundaries on omega_L
    double omega_hi = 2.0;
};

struct AsymptoticParams {
    const Marginal* marginal = nullptr;
    RegimeThresholds thresholds;
    std::vector<double> cramer;  // user-supplied coefficients, else built-in order

    double clambda() const {
        return c_lambda(marginal->spec.lambda, marginal->spec.b);
    }
    double delta() const { return thresholds.delta_factor * clambda(); }
    double theta_L(std::size_t L) const {
        return thresholds.theta_mult * std::log(std::log(static_cast<double>(L)));
    }
    std::vector<double> cramer_coeffs() const {
        if (!cramer.empty()) return cramer;
        int t = cramer_order(marginal->spec.lambda);
        if (t >= 2)
            throw UnsupportedCramer(
                "lambda <= 1/3 needs user-supplied Cramer coefficients");
        return cramer_series(*marginal, t);
    }
};

struct Normings {
    std::optional<double> y_L, b_L;   // Gumbel centering/scale (subcritical tails)
    std::optional<double> B_L, s_L;   // power-law downside Gumbel pair
    std::optional<double> frechet_scale;  // L^{1/(b-1)} in the Frechet regimes
};

struct RegimeReport {
    std::size_t L = 0;
    std::int64_t N = 0;
    double k = 0.0;  // N - rho_c L, real-valued
    bool upside = true;
    CaseLabel label = CaseLabel::SEa;
    double delta_L = 0.0;
    std::optional<double> gamma_L, t_L, omega_L;
    std::optional<double> p_gamma, alpha, a_L, a_t;
    Normings normings;
    bool near_boundary = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["L"] = L;
        j["N"] = N;
        j["k"] = k;
        j["side"] = upside ? "upside" : "downside";
        j["case"] = case_name(label);
        j["delta_L"] = delta_L;
        auto put = [&](const char* key, const std::optional<double>& v) {
            if (v) j[key] = *v; else j[key] = nullptr;
        };
        put("gamma_L", gamma_L);
        put("t_L", t_L);
        put("omega_L", omega_L);
        put("p_gamma", p_gamma);
        put("alpha", alpha);
        put("a_L", a_L);
        put("a_t", a_t);
        nlohmann::json nm;
        auto put_nm = [&](const char* key, const std::optional<double>& v) {
            if (v) nm[key] = *v;
        };
        put_nm("y_L", normings.y_L);
        put_nm("b_L", normings.b_L);
        put_nm("B_L", normings.B_L);
        put_nm("s_L", normings.s_L);
        put_nm("frechet_scale", normings.frechet_scale);
        j["normings"] = nm;
        j["near_boundary"] = near_boundary;
        return j;
    }
};

// ----------------------------------------------------------- normings

// Exact-tail Gumbel centering: solves intensity(y) = L * T_s(y) = 1 where
// T_s is the (optionally tilted) tail of the single-site law; scale from the
// local tail decay rate. For s = 0 this is the i.i.d. norming (y_L, b_L).
inline Normings gumbel_normings(const Marginal& m, std::size_t L, double s = 0.0) {
    double lambda = m.spec.lambda, b = m.spec.b;
    std::vector<double> lt(m.K + 1);  // log sum_{k>=j} e^{sk} p_k
    double acc = neg_inf;
    for (std::size_t j = m.K + 1; j-- > 0;) {
        if (m.log_p[j] != neg_inf)
            acc = log_add(acc, m.log_p[j] + s * static_cast<double>(j));
        lt[j] = acc;
    }
    double logZ = s == 0.0 ? 0.0 : lt[0];
    auto logT = [&](double y) {  // log L * P_s[eta > y] / Z_s
        auto i = static_cast<std::size_t>(std::max(0.0, y));
        double f = y - static_cast<double>(i);
        double t0 = i + 1 <= m.K ? lt[i + 1] : neg_inf;
        double t1 = i + 2 <= m.K ? lt[i + 2] : neg_inf;
        double v = (f == 0.0 || t1 == neg_inf) ? t0 : t0 * (1.0 - f) + t1 * f;
        return std::log(static_cast<double>(L)) + v - logZ;
    };
    double lo = 0.0, hi = static_cast<double>(m.K) - 1.0;
    if (logT(lo) < 0.0) throw NoRoot("norming intensity below 1 at the origin");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (logT(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double y = 0.5 * (lo + hi);
    Normings n;
    if (m.spec.is_power_law()) {
        n.B_L = y;
        n.s_L = std::fabs(s) + b / y;  // |s*| (1 + o(1)); exact local decay rate
    } else {
        n.y_L = y;
        double slope = std::fabs(s) + b * std::pow(y, -lambda);
        n.b_L = 1.0 / slope;
    }
    return n;
}

// Root of (|s| B)^b e^{|s| B} = A L |s|^{b-1}: the asymptotic downside
// centering sequence for power-law tails.
inline double b_subl_asymptotic(double A, std::size_t L, double s_abs, double b) {
    double rhs = std::log(A * static_cast<double>(L)) + (b - 1.0) * std::log(s_abs);
    auto f = [&](double y) { return b * std::log(y) + y; };
    double lo = 1e-12, hi = 1.0;
    while (f(hi) < rhs) hi *= 2.0;
    for (int it = 0; it < 300; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < rhs)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi) / s_abs;
}

// Tilt parameter for the conditional law: rho(s*) = N/L on the uncapped
// support (valid subcritical; upside requires a cap, see solve_tilt).
inline double conditional_tilt(const Marginal& m, std::size_t L, std::int64_t N) {
    return solve_tilt(m, m.K, static_cast<double>(N) / static_cast<double>(L)).s;
}

// ------------------------------------------------------------- lim cdfs

inline double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

inline double frechet_cdf(double x, double A, double b) {
    if (x <= 0.0) return 0.0;
    return std::exp(-A * std::pow(x, 1.0 - b) / (b - 1.0));
}

namespace detail {

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fb, double fm,
                        double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

}  // namespace detail

// Downside mixture law: exp(-A int_x^inf e^{-omega t} t^{-b} dt).
inline double mixture_cdf(double x, double A, double b, double omega,
                          double quad_tol = 1e-10) {
    if (x <= 0.0) return 0.0;
    if (omega == 0.0) return frechet_cdf(x, A, b);
    auto f = [&](double t) { return std::exp(-omega * t) * std::pow(t, -b); };
    // integrate to X where the remainder bound e^{-omega X} X^{-b}/omega < tol
    double X = x;
    while (std::exp(-omega * X) * std::pow(X, -b) / omega > quad_tol) X *= 2.0;
    double integral =
        detail::adaptive_simpson(f, x, X, f(x), f(X), f(0.5 * (x + X)), quad_tol, 40);
    integral += std::exp(-omega * X) * std::pow(X, -b) / omega;  // tail bound
    return std::exp(-A * integral);
}

// Bulk CLT variance with condensate feedback: sigma^2 / (1 - lambda(1-a)/a).
inline double gaussian_variance_correction(double lambda, double a, double sigma2) {
    if (a <= lambda / (1.0 + lambda) || a > 1.0)
        throw NonPositive("variance correction needs a in (lambda/(1+lambda), 1]");
    return sigma2 / (1.0 - lambda * (1.0 - a) / a);
}

// ------------------------------------------------------- scale coordinates

inline RegimeReport scale_coordinates(const AsymptoticParams& par, std::size_t L,
                                      std::int64_t N) {
    const Marginal& m = *par.marginal;
    double Ld = static_cast<double>(L);
    double lL = std::log(Ld), llL = std::log(lL);
    RegimeReport r;
    r.L = L;
    r.N = N;
    r.k = static_cast<double>(N) - m.rho_c * Ld;
    r.upside = r.k >= 0.0;
    r.delta_L = critical_scale(m, L);

    if (m.spec.is_power_law()) {
        double b = m.spec.b;
        // gamma_L from the sqrt(L log L) decomposition (defined for either side)
        r.gamma_L = lL * (r.k / r.delta_L - 1.0) - b / (2.0 * (b - 3.0)) * llL;
        if (r.upside) {
            double g = *r.gamma_L;
            double thr = par.thresholds.gamma_ab;
            r.label = g < -thr ? CaseLabel::PLa
                               : (g > thr ? CaseLabel::PLb : CaseLabel::PLc);
            r.near_boundary = std::fabs(std::fabs(g) - thr) < 0.5;
            if (r.label == CaseLabel::PLc && m.has_A_tail())
                r.p_gamma = p_gamma_powerlaw(m, g);
            if (r.label == CaseLabel::PLa)
                r.normings.frechet_scale = std::pow(Ld, 1.0 / (b - 1.0));
        } else {
            double om = -r.k / (m.sigma2 * std::pow(Ld, (b - 2.0) / (b - 1.0)));
            r.omega_L = om;
            r.label = om < par.thresholds.omega_lo
                          ? CaseLabel::PLdownA
                          : (om > par.thresholds.omega_hi ? CaseLabel::PLdownC
                                                          : CaseLabel::PLdownB);
            r.near_boundary = std::fabs(om - par.thresholds.omega_lo) < 0.1 ||
                              std::fabs(om - par.thresholds.omega_hi) < 0.25;
            if (r.label != CaseLabel::PLdownC)
                r.normings.frechet_scale = std::pow(Ld, 1.0 / (b - 1.0));
            if (r.label == CaseLabel::PLdownC) {
                try {
                    double s = conditional_tilt(m, L, N);
                    r.normings = gumbel_normings(m, L, s);
                } catch (const std::exception&) {
                    r.near_boundary = true;  // degenerate ensemble, no normings
                }
            }
        }
        return r;
    }

    double lambda = m.spec.lambda, b = m.spec.b;
    double cl = par.clambda();
    double S = std::pow(m.sigma2 * Ld, 1.0 / (1.0 + lambda));
    if (r.upside) {
        double t = r.k / S;
        r.t_L = t;
        double delta = par.delta();
        if (lambda > 0.5) {
            // invert the sub-leading decomposition around c_lambda
            double Sl = std::pow(m.sigma2 * Ld, lambda / (1.0 + lambda));
            r.gamma_L = (cl * S - r.k) * (2.0 * lambda * cl / (1.0 + lambda)) / Sl -
                        1.5 * lL;
        }
        // the Bernoulli window sits on the sub-leading scale; at finite L its
        // center lies below c_lambda, so the gamma_L window takes precedence
        if (r.gamma_L && std::fabs(*r.gamma_L) <= par.thresholds.gamma_ab) {
            r.label = CaseLabel::SEc;
            r.near_boundary =
                std::fabs(std::fabs(*r.gamma_L) - par.thresholds.gamma_ab) < 0.5;
        } else {
            r.label = t < cl - delta ? CaseLabel::SEa
                                     : (t > cl + delta ? CaseLabel::SEb
                                                       : (t < cl ? CaseLabel::SEa
                                                                 : CaseLabel::SEb));
            r.near_boundary = std::fabs(std::fabs(t - cl) - delta) < 0.25 * delta;
        }
        try {
            double al = alpha_root(m, L, r.k, par.cramer_coeffs());
            r.alpha = al;
            r.a_L = 1.0 - al;
        } catch (const NoRoot&) {
        } catch (const UnsupportedCramer&) {
        }
        try {
            r.a_t = a_of_t(lambda, b, t);
        } catch (const NoRoot&) {
        }
        if (r.label == CaseLabel::SEc && r.gamma_L && m.has_A_tail())
            r.p_gamma = p_gamma_stretched(m, *r.gamma_L);
        if (r.label == CaseLabel::SEa) r.normings = gumbel_normings(m, L, 0.0);
    } else {
        r.omega_L = -r.k * std::pow(lL, 1.0 / (1.0 - lambda)) / Ld;
        r.label = CaseLabel::SEdown;
        try {
            double s = conditional_tilt(m, L, N);
            r.normings = gumbel_normings(m, L, s);
        } catch (const std::exception&) {
            r.near_boundary = true;
        }
    }
    return r;
}

// --------------------------------------------------------------- Nagaev

enum class NagaevCase { Case1, Case2, Case3, Case4, Case5 };

inline std::string nagaev_case_name(NagaevCase c) {
    switch (c) {
        case NagaevCase::Case1: return "1";
        case NagaevCase::Case2: return "2";
        case NagaevCase::Case3: return "3";
        case NagaevCase::Case4: return "4";
        case NagaevCase::Case5: return "5";
    }
    return "?";
}

struct AsymptoticEstimate {
    double log_value = neg_inf;
    NagaevCase n_case = NagaevCase::Case1;
    std::vector<double> components;  // per-branch log values (case 4, Doney)
    bool ambiguous = false;          // k fell in a gap or inverted range window

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["case"] = nagaev_case_name(n_case);
        j["log_p"] = log_value;
        j["components"] = components;
        j["ambiguous"] = ambiguous;
        return j;
    }
};

namespace detail {

inline double nagaev_case1(const Marginal& m, double Ld, double k,
                           std::span<const double> coef) {
    double c = k * k * k / (Ld * Ld) * cramer_poly(coef, k / Ld);
    return -k * k / (2.0 * m.sigma2 * Ld) -
           0.5 * std::log(2.0 * M_PI * m.sigma2 * Ld) + c;
}

inline double nagaev_case2(const Marginal& m, std::size_t L, double k,
                           std::span<const double> coef) {
    double lambda = m.spec.lambda, b = m.spec.b;
    double Ld = static_cast<double>(L);
    double al = alpha_root(m, L, k, coef);
    double gam = b / (1.0 - lambda);
    double arg = 1.0 - m.sigma2 * gam * lambda * (1.0 - lambda) * Ld /
                           (std::pow(k, 1.0 + lambda) * std::pow(1.0 - al, 1.0 + lambda));
    if (arg <= 0.0) throw NonPositive("case-2 prefactor argument nonpositive");
    double cram = std::pow(al, 3.0) * k * k * k / (Ld * Ld) *
                  cramer_poly(coef, al * k / Ld);
    double cond = log_interp(m.log_p, (1.0 - al) * k);
    return std::log(Ld) + cond - al * al * k * k / (2.0 * m.sigma2 * Ld) + cram -
           0.5 * std::log(arg);
}

inline double nagaev_case3(const Marginal& m, std::size_t L, double k) {
    return std::log(static_cast<double>(L)) + log_interp(m.log_p, k);
}

inline double nagaev_case5(const Marginal& m, std::size_t L, double k) {
    double lambda = m.spec.lambda, b = m.spec.b;
    // bulk-averaging correction; the generalized constant is gamma^2 (1-lambda)^2 = b^2
    double corr = b * b * m.sigma2 * static_cast<double>(L) /
                  (2.0 * std::pow(k, 2.0 * lambda));
    return nagaev_case3(m, L, k) + corr;
}

}  // namespace detail

// Leading-order log P[S_L = N] with the appropriate moderate-deviation case.
// Condensate factors use the exact single-site tail (identical to the A-form
// for explicit stretched weights). `force` overrides range classification.
inline AsymptoticEstimate nagaev_estimate(const AsymptoticParams& par, std::size_t L,
                                          std::int64_t N,
                                          std::optional<NagaevCase> force = {}) {
    const Marginal& m = *par.marginal;
    if (m.spec.is_power_law())
        throw ConfigError("nagaev_estimate applies to stretched tails (lambda < 1)");
    double Ld = static_cast<double>(L);
    double k = static_cast<double>(N) - m.rho_c * Ld;
    if (k <= 0.0) throw ConfigError("nagaev_estimate requires N above rho_c L");
    if (static_cast<double>(m.K) < 1.05 * k)
        throw ConfigError("marginal support too small; rebuild with min_support");
    auto coef = par.cramer_coeffs();

    double lambda = m.spec.lambda;
    double cl = par.clambda();
    double delta = par.delta();
    double S = std::pow(m.sigma2 * Ld, 1.0 / (1.0 + lambda));
    double t = k / S;
    double kmid = std::pow(Ld, 1.0 / (2.0 * lambda));
    double theta = std::max(par.theta_L(L), 1.0);

    AsymptoticEstimate est;
    NagaevCase c;
    if (force) {
        c = *force;
    } else if (t <= cl - delta) {
        c = NagaevCase::Case1;
        est.ambiguous = k <= delta * std::sqrt(Ld);
    } else if (t < cl + delta) {
        c = NagaevCase::Case4;
    } else if (k < kmid / theta) {
        c = NagaevCase::Case2;
    } else if (k <= kmid * theta) {
        c = NagaevCase::Case5;
        // window inverted when the case-2 range is empty at this L
        est.ambiguous = kmid / theta < (cl + delta) * S;
    } else {
        c = NagaevCase::Case3;
    }
    est.n_case = c;
    switch (c) {
        case NagaevCase::Case1:
            est.log_value = detail::nagaev_case1(m, Ld, k, coef);
            break;
        case NagaevCase::Case2:
            est.log_value = detail::nagaev_case2(m, L, k, coef);
            break;
        case NagaevCase::Case3:
            est.log_value = detail::nagaev_case3(m, L, k);
            break;
        case NagaevCase::Case5:
            est.log_value = detail::nagaev_case5(m, L, k);
            break;
        case NagaevCase::Case4: {
            double g = detail::nagaev_case1(m, Ld, k, coef);
            double h = detail::nagaev_case2(m, L, k, coef);
            est.components = {g, h};
            est.log_value = log_add(g, h);
            break;
        }
    }
    return est;
}

// ----------------------------------------------------------------- Doney

struct DoneySplit {
    double log_gauss = neg_inf;      // (2 pi sigma^2 L)^{-1/2} e^{-z^2/(2 sigma^2)}
    double log_cond = neg_inf;       // L p_{floor(k)}
    double log_fluid_refined = neg_inf;  // two-channel fluid component
    double log_cond_refined = neg_inf;   // two-channel condensate component
    bool validity_warning = false;       // z not large: split outside its regime

    double log_sum() const { return log_add(log_gauss, log_cond); }
    double log_sum_refined() const {
        return log_add(log_fluid_refined, log_cond_refined);
    }
    double component_log_ratio() const { return log_gauss - log_cond; }
};

inline DoneySplit doney_split(const Marginal& m, std::size_t L, std::int64_t N) {
    if (!m.spec.is_power_law() || m.spec.b <= 3.0)
        throw ConfigError("doney_split requires lambda = 1, b > 3");
    double Ld = static_cast<double>(L);
    double k = static_cast<double>(N) - m.rho_c * Ld;
    if (k < 0.0) throw ConfigError("doney_split requires N >= rho_c L");
    double z = k / std::sqrt(Ld);
    DoneySplit d;
    d.validity_warning = z < 2.0;
    d.log_gauss = -z * z / (2.0 * m.sigma2) - 0.5 * std::log(2.0 * M_PI * m.sigma2 * Ld);
    auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(k)));
    if (idx <= m.K)
        d.log_cond = std::log(Ld) + m.log_p[idx];
    if (static_cast<std::size_t>(N) <= m.K && !d.validity_warning) {
        auto thr = static_cast<std::size_t>(std::max(8.0, k / 2.0));
        auto tc = two_channel_estimate(m, L, N, thr);
        d.log_fluid_refined = tc.log_fluid;
        d.log_cond_refined = tc.log_cond;
    }
    return d;
}

// Asymptotic display value of the Doney component ratio on the critical scale.
inline double ell_gamma_powerlaw(const Marginal& m, double gamma) {
    double b = m.spec.b;
    return std::pow(std::sqrt(m.sigma2), b - 1.0) * std::pow(b - 3.0, b / 2.0) *
           std::exp(-(b - 3.0) * gamma) / (std::sqrt(2.0 * M_PI) * m.a_tail());
}

}  // namespace zrp
