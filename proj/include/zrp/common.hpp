#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace zrp {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- errors

struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfiniteVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Supercritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ImpossibleN : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedCramer : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceBudget : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------- log-domain

inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

inline double log_sum(std::span<const double> xs) {
    double m = neg_inf;
    for (double x : xs) m = std::max(m, x);
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (double x : xs)
        if (x != neg_inf) s += std::exp(x - m);
    return m + std::log(s);
}

// Linear interpolation of a log-probability table at real index x.
inline double log_interp(std::span<const double> lp, double x) {
    if (x <= 0.0) return lp[0];
    auto i = static_cast<std::size_t>(x);
    if (i + 1 >= lp.size()) return lp.back();
    double f = x - static_cast<double>(i);
    if (lp[i] == neg_inf || lp[i + 1] == neg_inf) return neg_inf;
    return lp[i] * (1.0 - f) + lp[i + 1] * f;
}

// ------------------------------------------------------------ parallelism

// Chunked parallel loop over [begin, end) with an atomic work counter, so
// unevenly priced iterations (convolution cells) balance across threads.
// Falls back to serial for small ranges.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& body,
                  std::size_t grain = 1024) {
    const std::size_t n = end > begin ? end - begin : 0;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw < 2 || n < 2 * grain) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    unsigned nthreads = std::min<std::size_t>(hw, 1 + n / (2 * grain));
    std::atomic<std::size_t> next{begin};
    auto worker = [&] {
        for (;;) {
            std::size_t lo = next.fetch_add(grain);
            if (lo >= end) return;
            std::size_t hi = std::min(end, lo + grain);
            for (std::size_t i = lo; i < hi; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

// --------------------------------------------------------- special values

// Regularized upper incomplete gamma Q(a,x), series/continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    auto gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1-P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction (Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_sf(double x, double dof) { return gamma_q(dof / 2.0, x / 2.0); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov distribution survival function Q(t) = 2 sum (-1)^{j-1} e^{-2 j^2 t^2}.
inline double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * std::exp(-2.0 * j * j * t * t);
        s += (j % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

// ----------------------------------------------------------------- misc

inline double sq(double x) { return x * x; }

struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double var() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(var()); }
    double sem() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

}  // namespace zrp
