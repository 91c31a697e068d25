#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "zrp/common.hpp"
#include "zrp/marginal.hpp"

namespace zrp {

// log-domain convolution c[n] = LSE_i a[i] + b[n-i], truncated at n_max.
// Entries are exact: truncation only drops output indices above n_max.
inline std::vector<double> log_convolve(std::span<const double> a,
                                        std::span<const double> b,
                                        std::size_t n_max) {
    auto high = [](std::span<const double> v) {
        std::size_t h = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != neg_inf) h = i;
        return h;
    };
    const std::size_t ha = high(a), hb = high(b);
    const std::size_t out_hi = std::min(n_max, ha + hb);
    std::vector<double> c(n_max + 1, neg_inf);
    parallel_for(0, out_hi + 1, [&](std::size_t n) {
        const std::size_t ilo = n > hb ? n - hb : 0;
        const std::size_t ihi = std::min(ha, n);
        double m = neg_inf;
        for (std::size_t i = ilo; i <= ihi; ++i) {
            double t = a[i] + b[n - i];
            if (t > m) m = t;
        }
        if (m == neg_inf) return;
        double s = 0.0;
        for (std::size_t i = ilo; i <= ihi; ++i) {
            double t = a[i] + b[n - i];
            if (t != neg_inf) s += std::exp(t - m);
        }
        c[n] = m + std::log(s);
    });
    return c;
}

// Exact finite-L law of block sums: log P[S_m = n, all sites <= cap] for the
// block sizes arising from binary splitting of L. Tables are built by power
// doubling (O(log L) convolutions) and shared with the exact sampler.
class Oracle {
  public:
    Oracle(const Marginal& marg, std::size_t L, std::size_t n_max,
           std::optional<std::size_t> cap = std::nullopt,
           double budget_cells = 5e13)
        : marg_(&marg), L_(L), n_max_(n_max), cap_(cap) {
        if (L < 1) throw ConfigError("L must be >= 1");
        double cost = static_cast<double>(n_max + 1) * static_cast<double>(n_max + 1) *
                      (std::log2(static_cast<double>(L)) + 2.0);
        if (cost > budget_cells)
            throw ResourceBudget("oracle convolution budget exceeded");
        std::vector<double> base(n_max + 1, neg_inf);
        std::size_t hi = std::min(n_max, marg.K);
        if (cap_) hi = std::min(hi, *cap_);
        for (std::size_t n = 0; n <= hi; ++n) base[n] = marg.log_p[n];
        tables_[1] = std::move(base);
    }

    std::size_t L() const { return L_; }
    std::size_t n_max() const { return n_max_; }
    const Marginal& marginal() const { return *marg_; }

    // log P[S_m = n, M_m <= cap] table for any block size m (memoized)
    const std::vector<double>& block(std::size_t m) {
        auto it = tables_.find(m);
        if (it != tables_.end()) return it->second;
        const auto& a = block(m / 2);
        const auto& b = block(m - m / 2);
        auto c = log_convolve(a, b, n_max_);
        return tables_.emplace(m, std::move(c)).first->second;
    }

    double log_p_sum(std::size_t m, std::int64_t n) {
        if (n < 0 || static_cast<std::size_t>(n) > n_max_) return neg_inf;
        return block(m)[static_cast<std::size_t>(n)];
    }

  private:
    const Marginal* marg_;
    std::size_t L_, n_max_;
    std::optional<std::size_t> cap_;
    std::map<std::size_t, std::vector<double>> tables_;
};

// Finite-L distribution of S_L (optionally with a per-site cap), as data.
struct ExactLaw {
    std::size_t L = 0;
    std::optional<std::size_t> cap;
    std::vector<double> log_pS;  // index n = 0..n_max

    double log_total() const { return log_sum(log_pS); }

    void write_csv(std::ostream& os) const {
        os << "n,log_p\n";
        for (std::size_t n = 0; n < log_pS.size(); ++n)
            os << n << ',' << log_pS[n] << '\n';
    }
};

// Default retained support: bulk Gaussian range plus four critical scales.
inline std::size_t default_n_max(const Marginal& m, std::size_t L, double delta_L) {
    double v = m.rho_c * static_cast<double>(L) +
               12.0 * std::sqrt(m.sigma2 * static_cast<double>(L)) + 4.0 * delta_L;
    return static_cast<std::size_t>(std::ceil(v));
}

inline ExactLaw sum_distribution(const Marginal& marg, std::size_t L,
                                 std::size_t n_max,
                                 std::optional<std::size_t> cap = std::nullopt) {
    Oracle o(marg, L, n_max, cap);
    return ExactLaw{L, cap, o.block(L)};
}

inline double exact_log_pSLN(const Marginal& marg, std::size_t L, std::int64_t N) {
    if (N < 0) return neg_inf;
    Oracle o(marg, L, static_cast<std::size_t>(N));
    return o.log_p_sum(L, N);
}

// P[M_L <= m | S_L = N] on a grid of caps; exact ratio of capped to uncapped.
inline std::vector<double> conditional_max_cdf(const Marginal& marg, std::size_t L,
                                               std::int64_t N,
                                               std::span<const std::size_t> m_grid) {
    double denom = exact_log_pSLN(marg, L, N);
    if (denom == neg_inf) throw ImpossibleN("P[S_L = N] vanishes");
    std::vector<double> out;
    out.reserve(m_grid.size());
    for (std::size_t m : m_grid) {
        if (static_cast<std::int64_t>(m) >= N) {
            out.push_back(1.0);
            continue;
        }
        Oracle o(marg, L, static_cast<std::size_t>(N), m);
        out.push_back(std::exp(o.log_p_sum(L, N) - denom));
    }
    return out;
}

// Exact conditional single-site law P[eta_1 = j | S_L = N], j = 0..min(K, N).
inline std::vector<double> conditional_site_marginal(const Marginal& marg,
                                                     std::size_t L, std::int64_t N) {
    if (L == 1) {
        std::vector<double> v(static_cast<std::size_t>(N) + 1, 0.0);
        v[static_cast<std::size_t>(N)] = 1.0;
        return v;
    }
    Oracle o(marg, L, static_cast<std::size_t>(N));
    double denom = o.log_p_sum(L, N);
    if (denom == neg_inf) throw ImpossibleN("P[S_L = N] vanishes");
    std::size_t hi = std::min(marg.K, static_cast<std::size_t>(N));
    std::vector<double> v(hi + 1, 0.0);
    const auto& rest = o.block(L - 1);
    for (std::size_t j = 0; j <= hi; ++j) {
        double lp = marg.log_p[j] + rest[static_cast<std::size_t>(N) - j];
        v[j] = lp == neg_inf ? 0.0 : std::exp(lp - denom);
    }
    return v;
}

}  // namespace zrp
