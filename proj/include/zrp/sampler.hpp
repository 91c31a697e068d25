#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "zrp/common.hpp"
#include "zrp/marginal.hpp"
#include "zrp/oracle.hpp"
#include "zrp/rng.hpp"
#include "zrp/tilted.hpp"

namespace zrp {

struct Configuration {
    std::vector<std::int64_t> eta;
    std::int64_t N = 0;

    std::int64_t sum() const {
        std::int64_t s = 0;
        for (auto v : eta) s += v;
        return s;
    }
    std::int64_t max() const {
        std::int64_t m = 0;
        for (auto v : eta) m = std::max(m, v);
        return m;
    }
    std::int64_t second_max() const {
        std::int64_t m1 = -1, m2 = -1;
        for (auto v : eta) {
            if (v >= m1) {
                m2 = m1;
                m1 = v;
            } else if (v > m2) {
                m2 = v;
            }
        }
        return std::max<std::int64_t>(m2, 0);
    }
    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < eta.size(); ++i)
            if (eta[i] > eta[best]) best = i;
        return best;
    }
};

// Exact sampler for the conditional law mu_{L,N}: recursive binary splitting
// of the total over sub-blocks, drawing each block sum from the exact tables.
// The split draw walks outward from the conditional mean, so typical cost per
// node is O(sigma sqrt(m)) table lookups.
class ExactSampler {
  public:
    ExactSampler(const Marginal& marg, std::size_t L, std::int64_t N)
        : oracle_(marg, L, static_cast<std::size_t>(N)), L_(L), N_(N) {
        if (N < 0) throw ImpossibleN("negative N");
        prebuild(L_);
        if (oracle_.log_p_sum(L_, N_) == neg_inf)
            throw ImpossibleN("P[S_L = N] vanishes at machine scale");
    }

    std::size_t L() const { return L_; }
    std::int64_t N() const { return N_; }
    Oracle& oracle() { return oracle_; }

    Configuration sample(Rng& rng) {
        Configuration c;
        c.N = N_;
        c.eta.assign(L_, 0);
        fill_block(c, 0, L_, N_, rng);
        return c;
    }

  private:
    void prebuild(std::size_t m) {
        if (m <= 1) return;
        oracle_.block(m);
        prebuild(m / 2);
        if (m - m / 2 != m / 2) prebuild(m - m / 2);
    }

    // draw the left-half sum j with P(j) = exp(a[j] + b[n-j] - t[n])
    std::int64_t draw_split(const std::vector<double>& a, const std::vector<double>& b,
                            double log_t, std::int64_t n, std::int64_t mean_left,
                            Rng& rng) {
        const auto nmax = static_cast<std::int64_t>(oracle_.n_max());
        std::int64_t jlo = std::max<std::int64_t>(0, n - nmax);
        std::int64_t jhi = std::min<std::int64_t>(n, nmax);
        std::int64_t j0 = std::clamp(mean_left, jlo, jhi);
        double u = rng.uniform();
        std::int64_t up = j0, down = j0 - 1;
        std::int64_t last_valid = -1;
        while (up <= jhi || down >= jlo) {
            for (int side = 0; side < 2; ++side) {
                std::int64_t j;
                if (side == 0) {
                    if (up > jhi) continue;
                    j = up++;
                } else {
                    if (down < jlo) continue;
                    j = down--;
                }
                double lp = a[static_cast<std::size_t>(j)] +
                            b[static_cast<std::size_t>(n - j)];
                if (lp == neg_inf) continue;
                last_valid = j;
                u -= std::exp(lp - log_t);
                if (u <= 0.0) return j;
            }
        }
        if (last_valid < 0) throw ImpossibleN("no admissible split: empty support");
        return last_valid;  // residual rounding mass goes to the final atom
    }

    void fill_block(Configuration& c, std::size_t lo, std::size_t m, std::int64_t n,
                    Rng& rng) {
        if (m == 1) {
            c.eta[lo] = n;
            return;
        }
        std::size_t m1 = m / 2, m2 = m - m1;
        const auto& a = oracle_.block(m1);
        const auto& b = oracle_.block(m2);
        double log_t = oracle_.log_p_sum(m, n);
        if (log_t == neg_inf) throw ImpossibleN("block sum outside support");
        auto mean_left = static_cast<std::int64_t>(std::llround(
            static_cast<double>(n) * static_cast<double>(m1) / static_cast<double>(m)));
        std::int64_t j = draw_split(a, b, log_t, n, mean_left, rng);
        fill_block(c, lo, m1, j, rng);
        fill_block(c, lo + m1, m2, n - j, rng);
    }

    Oracle oracle_;
    std::size_t L_;
    std::int64_t N_;
};

// Particle-conserving Metropolis chain targeting mu_{L,N}: pick an ordered
// site pair, move one particle, accept with the stationary weight ratio in
// log domain. Detailed balance w.r.t. prod w(eta_x) restricted to the shell.
class McmcChain {
  public:
    McmcChain(const Marginal& marg, std::size_t L, std::int64_t N, Rng rng)
        : marg_(&marg), rng_(rng) {
        if (static_cast<std::size_t>(N) > marg.K)
            throw ConfigError("marginal support smaller than N");
        state_.N = N;
        state_.eta.assign(L, 0);
        // spread particles as evenly as possible
        std::int64_t base = N / static_cast<std::int64_t>(L);
        std::int64_t rest = N % static_cast<std::int64_t>(L);
        for (std::size_t x = 0; x < L; ++x)
            state_.eta[x] = base + (static_cast<std::int64_t>(x) < rest ? 1 : 0);
    }

    const Configuration& state() const { return state_; }

    void step() {
        std::size_t L = state_.eta.size();
        std::size_t x = rng_.index(L);
        std::size_t y = rng_.index(L - 1);
        if (y >= x) ++y;
        auto ex = state_.eta[x];
        if (ex == 0) return;
        auto ey = state_.eta[y];
        const auto& lw = marg_->log_w;
        double dlog = lw[static_cast<std::size_t>(ex - 1)] +
                      lw[static_cast<std::size_t>(ey + 1)] -
                      lw[static_cast<std::size_t>(ex)] -
                      lw[static_cast<std::size_t>(ey)];
        if (dlog >= 0.0 || std::log(rng_.uniform()) < dlog) {
            --state_.eta[x];
            ++state_.eta[y];
        }
    }

    void run(std::uint64_t moves) {
        for (std::uint64_t i = 0; i < moves; ++i) step();
    }

    // log acceptance ratio for a hypothetical move; used by balance checks
    double log_ratio(std::int64_t ex, std::int64_t ey) const {
        const auto& lw = marg_->log_w;
        return lw[static_cast<std::size_t>(ex - 1)] + lw[static_cast<std::size_t>(ey + 1)] -
               lw[static_cast<std::size_t>(ex)] - lw[static_cast<std::size_t>(ey)];
    }

  private:
    const Marginal* marg_;
    Configuration state_;
    Rng rng_;
};

struct McmcDefaults {
    static std::uint64_t burn_moves(std::size_t L, std::int64_t N) {
        return 100ull * L * static_cast<std::uint64_t>(std::max<std::int64_t>(N, 1));
    }
    static std::uint64_t thin_moves(std::size_t L) { return L; }
};

// Rejection sampler from L i.i.d. tilted draws conditioned on the total;
// accepted output has law mu_{L,N} restricted to {M_L <= cap}.
struct RejectionResult {
    Configuration config;
    std::uint64_t trials = 0;
    double acceptance_rate() const {
        return trials > 0 ? 1.0 / static_cast<double>(trials) : 0.0;
    }
};

inline RejectionResult tilted_rejection_sample(const Marginal& marg, std::size_t L,
                                               std::int64_t N, std::size_t cap,
                                               Rng& rng,
                                               std::uint64_t max_trials = 0) {
    TiltedMarginal t =
        solve_tilt(marg, cap, static_cast<double>(N) / static_cast<double>(L));
    std::vector<double> cdf(t.probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < t.probs.size(); ++k) {
        acc += t.probs[k];
        cdf[k] = acc;
    }
    if (max_trials == 0)
        max_trials = 1000 + 400ull * static_cast<std::uint64_t>(std::sqrt(
                                2.0 * M_PI * t.sigma2 * static_cast<double>(L)));
    RejectionResult res;
    res.config.N = N;
    res.config.eta.assign(L, 0);
    for (std::uint64_t trial = 1; trial <= max_trials; ++trial) {
        std::int64_t s = 0;
        for (std::size_t x = 0; x < L; ++x) {
            double u = rng.uniform() * acc;
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            auto v = static_cast<std::int64_t>(it - cdf.begin());
            res.config.eta[x] = v;
            s += v;
            if (s > N) break;  // early abort, trial already failed
        }
        if (s == N) {
            res.trials = trial;
            return res;
        }
    }
    throw ResourceBudget("rejection budget exceeded; acceptance below 1/" +
                         std::to_string(max_trials));
}

}  // namespace zrp
