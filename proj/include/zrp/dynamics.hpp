#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "zrp/common.hpp"
#include "zrp/model.hpp"
#include "zrp/rng.hpp"
#include "zrp/sampler.hpp"

namespace zrp {

enum class Hop { TotallyAsymmetric, Symmetric };

inline std::string hop_name(Hop h) {
    return h == Hop::TotallyAsymmetric ? "totally_asymmetric" : "symmetric";
}

inline Hop hop_from_name(const std::string& s) {
    if (s == "totally_asymmetric" || s == "ta") return Hop::TotallyAsymmetric;
    if (s == "symmetric" || s == "sym") return Hop::Symmetric;
    throw ConfigError("unknown hop kind: " + s);
}

struct DynamicsSpec {
    ModelSpec model;
    Hop hop = Hop::Symmetric;
};

// Binary tree over per-site rates: O(log L) total-rate updates and
// proportional site selection.
class RateTree {
  public:
    explicit RateTree(std::size_t n) : n_(1) {
        while (n_ < n) n_ *= 2;
        t_.assign(2 * n_, 0.0);
    }
    void set(std::size_t i, double r) {
        std::size_t j = n_ + i;
        t_[j] = r;
        for (j /= 2; j >= 1; j /= 2) t_[j] = t_[2 * j] + t_[2 * j + 1];
    }
    double total() const { return t_[1]; }
    std::size_t sample(double u) const {  // u in [0, total)
        std::size_t j = 1;
        while (j < n_) {
            j *= 2;
            if (u >= t_[j]) {
                u -= t_[j];
                ++j;
            }
        }
        return j - n_;
    }

  private:
    std::size_t n_;
    std::vector<double> t_;
};

// Event-driven zero-range dynamics on a ring. Exponential waiting times with
// the total rate, departure site proportional to g(eta_x), destination from
// the hop kernel. Occupancy statistics are time-weighted.
class Kmc {
  public:
    Kmc(const DynamicsSpec& dyn, Configuration init, Rng rng)
        : dyn_(dyn), state_(std::move(init)), rng_(rng),
          tree_(state_.eta.size()) {
        std::int64_t maxocc = state_.N;
        g_.resize(static_cast<std::size_t>(maxocc) + 2, 0.0);
        for (std::size_t n = 1; n < g_.size(); ++n)
            g_[n] = dyn_.model.g(static_cast<std::int64_t>(n));
        for (std::size_t x = 0; x < state_.eta.size(); ++x)
            tree_.set(x, g_[static_cast<std::size_t>(state_.eta[x])]);
        counts_.assign(static_cast<std::size_t>(maxocc) + 1, 0);
        for (auto v : state_.eta) ++counts_[static_cast<std::size_t>(v)];
        hist_.assign(counts_.size(), 0.0);
    }

    const Configuration& state() const { return state_; }
    double time() const { return t_; }
    std::uint64_t events() const { return events_; }

    // time-averaged occupancy histogram over all sites (normalized)
    std::vector<double> histogram() const {
        std::vector<double> h(hist_);
        double tot = 0.0;
        for (double v : h) tot += v;
        if (tot > 0.0)
            for (double& v : h) v /= tot;
        return h;
    }
    void reset_histogram() { hist_.assign(hist_.size(), 0.0); }

    void advance(double duration, bool accumulate) {
        double t_stop = t_ + duration;
        while (true) {
            double total = tree_.total();
            if (total <= 0.0) {  // no particles can move (all empty)
                t_ = t_stop;
                return;
            }
            double dt = rng_.exponential(total);
            if (t_ + dt >= t_stop) {
                if (accumulate) weigh(t_stop - t_);
                t_ = t_stop;
                return;
            }
            if (accumulate) weigh(dt);
            t_ += dt;
            ++events_;
            std::size_t x = tree_.sample(rng_.uniform() * total);
            std::size_t L = state_.eta.size();
            std::size_t y;
            if (dyn_.hop == Hop::TotallyAsymmetric)
                y = (x + 1) % L;
            else
                y = rng_.uniform() < 0.5 ? (x + 1) % L : (x + L - 1) % L;
            move(x, y);
        }
    }

  private:
    void weigh(double dt) {
        for (std::size_t v = 0; v < counts_.size(); ++v)
            if (counts_[v] > 0)
                hist_[v] += static_cast<double>(counts_[v]) * dt;
    }
    void move(std::size_t x, std::size_t y) {
        auto& ex = state_.eta[x];
        auto& ey = state_.eta[y];
        --counts_[static_cast<std::size_t>(ex)];
        --counts_[static_cast<std::size_t>(ey)];
        --ex;
        ++ey;
        ++counts_[static_cast<std::size_t>(ex)];
        ++counts_[static_cast<std::size_t>(ey)];
        tree_.set(x, g_[static_cast<std::size_t>(ex)]);
        tree_.set(y, g_[static_cast<std::size_t>(ey)]);
    }

    DynamicsSpec dyn_;
    Configuration state_;
    Rng rng_;
    RateTree tree_;
    std::vector<double> g_;
    std::vector<std::int64_t> counts_;
    std::vector<double> hist_;
    double t_ = 0.0;
    std::uint64_t events_ = 0;
};

}  // namespace zrp
