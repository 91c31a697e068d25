#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zrp/asymptotics.hpp"
#include "zrp/common.hpp"
#include "zrp/marginal.hpp"
#include "zrp/sampler.hpp"

namespace zrp {

struct ReplicaRecord {
    std::uint64_t replica_id = 0;
    std::uint64_t stream = 0;
    std::int64_t M = 0;
    std::int64_t second_max = 0;
    std::size_t argmax = 0;
    std::vector<std::int64_t> eta;  // retained only when profiles are kept

    static ReplicaRecord from(const Configuration& c, std::uint64_t id,
                              std::uint64_t stream, bool keep_eta) {
        ReplicaRecord r;
        r.replica_id = id;
        r.stream = stream;
        r.M = c.max();
        r.second_max = c.second_max();
        r.argmax = c.argmax();
        if (keep_eta) r.eta = c.eta;
        return r;
    }
};

struct SampleBatch {
    std::size_t L = 0;
    std::int64_t N = 0;
    std::uint64_t seed = 0;
    std::string source;  // "exact", "mcmc", "kmc", "iid"
    std::vector<ReplicaRecord> records;

    void write_csv(std::ostream& os) const {
        os << "replica_id,stream,L,N,M_L,second_max,argmax\n";
        for (const auto& r : records)
            os << r.replica_id << ',' << r.stream << ',' << L << ',' << N << ','
               << r.M << ',' << r.second_max << ',' << r.argmax << '\n';
    }
};

// --------------------------------------------------------------- KS tests

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// One-sample KS against a continuous reference CDF.
inline KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    auto n = xs.size();
    double nd = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = cdf(xs[i]);
        d = std::max(d, F - static_cast<double>(i) / nd);
        d = std::max(d, static_cast<double>(i + 1) / nd - F);
    }
    double t = d * (std::sqrt(nd) + 0.12 + 0.11 / std::sqrt(nd));
    return {d, kolmogorov_sf(t), n};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    double ne = na * nb / (na + nb);
    double t = d * (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne));
    return {d, kolmogorov_sf(t), a.size() + b.size()};
}

// ------------------------------------------------------- basic summaries

struct IntervalEstimate {
    double value = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    std::size_t n = 0;
};

// Empirical law of M_L / (N - rho_c L): mean with a normal 95% interval.
inline IntervalEstimate excess_fraction(const SampleBatch& batch, const Marginal& m) {
    double k = static_cast<double>(batch.N) -
               m.rho_c * static_cast<double>(batch.L);
    if (k == 0.0) throw ConfigError("excess_fraction requires N != rho_c L");
    MeanVar mv;
    for (const auto& r : batch.records) mv.add(static_cast<double>(r.M) / k);
    return {mv.mean, mv.mean - 1.96 * mv.sem(), mv.mean + 1.96 * mv.sem(), mv.n};
}

struct PhaseMixture {
    double condensed_fraction = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;       // Wilson interval
    double mean_ratio_condensed = 0.0;      // mean M/k over condensed replicas
    double predicted = 0.0;                 // supplied prediction (p_gamma)
    std::size_t n_condensed = 0, n = 0;
    double threshold = 0.0;
};

// Classify replicas by a condensate threshold on M_L and compare the
// condensed fraction to a predicted Bernoulli parameter.
inline PhaseMixture phase_mixture_test(const SampleBatch& batch, const Marginal& m,
                                       double threshold, double predicted) {
    PhaseMixture out;
    out.threshold = threshold;
    out.predicted = predicted;
    double k = static_cast<double>(batch.N) - m.rho_c * static_cast<double>(batch.L);
    MeanVar cond_ratio;
    for (const auto& r : batch.records) {
        ++out.n;
        if (static_cast<double>(r.M) > threshold) {
            ++out.n_condensed;
            cond_ratio.add(static_cast<double>(r.M) / k);
        }
    }
    double n = static_cast<double>(out.n);
    double ph = static_cast<double>(out.n_condensed) / n;
    out.condensed_fraction = ph;
    double z = 1.96, z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (ph + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    out.ci_lo = center - half;
    out.ci_hi = center + half;
    out.mean_ratio_condensed = cond_ratio.mean;
    return out;
}

// ------------------------------------------------------------- max laws

enum class MaxLaw { Frechet, Gumbel, Gaussian, GaussianEmpirical, Mixture };

struct MaxLawSpec {
    MaxLaw law = MaxLaw::Gaussian;
    // normalization x = (M - center) / scale applied before the reference CDF
    double center = 0.0, scale = 1.0;
    double A = 1.0, b = 0.0, omega = 0.0;  // Frechet / mixture parameters
};

// KS of the normalized maxima against the named limit law. GaussianEmpirical
// standardizes by the sample's own mean and standard deviation.
inline KsResult max_law_test(const SampleBatch& batch, const MaxLawSpec& spec) {
    std::vector<double> xs;
    xs.reserve(batch.records.size());
    double c = spec.center, s = spec.scale;
    if (spec.law == MaxLaw::GaussianEmpirical) {
        MeanVar mv;
        for (const auto& r : batch.records) mv.add(static_cast<double>(r.M));
        c = mv.mean;
        s = mv.sd();
    }
    for (const auto& r : batch.records)
        xs.push_back((static_cast<double>(r.M) - c) / s);
    switch (spec.law) {
        case MaxLaw::Frechet:
            return ks_test(std::move(xs),
                           [&](double x) { return frechet_cdf(x, spec.A, spec.b); });
        case MaxLaw::Gumbel:
            return ks_test(std::move(xs), [](double x) { return gumbel_cdf(x); });
        case MaxLaw::Mixture:
            return ks_test(std::move(xs), [&](double x) {
                return mixture_cdf(x, spec.A, spec.b, spec.omega);
            });
        case MaxLaw::Gaussian:
        case MaxLaw::GaussianEmpirical:
            return ks_test(std::move(xs), [](double x) { return normal_cdf(x); });
    }
    return {};
}

// ------------------------------------------------------------ bulk paths

struct BulkPathStats {
    std::vector<double> grid;              // path positions s
    std::vector<std::vector<double>> cov;  // empirical Cov(X_s, X_r)
    std::vector<double> mean;              // empirical mean path
    MeanVar terminal;                      // Y_1 across replicas (drift)
    std::size_t truncation = 0;            // floor(L^{1/4}) used in Y mode
};

enum class PathMode { X, Y };

// Centered partial-sum paths at the requested grid points. Mode X centers at
// N/L (X_0 = X_1 = 0 exactly); mode Y truncates occupations above L^{1/4} and
// centers at (N - a_L (N - rho_c L))/L, so its terminal value estimates the
// condensate drift.
inline BulkPathStats bulk_paths(const SampleBatch& batch, const Marginal& m,
                                PathMode mode, std::vector<double> grid,
                                double a_L = 1.0) {
    BulkPathStats st;
    st.grid = std::move(grid);
    std::size_t G = st.grid.size();
    std::size_t L = batch.L;
    double Ld = static_cast<double>(L);
    double sig = std::sqrt(m.sigma2);
    auto trunc = static_cast<std::int64_t>(std::floor(std::pow(Ld, 0.25)));
    st.truncation = static_cast<std::size_t>(trunc);
    double k = static_cast<double>(batch.N) - m.rho_c * Ld;
    double center = mode == PathMode::X
                        ? static_cast<double>(batch.N) / Ld
                        : (static_cast<double>(batch.N) - a_L * k) / Ld;
    std::vector<std::vector<double>> vals(G);
    const double norm = sig * std::sqrt(Ld);
    for (const auto& rec : batch.records) {
        if (rec.eta.empty()) throw ConfigError("bulk_paths needs retained profiles");
        std::int64_t isum = 0;  // partial sums kept integral so X_1 = 0 exactly
        std::size_t gi = 0;
        std::vector<double> path(G, 0.0);
        auto value_at = [&](std::size_t count) {
            if (mode == PathMode::X)
                return (static_cast<double>(isum * static_cast<std::int64_t>(L) -
                                            static_cast<std::int64_t>(count) * batch.N)) /
                       (Ld * norm);
            return (static_cast<double>(isum) -
                    static_cast<double>(count) * center) / norm;
        };
        for (std::size_t x = 0; x < L && gi < G; ++x) {
            while (gi < G &&
                   static_cast<double>(x) >= std::floor(st.grid[gi] * Ld)) {
                path[gi] = value_at(x);
                ++gi;
            }
            std::int64_t v = rec.eta[x];
            if (mode == PathMode::Y && v > trunc) v = 0;
            isum += v;
        }
        for (; gi < G; ++gi) path[gi] = value_at(L);
        for (std::size_t g = 0; g < G; ++g) vals[g].push_back(path[g]);
    }
    std::size_t R = vals.empty() ? 0 : vals[0].size();
    st.mean.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
        for (double v : vals[g]) st.mean[g] += v;
        if (R > 0) st.mean[g] /= static_cast<double>(R);
    }
    st.cov.assign(G, std::vector<double>(G, 0.0));
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t h = g; h < G; ++h) {
            double c = 0.0;
            for (std::size_t r = 0; r < R; ++r)
                c += (vals[g][r] - st.mean[g]) * (vals[h][r] - st.mean[h]);
            c /= static_cast<double>(R > 1 ? R - 1 : 1);
            st.cov[g][h] = st.cov[h][g] = c;
        }
    if (G > 0)
        for (std::size_t r = 0; r < R; ++r) st.terminal.add(vals[G - 1][r]);
    return st;
}

// Full-resolution accumulated profile S_k = sum_{x<=k} eta_x for plot dumps.
inline std::vector<std::int64_t> accumulated_profile(const Configuration& c) {
    std::vector<std::int64_t> s(c.eta.size() + 1, 0);
    for (std::size_t x = 0; x < c.eta.size(); ++x) s[x + 1] = s[x] + c.eta[x];
    return s;
}

// --------------------------------------------------------- second maximum

struct SecondMaxSummary {
    std::vector<double> quantiles;  // at 10/25/50/75/90%
    double median_ratio = 0.0;      // median of second_max / M
};

inline SecondMaxSummary second_max_summary(const SampleBatch& batch) {
    std::vector<double> v, ratio;
    for (const auto& r : batch.records) {
        v.push_back(static_cast<double>(r.second_max));
        ratio.push_back(r.M > 0 ? static_cast<double>(r.second_max) /
                                      static_cast<double>(r.M)
                                : 0.0);
    }
    std::sort(v.begin(), v.end());
    std::sort(ratio.begin(), ratio.end());
    auto q = [&](std::vector<double>& xs, double p) {
        return xs[std::min(xs.size() - 1,
                           static_cast<std::size_t>(p * static_cast<double>(xs.size())))];
    };
    SecondMaxSummary s;
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) s.quantiles.push_back(q(v, p));
    s.median_ratio = q(ratio, 0.5);
    return s;
}

// --------------------------------------------------------- distribution fit

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    std::size_t n = std::max(p.size(), q.size());
    for (std::size_t i = 0; i < n; ++i) {
        double a = i < p.size() ? p[i] : 0.0;
        double bq = i < q.size() ? q[i] : 0.0;
        s += std::fabs(a - bq);
    }
    return 0.5 * s;
}

// Single-site empirical law over bulk sites (optionally excluding the maximum
// site) against the grand-canonical marginal at fugacity phi.
struct EquivalenceResult {
    double tv = 0.0;
    std::size_t n_draws = 0;
};

inline EquivalenceResult equivalence_test(const SampleBatch& batch, const Marginal& m,
                                          double phi, bool exclude_argmax) {
    std::vector<double> ref(m.K + 1);
    if (phi == 1.0) {
        ref = m.p;
    } else {
        auto part = partition(m.spec, m.log_w, phi);
        for (std::size_t n = 0; n <= m.K; ++n)
            ref[n] = std::exp(m.log_w[n] + static_cast<double>(n) * std::log(phi) -
                              part.log_z);
        if (phi == 0.0) {
            std::fill(ref.begin(), ref.end(), 0.0);
            ref[0] = 1.0;
        }
    }
    std::vector<double> emp(ref.size(), 0.0);
    std::size_t n = 0;
    for (const auto& rec : batch.records) {
        if (rec.eta.empty()) throw ConfigError("equivalence_test needs profiles");
        for (std::size_t x = 0; x < rec.eta.size(); ++x) {
            if (exclude_argmax && x == rec.argmax) continue;
            auto v = static_cast<std::size_t>(rec.eta[x]);
            if (v < emp.size()) emp[v] += 1.0;
            ++n;
        }
    }
    for (double& e : emp) e /= static_cast<double>(n);
    return {tv_distance(emp, ref), n};
}

// ----------------------------------------------------------------- chi^2

struct Chi2Result {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

// Pearson test with tail pooling so every expected count is >= min_expected.
inline Chi2Result chi2_test(std::span<const double> observed_counts,
                            std::span<const double> expected_probs,
                            double total, double min_expected = 5.0) {
    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    std::size_t n = std::max(observed_counts.size(), expected_probs.size());
    for (std::size_t i = 0; i < n; ++i) {
        o_acc += i < observed_counts.size() ? observed_counts[i] : 0.0;
        e_acc += (i < expected_probs.size() ? expected_probs[i] : 0.0) * total;
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!exp.empty()) {
            obs.back() += o_acc;
            exp.back() += e_acc;
        } else {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        }
    }
    Chi2Result r;
    if (exp.size() < 2) return r;
    for (std::size_t i = 0; i < exp.size(); ++i)
        r.statistic += sq(obs[i] - exp[i]) / exp[i];
    r.dof = exp.size() - 1;
    r.p_value = chi2_sf(r.statistic, static_cast<double>(r.dof));
    return r;
}

// ------------------------------------------------------------- csv output

struct StatRow {
    std::string statistic, regime;
    std::size_t L = 0;
    std::int64_t N = 0;
    double value = 0.0, ci_lo = 0.0, ci_hi = 0.0, p_value = 0.0;
};

inline void write_stat_rows(std::ostream& os, std::span<const StatRow> rows) {
    os << "statistic,regime,L,N,value,ci_lo,ci_hi,p_value\n";
    for (const auto& r : rows)
        os << r.statistic << ',' << r.regime << ',' << r.L << ',' << r.N << ','
           << r.value << ',' << r.ci_lo << ',' << r.ci_hi << ',' << r.p_value
           << '\n';
}

}  // namespace zrp
