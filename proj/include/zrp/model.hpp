#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "zrp/common.hpp"

namespace zrp {

// Jump-rate / stationary-weight families. PowerLawRates and StretchedRates
// define g(n) = 1 + b/n^lambda; ExplicitStretchedWeights defines the weights
// w(n) = exp(-(b/(1-lambda)) n^{1-lambda}) directly (unit prefactor).
enum class Family { PowerLawRates, StretchedRates, ExplicitStretchedWeights };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::PowerLawRates: return "power_law_rates";
        case Family::StretchedRates: return "stretched_rates";
        case Family::ExplicitStretchedWeights: return "explicit_stretched_weights";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "power_law_rates" || s == "pl") return Family::PowerLawRates;
    if (s == "stretched_rates" || s == "sr") return Family::StretchedRates;
    if (s == "explicit_stretched_weights" || s == "sx")
        return Family::ExplicitStretchedWeights;
    throw ConfigError("unknown family: " + s);
}

struct ModelSpec {
    Family family = Family::StretchedRates;
    double b = 2.0;
    double lambda = 0.6;
    double cutoff_policy = 1e-14;  // certified tail-mass bound for support cutoff

    void validate() const {
        if (b <= 0.0) throw ConfigError("b must be positive");
        if (family == Family::PowerLawRates) {
            if (lambda != 1.0)
                throw ConfigError("PowerLawRates requires lambda = 1");
        } else {
            if (!(lambda > 0.0 && lambda < 1.0))
                throw ConfigError("stretched families require lambda in (0,1)");
        }
        if (!(cutoff_policy > 0.0 && cutoff_policy < 1.0))
            throw ConfigError("cutoff_policy must be in (0,1)");
    }

    bool is_power_law() const { return family == Family::PowerLawRates; }

    // jump rate g(n); g(0) = 0
    double g(std::int64_t n) const {
        if (n <= 0) return 0.0;
        double nn = static_cast<double>(n);
        switch (family) {
            case Family::PowerLawRates:
                return 1.0 + b / nn;
            case Family::StretchedRates:
                return 1.0 + b / std::pow(nn, lambda);
            case Family::ExplicitStretchedWeights: {
                double c = b / (1.0 - lambda);
                double prev = n == 1 ? 0.0 : std::pow(nn - 1.0, 1.0 - lambda);
                return std::exp(c * (std::pow(nn, 1.0 - lambda) - prev));
            }
        }
        return 0.0;
    }

    double log_g(std::int64_t n) const {
        if (n <= 0) return neg_inf;
        double nn = static_cast<double>(n);
        switch (family) {
            case Family::PowerLawRates:
                return std::log1p(b / nn);
            case Family::StretchedRates:
                return std::log1p(b / std::pow(nn, lambda));
            case Family::ExplicitStretchedWeights: {
                double c = b / (1.0 - lambda);
                double prev = n == 1 ? 0.0 : std::pow(nn - 1.0, 1.0 - lambda);
                return c * (std::pow(nn, 1.0 - lambda) - prev);
            }
        }
        return neg_inf;
    }
};

// log w(n) for n = 0..K; w(0) = 1, w(n) = w(n-1)/g(n), all in log domain.
inline std::vector<double> build_weights(const ModelSpec& spec, std::size_t K) {
    spec.validate();
    std::vector<double> lw(K + 1);
    lw[0] = 0.0;
    if (spec.family == Family::ExplicitStretchedWeights) {
        double c = spec.b / (1.0 - spec.lambda);
        for (std::size_t n = 1; n <= K; ++n)
            lw[n] = -c * std::pow(static_cast<double>(n), 1.0 - spec.lambda);
    } else {
        for (std::size_t n = 1; n <= K; ++n)
            lw[n] = lw[n - 1] - spec.log_g(static_cast<std::int64_t>(n));
    }
    return lw;
}

}  // namespace zrp
