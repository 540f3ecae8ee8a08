#pragma once

#include <cmath>
#include <vector>

#include "sroc/bivariate.hpp"
#include "sroc/contingency.hpp"
#include "sroc/numeric.hpp"
#include "sroc/random.hpp"

namespace sroc::testing {

/// Four-reader studies whose restricted-likelihood optimum lies inside the
/// brute-force box sd in [0.01, 2], |rho| <= 0.95.
inline const std::vector<std::vector<ContingencyTable>> kInteriorFixtures = {
    {{40, 5, 10, 45}, {30, 10, 20, 40}, {45, 15, 5, 35}, {25, 3, 25, 47}},
    {{40, 12, 10, 38}, {40, 4, 10, 46}, {30, 12, 20, 38}, {45, 20, 5, 30}},
    {{20, 4, 10, 36}, {25, 2, 5, 38}, {18, 8, 12, 32}, {27, 10, 3, 30}},
    {{45, 10, 5, 40}, {38, 3, 12, 47}, {42, 18, 8, 32}, {30, 6, 20, 44}},
    {{50, 20, 30, 80}, {65, 12, 15, 88}, {55, 30, 25, 70}, {72, 25, 8, 75}},
};

/// Four-reader studies whose optimum has |rho| -> 1, outside the box.
inline const std::vector<std::vector<ContingencyTable>> kBoundaryFixtures = {
    {{80, 20, 20, 80}, {60, 8, 40, 92}, {90, 35, 10, 65}, {70, 12, 30, 88}},
    {{35, 6, 15, 44}, {42, 15, 8, 35}, {30, 3, 20, 47}, {44, 8, 6, 42}},
};

inline std::vector<LogitPair> to_logits(const std::vector<ContingencyTable>& tables) {
    std::vector<LogitPair> out;
    for (const auto& t : tables) out.push_back(logit_pair(t));
    return out;
}

struct GridMax {
    double loglik = -HUGE_VAL;
    double sd_a = 0.0;
    double sd_b = 0.0;
    double rho = 0.0;
};

/// Exhaustive search of the restricted log-likelihood over
/// (sd_A, sd_B, rho) in [0.01,2] x [0.01,2] x [-0.95,0.95] at step 0.01.
inline GridMax brute_force_reml(std::span<const LogitPair> obs) {
    GridMax best;
    for (int a = 1; a <= 200; ++a) {
        for (int b = 1; b <= 200; ++b) {
            for (int r = -95; r <= 95; ++r) {
                const double ll = restricted_loglik(obs, sigma_from_sd(a * 0.01, b * 0.01, r * 0.01));
                if (ll > best.loglik) best = {ll, a * 0.01, b * 0.01, r * 0.01};
            }
        }
    }
    return best;
}

/// Reader tables drawn from a bivariate-normal logit model.
inline StudyDataset simulate_bivariate(int readers, int n_diseased, int n_healthy, Vec2 mu, Sym2 sigma,
                                       std::uint64_t seed) {
    const Chol2 l = cholesky(sigma);
    StudyDataset ds{"bivariate-sim", {}};
    for (int i = 0; i < readers; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const double z0 = rng.normal();
        const double z1 = rng.normal();
        const double se = expit(mu[0] + l.l11 * z0);
        const double fpr = expit(mu[1] + l.l21 * z0 + l.l22 * z1);
        const auto tp = static_cast<double>(rng.binomial(static_cast<std::uint64_t>(n_diseased), se));
        const auto fp = static_cast<double>(rng.binomial(static_cast<std::uint64_t>(n_healthy), fpr));
        ds.records.push_back({"r" + std::to_string(i), std::nullopt, {tp, fp, n_diseased - tp, n_healthy - fp}});
    }
    return ds;
}

}  // namespace sroc::testing
