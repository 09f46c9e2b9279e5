#pragma once

#include "ontic/ontic_model.hpp"
#include "ontic/product_space.hpp"

namespace ontic {

struct AntidistinguishabilityCertificate {
    std::vector<PureState> states;
    Povm povm;
    std::vector<double> residuals;  // Tr([psi_i] E_{a_i})
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool valid = false;
};

/// Certifies that outcome i has probability < tol whenever state i is
/// prepared.
AntidistinguishabilityCertificate is_antidistinguishing(const Povm& povm,
                                                        const std::vector<PureState>& states,
                                                        double tol);

/// The four product states |0>|0>, |0>|+>, |+>|0>, |+>|+> together with the
/// entangled four-outcome basis that anti-distinguishes them.
std::vector<PureState> pbr_states();
Povm pbr_povm();

struct PerturbationReport {
    double eta = 0.0;
    int trials = 0;
    std::vector<double> max_residuals;  // one per trial
    double median_max_residual = 0.0;
    double smallest_max_residual = 0.0;
    double largest_max_residual = 0.0;
};

/// Perturbs each effect by scale-eta Hermitian noise, repairs small PSD
/// violations by clipping, renormalizes to an exact POVM, and reports the
/// distribution of the worst residual. Residuals grow linearly in eta and
/// never return exactly to zero; noise too large to repair is an error.
PerturbationReport perturbation_robustness(const AntidistinguishabilityCertificate& certificate,
                                           double eta, int trials, Rng& rng);

struct DiscriminationReport {
    long long shots = 0;
    long long successes = 0;
    double empirical_rate = 0.0;
    double analytic_rate = 0.0;   // (1 + TV) / 2
    double tv = 0.0;
    double band = 0.0;            // 4 sigma binomial band
    bool within_band = false;
    bool exact_tv = true;
};

/// Single-shot discrimination on a materialized model: equiprobable
/// preparation, one sampled ontic state, maximum-a-posteriori guess (ties
/// toward psi).
DiscriminationReport single_shot_discrimination(const OnticModel& model,
                                                const std::string& psi_label,
                                                const std::string& phi_label, long long shots,
                                                Rng& rng);

/// Product-measure variant used by the symbolic models. The analytic optimum
/// uses the exact TV over all coordinates when enumerable, otherwise a
/// certified lower bound (exact_tv flags which).
DiscriminationReport single_shot_discrimination(const ProductMeasure& mu,
                                                const ProductMeasure& nu, long long shots,
                                                Rng& rng);

}  // namespace ontic
