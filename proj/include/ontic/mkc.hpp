#pragma once

#include <cstdint>

#include "ontic/product_space.hpp"

namespace ontic::mkc {

/// Finite truncation of a totally incompatible, epsilon-dense context set.
/// Cross-context fidelities must stay inside (tau, 1 - tau); near-1 values
/// are checked through stably computed defects so margins far below machine
/// epsilon relative to 1 remain meaningful.
struct ContextSet {
    int dim = 0;
    double epsilon = 0.0;
    double tau = 0.0;
    std::uint64_t seed = 0;
    std::vector<Context> contexts;
    std::vector<double> precisions;  // per member, the precision it was generated at
    std::vector<double> margins;     // per member, its incompatibility margin
    std::vector<Context> targets;    // registered approximation targets

    /// Margin applied to a cross pair: the weaker of the two members'.
    double pair_margin(int i, int j) const;

    struct IncompatibilityScan {
        double min_fidelity = 1.0;
        double min_defect = 1.0;  // min over cross pairs of 1 - fidelity
        int worst_low_a = -1, worst_low_b = -1;
        int worst_high_a = -1, worst_high_b = -1;
        bool pass = false;
    };
    /// Exhaustive scan over all cross-context projector pairs.
    IncompatibilityScan incompatibility_scan() const;

    struct CoverageScan {
        std::vector<double> defects;  // per registered target
        double max_defect = 0.0;
        bool pass = false;
    };
    /// Checks every registered target is epsilon-approximated by some member.
    CoverageScan coverage_scan() const;

    ProductMeasure measure_for(const PureState& psi, std::string label = "") const;
};

/// Rejection sampling: perturbs each target basis by a small seeded random
/// rotation (angle scale epsilon/4) until the result epsilon-approximates its
/// target and is totally incompatible with everything accepted so far.
ContextSet generate_mkc(const std::vector<Context>& targets, double epsilon, double tau,
                        std::uint64_t seed, int retry_budget = 200);

/// Adds one context approximating `target` at the given precision, checked
/// totally incompatible against the accepted members at margin
/// min(set.tau, precision-derived). Returns the new index.
int extend_set(ContextSet& set, const Context& target, double precision, Rng& rng,
               int retry_budget, const std::string& label);

struct SnapResult {
    int context_index = -1;
    std::vector<int> matching;  // eigenvector i -> member projector matching[i]
    double defect = 0.0;        // max_i (1 - Tr([e_i][e'_i]))
    Matrix snapped;             // A' with the original eigenvalues on the snapped basis
};

/// Picks the member context best aligned with the observable's eigencontext
/// and rebuilds the observable on it; the spectrum is preserved exactly.
SnapResult snap_observable(const Observable& observable, const ContextSet& set);

struct EulerValue {
    double value = 1.0;       // truncated product prod_{k<=K} (1 - q^k)
    double lower = 1.0;       // certified interval containing the true E(q)
    double upper = 1.0;
    double tail_bound = 0.0;  // sum_{k>K} q^k = q^{K+1} / (1-q)
    int terms = 0;
};

/// Truncated Euler product with a certified enclosure of the infinite value.
EulerValue euler_function(double q, int K);

/// Smallest K whose geometric tail bound is below tail_target.
int euler_depth(double q, double tail_target);

/// Root of E(q_n) = 1 - 1/n by bisection, |E - (1 - 1/n)| < 1e-12.
double solve_qn(int n);

/// Fidelity schedule for the measure-one construction: factor k must have
/// defect below q_n^k.
struct EulerSchedule {
    int n = 0;
    double q_n = 0.0;
    int K = 0;
    std::vector<double> defect_budgets;  // q_n^k, k = 1..K
    double truncated_product = 1.0;      // prod (1 - q_n^k) > 1 - 1/n
    double tail_bound = 0.0;
    bool tail_certified = false;  // tail_bound < 1e-12

    EulerSchedule(int n, int K);
};

struct Theorem3Factor {
    int k = 0;
    int context_index = -1;
    double defect = 0.0;   // 1 - |<psi|psi_k>|^2, stably computed
    double budget = 0.0;   // q_n^k
    bool floored = false;  // budget fell below the representable construction floor
    double phi_factor = -1.0;
};

struct Theorem3Set {
    EulerSchedule schedule;
    Event event;
    std::vector<Theorem3Factor> factors;
    double log_mu_psi = 0.0;
    double mu_psi = 1.0;
    // Decay certificate for the reference phi (when supplied): factors stay
    // below 1 - delta from index decay_onset on.
    bool has_phi = false;
    double log_mu_phi = 0.0;
    double mu_phi = 1.0;
    double decay_delta = 0.0;
    int decay_onset = -1;
};

/// Cylinder event over K on-demand contexts following the Euler schedule.
/// mu_psi(event) = prod |<psi|psi_k>|^2 > prod (1 - q_n^k) >= 1 - 1/n.
Theorem3Set theorem3_set(const PureState& psi, int n, int K, ContextSet& set, Rng& rng,
                         const PureState* phi = nullptr);

struct TrajectoryRow {
    int n = 0;
    int K = 0;
    double q_n = 0.0;
    double mu_psi = 0.0;
    double mu_phi = 0.0;
    double euler_lower_bound = 0.0;
};

/// mu_psi and mu_phi over the (n, K) grid; each fixed n reuses one generated
/// context sequence, rows are prefix products.
std::vector<TrajectoryRow> tail_diagnostic(const PureState& psi, const std::vector<int>& n_grid,
                                           const std::vector<int>& k_grid, ContextSet& set,
                                           Rng& rng, const PureState* phi = nullptr);

struct FinitePrecisionRow {
    int preparation = 0;
    int observable = 0;
    int context_index = -1;
    double snap_defect = 0.0;
    double analytic_l1 = 0.0;
    double empirical_l1 = -1.0;  // -1 in analytic-only mode
    double sampling_band = 0.0;
    bool pass = false;
};

struct FinitePrecisionReport {
    std::vector<FinitePrecisionRow> rows;
    double max_analytic_l1 = 0.0;
    double max_empirical_l1 = 0.0;
    double analytic_bound = 0.0;  // d * epsilon
    long long shots = 0;
    bool pass = false;
    long long ontic_state_count = 0;  // d^m, saturating
    std::string determinateness_note;
};

/// Shot-limited statistics of snapped observables against the exact Born
/// statistics of the originals. shots = 0 runs the analytic-only comparison.
FinitePrecisionReport finite_precision_report(const ContextSet& set,
                                              const std::vector<Matrix>& preparations,
                                              const std::vector<Observable>& observables,
                                              long long shots, Rng& rng);

}  // namespace ontic::mkc
