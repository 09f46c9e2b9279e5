#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ontic/quantum.hpp"

namespace ontic {

/// Finite measurable space of ontic states; the sigma-algebra is the full
/// power set, so events are plain index subsets.
struct OnticSpace {
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }
    void validate() const;

    static OnticSpace indexed(int n, const std::string& prefix = "s");
};

/// Row-stochastic response table: rows are ontic states, columns outcomes.
struct ResponseFunction {
    std::string quantity_label;
    std::vector<std::string> outcome_labels;
    RealMatrix table;  // N x k

    void validate(int space_size, double tol = 1e-10) const;
};

/// Probability distribution over an OnticSpace tied to a preparation.
struct EpistemicState {
    std::string preparation_label;
    RealVector weights;

    void validate(int space_size, double tol = 1e-10) const;
};

/// Ontic model for a fragment: one response function per POVM, and for each
/// preparation a non-empty family of epistemic states.
struct OnticModel {
    Fragment fragment;
    OnticSpace space;
    std::vector<ResponseFunction> responses;  // parallel to fragment.measurements
    std::map<std::string, std::vector<EpistemicState>> epistemic_map;

    void validate_structure() const;
    const std::vector<EpistemicState>& epistemic_states(const std::string& prep_label) const;

    /// Labels of preparations carrying a pure state, in fragment order.
    std::vector<std::string> pure_preparation_labels() const;
};

struct ValidationRow {
    std::string preparation;
    std::string quantity;
    std::string outcome;
    int epistemic_index = 0;
    double model_probability = 0.0;
    double born_probability = 0.0;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Checks that the model reproduces the Born rule on average: for every
/// (preparation, POVM, outcome, epistemic state) the mixture of response
/// probabilities matches Tr(rho E) within tol.
ValidationReport validate_model(const OnticModel& model, double tol = 1e-10);

/// Total variation distance, max over events of |mu(D) - nu(D)| = half L1.
double variational_distance(const EpistemicState& mu, const EpistemicState& nu);

/// Sum of sqrt(mu_i nu_i); upper bound on 1 - variational_distance.
double bhattacharyya_overlap(const EpistemicState& mu, const EpistemicState& nu);

struct OnticityPair {
    std::string psi;
    std::string phi;
    double distance = 0.0;   // exact TV, or a certified lower bound
    bool bound_used = false; // true when distance is a lower bound
};

struct OnticityReport {
    std::vector<OnticityPair> pairs;
    double min_distance = 1.0;
    double tolerance = 0.0;
    bool psi_ontic = false;
    std::string witness_psi;  // maximally overlapping pair when not psi-ontic
    std::string witness_phi;
};

/// For every distinct pure pair and every pairing of their epistemic states,
/// records the variational distance; psi-ontic iff all distances >= 1 - tol.
OnticityReport is_psi_ontic(const OnticModel& model, double tol);

/// Candidate support sets: pure preparation label -> subset of ontic indices.
struct SupportAssignment {
    std::map<std::string, std::set<int>> sets;
};

struct DeterminatenessReport {
    struct DisjointFailure {
        std::string psi, phi;
        int shared_states = 0;
    };
    struct MeasureFailure {
        std::string label;
        int epistemic_index = 0;
        double measure = 0.0;
    };
    std::vector<DisjointFailure> disjoint_failures;
    std::vector<MeasureFailure> measure_failures;
    std::map<std::string, double> min_measures;  // per label, min over Pi_psi
    double tolerance = 0.0;
    bool pass = false;
};

/// Verifies pairwise disjointness exactly and mu(Lambda_psi) >= 1 - tol for
/// every epistemic state of each pure preparation. The union of the supports
/// may be a proper subset of the space; no coverage of Lambda is required.
DeterminatenessReport check_psi_determinate(const OnticModel& model,
                                            const SupportAssignment& assignment,
                                            double tol);

}  // namespace ontic
