#pragma once

#include "ontic/ontic_model.hpp"
#include "ontic/product_space.hpp"

namespace ontic::gudder {

/// Ordered finite truncation of the set of all contexts; requires d > 2
/// (in dimension 2 a state belongs to exactly one context, which breaks the
/// support-set constructions).
class ContextList {
  public:
    explicit ContextList(int dim);
    ContextList(int dim, std::vector<Context> contexts);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(contexts_.size()); }
    const Context& context(int i) const { return contexts_.at(i); }
    const std::vector<Context>& contexts() const { return contexts_; }

    int add(Context c);

    /// Indices of contexts with [psi] among their projectors.
    std::vector<int> containing(const PureState& psi, double tol = kRayTol) const;

    /// Appends embedding contexts (psi completed by seeded random orthonormal
    /// vectors) until at least k contain psi; returns the first k indices.
    std::vector<int> ensure_containing(const PureState& psi, int k, Rng& rng,
                                       const std::string& label_prefix);

  private:
    int dim_;
    std::vector<Context> contexts_;
};

/// Finite truncation of the contextual value-definite model: ontic states
/// assign one projector per context, epistemic states are product measures.
struct Model {
    ContextList contexts;
    std::vector<std::string> preparation_labels;
    std::vector<PureState> preparations;
    std::vector<ProductMeasure> measures;  // parallel to preparations

    long long ontic_size() const;  // d^m, saturating
    const ProductMeasure& measure(const std::string& label) const;
    const PureState& preparation(const std::string& label) const;
};

/// Builds the model for the given truncation; labels default to p0, p1, ...
Model build_gudder(ContextList contexts, std::vector<PureState> preparations,
                   std::vector<std::string> labels = {});

/// Explicit OnticModel over all d^m ontic states, with one projective POVM
/// and one deterministic response function per context. Requires
/// d^m <= kEnumerationCap.
OnticModel materialize(const Model& model);

/// Decodes coordinate c of the mixed-radix ontic state index (context 0 is
/// the least significant digit).
int decode_coordinate(long long state_index, int dim, int context_index);

/// Contextual definite value Tr(A lambda(C)); requires the observable to
/// commute with every projector of the context.
double value_assignment(const Model& model, const std::vector<int>& ontic_assignment,
                        const Observable& observable, int context_index);

/// Event constraining lambda(C) = [psi] on the first k psi-containing
/// contexts. mu_psi(event) = 1; mu_phi(event) = fidelity(psi,phi)^k.
CylinderEvent support_set(const PureState& psi, int k, const ContextList& contexts);

/// Event constraining lambda(C) = [psi] on every psi-containing context of
/// the finite list. With zero such contexts this is the full space; the
/// non-measurability of the infinite-list analog does not arise here.
CylinderEvent strict_support(const PureState& psi, const ContextList& contexts);

struct CanonicalModification {
    std::vector<std::string> labels;
    std::map<std::string, Event> events;
    std::map<std::string, double> measures;      // mu_i of its own modified set, exact
    std::map<std::string, double> union_bounds;  // 1 - sum_{j != i} fid_ij^k
    double max_pair_fidelity = 0.0;
    int k = 0;
};

/// Finite analog of the canonically modified psi-ontic subsets: each state's
/// support set intersected with the complements of every other state's
/// support set. Output events are pairwise disjoint exactly.
CanonicalModification canonical_modification(const std::vector<PureState>& states, int k,
                                             ContextList& contexts, Rng& rng,
                                             double measure_floor = 0.0);

struct PerpendicularSplit {
    PureState bridge;        // phi' orthogonal to phi, non-orthogonal to psi
    double bridge_fidelity;  // |<phi'|psi>|^2
    Event psi_event;         // Lambda_psi intersected with the bridge union
    Event phi_event;         // Lambda_phi intersected with its complement
    double mu_psi_first;     // 1 - (1 - bridge_fidelity)^k
    double mu_phi_first;     // exactly 0
};

/// Alternative disjointification through a state orthogonal to phi but not to
/// psi; needs non-commuting inputs and d > 2.
PerpendicularSplit perpendicular_disjointification(const PureState& psi, const PureState& phi,
                                                   int k, ContextList& contexts, Rng& rng);

/// Onticity report over all preparation pairs. Uses the exact full-space TV
/// when the enumeration fits the cap, otherwise the best certified lower
/// bound (deterministic-coordinate collapse and Bhattacharyya product), with
/// bound_used set.
OnticityReport onticity_report(const Model& model, double tol);

struct TrajectoryRow {
    int k = 0;
    double exact_tv = 0.0;
    bool exact_available = false;
    double tv_lower_bound = 0.0;
    double overlap_upper_bound = 1.0;
};

/// TV restricted to the first k psi-contexts and first k phi-contexts, per k.
std::vector<TrajectoryRow> onticity_trajectory(const PureState& psi, const PureState& phi,
                                               int k_max, ContextList& contexts, Rng& rng);

/// Symbolic counterpart of check_psi_determinate for product-space models:
/// exact disjointness on events plus exact measure of each event under its
/// own state.
DeterminatenessReport check_support_events(const Model& model,
                                           const std::map<std::string, Event>& events,
                                           double tol);

}  // namespace ontic::gudder
