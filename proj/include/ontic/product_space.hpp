#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "ontic/quantum.hpp"

namespace ontic {

// Largest number of cells an exact enumeration (or a materialized ontic
// space) may touch before the symbolic route is mandatory.
inline constexpr long long kEnumerationCap = 1LL << 20;

/// Product measure over the ontic states of a finite context list: one
/// categorical distribution per context, coordinates independent. For a pure
/// state psi the weight of projector i in context C is |<psi|e_i^C>|^2.
class ProductMeasure {
  public:
    ProductMeasure(std::string label, int dim, std::vector<RealVector> rows);

    static ProductMeasure from_pure_state(const PureState& psi,
                                          const std::vector<Context>& contexts,
                                          std::string label = "");

    const std::string& label() const { return label_; }
    int dim() const { return dim_; }
    int context_count() const { return static_cast<int>(rows_.size()); }
    const RealVector& row(int context_index) const { return rows_.at(context_index); }

    /// True when the context's distribution is a (near-)point mass; the index
    /// receiving the mass is stored in *index.
    bool deterministic_at(int context_index, int* index, double tol = 1e-12) const;

    double weight(int context_index, int projector_index) const {
        return rows_.at(context_index)(projector_index);
    }

    /// log of the product weight of a full coordinate assignment
    /// (-inf when any factor vanishes).
    double log_weight(const std::vector<int>& assignment) const;

    /// One categorical draw per context.
    std::vector<int> sample(Rng& rng) const;

  private:
    std::string label_;
    int dim_;
    std::vector<RealVector> rows_;
};

/// Event constrained on finitely many coordinates: context index -> admitted
/// projector indices. No constraints means the full space.
class CylinderEvent {
  public:
    CylinderEvent() = default;

    void constrain(int context_index, std::set<int> admitted, int dim);
    void constrain_to(int context_index, int projector_index, int dim);

    const std::map<int, std::set<int>>& constraints() const { return constraints_; }
    bool contains(const std::vector<int>& assignment) const;

  private:
    std::map<int, std::set<int>> constraints_;
};

/// Exact probability of a cylinder event: product over constrained contexts
/// of the admitted weight mass. No enumeration.
double cylinder_measure(const ProductMeasure& mu, const CylinderEvent& event);

/// Finite boolean combination of cylinder events.
class Event {
  public:
    static Event full();
    static Event cylinder(CylinderEvent c);
    static Event all_of(std::vector<Event> children);
    static Event any_of(std::vector<Event> children);
    static Event complement(Event child);

    Event operator&(const Event& other) const;
    Event operator|(const Event& other) const;
    Event operator~() const;

    std::set<int> coordinates() const;
    bool contains(const std::map<int, int>& assignment) const;

    /// Structural tree equality (shared subtrees compare fast).
    bool equals(const Event& other) const;

    /// Collects (subevent, polarity) pairs this event implies: polarity true
    /// means every member point lies in the subevent, false means none does.
    /// Sound, not complete.
    void implied_events(std::vector<std::pair<Event, bool>>& out, bool polarity = true) const;

    bool is_cylinder() const;
    const CylinderEvent& as_cylinder() const;

    double probability(const ProductMeasure& mu) const;

  private:
    struct Node;
    std::shared_ptr<const Node> node_;
    explicit Event(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    void collect_coordinates(std::set<int>& out) const;
};

/// Exact probability of a boolean event. Splits into independent factors over
/// disjoint coordinate blocks where possible; otherwise enumerates over the
/// constrained coordinates (cell count capped at kEnumerationCap).
double event_probability(const ProductMeasure& mu, const Event& event);

/// Exact set disjointness. Uses the complete per-coordinate rule for pairs of
/// cylinders and structural implication for boolean trees, falling back to
/// enumeration within the cap. Throws if undecidable within the cap.
bool events_disjoint(const Event& a, const Event& b, int dim, int context_count);

/// Exact total variation distance between two product measures restricted to
/// the sub-sigma-algebra generated by the given coordinates. Coordinates that
/// are deterministic under either measure are collapsed in closed form; the
/// rest are enumerated (cells capped at kEnumerationCap).
double restricted_variational_distance(const ProductMeasure& mu, const ProductMeasure& nu,
                                       const std::set<int>& coordinates);

/// Product of per-context Bhattacharyya coefficients over the coordinates;
/// upper bound on the overlap 1 - TV, so 1 - bound is a certified TV lower
/// bound.
double bhattacharyya_product(const ProductMeasure& mu, const ProductMeasure& nu,
                             const std::set<int>& coordinates);

}  // namespace ontic
