#include "ontic/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ontic {

ProductMeasure::ProductMeasure(std::string label, int dim, std::vector<RealVector> rows)
    : label_(std::move(label)), dim_(dim), rows_(std::move(rows)) {
    if (dim_ < 2) throw std::invalid_argument("ProductMeasure: dimension out of range");
    for (auto& r : rows_) {
        if (r.size() != dim_)
            throw std::invalid_argument("ProductMeasure: row size != dimension");
        double sum = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (r(i) < -1e-12) throw std::invalid_argument("ProductMeasure: negative weight");
            sum += std::max(0.0, r(i));
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("ProductMeasure: row does not sum to 1");
        r = r.cwiseMax(0.0) / sum;
    }
}

ProductMeasure ProductMeasure::from_pure_state(const PureState& psi,
                                               const std::vector<Context>& contexts,
                                               std::string label) {
    std::vector<RealVector> rows;
    rows.reserve(contexts.size());
    for (const auto& c : contexts) {
        require_same_dim(c.dim(), psi.dim(), "ProductMeasure::from_pure_state");
        RealVector row(c.dim());
        for (int i = 0; i < c.dim(); ++i) row(i) = fidelity(psi, c.basis_vector(i));
        rows.push_back(std::move(row));
    }
    return ProductMeasure(std::move(label), psi.dim(), std::move(rows));
}

bool ProductMeasure::deterministic_at(int context_index, int* index, double tol) const {
    const RealVector& r = rows_.at(context_index);
    Eigen::Index argmax = 0;
    const double top = r.maxCoeff(&argmax);
    if (top >= 1.0 - tol) {
        *index = static_cast<int>(argmax);
        return true;
    }
    return false;
}

double ProductMeasure::log_weight(const std::vector<int>& assignment) const {
    if (assignment.size() != rows_.size())
        throw std::invalid_argument("log_weight: assignment length mismatch");
    double lw = 0.0;
    for (std::size_t c = 0; c < rows_.size(); ++c) {
        const double w = rows_[c](assignment[c]);
        if (w <= 0.0) return -std::numeric_limits<double>::infinity();
        lw += std::log(w);
    }
    return lw;
}

std::vector<int> ProductMeasure::sample(Rng& rng) const {
    std::vector<int> out(rows_.size());
    for (std::size_t c = 0; c < rows_.size(); ++c) {
        std::span<const double> row(rows_[c].data(), static_cast<std::size_t>(rows_[c].size()));
        out[c] = static_cast<int>(rng.categorical(row));
    }
    return out;
}

void CylinderEvent::constrain(int context_index, std::set<int> admitted, int dim) {
    if (admitted.empty())
        throw std::invalid_argument("CylinderEvent: empty constraint set");
    if (context_index < 0)
        throw std::invalid_argument("CylinderEvent: negative context index");
    for (int i : admitted)
        if (i < 0 || i >= dim)
            throw std::invalid_argument("CylinderEvent: projector index out of range");
    auto it = constraints_.find(context_index);
    if (it == constraints_.end()) {
        constraints_.emplace(context_index, std::move(admitted));
        return;
    }
    std::set<int> narrowed;
    std::set_intersection(it->second.begin(), it->second.end(), admitted.begin(), admitted.end(),
                          std::inserter(narrowed, narrowed.begin()));
    if (narrowed.empty())
        throw std::invalid_argument("CylinderEvent: contradictory constraints on context " +
                                    std::to_string(context_index));
    it->second = std::move(narrowed);
}

void CylinderEvent::constrain_to(int context_index, int projector_index, int dim) {
    constrain(context_index, std::set<int>{projector_index}, dim);
}

bool CylinderEvent::contains(const std::vector<int>& assignment) const {
    for (const auto& [c, admitted] : constraints_) {
        if (c >= static_cast<int>(assignment.size()))
            throw std::invalid_argument("CylinderEvent: assignment too short");
        if (!admitted.count(assignment[c])) return false;
    }
    return true;
}

double cylinder_measure(const ProductMeasure& mu, const CylinderEvent& event) {
    double p = 1.0;
    for (const auto& [c, admitted] : event.constraints()) {
        if (c >= mu.context_count())
            throw std::invalid_argument("cylinder_measure: event references unknown context " +
                                        std::to_string(c));
        double mass = 0.0;
        for (int i : admitted) mass += mu.weight(c, i);
        p *= mass;
    }
    return p;
}

namespace {

bool cylinders_disjoint(const CylinderEvent& a, const CylinderEvent& b) {
    // Complete for cylinders: disjoint iff some shared coordinate admits no
    // common index.
    for (const auto& [c, sa] : a.constraints()) {
        auto it = b.constraints().find(c);
        if (it == b.constraints().end()) continue;
        bool common = false;
        for (int i : sa)
            if (it->second.count(i)) {
                common = true;
                break;
            }
        if (!common) return true;
    }
    return false;
}

// Enumerates all assignments over the sorted coordinate list; returns false
// when the cell count exceeds the enumeration cap.
template <typename F>
bool enumerate_cells(const std::vector<int>& coords, int dim, F&& f) {
    long long cells = 1;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        cells *= dim;
        if (cells > kEnumerationCap) return false;
    }
    std::vector<int> digits(coords.size(), 0);
    std::map<int, int> assignment;
    for (int c : coords) assignment[c] = 0;
    for (;;) {
        f(const_cast<const std::map<int, int>&>(assignment));
        std::size_t pos = 0;
        while (pos < digits.size()) {
            if (++digits[pos] < dim) {
                assignment[coords[pos]] = digits[pos];
                break;
            }
            digits[pos] = 0;
            assignment[coords[pos]] = 0;
            ++pos;
        }
        if (pos >= digits.size()) break;
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Boolean event trees

struct Event::Node {
    enum class Kind { Full, Leaf, And, Or, Not };
    Kind kind = Kind::Full;
    CylinderEvent leaf;
    std::vector<Event> children;
};

Event Event::full() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Full;
    return Event(std::move(n));
}

Event Event::cylinder(CylinderEvent c) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Leaf;
    n->leaf = std::move(c);
    return Event(std::move(n));
}

Event Event::all_of(std::vector<Event> children) {
    if (children.empty()) return full();
    if (children.size() == 1) return children.front();
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::And;
    n->children = std::move(children);
    return Event(std::move(n));
}

Event Event::any_of(std::vector<Event> children) {
    if (children.empty()) throw std::invalid_argument("Event::any_of: no children");
    if (children.size() == 1) return children.front();
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Or;
    n->children = std::move(children);
    return Event(std::move(n));
}

Event Event::complement(Event child) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Not;
    n->children.push_back(std::move(child));
    return Event(std::move(n));
}

Event Event::operator&(const Event& other) const { return all_of({*this, other}); }
Event Event::operator|(const Event& other) const { return any_of({*this, other}); }
Event Event::operator~() const { return complement(*this); }

void Event::collect_coordinates(std::set<int>& out) const {
    switch (node_->kind) {
        case Node::Kind::Full:
            return;
        case Node::Kind::Leaf:
            for (const auto& [c, s] : node_->leaf.constraints()) out.insert(c);
            return;
        default:
            for (const auto& ch : node_->children) ch.collect_coordinates(out);
            return;
    }
}

std::set<int> Event::coordinates() const {
    std::set<int> out;
    collect_coordinates(out);
    return out;
}

bool Event::contains(const std::map<int, int>& assignment) const {
    switch (node_->kind) {
        case Node::Kind::Full:
            return true;
        case Node::Kind::Leaf:
            for (const auto& [c, admitted] : node_->leaf.constraints()) {
                auto it = assignment.find(c);
                if (it == assignment.end())
                    throw std::invalid_argument("Event::contains: coordinate " +
                                                std::to_string(c) + " not assigned");
                if (!admitted.count(it->second)) return false;
            }
            return true;
        case Node::Kind::And:
            for (const auto& ch : node_->children)
                if (!ch.contains(assignment)) return false;
            return true;
        case Node::Kind::Or:
            for (const auto& ch : node_->children)
                if (ch.contains(assignment)) return true;
            return false;
        case Node::Kind::Not:
            return !node_->children.front().contains(assignment);
    }
    return false;
}

bool Event::equals(const Event& other) const {
    if (node_ == other.node_) return true;
    if (node_->kind != other.node_->kind) return false;
    if (node_->kind == Node::Kind::Leaf)
        return node_->leaf.constraints() == other.node_->leaf.constraints();
    if (node_->children.size() != other.node_->children.size()) return false;
    for (std::size_t i = 0; i < node_->children.size(); ++i)
        if (!node_->children[i].equals(other.node_->children[i])) return false;
    return true;
}

void Event::implied_events(std::vector<std::pair<Event, bool>>& out, bool polarity) const {
    out.emplace_back(*this, polarity);
    switch (node_->kind) {
        case Node::Kind::And:
            if (polarity)
                for (const auto& ch : node_->children) ch.implied_events(out, true);
            return;
        case Node::Kind::Or:
            if (!polarity)
                for (const auto& ch : node_->children) ch.implied_events(out, false);
            return;
        case Node::Kind::Not:
            node_->children.front().implied_events(out, !polarity);
            return;
        default:
            return;
    }
}

namespace {

double enumerate_probability(const ProductMeasure& mu, const Event& event) {
    std::set<int> coord_set = event.coordinates();
    for (int c : coord_set)
        if (c >= mu.context_count())
            throw std::invalid_argument("event_probability: event references unknown context " +
                                        std::to_string(c));
    std::vector<int> coords(coord_set.begin(), coord_set.end());
    double total = 0.0;
    bool ok = enumerate_cells(coords, mu.dim(), [&](const std::map<int, int>& assignment) {
        if (!event.contains(assignment)) return;
        double p = 1.0;
        for (const auto& [c, i] : assignment) p *= mu.weight(c, i);
        total += p;
    });
    if (!ok)
        throw std::runtime_error(
            "event_probability: constrained coordinates exceed the exact enumeration cap");
    return total;
}

// Groups indices whose coordinate sets overlap into connected components.
std::vector<std::vector<std::size_t>> connected_components(
    const std::vector<std::set<int>>& blocks) {
    const std::size_t n = blocks.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<int, std::size_t> owner;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c : blocks[i]) {
            auto [it, inserted] = owner.emplace(c, i);
            if (!inserted) parent[find(i)] = find(it->second);
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

}  // namespace

double Event::probability(const ProductMeasure& mu) const {
    switch (node_->kind) {
        case Node::Kind::Full:
            return 1.0;
        case Node::Kind::Leaf:
            return cylinder_measure(mu, node_->leaf);
        case Node::Kind::Not:
            return 1.0 - node_->children.front().probability(mu);
        case Node::Kind::Or: {
            // De Morgan; the And path below handles independence splitting.
            std::vector<Event> complements;
            complements.reserve(node_->children.size());
            for (const auto& ch : node_->children) complements.push_back(complement(ch));
            return 1.0 - all_of(std::move(complements)).probability(mu);
        }
        case Node::Kind::And: {
            std::vector<std::set<int>> blocks;
            blocks.reserve(node_->children.size());
            for (const auto& ch : node_->children) blocks.push_back(ch.coordinates());
            double p = 1.0;
            for (const auto& component : connected_components(blocks)) {
                if (component.size() == 1) {
                    p *= node_->children[component.front()].probability(mu);
                } else {
                    std::vector<Event> members;
                    for (std::size_t i : component) members.push_back(node_->children[i]);
                    p *= enumerate_probability(mu, all_of(std::move(members)));
                }
            }
            return p;
        }
    }
    return 0.0;
}

double event_probability(const ProductMeasure& mu, const Event& event) {
    const double p = event.probability(mu);
    return std::clamp(p, 0.0, 1.0);
}

bool events_disjoint(const Event& a, const Event& b, int dim, int context_count) {
    std::vector<std::pair<Event, bool>> ia, ib;
    a.implied_events(ia, true);
    b.implied_events(ib, true);
    for (const auto& [u, su] : ia) {
        for (const auto& [v, sv] : ib) {
            if (su != sv && u.equals(v)) return true;
            if (su && sv && u.is_cylinder() && v.is_cylinder() &&
                cylinders_disjoint(u.as_cylinder(), v.as_cylinder()))
                return true;
        }
    }
    // Exhaustive fallback over the union of constrained coordinates.
    std::set<int> coord_set = a.coordinates();
    for (int c : b.coordinates()) coord_set.insert(c);
    for (int c : coord_set)
        if (c < 0 || c >= context_count)
            throw std::invalid_argument("events_disjoint: event references unknown context");
    std::vector<int> coords(coord_set.begin(), coord_set.end());
    bool overlap = false;
    bool ok = enumerate_cells(coords, dim, [&](const std::map<int, int>& assignment) {
        if (overlap) return;
        if (a.contains(assignment) && b.contains(assignment)) overlap = true;
    });
    if (!ok)
        throw std::runtime_error(
            "events_disjoint: undecidable structurally and coordinates exceed the "
            "enumeration cap");
    return !overlap;
}

bool Event::is_cylinder() const { return node_->kind == Node::Kind::Leaf; }

const CylinderEvent& Event::as_cylinder() const {
    if (!is_cylinder()) throw std::logic_error("Event::as_cylinder: not a cylinder");
    return node_->leaf;
}

double restricted_variational_distance(const ProductMeasure& mu, const ProductMeasure& nu,
                                       const std::set<int>& coordinates) {
    if (mu.dim() != nu.dim() || mu.context_count() != nu.context_count())
        throw std::invalid_argument("restricted_variational_distance: measure shape mismatch");
    double mu_prefix = 1.0;  // mu-mass factors on nu-forced coordinates
    double nu_prefix = 1.0;  // nu-mass factors on mu-forced coordinates
    std::vector<int> free_coords;
    for (int c : coordinates) {
        if (c < 0 || c >= mu.context_count())
            throw std::invalid_argument("restricted_variational_distance: unknown context " +
                                        std::to_string(c));
        int i = -1, j = -1;
        const bool mu_det = mu.deterministic_at(c, &i);
        const bool nu_det = nu.deterministic_at(c, &j);
        if (mu_det && nu_det) {
            if (i != j) return 1.0;  // point masses on different indices
        } else if (mu_det) {
            nu_prefix *= nu.weight(c, i);
        } else if (nu_det) {
            mu_prefix *= mu.weight(c, j);
        } else {
            free_coords.push_back(c);
        }
    }
    double overlap = 0.0;
    if (free_coords.empty()) {
        overlap = std::min(mu_prefix, nu_prefix);
    } else {
        bool ok = enumerate_cells(free_coords, mu.dim(), [&](const std::map<int, int>& cell) {
            double pm = mu_prefix, pn = nu_prefix;
            for (const auto& [c, i] : cell) {
                pm *= mu.weight(c, i);
                pn *= nu.weight(c, i);
            }
            overlap += std::min(pm, pn);
        });
        if (!ok)
            throw std::runtime_error(
                "restricted_variational_distance: free coordinates exceed the enumeration cap");
    }
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

double bhattacharyya_product(const ProductMeasure& mu, const ProductMeasure& nu,
                             const std::set<int>& coordinates) {
    if (mu.dim() != nu.dim() || mu.context_count() != nu.context_count())
        throw std::invalid_argument("bhattacharyya_product: measure shape mismatch");
    double bc = 1.0;
    for (int c : coordinates) {
        if (c < 0 || c >= mu.context_count())
            throw std::invalid_argument("bhattacharyya_product: unknown context " +
                                        std::to_string(c));
        double s = 0.0;
        for (int i = 0; i < mu.dim(); ++i) s += std::sqrt(mu.weight(c, i) * nu.weight(c, i));
        bc *= std::min(s, 1.0);
    }
    return bc;
}

}  // namespace ontic
