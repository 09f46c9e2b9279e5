#include "ontic/gudder.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ontic::gudder {

ContextList::ContextList(int dim) : dim_(dim) {
    if (dim <= 2 || dim > kMaxDim)
        throw std::invalid_argument("ContextList: dimension must satisfy 2 < d <= " +
                                    std::to_string(kMaxDim));
}

ContextList::ContextList(int dim, std::vector<Context> contexts) : ContextList(dim) {
    for (auto& c : contexts) add(std::move(c));
}

int ContextList::add(Context c) {
    require_same_dim(c.dim(), dim_, "ContextList::add");
    for (const auto& existing : contexts_)
        if (existing.label() == c.label())
            throw std::invalid_argument("ContextList: duplicate context label '" + c.label() +
                                        "'");
    contexts_.push_back(std::move(c));
    return static_cast<int>(contexts_.size()) - 1;
}

std::vector<int> ContextList::containing(const PureState& psi, double tol) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (contexts_[i].member_index(psi, tol)) out.push_back(i);
    return out;
}

std::vector<int> ContextList::ensure_containing(const PureState& psi, int k, Rng& rng,
                                                const std::string& label_prefix) {
    std::vector<int> have = containing(psi);
    int next = 0;
    while (static_cast<int>(have.size()) < k) {
        std::string label = label_prefix + "#" + std::to_string(next++);
        bool taken = false;
        for (const auto& c : contexts_)
            if (c.label() == label) taken = true;
        if (taken) continue;
        have.push_back(add(embedding_context(psi, rng, label)));
    }
    have.resize(k);
    return have;
}

long long Model::ontic_size() const {
    long long n = 1;
    for (int i = 0; i < contexts.size(); ++i) {
        if (n > (1LL << 62) / contexts.dim()) return 1LL << 62;
        n *= contexts.dim();
    }
    return n;
}

const ProductMeasure& Model::measure(const std::string& label) const {
    for (std::size_t i = 0; i < preparation_labels.size(); ++i)
        if (preparation_labels[i] == label) return measures[i];
    throw std::invalid_argument("gudder::Model: unknown preparation '" + label + "'");
}

const PureState& Model::preparation(const std::string& label) const {
    for (std::size_t i = 0; i < preparation_labels.size(); ++i)
        if (preparation_labels[i] == label) return preparations[i];
    throw std::invalid_argument("gudder::Model: unknown preparation '" + label + "'");
}

Model build_gudder(ContextList contexts, std::vector<PureState> preparations,
                   std::vector<std::string> labels) {
    if (contexts.size() < 1) throw std::invalid_argument("build_gudder: empty context list");
    if (preparations.empty()) throw std::invalid_argument("build_gudder: no preparations");
    if (labels.empty())
        for (std::size_t i = 0; i < preparations.size(); ++i)
            labels.push_back("p" + std::to_string(i));
    if (labels.size() != preparations.size())
        throw std::invalid_argument("build_gudder: label count mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            throw std::invalid_argument("build_gudder: duplicate preparation label '" + l + "'");

    Model model{std::move(contexts), std::move(labels), std::move(preparations), {}};
    for (std::size_t i = 0; i < model.preparations.size(); ++i) {
        require_same_dim(model.preparations[i].dim(), model.contexts.dim(), "build_gudder");
        model.measures.push_back(ProductMeasure::from_pure_state(
            model.preparations[i], model.contexts.contexts(), model.preparation_labels[i]));
    }
    return model;
}

int decode_coordinate(long long state_index, int dim, int context_index) {
    for (int c = 0; c < context_index; ++c) state_index /= dim;
    return static_cast<int>(state_index % dim);
}

OnticModel materialize(const Model& model) {
    const int d = model.contexts.dim();
    const int m = model.contexts.size();
    const long long n = model.ontic_size();
    if (n > kEnumerationCap)
        throw std::runtime_error("materialize: ontic space of size d^m = " + std::to_string(n) +
                                 " exceeds the materialization cap; use the symbolic route");

    OnticModel out;
    out.fragment.dim = d;
    for (std::size_t i = 0; i < model.preparations.size(); ++i)
        out.fragment.preparations.push_back(
            Preparation::from_pure(model.preparation_labels[i], model.preparations[i]));

    out.space = OnticSpace::indexed(static_cast<int>(n), "g");

    for (int c = 0; c < m; ++c) {
        const Context& ctx = model.contexts.context(c);
        const std::string quantity = "ctx:" + ctx.label();
        out.fragment.measurements.push_back(Povm::projective(ctx, quantity));
        ResponseFunction resp;
        resp.quantity_label = quantity;
        for (int i = 0; i < d; ++i) resp.outcome_labels.push_back("a" + std::to_string(i));
        resp.table = RealMatrix::Zero(n, d);
        for (long long s = 0; s < n; ++s)
            resp.table(s, decode_coordinate(s, d, c)) = 1.0;
        out.responses.push_back(std::move(resp));
    }

    for (std::size_t p = 0; p < model.preparations.size(); ++p) {
        EpistemicState e;
        e.preparation_label = model.preparation_labels[p];
        e.weights = RealVector(n);
        for (long long s = 0; s < n; ++s) {
            double w = 1.0;
            for (int c = 0; c < m; ++c)
                w *= model.measures[p].weight(c, decode_coordinate(s, d, c));
            e.weights(s) = w;
        }
        // Exact product weights can drift from unit sum by accumulated
        // rounding; renormalize within the epistemic-state tolerance.
        const double total = e.weights.sum();
        if (std::abs(total - 1.0) > 1e-10)
            throw std::runtime_error("materialize: weights drifted beyond tolerance");
        e.weights /= total;
        out.epistemic_map[e.preparation_label].push_back(std::move(e));
    }
    out.validate_structure();
    return out;
}

double value_assignment(const Model& model, const std::vector<int>& ontic_assignment,
                        const Observable& observable, int context_index) {
    if (context_index < 0 || context_index >= model.contexts.size())
        throw std::invalid_argument("value_assignment: context index out of range");
    if (ontic_assignment.size() != static_cast<std::size_t>(model.contexts.size()))
        throw std::invalid_argument("value_assignment: assignment length mismatch");
    const Context& ctx = model.contexts.context(context_index);
    require_same_dim(observable.dim(), ctx.dim(), "value_assignment");
    for (int i = 0; i < ctx.dim(); ++i)
        if (!projectors_commute(observable.matrix(), ctx.projector(i)))
            throw std::invalid_argument(
                "value_assignment: observable incompatible with context '" + ctx.label() + "'");
    const int picked = ontic_assignment[context_index];
    if (picked < 0 || picked >= ctx.dim())
        throw std::invalid_argument("value_assignment: projector index out of range");
    const double value = (observable.matrix() * ctx.projector(picked)).trace().real();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < observable.dim(); ++i)
        best = std::min(best, std::abs(value - observable.eigenvalues()(i)));
    if (best > 1e-9)
        throw std::runtime_error("value_assignment: value is not in the spectrum (defect " +
                                 std::to_string(best) + ")");
    return value;
}

CylinderEvent support_set(const PureState& psi, int k, const ContextList& contexts) {
    if (k < 1) throw std::invalid_argument("support_set: k must be >= 1");
    const std::vector<int> indices = contexts.containing(psi);
    if (static_cast<int>(indices.size()) < k)
        throw std::invalid_argument("support_set: only " + std::to_string(indices.size()) +
                                    " psi-containing contexts available, need " +
                                    std::to_string(k));
    CylinderEvent event;
    for (int t = 0; t < k; ++t) {
        const int c = indices[t];
        const int member = *contexts.context(c).member_index(psi);
        event.constrain_to(c, member, contexts.dim());
    }
    return event;
}

CylinderEvent strict_support(const PureState& psi, const ContextList& contexts) {
    CylinderEvent event;
    for (int c : contexts.containing(psi)) {
        const int member = *contexts.context(c).member_index(psi);
        event.constrain_to(c, member, contexts.dim());
    }
    return event;
}

CanonicalModification canonical_modification(const std::vector<PureState>& states, int k,
                                             ContextList& contexts, Rng& rng,
                                             double measure_floor) {
    const std::size_t M = states.size();
    if (M < 2) throw std::invalid_argument("canonical_modification: need at least 2 states");
    if (k < 1) throw std::invalid_argument("canonical_modification: k must be >= 1");
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = i + 1; j < M; ++j)
            if (ray_equal(states[i], states[j]))
                throw std::invalid_argument("canonical_modification: states " +
                                            std::to_string(i) + " and " + std::to_string(j) +
                                            " are ray-equal");

    CanonicalModification out;
    out.k = k;
    std::vector<Event> supports;
    for (std::size_t i = 0; i < M; ++i) {
        const std::string label = "p" + std::to_string(i);
        out.labels.push_back(label);
        Rng child = rng.split("canonical", i);
        contexts.ensure_containing(states[i], k, child, label);
        supports.push_back(Event::cylinder(support_set(states[i], k, contexts)));
    }

    for (std::size_t i = 0; i < M; ++i) {
        std::vector<Event> parts{supports[i]};
        double exact = 1.0;
        double bound = 1.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == i) continue;
            parts.push_back(~supports[j]);
            const double f = fidelity(states[i], states[j]);
            out.max_pair_fidelity = std::max(out.max_pair_fidelity, f);
            exact *= 1.0 - std::pow(f, k);
            bound -= std::pow(f, k);
        }
        out.events.emplace(out.labels[i], Event::all_of(std::move(parts)));
        out.measures[out.labels[i]] = exact;
        out.union_bounds[out.labels[i]] = bound;
        if (exact < measure_floor)
            throw std::runtime_error("canonical_modification: k = " + std::to_string(k) +
                                     " leaves state " + out.labels[i] + " at measure " +
                                     std::to_string(exact) + ", below the requested floor");
    }
    return out;
}

PerpendicularSplit perpendicular_disjointification(const PureState& psi, const PureState& phi,
                                                   int k, ContextList& contexts, Rng& rng) {
    if (k < 1)
        throw std::invalid_argument("perpendicular_disjointification: k must be >= 1");
    const double f = fidelity(psi, phi);
    if (f < kRayTol || f > 1.0 - kRayTol)
        throw std::invalid_argument(
            "perpendicular_disjointification: states must be non-commuting "
            "(fidelity strictly inside (0,1))");

    // Gram-Schmidt of psi against phi: orthogonal to phi, overlaps psi.
    const cplx c = phi.amplitudes().dot(psi.amplitudes());
    PureState bridge(psi.amplitudes() - c * phi.amplitudes());

    Rng own = rng.split("perp");
    const std::vector<int> bridge_contexts =
        contexts.ensure_containing(bridge, k, own, "perp");
    std::vector<Event> deltas;
    for (int idx : bridge_contexts) {
        CylinderEvent e;
        e.constrain_to(idx, *contexts.context(idx).member_index(bridge), contexts.dim());
        deltas.push_back(Event::cylinder(e));
    }
    Event bridge_union = Event::any_of(std::move(deltas));

    Rng psi_rng = rng.split("perp-psi"), phi_rng = rng.split("perp-phi");
    contexts.ensure_containing(psi, k, psi_rng, "perpL");
    contexts.ensure_containing(phi, k, phi_rng, "perpR");
    Event psi_support = Event::cylinder(support_set(psi, k, contexts));
    Event phi_support = Event::cylinder(support_set(phi, k, contexts));

    PerpendicularSplit out{bridge,
                           fidelity(bridge, psi),
                           psi_support & bridge_union,
                           phi_support & ~bridge_union,
                           0.0,
                           0.0};
    out.mu_psi_first = 1.0 - std::pow(1.0 - out.bridge_fidelity, k);
    return out;
}

namespace {

OnticityPair pair_distance(const ProductMeasure& mu, const ProductMeasure& nu) {
    OnticityPair pair;
    pair.psi = mu.label();
    pair.phi = nu.label();
    std::set<int> all;
    for (int c = 0; c < mu.context_count(); ++c) all.insert(c);
    try {
        pair.distance = restricted_variational_distance(mu, nu, all);
        pair.bound_used = false;
        return pair;
    } catch (const std::runtime_error&) {
        // Enumeration over the non-deterministic coordinates is too large;
        // fall back to certified lower bounds.
    }
    std::set<int> collapsible;
    for (int c = 0; c < mu.context_count(); ++c) {
        int idx;
        if (mu.deterministic_at(c, &idx) || nu.deterministic_at(c, &idx)) collapsible.insert(c);
    }
    const double collapsed = restricted_variational_distance(mu, nu, collapsible);
    const double bc_bound = 1.0 - bhattacharyya_product(mu, nu, all);
    pair.distance = std::max(collapsed, bc_bound);
    pair.bound_used = true;
    return pair;
}

}  // namespace

OnticityReport onticity_report(const Model& model, double tol) {
    OnticityReport report;
    report.tolerance = tol;
    double worst = 2.0;
    for (std::size_t i = 0; i < model.measures.size(); ++i) {
        for (std::size_t j = i + 1; j < model.measures.size(); ++j) {
            OnticityPair pair = pair_distance(model.measures[i], model.measures[j]);
            if (pair.distance < worst) {
                worst = pair.distance;
                report.witness_psi = pair.psi;
                report.witness_phi = pair.phi;
            }
            report.pairs.push_back(std::move(pair));
        }
    }
    report.min_distance = report.pairs.empty() ? 1.0 : worst;
    report.psi_ontic = report.min_distance >= 1.0 - tol;
    return report;
}

std::vector<TrajectoryRow> onticity_trajectory(const PureState& psi, const PureState& phi,
                                               int k_max, ContextList& contexts, Rng& rng) {
    if (k_max < 1) throw std::invalid_argument("onticity_trajectory: k_max must be >= 1");
    Rng psi_rng = rng.split("traj-psi"), phi_rng = rng.split("traj-phi");
    const std::vector<int> psi_ctx = contexts.ensure_containing(psi, k_max, psi_rng, "trajL");
    const std::vector<int> phi_ctx = contexts.ensure_containing(phi, k_max, phi_rng, "trajR");

    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts.contexts(), "psi");
    ProductMeasure nu = ProductMeasure::from_pure_state(phi, contexts.contexts(), "phi");

    std::vector<TrajectoryRow> rows;
    for (int k = 1; k <= k_max; ++k) {
        std::set<int> coords;
        for (int t = 0; t < k; ++t) {
            coords.insert(psi_ctx[t]);
            coords.insert(phi_ctx[t]);
        }
        TrajectoryRow row;
        row.k = k;
        try {
            row.exact_tv = restricted_variational_distance(mu, nu, coords);
            row.exact_available = true;
        } catch (const std::runtime_error&) {
            row.exact_available = false;
        }
        row.overlap_upper_bound = bhattacharyya_product(mu, nu, coords);
        row.tv_lower_bound = 1.0 - row.overlap_upper_bound;
        rows.push_back(row);
    }
    return rows;
}

DeterminatenessReport check_support_events(const Model& model,
                                           const std::map<std::string, Event>& events,
                                           double tol) {
    DeterminatenessReport report;
    report.tolerance = tol;
    for (const auto& label : model.preparation_labels)
        if (events.find(label) == events.end())
            throw std::invalid_argument("check_support_events: missing event for '" + label +
                                        "'");
    for (const auto& [label, event] : events) {
        (void)event;
        bool known = std::any_of(model.preparation_labels.begin(),
                                 model.preparation_labels.end(),
                                 [&](const std::string& l) { return l == label; });
        if (!known)
            throw std::invalid_argument("check_support_events: event for unknown preparation '" +
                                        label + "'");
    }

    const auto& labels = model.preparation_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            if (!events_disjoint(events.at(labels[i]), events.at(labels[j]),
                                 model.contexts.dim(), model.contexts.size()))
                report.disjoint_failures.push_back({labels[i], labels[j], -1});
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double measure = event_probability(model.measures[i], events.at(labels[i]));
        report.min_measures[labels[i]] = measure;
        if (measure < 1.0 - tol)
            report.measure_failures.push_back({labels[i], 0, measure});
    }
    report.pass = report.disjoint_failures.empty() && report.measure_failures.empty();
    return report;
}

}  // namespace ontic::gudder
