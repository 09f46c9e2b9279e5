#include "ontic/ontic_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ontic {

void OnticSpace::validate() const {
    if (labels.empty()) throw std::invalid_argument("OnticSpace: empty");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            throw std::invalid_argument("OnticSpace: duplicate label '" + l + "'");
}

OnticSpace OnticSpace::indexed(int n, const std::string& prefix) {
    if (n < 1) throw std::invalid_argument("OnticSpace: size must be >= 1");
    OnticSpace s;
    s.labels.reserve(n);
    for (int i = 0; i < n; ++i) s.labels.push_back(prefix + std::to_string(i));
    return s;
}

void ResponseFunction::validate(int space_size, double tol) const {
    if (table.rows() != space_size)
        throw std::invalid_argument("ResponseFunction '" + quantity_label +
                                    "': row count != ontic space size");
    if (table.cols() != static_cast<Eigen::Index>(outcome_labels.size()))
        throw std::invalid_argument("ResponseFunction '" + quantity_label +
                                    "': column count != outcome count");
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < table.cols(); ++c) {
            const double p = table(r, c);
            if (p < -tol || p > 1.0 + tol)
                throw std::invalid_argument("ResponseFunction '" + quantity_label +
                                            "': entry outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("ResponseFunction '" + quantity_label +
                                        "': row " + std::to_string(r) + " does not sum to 1");
    }
}

void EpistemicState::validate(int space_size, double tol) const {
    if (weights.size() != space_size)
        throw std::invalid_argument("EpistemicState '" + preparation_label +
                                    "': weight count != ontic space size");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights(i) < 0.0)
            throw std::invalid_argument("EpistemicState '" + preparation_label +
                                        "': negative weight");
        sum += weights(i);
    }
    if (std::abs(sum - 1.0) > tol)
        throw std::invalid_argument("EpistemicState '" + preparation_label +
                                    "': weights do not sum to 1");
}

void OnticModel::validate_structure() const {
    fragment.validate();
    space.validate();
    if (responses.size() != fragment.measurements.size())
        throw std::invalid_argument("OnticModel: missing response function for some POVM");
    for (std::size_t i = 0; i < responses.size(); ++i) {
        responses[i].validate(space.size());
        if (responses[i].outcome_labels.size() !=
            fragment.measurements[i].outcome_labels().size())
            throw std::invalid_argument("OnticModel: response '" + responses[i].quantity_label +
                                        "' outcome count mismatch with its POVM");
    }
    for (const auto& p : fragment.preparations) {
        auto it = epistemic_map.find(p.label);
        if (it == epistemic_map.end() || it->second.empty())
            throw std::invalid_argument("OnticModel: preparation '" + p.label +
                                        "' has no epistemic state");
        for (const auto& e : it->second) e.validate(space.size());
    }
}

const std::vector<EpistemicState>& OnticModel::epistemic_states(
    const std::string& prep_label) const {
    auto it = epistemic_map.find(prep_label);
    if (it == epistemic_map.end() || it->second.empty())
        throw std::invalid_argument("OnticModel: unknown preparation '" + prep_label + "'");
    return it->second;
}

std::vector<std::string> OnticModel::pure_preparation_labels() const {
    std::vector<std::string> out;
    for (const auto& p : fragment.preparations)
        if (p.pure.has_value()) out.push_back(p.label);
    return out;
}

ValidationReport validate_model(const OnticModel& model, double tol) {
    model.validate_structure();
    ValidationReport report;
    report.tolerance = tol;
    for (const auto& prep : model.fragment.preparations) {
        const auto& states = model.epistemic_states(prep.label);
        for (std::size_t m = 0; m < model.fragment.measurements.size(); ++m) {
            const Povm& povm = model.fragment.measurements[m];
            const ResponseFunction& resp = model.responses[m];
            for (int a = 0; a < povm.outcomes(); ++a) {
                const double born = born_probability(prep.rho, povm.effect(a));
                for (std::size_t e = 0; e < states.size(); ++e) {
                    const double p = states[e].weights.dot(resp.table.col(a));
                    ValidationRow row;
                    row.preparation = prep.label;
                    row.quantity = povm.quantity_label();
                    row.outcome = povm.outcome_labels()[a];
                    row.epistemic_index = static_cast<int>(e);
                    row.model_probability = p;
                    row.born_probability = born;
                    row.residual = std::abs(p - born);
                    report.max_residual = std::max(report.max_residual, row.residual);
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }
    report.pass = report.max_residual < tol;
    return report;
}

double variational_distance(const EpistemicState& mu, const EpistemicState& nu) {
    if (mu.weights.size() != nu.weights.size())
        throw std::invalid_argument("variational_distance: ontic space mismatch");
    // Sum over the event {mu > nu}; states with equal weight contribute 0
    // either way, so the positive-part sum equals half the L1 norm.
    double d = 0.0;
    for (Eigen::Index i = 0; i < mu.weights.size(); ++i) {
        const double diff = mu.weights(i) - nu.weights(i);
        if (diff > 0.0) d += diff;
    }
    return std::min(d, 1.0);
}

double bhattacharyya_overlap(const EpistemicState& mu, const EpistemicState& nu) {
    if (mu.weights.size() != nu.weights.size())
        throw std::invalid_argument("bhattacharyya_overlap: ontic space mismatch");
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.weights.size(); ++i)
        s += std::sqrt(std::max(0.0, mu.weights(i)) * std::max(0.0, nu.weights(i)));
    return std::min(s, 1.0);
}

OnticityReport is_psi_ontic(const OnticModel& model, double tol) {
    OnticityReport report;
    report.tolerance = tol;
    const auto pure = model.pure_preparation_labels();
    double worst = 2.0;
    for (std::size_t i = 0; i < pure.size(); ++i) {
        for (std::size_t j = i + 1; j < pure.size(); ++j) {
            double pair_min = 2.0;
            for (const auto& mu : model.epistemic_states(pure[i]))
                for (const auto& nu : model.epistemic_states(pure[j]))
                    pair_min = std::min(pair_min, variational_distance(mu, nu));
            OnticityPair p;
            p.psi = pure[i];
            p.phi = pure[j];
            p.distance = pair_min;
            report.pairs.push_back(p);
            if (pair_min < worst) {
                worst = pair_min;
                report.witness_psi = pure[i];
                report.witness_phi = pure[j];
            }
        }
    }
    report.min_distance = report.pairs.empty() ? 1.0 : worst;
    report.psi_ontic = report.min_distance >= 1.0 - tol;
    return report;
}

DeterminatenessReport check_psi_determinate(const OnticModel& model,
                                            const SupportAssignment& assignment,
                                            double tol) {
    DeterminatenessReport report;
    report.tolerance = tol;
    const auto pure = model.pure_preparation_labels();
    const int n_states = model.space.size();

    for (const auto& label : pure)
        if (assignment.sets.find(label) == assignment.sets.end())
            throw std::invalid_argument("check_psi_determinate: assignment missing '" + label +
                                        "'");
    for (const auto& [label, set] : assignment.sets) {
        bool known = std::any_of(pure.begin(), pure.end(),
                                 [&](const std::string& l) { return l == label; });
        if (!known)
            throw std::invalid_argument("check_psi_determinate: assignment references unknown "
                                        "preparation '" + label + "'");
        for (int idx : set)
            if (idx < 0 || idx >= n_states)
                throw std::invalid_argument("check_psi_determinate: assignment for '" + label +
                                            "' references unknown ontic state " +
                                            std::to_string(idx));
    }

    // Condition (i): pairwise disjointness, exact.
    for (std::size_t i = 0; i < pure.size(); ++i) {
        for (std::size_t j = i + 1; j < pure.size(); ++j) {
            const auto& a = assignment.sets.at(pure[i]);
            const auto& b = assignment.sets.at(pure[j]);
            int shared = 0;
            for (int idx : a)
                if (b.count(idx)) ++shared;
            if (shared > 0)
                report.disjoint_failures.push_back({pure[i], pure[j], shared});
        }
    }

    // Condition (ii): mu(Lambda_psi) >= 1 - tol for all mu in Pi_psi.
    for (const auto& label : pure) {
        const auto& set = assignment.sets.at(label);
        double min_measure = 1.0;
        const auto& states = model.epistemic_states(label);
        for (std::size_t e = 0; e < states.size(); ++e) {
            double measure = 0.0;
            for (int idx : set) measure += states[e].weights(idx);
            min_measure = std::min(min_measure, measure);
            if (measure < 1.0 - tol)
                report.measure_failures.push_back({label, static_cast<int>(e), measure});
        }
        report.min_measures[label] = min_measure;
    }

    report.pass = report.disjoint_failures.empty() && report.measure_failures.empty();
    return report;
}

}  // namespace ontic
