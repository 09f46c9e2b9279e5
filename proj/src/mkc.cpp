#include "ontic/mkc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ontic::mkc {

namespace {

// Smallest achievable construction defect: perturbation angles below ~1e-13
// would vanish against the unperturbed components in double precision.
constexpr double kDefectFloor = 1e-26;

// Fraction of a member's generation precision used as its incompatibility
// margin for pairs involving on-demand contexts.
constexpr double kMarginFraction = 1e-4;

struct CrossCheck {
    double min_fidelity = 2.0;
    double min_defect = 2.0;
};

CrossCheck cross_extremes(const Context& a, const Context& b) {
    CrossCheck out;
    for (int i = 0; i < a.dim(); ++i) {
        for (int j = 0; j < b.dim(); ++j) {
            out.min_fidelity = std::min(out.min_fidelity, fidelity(a.basis_vector(i), b.basis_vector(j)));
            out.min_defect =
                std::min(out.min_defect, fidelity_defect(a.basis_vector(i), b.basis_vector(j)));
        }
    }
    return out;
}

bool totally_incompatible(const Context& a, const Context& b, double margin) {
    const CrossCheck c = cross_extremes(a, b);
    return c.min_fidelity > margin && c.min_defect > margin;
}

// Assignment minimizing total cost, O(n^3).
std::vector<int> hungarian_min(const RealMatrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) match[p[j] - 1] = j - 1;
    return match;
}

// Best alignment of the observable's eigencontext onto a member context:
// matching maximizing the summed fidelities, plus the worst per-vector defect.
struct Alignment {
    std::vector<int> matching;
    double sum_fidelity = 0.0;
    double max_defect = 1.0;
};

Alignment align(const Context& eigen, const Context& member) {
    const int d = eigen.dim();
    RealMatrix cost(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            cost(i, j) = -fidelity(eigen.basis_vector(i), member.basis_vector(j));
    Alignment out;
    out.matching = hungarian_min(cost);
    out.max_defect = 0.0;
    for (int i = 0; i < d; ++i) {
        out.sum_fidelity += -cost(i, out.matching[i]);
        out.max_defect = std::max(
            out.max_defect, fidelity_defect(eigen.basis_vector(i),
                                            member.basis_vector(out.matching[i])));
    }
    return out;
}

Matrix gaussian(int rows, int cols, Rng& rng) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    return g;
}

Context perturb_context(const Context& target, double angle_scale, Rng& rng,
                        const std::string& label) {
    const int d = target.dim();
    Matrix basis(d, d);
    for (int i = 0; i < d; ++i) basis.col(i) = target.basis_vector(i).amplitudes();
    const Matrix m = basis + angle_scale * gaussian(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        const cplx rii = r(i, i);
        if (std::abs(rii) == 0.0)
            throw std::runtime_error("perturb_context: degenerate draw");
        q.col(i) *= std::conj(rii / std::abs(rii));
    }
    // Align column phases with the target so the perturbation stays a small
    // rotation of each basis vector.
    std::vector<PureState> vecs;
    for (int i = 0; i < d; ++i) {
        cplx overlap = q.col(i).dot(basis.col(i));
        if (std::abs(overlap) > 0.0) q.col(i) *= overlap / std::abs(overlap);
        vecs.emplace_back(q.col(i));
    }
    return Context(std::move(vecs), label);
}

}  // namespace

double ContextSet::pair_margin(int i, int j) const {
    return std::min(margins.at(i), margins.at(j));
}

ContextSet::IncompatibilityScan ContextSet::incompatibility_scan() const {
    IncompatibilityScan scan;
    scan.pass = true;
    const int m = static_cast<int>(contexts.size());
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const CrossCheck c = cross_extremes(contexts[a], contexts[b]);
            if (c.min_fidelity < scan.min_fidelity) {
                scan.min_fidelity = c.min_fidelity;
                scan.worst_low_a = a;
                scan.worst_low_b = b;
            }
            if (c.min_defect < scan.min_defect) {
                scan.min_defect = c.min_defect;
                scan.worst_high_a = a;
                scan.worst_high_b = b;
            }
            const double margin = pair_margin(a, b);
            if (c.min_fidelity <= margin || c.min_defect <= margin) scan.pass = false;
        }
    }
    if (m < 2) {
        scan.min_fidelity = 1.0;
        scan.min_defect = 1.0;
    }
    return scan;
}

ContextSet::CoverageScan ContextSet::coverage_scan() const {
    CoverageScan scan;
    scan.pass = true;
    for (const auto& t : targets) {
        double best = 1.0;
        for (const auto& m : contexts) best = std::min(best, align(t, m).max_defect);
        scan.defects.push_back(best);
        scan.max_defect = std::max(scan.max_defect, best);
        if (best >= epsilon) scan.pass = false;
    }
    return scan;
}

ProductMeasure ContextSet::measure_for(const PureState& psi, std::string label) const {
    return ProductMeasure::from_pure_state(psi, contexts, std::move(label));
}

ContextSet generate_mkc(const std::vector<Context>& targets, double epsilon, double tau,
                        std::uint64_t seed, int retry_budget) {
    if (targets.empty()) throw std::invalid_argument("generate_mkc: no targets");
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("generate_mkc: epsilon must be in (0,1)");
    if (tau <= 0.0 || tau >= 0.5)
        throw std::invalid_argument("generate_mkc: tau must be in (0, 1/2)");
    if (retry_budget < 1) throw std::invalid_argument("generate_mkc: retry budget must be >= 1");

    ContextSet set;
    set.dim = targets.front().dim();
    set.epsilon = epsilon;
    set.tau = tau;
    set.seed = seed;
    Rng rng(seed);

    for (std::size_t t = 0; t < targets.size(); ++t) {
        require_same_dim(targets[t].dim(), set.dim, "generate_mkc");
        const std::string label = "mkc" + std::to_string(t);
        bool accepted = false;
        int blocking = -1;
        for (int attempt = 0; attempt < retry_budget && !accepted; ++attempt) {
            Rng draw = rng.split("member", t * 1000003ull + attempt);
            Context candidate = perturb_context(targets[t], epsilon / 4.0, draw, label);
            bool approx_ok = true;
            for (int i = 0; i < set.dim; ++i) {
                if (fidelity_defect(targets[t].basis_vector(i), candidate.basis_vector(i)) >=
                    epsilon) {
                    approx_ok = false;
                    break;
                }
            }
            if (!approx_ok) continue;
            bool incompatible_ok = true;
            for (std::size_t a = 0; a < set.contexts.size(); ++a) {
                const double margin = std::min(tau, set.margins[a]);
                if (!totally_incompatible(set.contexts[a], candidate, margin)) {
                    incompatible_ok = false;
                    blocking = static_cast<int>(a);
                    break;
                }
            }
            if (!incompatible_ok) continue;
            set.contexts.push_back(std::move(candidate));
            set.precisions.push_back(epsilon);
            set.margins.push_back(tau);
            accepted = true;
        }
        if (!accepted)
            throw std::runtime_error("generate_mkc: retry budget exhausted for target " +
                                     std::to_string(t) +
                                     (blocking >= 0 ? " (blocked by member " +
                                                          std::to_string(blocking) + ")"
                                                    : ""));
        set.targets.push_back(targets[t]);
    }
    return set;
}

int extend_set(ContextSet& set, const Context& target, double precision, Rng& rng,
               int retry_budget, const std::string& label) {
    require_same_dim(target.dim(), set.dim, "extend_set");
    if (precision <= 0.0) throw std::invalid_argument("extend_set: precision must be positive");
    const double angle = std::sqrt(std::max(precision, kDefectFloor)) / 2.0;
    const double margin = std::min(set.tau, std::max(precision, kDefectFloor) * kMarginFraction);
    int blocking = -1;
    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        Rng draw = rng.split("extend", attempt);
        Context candidate = perturb_context(target, angle, draw, label);
        bool approx_ok = true;
        for (int i = 0; i < set.dim; ++i) {
            if (fidelity_defect(target.basis_vector(i), candidate.basis_vector(i)) >=
                std::max(precision, 4.0 * kDefectFloor)) {
                approx_ok = false;
                break;
            }
        }
        if (!approx_ok) continue;
        bool incompatible_ok = true;
        for (std::size_t a = 0; a < set.contexts.size(); ++a) {
            if (!totally_incompatible(set.contexts[a], candidate,
                                      std::min(margin, set.margins[a]))) {
                incompatible_ok = false;
                blocking = static_cast<int>(a);
                break;
            }
        }
        if (!incompatible_ok) continue;
        set.contexts.push_back(std::move(candidate));
        set.precisions.push_back(precision);
        set.margins.push_back(margin);
        return static_cast<int>(set.contexts.size()) - 1;
    }
    throw std::runtime_error("extend_set: retry budget exhausted at precision " +
                             std::to_string(precision) +
                             (blocking >= 0 ? " (blocked by member " + std::to_string(blocking) +
                                                  ")"
                                            : ""));
}

SnapResult snap_observable(const Observable& observable, const ContextSet& set) {
    if (set.contexts.empty()) throw std::invalid_argument("snap_observable: empty context set");
    require_same_dim(observable.dim(), set.dim, "snap_observable");
    const Context eigen = eigencontext(observable);  // throws on degenerate spectrum

    SnapResult best;
    double best_sum = -1.0;
    for (std::size_t m = 0; m < set.contexts.size(); ++m) {
        Alignment a = align(eigen, set.contexts[m]);
        if (a.sum_fidelity > best_sum) {
            best_sum = a.sum_fidelity;
            best.context_index = static_cast<int>(m);
            best.matching = std::move(a.matching);
            best.defect = a.max_defect;
        }
    }
    if (best.defect >= set.epsilon)
        throw std::runtime_error(
            "snap_observable: no member context covers this observable (defect " +
            std::to_string(best.defect) + " >= epsilon " + std::to_string(set.epsilon) + ")");

    const Context& member = set.contexts[best.context_index];
    Matrix snapped = Matrix::Zero(set.dim, set.dim);
    for (int i = 0; i < set.dim; ++i)
        snapped += observable.eigenvalues()(i) * member.projector(best.matching[i]);
    best.snapped = std::move(snapped);
    return best;
}

EulerValue euler_function(double q, int K) {
    if (q < 0.0 || q >= 1.0)
        throw std::invalid_argument("euler_function: q must be in [0, 1)");
    if (K < 1) throw std::invalid_argument("euler_function: K must be >= 1");
    EulerValue out;
    out.terms = K;
    if (q == 0.0) return out;
    double qk = 1.0;
    for (int k = 1; k <= K; ++k) {
        qk *= q;
        out.value *= 1.0 - qk;
    }
    out.tail_bound = qk * q / (1.0 - q);  // sum_{k>K} q^k
    // The infinite product over the tail lies in [1 - tail_bound, 1]; widen by
    // a few ulps for the accumulated rounding of the K-term product.
    const double slack = 4.0 * K * std::numeric_limits<double>::epsilon();
    out.lower = out.value * std::max(0.0, 1.0 - out.tail_bound) * (1.0 - slack);
    out.upper = out.value * (1.0 + slack);
    return out;
}

int euler_depth(double q, double tail_target) {
    if (q < 0.0 || q >= 1.0)
        throw std::invalid_argument("euler_depth: q must be in [0, 1)");
    if (q == 0.0) return 1;
    // q^{K+1} / (1-q) < target
    const double rhs = std::log(tail_target * (1.0 - q)) / std::log(q);
    const int K = static_cast<int>(std::ceil(rhs));
    return std::clamp(K, 1, 2000000);
}

double solve_qn(int n) {
    if (n < 2) throw std::invalid_argument("solve_qn: n must be >= 2");
    const double target = 1.0 - 1.0 / static_cast<double>(n);
    double lo = 0.0, hi = 0.999;  // E(lo) = 1 > target, E(hi) << 1/2 >= smallest target
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double e = euler_function(mid, euler_depth(mid, 1e-14)).value;
        if (e > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    const double q = 0.5 * (lo + hi);
    const double residual =
        std::abs(euler_function(q, euler_depth(q, 1e-14)).value - target);
    if (residual >= 1e-12)
        throw std::runtime_error("solve_qn: bisection failed to reach tolerance");
    return q;
}

EulerSchedule::EulerSchedule(int n_, int K_) : n(n_), K(K_) {
    if (K < 1) throw std::invalid_argument("EulerSchedule: K must be >= 1");
    q_n = solve_qn(n);
    double qk = 1.0;
    for (int k = 1; k <= K; ++k) {
        qk *= q_n;
        defect_budgets.push_back(qk);
        truncated_product *= 1.0 - qk;
    }
    tail_bound = qk * q_n / (1.0 - q_n);
    tail_certified = tail_bound < 1e-12;
}

Theorem3Set theorem3_set(const PureState& psi, int n, int K, ContextSet& set, Rng& rng,
                         const PureState* phi) {
    require_same_dim(psi.dim(), set.dim, "theorem3_set");
    Theorem3Set out{EulerSchedule(n, K), Event::full(), {}, 0.0, 1.0};
    if (phi) {
        require_same_dim(phi->dim(), set.dim, "theorem3_set");
        out.has_phi = true;
        out.decay_delta = 0.5 * (1.0 - fidelity(psi, *phi));
    }

    std::vector<Event> cylinders;
    for (int k = 1; k <= K; ++k) {
        const double budget = out.schedule.defect_budgets[k - 1];
        // Target context embedding psi; fresh completion per k.
        Rng target_rng = rng.split("t3-target", k);
        const Context target = embedding_context(
            psi, target_rng, "t3t:" + std::to_string(n) + ":" + std::to_string(k));
        Rng extend_rng = rng.split("t3-extend", k);
        const int idx = extend_set(set, target, budget / 4.0, extend_rng, 64,
                                   "t3:" + std::to_string(n) + ":" + std::to_string(k) + ":" +
                                       std::to_string(set.contexts.size()));

        Theorem3Factor factor;
        factor.k = k;
        factor.context_index = idx;
        factor.budget = budget;
        factor.floored = budget / 4.0 < kDefectFloor;
        factor.defect = fidelity_defect(psi, set.contexts[idx].basis_vector(0));
        out.log_mu_psi += std::log1p(-factor.defect);
        if (phi) {
            factor.phi_factor = fidelity(*phi, set.contexts[idx].basis_vector(0));
            out.log_mu_phi += factor.phi_factor > 0.0
                                  ? std::log(factor.phi_factor)
                                  : -std::numeric_limits<double>::infinity();
        }
        out.factors.push_back(factor);

        CylinderEvent c;
        c.constrain_to(idx, 0, set.dim);  // the psi-approximant is basis vector 0
        cylinders.push_back(Event::cylinder(std::move(c)));
    }
    out.event = Event::all_of(std::move(cylinders));
    out.mu_psi = std::exp(out.log_mu_psi);
    if (phi) {
        out.mu_phi = std::exp(out.log_mu_phi);
        // First index from which every factor stays below 1 - delta.
        out.decay_onset = 1;
        for (int k = K; k >= 1; --k) {
            if (out.factors[k - 1].phi_factor >= 1.0 - out.decay_delta) {
                out.decay_onset = k + 1;
                break;
            }
        }
    }
    return out;
}

std::vector<TrajectoryRow> tail_diagnostic(const PureState& psi, const std::vector<int>& n_grid,
                                           const std::vector<int>& k_grid, ContextSet& set,
                                           Rng& rng, const PureState* phi) {
    std::vector<TrajectoryRow> rows;
    if (n_grid.empty() || k_grid.empty()) return rows;
    const int k_max = *std::max_element(k_grid.begin(), k_grid.end());
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const int n = n_grid[ni];
        Rng child = rng.split("tail", n);
        Theorem3Set t3 = theorem3_set(psi, n, k_max, set, child, phi);
        for (int K : k_grid) {
            TrajectoryRow row;
            row.n = n;
            row.K = K;
            row.q_n = t3.schedule.q_n;
            double log_psi = 0.0, log_phi = 0.0, euler = 1.0;
            for (int k = 1; k <= K; ++k) {
                log_psi += std::log1p(-t3.factors[k - 1].defect);
                euler *= 1.0 - t3.schedule.defect_budgets[k - 1];
                if (phi) {
                    const double f = t3.factors[k - 1].phi_factor;
                    log_phi += f > 0.0 ? std::log(f)
                                       : -std::numeric_limits<double>::infinity();
                }
            }
            row.mu_psi = std::exp(log_psi);
            row.mu_phi = phi ? std::exp(log_phi) : 0.0;
            row.euler_lower_bound = euler;
            rows.push_back(row);
        }
    }
    return rows;
}

FinitePrecisionReport finite_precision_report(const ContextSet& set,
                                              const std::vector<Matrix>& preparations,
                                              const std::vector<Observable>& observables,
                                              long long shots, Rng& rng) {
    if (shots < 0) throw std::invalid_argument("finite_precision_report: negative shot count");
    FinitePrecisionReport report;
    report.shots = shots;
    report.analytic_bound = set.dim * set.epsilon;
    report.pass = true;

    long long n = 1;
    for (std::size_t i = 0; i < set.contexts.size(); ++i) {
        if (n > (1LL << 62) / set.dim) {
            n = 1LL << 62;
            break;
        }
        n *= set.dim;
    }
    report.ontic_state_count = n;
    report.determinateness_note =
        "finite model: " + std::to_string(n) + " ontic states over " +
        std::to_string(set.contexts.size()) +
        " contexts cannot carry disjoint measure-one supports for the continuum of pure "
        "states; the finite truncation is not psi-determinate for the full state space";

    for (std::size_t p = 0; p < preparations.size(); ++p) {
        for (std::size_t o = 0; o < observables.size(); ++o) {
            const SnapResult snap = snap_observable(observables[o], set);
            const Context eigen = eigencontext(observables[o]);
            const Context& member = set.contexts[snap.context_index];

            FinitePrecisionRow row;
            row.preparation = static_cast<int>(p);
            row.observable = static_cast<int>(o);
            row.context_index = snap.context_index;
            row.snap_defect = snap.defect;

            RealVector exact(set.dim), snapped(set.dim);
            for (int i = 0; i < set.dim; ++i) {
                exact(i) = born_probability(preparations[p], eigen.projector(i));
                snapped(i) =
                    born_probability(preparations[p], member.projector(snap.matching[i]));
            }
            row.analytic_l1 = (exact - snapped).lpNorm<1>();
            report.max_analytic_l1 = std::max(report.max_analytic_l1, row.analytic_l1);
            row.pass = row.analytic_l1 <= report.analytic_bound + 1e-12;

            if (shots > 0) {
                Rng child = rng.split("fp", p * 131071ull + o);
                RealVector counts = RealVector::Zero(set.dim);
                std::span<const double> weights(snapped.data(),
                                                static_cast<std::size_t>(snapped.size()));
                for (long long s = 0; s < shots; ++s)
                    counts(static_cast<Eigen::Index>(child.categorical(weights))) += 1.0;
                RealVector freq = counts / static_cast<double>(shots);
                row.empirical_l1 = (freq - exact).lpNorm<1>();
                double band = 0.0;
                for (int i = 0; i < set.dim; ++i)
                    band += std::sqrt(snapped(i) * (1.0 - snapped(i)) /
                                      static_cast<double>(shots));
                row.sampling_band = 4.0 * band;
                report.max_empirical_l1 = std::max(report.max_empirical_l1, row.empirical_l1);
                row.pass = row.pass &&
                           row.empirical_l1 <= report.analytic_bound + row.sampling_band;
            }
            report.pass = report.pass && row.pass;
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace ontic::mkc
