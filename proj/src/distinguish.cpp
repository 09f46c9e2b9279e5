#include "ontic/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ontic {

AntidistinguishabilityCertificate is_antidistinguishing(const Povm& povm,
                                                        const std::vector<PureState>& states,
                                                        double tol) {
    if (static_cast<int>(states.size()) != povm.outcomes())
        throw std::invalid_argument("is_antidistinguishing: outcome count (" +
                                    std::to_string(povm.outcomes()) + ") != state count (" +
                                    std::to_string(states.size()) + ")");
    for (const auto& s : states)
        require_same_dim(s.dim(), povm.dim(), "is_antidistinguishing");
    AntidistinguishabilityCertificate cert{states, povm, {}, 0.0, tol, false};
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double r =
            born_probability(states[i].density_matrix(), povm.effect(static_cast<int>(i)));
        cert.residuals.push_back(r);
        cert.max_residual = std::max(cert.max_residual, r);
    }
    cert.valid = cert.max_residual < tol;
    return cert;
}

namespace {

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
    return out;
}

}  // namespace

std::vector<PureState> pbr_states() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector zero(2), plus(2);
    zero << 1.0, 0.0;
    plus << s, s;
    return {PureState(kron(zero, zero)), PureState(kron(zero, plus)),
            PureState(kron(plus, zero)), PureState(kron(plus, plus))};
}

Povm pbr_povm() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector zero(2), one(2), plus(2), minus(2);
    zero << 1.0, 0.0;
    one << 0.0, 1.0;
    plus << s, s;
    minus << s, -s;
    // Outcome i is orthogonal to prepared state i: the entangled basis
    // (|0,1> + |1,0>)/sqrt2, (|0,-> + |1,+>)/sqrt2,
    // (|+,1> + |-,0>)/sqrt2, (|+,-> + |-,+>)/sqrt2.
    std::vector<Vector> xi{
        s * (kron(zero, one) + kron(one, zero)), s * (kron(zero, minus) + kron(one, plus)),
        s * (kron(plus, one) + kron(minus, zero)), s * (kron(plus, minus) + kron(minus, plus))};
    std::vector<Matrix> effects;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        PureState v(xi[i]);
        effects.push_back(v.projector());
        labels.push_back("a" + std::to_string(i));
    }
    return Povm(std::move(effects), std::move(labels), "pbr");
}

PerturbationReport perturbation_robustness(const AntidistinguishabilityCertificate& certificate,
                                           double eta, int trials, Rng& rng) {
    if (!certificate.valid)
        throw std::invalid_argument("perturbation_robustness: certificate is not valid");
    if (eta < 0.0) throw std::invalid_argument("perturbation_robustness: negative noise scale");
    if (trials < 1) throw std::invalid_argument("perturbation_robustness: trials must be >= 1");

    const Povm& povm = certificate.povm;
    const int d = povm.dim();
    const int n = povm.outcomes();

    PerturbationReport report;
    report.eta = eta;
    report.trials = trials;

    for (int t = 0; t < trials; ++t) {
        Rng trial_rng = rng.split("perturb", t);
        std::vector<Matrix> noisy;
        if (eta == 0.0) {
            noisy = povm.effects();
        } else {
            for (int i = 0; i < n; ++i) {
                Matrix g(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        g(r, c) = cplx(trial_rng.normal(), trial_rng.normal());
                Matrix h = 0.5 * (g + g.adjoint());
                h /= std::sqrt(static_cast<double>(d));  // keep eigenvalues O(1)
                Matrix e = povm.effect(i) + eta * h;
                Eigen::SelfAdjointEigenSolver<Matrix> es(e);
                const double lambda_min = es.eigenvalues().minCoeff();
                if (lambda_min < -0.25)
                    throw std::runtime_error(
                        "perturbation_robustness: effect pushed too far from PSD (min "
                        "eigenvalue " +
                        std::to_string(lambda_min) + "); re-normalization refused");
                // Clip the small negative part.
                Matrix clipped = Matrix::Zero(d, d);
                for (int k = 0; k < d; ++k)
                    clipped += std::max(0.0, es.eigenvalues()(k)) *
                               es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
                noisy.push_back(std::move(clipped));
            }
            Matrix sum = Matrix::Zero(d, d);
            for (const auto& e : noisy) sum += e;
            Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
            if (es.eigenvalues().minCoeff() < 0.25)
                throw std::runtime_error(
                    "perturbation_robustness: perturbed effects lost too much mass for "
                    "re-normalization");
            const Matrix inv_sqrt = es.operatorInverseSqrt();
            for (auto& e : noisy) e = inv_sqrt * e * inv_sqrt;
        }

        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(
                worst, born_probability(certificate.states[i].density_matrix(), noisy[i]));
        report.max_residuals.push_back(worst);
    }

    std::vector<double> sorted = report.max_residuals;
    std::sort(sorted.begin(), sorted.end());
    report.median_max_residual = sorted[sorted.size() / 2];
    report.smallest_max_residual = sorted.front();
    report.largest_max_residual = sorted.back();
    return report;
}

namespace {

DiscriminationReport run_discrimination(long long shots, double tv, bool exact_tv, Rng& rng,
                                        const std::function<int(Rng&)>& sample_and_guess) {
    if (shots < 1) throw std::invalid_argument("single_shot_discrimination: shots must be >= 1");
    DiscriminationReport report;
    report.shots = shots;
    report.tv = tv;
    report.exact_tv = exact_tv;
    report.analytic_rate = 0.5 * (1.0 + tv);
    for (long long s = 0; s < shots; ++s) report.successes += sample_and_guess(rng);
    report.empirical_rate =
        static_cast<double>(report.successes) / static_cast<double>(shots);
    report.band =
        4.0 * std::sqrt(report.analytic_rate * (1.0 - report.analytic_rate) /
                        static_cast<double>(shots)) +
        4.0 / static_cast<double>(shots);
    report.within_band = report.empirical_rate <= report.analytic_rate + report.band &&
                         report.empirical_rate >= report.analytic_rate - report.band;
    return report;
}

}  // namespace

DiscriminationReport single_shot_discrimination(const OnticModel& model,
                                                const std::string& psi_label,
                                                const std::string& phi_label, long long shots,
                                                Rng& rng) {
    const EpistemicState& mu = model.epistemic_states(psi_label).front();
    const EpistemicState& nu = model.epistemic_states(phi_label).front();
    const double tv = variational_distance(mu, nu);
    std::span<const double> mu_w(mu.weights.data(), static_cast<std::size_t>(mu.weights.size()));
    std::span<const double> nu_w(nu.weights.data(), static_cast<std::size_t>(nu.weights.size()));
    auto sample_and_guess = [&](Rng& r) -> int {
        const bool prepared_psi = r.uniform() < 0.5;
        const std::size_t lambda = r.categorical(prepared_psi ? mu_w : nu_w);
        const bool guess_psi = mu.weights(lambda) >= nu.weights(lambda);  // ties toward psi
        return guess_psi == prepared_psi ? 1 : 0;
    };
    return run_discrimination(shots, tv, true, rng, sample_and_guess);
}

DiscriminationReport single_shot_discrimination(const ProductMeasure& mu,
                                                const ProductMeasure& nu, long long shots,
                                                Rng& rng) {
    if (mu.context_count() != nu.context_count() || mu.dim() != nu.dim())
        throw std::invalid_argument("single_shot_discrimination: measure shape mismatch");
    std::set<int> all;
    for (int c = 0; c < mu.context_count(); ++c) all.insert(c);
    double tv;
    bool exact = true;
    try {
        tv = restricted_variational_distance(mu, nu, all);
    } catch (const std::runtime_error&) {
        tv = 1.0 - bhattacharyya_product(mu, nu, all);
        exact = false;
    }
    auto sample_and_guess = [&](Rng& r) -> int {
        const bool prepared_psi = r.uniform() < 0.5;
        const std::vector<int> lambda = prepared_psi ? mu.sample(r) : nu.sample(r);
        const bool guess_psi = mu.log_weight(lambda) >= nu.log_weight(lambda);
        return guess_psi == prepared_psi ? 1 : 0;
    };
    return run_discrimination(shots, tv, exact, rng, sample_and_guess);
}

}  // namespace ontic
