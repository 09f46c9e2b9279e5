#include <doctest.h>

#include "ontic/quantum.hpp"
#include "oracles.hpp"

using namespace ontic;

namespace {

PureState ket(std::initializer_list<cplx> amps) {
    Vector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) v(i++) = a;
    return PureState(v);
}

Matrix random_density(int d, Rng& rng) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("born_probability: projector onto own state gives 1") {
    PureState zero = PureState::basis_vector(2, 0);
    CHECK(born_probability(zero.density_matrix(), zero.projector()) == doctest::Approx(1.0));
}

TEST_CASE("born_probability: equal superposition against |0> gives 1/2") {
    PureState plus = ket({1.0, 1.0});
    PureState zero = PureState::basis_vector(2, 0);
    CHECK(born_probability(plus.density_matrix(), zero.projector()) == doctest::Approx(0.5));
}

TEST_CASE("born_probability matches the naive trace oracle on random d=3 inputs") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix rho = random_density(3, rng);
        // a density matrix is itself a valid effect (PSD, eigenvalues <= 1)
        Matrix effect = random_density(3, rng);
        CHECK(born_probability(rho, effect) ==
              doctest::Approx(oracles::naive_born(rho, effect)).epsilon(1e-12));
    }
}

TEST_CASE("born_probability rejects bad inputs") {
    PureState zero2 = PureState::basis_vector(2, 0);
    PureState zero3 = PureState::basis_vector(3, 0);
    CHECK_THROWS_AS(born_probability(zero2.density_matrix(), zero3.projector()),
                    std::invalid_argument);
    Matrix skew(2, 2);
    skew << cplx(0, 0), cplx(1, 0), cplx(0, 0), cplx(0, 0);
    CHECK_THROWS_AS(born_probability(skew, zero2.projector()), std::invalid_argument);
}

TEST_CASE("fidelity basics") {
    PureState zero = PureState::basis_vector(3, 0);
    PureState one = PureState::basis_vector(3, 1);
    CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
    CHECK(fidelity(zero, one) == doctest::Approx(0.0));
    // cos(pi/6)|0> + sin(pi/6)|1>; overlap with |0> is cos^2(pi/6) = 3/4
    const double c = std::cos(M_PI / 6.0), s = std::sin(M_PI / 6.0);
    CHECK(fidelity(ket({c, s, 0.0}), zero) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(fidelity(zero, PureState::basis_vector(2, 0)), std::invalid_argument);
}

TEST_CASE("fidelity is symmetric and phase invariant") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        PureState a = random_pure_state(4, rng);
        PureState b = random_pure_state(4, rng);
        CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-12));
        const cplx phase = std::polar(1.0, rng.uniform() * 6.28);
        PureState b_rot(Vector(phase * b.amplitudes()));
        CHECK(std::abs(fidelity(a, b) - fidelity(a, b_rot)) < 1e-12);
    }
}

TEST_CASE("fidelity_defect resolves defects far below machine epsilon") {
    PureState zero = PureState::basis_vector(3, 0);
    const double theta = 1e-11;
    Vector v(3);
    v << 1.0, theta, 0.0;
    PureState nearby(v);
    const double defect = fidelity_defect(zero, nearby);
    CHECK(defect > 0.0);
    CHECK(defect == doctest::Approx(theta * theta).epsilon(1e-3));
    // plain fidelity rounds to exactly 1 here
    CHECK(fidelity(zero, nearby) == 1.0);
}

TEST_CASE("projectors_commute: orthogonal yes, skew no, oracle agreement") {
    PureState zero = PureState::basis_vector(2, 0);
    PureState one = PureState::basis_vector(2, 1);
    PureState plus = ket({1.0, 1.0});
    CHECK(projectors_commute(zero.projector(), one.projector()));
    CHECK_FALSE(projectors_commute(zero.projector(), plus.projector()));

    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        Matrix p = random_pure_state(3, rng).projector();
        Matrix q = random_pure_state(3, rng).projector();
        CHECK(projectors_commute(p, q) == (oracles::commutator_norm(p, q) < 1e-10));
        // for rank-1 projectors: commuting iff fidelity is 0 or 1
        const double f = oracles::naive_born(p, q);
        const bool fid_commutes = f < 1e-10 || f > 1.0 - 1e-10;
        CHECK(projectors_commute(p, q) == fid_commutes);
    }
}

TEST_CASE("random_context: invariants, determinism, spread") {
    Rng rng(42);
    Context c = random_context(2, rng, "c");
    CHECK(c.dim() == 2);

    Rng r1(99), r2(99);
    Context a = random_context(3, r1, "a");
    Context b = random_context(3, r2, "a");
    for (int i = 0; i < 3; ++i)
        CHECK(fidelity(a.basis_vector(i), b.basis_vector(i)) == doctest::Approx(1.0));

    // first projectors across many seeds are pairwise distinct
    std::vector<PureState> firsts;
    for (int seed = 0; seed < 1000; ++seed) {
        Rng r(seed);
        firsts.push_back(random_context(3, r).basis_vector(0));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < firsts.size(); ++i)
        for (std::size_t j = i + 1; j < firsts.size(); ++j)
            worst = std::max(worst, fidelity(firsts[i], firsts[j]));
    CHECK(worst < 1.0 - 1e-6);
}

TEST_CASE("context invariants reject bad bases") {
    PureState zero = PureState::basis_vector(2, 0);
    PureState plus = ket({1.0, 1.0});
    CHECK_THROWS_AS(Context({zero, plus}, "bad"), std::invalid_argument);
    CHECK_THROWS_AS(Context({zero}, "short"), std::invalid_argument);
}

TEST_CASE("eigencontext: diagonal, Pauli X, random residuals, degenerate error") {
    Matrix diag = Matrix::Zero(3, 3);
    diag(0, 0) = 1.0;
    diag(1, 1) = 2.0;
    diag(2, 2) = 3.0;
    Context computational = eigencontext(Observable(diag));
    for (int i = 0; i < 3; ++i)
        CHECK(fidelity(computational.basis_vector(i), PureState::basis_vector(3, i)) ==
              doctest::Approx(1.0));

    Matrix pauli_x(2, 2);
    pauli_x << 0.0, 1.0, 1.0, 0.0;
    Context pm = eigencontext(Observable(pauli_x));
    PureState plus = ket({1.0, 1.0});
    PureState minus = ket({1.0, -1.0});
    CHECK(pm.member_index(plus, 1e-10).has_value());
    CHECK(pm.member_index(minus, 1e-10).has_value());

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix g(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
        Observable obs(0.5 * (g + g.adjoint()));
        if (obs.min_eigenvalue_gap() <= 1e-8) continue;
        Context ctx = eigencontext(obs);
        for (int i = 0; i < 3; ++i) {
            const Vector e = ctx.basis_vector(i).amplitudes();
            const Vector residual = obs.matrix() * e - obs.eigenvalues()(i) * e;
            CHECK(residual.norm() < 1e-9);
        }
    }

    Matrix degenerate = Matrix::Zero(3, 3);
    degenerate(0, 0) = 1.0;
    degenerate(1, 1) = 1.0;
    degenerate(2, 2) = 2.0;
    CHECK_THROWS_AS(eigencontext(Observable(degenerate)), std::invalid_argument);
}

TEST_CASE("born probabilities over a context sum to 1") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Context ctx = random_context(4, rng);
        Matrix rho = random_density(4, rng);
        double total = 0.0;
        for (int i = 0; i < 4; ++i) total += born_probability(rho, ctx.projector(i));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("observable built from a context is recovered by eigencontext") {
    Rng rng(23);
    Context ctx = random_context(3, rng, "base");
    Matrix a = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) a += static_cast<double>(i + 1) * ctx.projector(i);
    Context recovered = eigencontext(Observable(a));
    // recovery up to projector permutation and phase
    for (int i = 0; i < 3; ++i) {
        auto idx = recovered.member_index(ctx.basis_vector(i), 1e-9);
        REQUIRE(idx.has_value());
    }
}

TEST_CASE("PureState construction guards") {
    Vector v1(1);
    v1 << 1.0;
    CHECK_THROWS_AS(PureState{v1}, std::invalid_argument);
    Vector v17 = Vector::Zero(17);
    v17(0) = 1.0;
    CHECK_THROWS_AS(PureState{v17}, std::invalid_argument);
    Vector z = Vector::Zero(3);
    CHECK_THROWS_AS(PureState{z}, std::invalid_argument);
}

TEST_CASE("Povm validation") {
    PureState zero = PureState::basis_vector(2, 0);
    PureState one = PureState::basis_vector(2, 1);
    CHECK_THROWS_AS(Povm({zero.projector(), zero.projector()}, {"a", "b"}, "bad"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Povm({2.0 * zero.projector(), Matrix::Identity(2, 2) - 2.0 * zero.projector()},
                         {"a", "b"}, "neg"),
                    std::invalid_argument);
    Povm ok({zero.projector(), one.projector()}, {"a", "b"}, "z");
    CHECK(ok.outcomes() == 2);
}

TEST_CASE("embedding_context places psi first and completes orthonormally") {
    Rng rng(31);
    PureState psi = random_pure_state(3, rng);
    Context ctx = embedding_context(psi, rng, "emb");
    CHECK(fidelity(ctx.basis_vector(0), psi) == doctest::Approx(1.0));
    CHECK(ctx.member_index(psi).has_value());
}
