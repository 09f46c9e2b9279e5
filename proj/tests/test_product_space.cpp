#include <doctest.h>

#include "ontic/product_space.hpp"
#include "oracles.hpp"

using namespace ontic;

namespace {

std::vector<Context> random_contexts(int dim, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Context> out;
    for (int i = 0; i < count; ++i)
        out.push_back(random_context(dim, rng, "C" + std::to_string(i)));
    return out;
}

CylinderEvent singleton(int context, int index, int dim) {
    CylinderEvent e;
    e.constrain_to(context, index, dim);
    return e;
}

}  // namespace

TEST_CASE("cylinder_measure: full space has measure 1 for every measure") {
    Rng rng(1);
    auto contexts = random_contexts(3, 5, 2);
    for (int trial = 0; trial < 10; ++trial) {
        ProductMeasure mu = ProductMeasure::from_pure_state(random_pure_state(3, rng), contexts);
        CHECK(cylinder_measure(mu, CylinderEvent{}) == 1.0);
    }
}

TEST_CASE("cylinder_measure: fixing the state's own projector has measure 1") {
    Rng rng(3);
    PureState psi = random_pure_state(3, rng);
    std::vector<Context> contexts{embedding_context(psi, rng, "E0"),
                                  random_context(3, rng, "C1")};
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);
    CHECK(cylinder_measure(mu, singleton(0, 0, 3)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cylinder_measure: singleton constraints multiply per-context fidelities") {
    Rng rng(5);
    auto contexts = random_contexts(3, 4, 7);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);
    CylinderEvent e;
    double expected = 1.0;
    for (int c = 0; c < 4; ++c) {
        e.constrain_to(c, c % 3, 3);
        expected *= fidelity(psi, contexts[c].basis_vector(c % 3));
    }
    CHECK(cylinder_measure(mu, e) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cylinder_measure agrees with full enumeration for d=3, m=6") {
    Rng rng(9);
    auto contexts = random_contexts(3, 6, 13);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);
    std::set<int> all{0, 1, 2, 3, 4, 5};
    Rng erng(10);
    for (int trial = 0; trial < 10; ++trial) {
        CylinderEvent e;
        for (int c = 0; c < 6; ++c) {
            if (erng.uniform() < 0.5) continue;
            std::set<int> admitted;
            while (admitted.empty())
                for (int i = 0; i < 3; ++i)
                    if (erng.uniform() < 0.5) admitted.insert(i);
            e.constrain(c, admitted, 3);
        }
        const double direct = cylinder_measure(mu, e);
        const double enumerated =
            oracles::enumerated_event_probability(mu, Event::cylinder(e), all);
        CHECK(direct == doctest::Approx(enumerated).epsilon(1e-12));
    }
}

TEST_CASE("CylinderEvent rejects empty and out-of-range constraints") {
    CylinderEvent e;
    CHECK_THROWS_AS(e.constrain(0, std::set<int>{}, 3), std::invalid_argument);
    CHECK_THROWS_AS(e.constrain(0, std::set<int>{5}, 3), std::invalid_argument);
    e.constrain(0, {0, 1}, 3);
    CHECK_THROWS_AS(e.constrain(0, std::set<int>{2}, 3), std::invalid_argument);
}

TEST_CASE("event algebra probabilities match enumeration") {
    Rng rng(21);
    auto contexts = random_contexts(3, 5, 23);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);
    std::set<int> all{0, 1, 2, 3, 4};

    Event a = Event::cylinder(singleton(0, 1, 3));
    Event b = Event::cylinder(singleton(1, 2, 3));
    Event c = Event::cylinder(singleton(0, 0, 3));

    for (const Event& e : {a & b, a | b, ~a, (a | c) & b, ~(a & b) | c,
                           Event::all_of({a, b, ~c}), Event::full()}) {
        const double direct = event_probability(mu, e);
        const double enumerated = oracles::enumerated_event_probability(mu, e, all);
        CHECK(direct == doctest::Approx(enumerated).epsilon(1e-12));
    }
}

TEST_CASE("independent blocks factor exactly") {
    Rng rng(31);
    auto contexts = random_contexts(3, 6, 33);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);

    CylinderEvent block1;
    block1.constrain_to(0, 0, 3);
    block1.constrain_to(1, 1, 3);
    CylinderEvent block2;
    block2.constrain_to(4, 2, 3);
    Event joint = Event::cylinder(block1) & Event::cylinder(block2);
    CHECK(event_probability(mu, joint) ==
          doctest::Approx(cylinder_measure(mu, block1) * cylinder_measure(mu, block2))
              .epsilon(1e-14));
}

TEST_CASE("joint distribution over two disjoint contexts factorizes") {
    // stochastic independence across contexts: P(l(C1)=i and l(C2)=j) =
    // P(l(C1)=i) P(l(C2)=j), exactly
    Rng rng(41);
    auto contexts = random_contexts(3, 2, 43);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CylinderEvent joint;
            joint.constrain_to(0, i, 3);
            joint.constrain_to(1, j, 3);
            CHECK(cylinder_measure(mu, joint) ==
                  doctest::Approx(mu.weight(0, i) * mu.weight(1, j)).epsilon(1e-14));
        }
    }
}

TEST_CASE("events_disjoint: complete rule for cylinders") {
    Event a = Event::cylinder(singleton(0, 0, 3));
    Event b = Event::cylinder(singleton(0, 1, 3));
    Event c = Event::cylinder(singleton(1, 0, 3));
    CHECK(events_disjoint(a, b, 3, 4));
    CHECK_FALSE(events_disjoint(a, c, 3, 4));
}

TEST_CASE("events_disjoint: structural complement rule across shared subtrees") {
    Event u = Event::cylinder(singleton(0, 0, 3)) | Event::cylinder(singleton(1, 0, 3));
    Event a = Event::cylinder(singleton(2, 1, 3)) & u;
    Event b = Event::cylinder(singleton(3, 1, 3)) & ~u;
    CHECK(events_disjoint(a, b, 3, 5));
}

TEST_CASE("events_disjoint falls back to enumeration and is exact") {
    Rng rng(51);
    auto contexts = random_contexts(3, 4, 53);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure uniform("u", 3,
                           std::vector<RealVector>(4, RealVector::Constant(3, 1.0 / 3.0)));
    Event a = (Event::cylinder(singleton(0, 0, 3)) | Event::cylinder(singleton(1, 1, 3)));
    Event b = ~Event::cylinder(singleton(0, 0, 3)) & ~Event::cylinder(singleton(1, 1, 3));
    CHECK(events_disjoint(a, b, 3, 4));
    // and the uniform-measure cross-check: P(a & b) must vanish
    CHECK(event_probability(uniform, a & b) == 0.0);

    Event c = Event::cylinder(singleton(0, 0, 3)) | Event::cylinder(singleton(2, 0, 3));
    CHECK_FALSE(events_disjoint(a, c, 3, 4));
}

TEST_CASE("restricted TV: collapse matches enumeration when one side is deterministic") {
    Rng rng(61);
    PureState psi = random_pure_state(3, rng);
    PureState phi = random_pure_state(3, rng);
    std::vector<Context> contexts;
    for (int i = 0; i < 3; ++i) contexts.push_back(embedding_context(psi, rng, "P" + std::to_string(i)));
    for (int i = 0; i < 3; ++i) contexts.push_back(embedding_context(phi, rng, "Q" + std::to_string(i)));
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts, "psi");
    ProductMeasure nu = ProductMeasure::from_pure_state(phi, contexts, "phi");

    for (int k = 1; k <= 3; ++k) {
        std::set<int> coords;
        for (int t = 0; t < k; ++t) {
            coords.insert(t);      // psi block
            coords.insert(3 + t);  // phi block
        }
        const double collapsed = restricted_variational_distance(mu, nu, coords);
        const double enumerated = oracles::enumerated_tv(mu, nu, coords);
        CHECK(collapsed == doctest::Approx(enumerated).epsilon(1e-12));
        const double f = fidelity(psi, phi);
        CHECK(collapsed == doctest::Approx(1.0 - std::pow(f, k)).epsilon(1e-10));
    }
}

TEST_CASE("restricted TV: free coordinates are enumerated exactly") {
    Rng rng(71);
    auto contexts = random_contexts(3, 5, 73);
    PureState psi = random_pure_state(3, rng);
    PureState phi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts, "psi");
    ProductMeasure nu = ProductMeasure::from_pure_state(phi, contexts, "phi");
    std::set<int> coords{0, 1, 2, 3, 4};
    CHECK(restricted_variational_distance(mu, nu, coords) ==
          doctest::Approx(oracles::enumerated_tv(mu, nu, coords)).epsilon(1e-12));
}

TEST_CASE("restricted TV is monotone in the coordinate set") {
    Rng rng(81);
    auto contexts = random_contexts(3, 6, 83);
    PureState psi = random_pure_state(3, rng);
    PureState phi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts, "psi");
    ProductMeasure nu = ProductMeasure::from_pure_state(phi, contexts, "phi");
    double previous = 0.0;
    std::set<int> coords;
    for (int c = 0; c < 6; ++c) {
        coords.insert(c);
        const double tv = restricted_variational_distance(mu, nu, coords);
        CHECK(tv >= previous - 1e-12);
        previous = tv;
    }
}

TEST_CASE("Bhattacharyya product bounds the restricted TV from below") {
    Rng rng(91);
    auto contexts = random_contexts(3, 6, 93);
    PureState psi = random_pure_state(3, rng);
    PureState phi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts, "psi");
    ProductMeasure nu = ProductMeasure::from_pure_state(phi, contexts, "phi");
    std::set<int> coords{0, 1, 2, 3, 4, 5};
    const double tv = restricted_variational_distance(mu, nu, coords);
    const double bc = bhattacharyya_product(mu, nu, coords);
    CHECK(1.0 - bc <= tv + 1e-12);
}

TEST_CASE("sampling is deterministic per seed and streams diverge across seeds") {
    Rng rng(111);
    auto contexts = random_contexts(3, 4, 113);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);

    Rng a(7), b(7), c(8);
    bool diverged = false;
    for (int i = 0; i < 100; ++i) {
        const auto sa = mu.sample(a);
        const auto sb = mu.sample(b);
        CHECK(sa == sb);
        if (sa != mu.sample(c)) diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("sampled per-context frequencies sit inside 4-sigma binomial bands") {
    Rng rng(121);
    auto contexts = random_contexts(3, 3, 123);
    PureState psi = random_pure_state(3, rng);
    ProductMeasure mu = ProductMeasure::from_pure_state(psi, contexts);

    const int shots = 100000;
    std::vector<std::vector<int>> counts(3, std::vector<int>(3, 0));
    Rng sampler(987);
    for (int s = 0; s < shots; ++s) {
        const auto draw = mu.sample(sampler);
        for (int c = 0; c < 3; ++c) ++counts[c][draw[c]];
    }
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 3; ++i) {
            const double p = mu.weight(c, i);
            const double freq = static_cast<double>(counts[c][i]) / shots;
            const double sigma = std::sqrt(p * (1.0 - p) / shots);
            CHECK(std::abs(freq - p) <= 4.0 * sigma + 1e-9);
        }
    }
}
