#include <doctest.h>

#include "ontic/ontic_model.hpp"
#include "oracles.hpp"

using namespace ontic;

namespace {

// Two orthogonal preparations measured in the shared computational context,
// over a two-point ontic space with deterministic responses.
OnticModel two_point_model() {
    OnticModel m;
    m.fragment.dim = 2;
    PureState zero = PureState::basis_vector(2, 0);
    PureState one = PureState::basis_vector(2, 1);
    m.fragment.preparations = {Preparation::from_pure("zero", zero),
                               Preparation::from_pure("one", one)};
    Context computational({zero, one}, "Z");
    m.fragment.measurements = {Povm::projective(computational, "ctx:Z")};

    m.space = OnticSpace::indexed(2);
    ResponseFunction resp;
    resp.quantity_label = "ctx:Z";
    resp.outcome_labels = {"a0", "a1"};
    resp.table = RealMatrix::Zero(2, 2);
    resp.table(0, 0) = 1.0;
    resp.table(1, 1) = 1.0;
    m.responses = {resp};

    EpistemicState mu{"zero", RealVector(2)};
    mu.weights << 1.0, 0.0;
    EpistemicState nu{"one", RealVector(2)};
    nu.weights << 0.0, 1.0;
    m.epistemic_map["zero"] = {mu};
    m.epistemic_map["one"] = {nu};
    return m;
}

EpistemicState make_state(const std::string& label, std::initializer_list<double> w) {
    EpistemicState e{label, RealVector(static_cast<Eigen::Index>(w.size()))};
    Eigen::Index i = 0;
    for (double x : w) e.weights(i++) = x;
    return e;
}

EpistemicState random_state(int n, Rng& rng) {
    RealVector w(n);
    for (int i = 0; i < n; ++i) w(i) = rng.uniform() + 1e-6;
    w /= w.sum();
    return EpistemicState{"r", w};
}

}  // namespace

TEST_CASE("validate_model: single-point space with deterministic responses is exact") {
    OnticModel m;
    m.fragment.dim = 2;
    PureState zero = PureState::basis_vector(2, 0);
    m.fragment.preparations = {Preparation::from_pure("zero", zero)};
    Context computational({zero, PureState::basis_vector(2, 1)}, "Z");
    m.fragment.measurements = {Povm::projective(computational, "ctx:Z")};
    m.space = OnticSpace::indexed(1);
    ResponseFunction resp{"ctx:Z", {"a0", "a1"}, RealMatrix(1, 2)};
    resp.table << 1.0, 0.0;
    m.responses = {resp};
    m.epistemic_map["zero"] = {make_state("zero", {1.0})};

    ValidationReport report = validate_model(m, 1e-10);
    CHECK(report.pass);
    CHECK(report.max_residual == 0.0);
}

TEST_CASE("validate_model: a perturbed response row fails with the expected residual") {
    OnticModel m = two_point_model();
    // +0.01 / -0.01 on the row of ontic state 0 keeps it stochastic
    m.responses[0].table(0, 0) -= 0.01;
    m.responses[0].table(0, 1) += 0.01;
    ValidationReport report = validate_model(m, 1e-10);
    CHECK_FALSE(report.pass);
    // preparation "zero" puts mass 1 on state 0, so the residual is 0.01 * 1
    CHECK(report.max_residual == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("validate_model: structural errors are not residuals") {
    OnticModel m = two_point_model();
    m.responses.clear();
    CHECK_THROWS_AS(validate_model(m, 1e-10), std::invalid_argument);

    OnticModel m2 = two_point_model();
    m2.epistemic_map.erase("one");
    CHECK_THROWS_AS(validate_model(m2, 1e-10), std::invalid_argument);
}

TEST_CASE("validate_model residuals are invariant under ontic label permutation") {
    OnticModel m = two_point_model();
    m.responses[0].table(0, 0) = 0.93;
    m.responses[0].table(0, 1) = 0.07;
    const double before = validate_model(m, 1e-10).max_residual;

    // swap the two ontic states everywhere
    OnticModel p = m;
    std::swap(p.space.labels[0], p.space.labels[1]);
    p.responses[0].table.row(0).swap(p.responses[0].table.row(1));
    for (auto& [label, states] : p.epistemic_map)
        for (auto& e : states) std::swap(e.weights(0), e.weights(1));
    const double after = validate_model(p, 1e-10).max_residual;
    CHECK(before == doctest::Approx(after).epsilon(1e-14));
}

TEST_CASE("variational_distance: trivial cases and the 4-subset oracle") {
    EpistemicState mu = make_state("a", {0.5, 0.5});
    EpistemicState nu = make_state("b", {0.25, 0.75});
    CHECK(variational_distance(mu, mu) == 0.0);
    CHECK(variational_distance(mu, nu) == doctest::Approx(0.25));
    CHECK(variational_distance(mu, nu) ==
          doctest::Approx(oracles::brute_force_tv(mu.weights, nu.weights)));

    EpistemicState left = make_state("l", {1.0, 0.0});
    EpistemicState right = make_state("r", {0.0, 1.0});
    CHECK(variational_distance(left, right) == 1.0);

    EpistemicState other = make_state("c", {0.1, 0.2, 0.7});
    CHECK_THROWS_AS(variational_distance(mu, other), std::invalid_argument);
}

TEST_CASE("variational_distance equals the exhaustive subset maximum on random pairs") {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        EpistemicState mu = random_state(10, rng);
        EpistemicState nu = random_state(10, rng);
        CHECK(variational_distance(mu, nu) ==
              doctest::Approx(oracles::brute_force_tv(mu.weights, nu.weights)).epsilon(1e-12));
    }
}

TEST_CASE("variational_distance is a metric") {
    Rng rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        EpistemicState a = random_state(8, rng);
        EpistemicState b = random_state(8, rng);
        EpistemicState c = random_state(8, rng);
        const double ab = variational_distance(a, b);
        const double ba = variational_distance(b, a);
        const double ac = variational_distance(a, c);
        const double cb = variational_distance(c, b);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(variational_distance(a, a) < 1e-12);
    }
}

TEST_CASE("bhattacharyya_overlap bounds 1 - TV") {
    EpistemicState mu = make_state("a", {0.5, 0.5});
    CHECK(bhattacharyya_overlap(mu, mu) == doctest::Approx(1.0));
    EpistemicState left = make_state("l", {1.0, 0.0});
    EpistemicState right = make_state("r", {0.0, 1.0});
    CHECK(bhattacharyya_overlap(left, right) == 0.0);

    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        EpistemicState a = random_state(16, rng);
        EpistemicState b = random_state(16, rng);
        const double tv = variational_distance(a, b);
        CHECK(1.0 - tv <= bhattacharyya_overlap(a, b) + 1e-12);
    }
}

TEST_CASE("is_psi_ontic: disjoint point supports vs shared support") {
    OnticModel good = two_point_model();
    OnticityReport r = is_psi_ontic(good, 1e-12);
    CHECK(r.psi_ontic);
    CHECK(r.min_distance == 1.0);

    OnticModel bad = two_point_model();
    bad.epistemic_map["zero"] = {make_state("zero", {0.6, 0.4})};
    bad.epistemic_map["one"] = {make_state("one", {0.5, 0.5})};
    // keep the Born condition out of scope here; onticity only reads the measures
    OnticityReport r2 = is_psi_ontic(bad, 1e-12);
    CHECK_FALSE(r2.psi_ontic);
    CHECK(r2.min_distance == doctest::Approx(0.1));
    CHECK(r2.witness_psi == "zero");
    CHECK(r2.witness_phi == "one");
}

TEST_CASE("check_psi_determinate: point supports pass at tol 0") {
    OnticModel m = two_point_model();
    SupportAssignment a;
    a.sets["zero"] = {0};
    a.sets["one"] = {1};
    DeterminatenessReport r = check_psi_determinate(m, a, 0.0);
    CHECK(r.pass);
    CHECK(r.min_measures.at("zero") == 1.0);
}

TEST_CASE("check_psi_determinate: a shared ontic state fails condition (i)") {
    OnticModel m = two_point_model();
    SupportAssignment a;
    a.sets["zero"] = {0, 1};
    a.sets["one"] = {1};
    DeterminatenessReport r = check_psi_determinate(m, a, 1e-12);
    CHECK_FALSE(r.pass);
    REQUIRE(r.disjoint_failures.size() == 1);
    CHECK(r.disjoint_failures[0].shared_states == 1);
}

TEST_CASE("check_psi_determinate: unknown labels and indices are errors") {
    OnticModel m = two_point_model();
    SupportAssignment missing;
    missing.sets["zero"] = {0};
    CHECK_THROWS_AS(check_psi_determinate(m, missing, 0.0), std::invalid_argument);

    SupportAssignment unknown_label;
    unknown_label.sets["zero"] = {0};
    unknown_label.sets["one"] = {1};
    unknown_label.sets["ghost"] = {0};
    CHECK_THROWS_AS(check_psi_determinate(m, unknown_label, 0.0), std::invalid_argument);

    SupportAssignment bad_index;
    bad_index.sets["zero"] = {0};
    bad_index.sets["one"] = {7};
    CHECK_THROWS_AS(check_psi_determinate(m, bad_index, 0.0), std::invalid_argument);
}

TEST_CASE("coverage of the ontic space is not required") {
    // a third ontic state belonging to no pure support is fine
    OnticModel m = two_point_model();
    m.space = OnticSpace::indexed(3);
    m.responses[0].table = RealMatrix::Zero(3, 2);
    m.responses[0].table(0, 0) = 1.0;
    m.responses[0].table(1, 1) = 1.0;
    m.responses[0].table(2, 0) = 0.5;
    m.responses[0].table(2, 1) = 0.5;
    m.epistemic_map["zero"] = {make_state("zero", {1.0, 0.0, 0.0})};
    m.epistemic_map["one"] = {make_state("one", {0.0, 1.0, 0.0})};
    SupportAssignment a;
    a.sets["zero"] = {0};
    a.sets["one"] = {1};
    CHECK(check_psi_determinate(m, a, 0.0).pass);
}

TEST_CASE("psi-determinate implies psi-ontic at the same tolerance") {
    OnticModel m = two_point_model();
    SupportAssignment a;
    a.sets["zero"] = {0};
    a.sets["one"] = {1};
    const double tol = 1e-9;
    CHECK(check_psi_determinate(m, a, tol).pass);
    CHECK(is_psi_ontic(m, tol).psi_ontic);
}
