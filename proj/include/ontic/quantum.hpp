#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontic/linalg.hpp"
#include "ontic/rng.hpp"

namespace ontic {

/// Unit vector in a d-dimensional complex space, 2 <= d <= 16.
/// Ray identity (state identity up to global phase) is decided through
/// fidelity thresholds, never through phase canonicalization.
class PureState {
  public:
    explicit PureState(Vector amplitudes);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }
    Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }
    Matrix density_matrix() const { return projector(); }

    static PureState basis_vector(int dim, int index);

  private:
    Vector amplitudes_;
};

/// |<psi|phi>|^2, clamped to [0,1].
double fidelity(const PureState& psi, const PureState& phi);

/// 1 - |<psi|phi>|^2 computed through the orthogonal residual, so values far
/// below machine epsilon relative to 1 are still resolved.
double fidelity_defect(const PureState& psi, const PureState& phi);

inline bool ray_equal(const PureState& a, const PureState& b, double tol = kRayTol) {
    return fidelity_defect(a, b) < tol;
}

/// Hermitian matrix with cached spectral decomposition (eigenvalues ascending).
class Observable {
  public:
    explicit Observable(Matrix m, double hermitian_tol = kHermitianTol);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    const RealVector& eigenvalues() const { return eigenvalues_; }
    PureState eigenvector(int i) const;
    Matrix eigenprojector(int i) const;
    double min_eigenvalue_gap() const;

  private:
    Matrix matrix_;
    RealVector eigenvalues_;
    Matrix eigenvectors_;  // columns
};

/// Orthonormal basis presented as d rank-1 projectors.
class Context {
  public:
    Context(std::vector<PureState> basis, std::string label, double tol = kHermitianTol);

    int dim() const { return static_cast<int>(basis_.size()); }
    const std::string& label() const { return label_; }
    const std::vector<PureState>& basis() const { return basis_; }
    const PureState& basis_vector(int i) const { return basis_.at(i); }
    Matrix projector(int i) const { return basis_.at(i).projector(); }

    /// Index of a basis vector ray-equal to psi, if any.
    std::optional<int> member_index(const PureState& psi, double tol = kRayTol) const;

  private:
    std::vector<PureState> basis_;
    std::string label_;
};

class Povm {
  public:
    Povm(std::vector<Matrix> effects, std::vector<std::string> outcome_labels,
         std::string quantity_label, double tol = kHermitianTol);

    int dim() const { return static_cast<int>(effects_.front().rows()); }
    int outcomes() const { return static_cast<int>(effects_.size()); }
    const Matrix& effect(int i) const { return effects_.at(i); }
    const std::vector<Matrix>& effects() const { return effects_; }
    const std::vector<std::string>& outcome_labels() const { return outcome_labels_; }
    const std::string& quantity_label() const { return quantity_label_; }

    static Povm projective(const Context& context, std::string quantity_label);

  private:
    std::vector<Matrix> effects_;
    std::vector<std::string> outcome_labels_;
    std::string quantity_label_;
};

struct Preparation {
    std::string label;
    Matrix rho;
    std::optional<PureState> pure;  // set when rho is a known pure state

    static Preparation from_pure(std::string label, const PureState& psi);
    static Preparation from_density(std::string label, Matrix rho,
                                    double tol = kHermitianTol);
};

/// A fragment of quantum mechanics: dimension, preparations, measurements.
struct Fragment {
    int dim = 0;
    std::vector<Preparation> preparations;
    std::vector<Povm> measurements;

    void validate(double tol = kHermitianTol) const;
    const Preparation& preparation(const std::string& label) const;
};

/// Born rule Re(Tr(rho E)), clamped to [0,1] near the boundary.
double born_probability(const Matrix& rho, const Matrix& effect,
                        double tol = kHermitianTol);

/// True iff the max-norm of the commutator PQ - QP is below tol. For rank-1
/// projectors this is equivalent to fidelity in {0, 1}.
bool projectors_commute(const Matrix& p, const Matrix& q, double tol = kHermitianTol);

/// Haar-style random orthonormal basis from QR of a complex Gaussian matrix.
Context random_context(int dim, Rng& rng, std::string label = "");

/// Random unit vector with independent standard complex normal entries.
PureState random_pure_state(int dim, Rng& rng);

/// Eigenbasis of a non-degenerate observable (min eigenvalue gap > 1e-8).
Context eigencontext(const Observable& observable, std::string label = "");

/// Basis containing psi as its first vector, completed by seeded random
/// orthonormal vectors.
Context embedding_context(const PureState& psi, Rng& rng, std::string label = "");

}  // namespace ontic
