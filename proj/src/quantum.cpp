#include "ontic/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace ontic {

PureState::PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const auto d = amplitudes_.size();
    if (d < 2 || d > kMaxDim)
        throw std::invalid_argument("PureState: dimension must be in [2, " +
                                    std::to_string(kMaxDim) + "], got " + std::to_string(d));
    const double norm = amplitudes_.norm();
    if (norm < 1e-12)
        throw std::invalid_argument("PureState: zero vector");
    amplitudes_ /= norm;
}

PureState PureState::basis_vector(int dim, int index) {
    if (index < 0 || index >= dim)
        throw std::invalid_argument("PureState::basis_vector: index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return PureState(v);
}

double fidelity(const PureState& psi, const PureState& phi) {
    require_same_dim(psi.dim(), phi.dim(), "fidelity");
    const double f = std::norm(psi.amplitudes().dot(phi.amplitudes()));
    return std::clamp(f, 0.0, 1.0);
}

double fidelity_defect(const PureState& psi, const PureState& phi) {
    require_same_dim(psi.dim(), phi.dim(), "fidelity_defect");
    // <psi|phi> via Eigen's dot (conjugates the left argument).
    const cplx c = psi.amplitudes().dot(phi.amplitudes());
    const Vector residual = phi.amplitudes() - c * psi.amplitudes();
    return residual.squaredNorm();
}

Observable::Observable(Matrix m, double hermitian_tol) : matrix_(std::move(m)) {
    require_square(matrix_, "Observable");
    if (matrix_.rows() < 2 || matrix_.rows() > kMaxDim)
        throw std::invalid_argument("Observable: dimension out of range");
    if (!is_hermitian(matrix_, hermitian_tol))
        throw std::invalid_argument("Observable: matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Observable: eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
    // Spectral reconstruction sanity: sum a_i P_i must reproduce the matrix.
    Matrix rebuilt = Matrix::Zero(dim(), dim());
    for (int i = 0; i < dim(); ++i)
        rebuilt += eigenvalues_(i) * eigenprojector(i);
    if (max_abs(rebuilt - matrix_) > 1e-10)
        throw std::runtime_error("Observable: spectral reconstruction failed");
}

PureState Observable::eigenvector(int i) const {
    return PureState(eigenvectors_.col(i));
}

Matrix Observable::eigenprojector(int i) const {
    return eigenvectors_.col(i) * eigenvectors_.col(i).adjoint();
}

double Observable::min_eigenvalue_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < dim(); ++i)
        gap = std::min(gap, eigenvalues_(i + 1) - eigenvalues_(i));
    return gap;
}

Context::Context(std::vector<PureState> basis, std::string label, double tol)
    : basis_(std::move(basis)), label_(std::move(label)) {
    const int d = static_cast<int>(basis_.size());
    if (d < 2 || d > kMaxDim)
        throw std::invalid_argument("Context: dimension out of range");
    Matrix sum = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        require_same_dim(basis_[i].dim(), d, "Context");
        sum += basis_[i].projector();
        for (int j = i + 1; j < d; ++j) {
            // Tr(P_i P_j) = |<e_i|e_j>|^2
            if (fidelity(basis_[i], basis_[j]) >= tol)
                throw std::invalid_argument("Context '" + label_ +
                                            "': projectors not pairwise orthogonal");
        }
    }
    if (max_abs(sum - Matrix::Identity(d, d)) >= tol)
        throw std::invalid_argument("Context '" + label_ + "': projectors do not sum to identity");
}

std::optional<int> Context::member_index(const PureState& psi, double tol) const {
    for (int i = 0; i < dim(); ++i)
        if (fidelity_defect(basis_[i], psi) < tol) return i;
    return std::nullopt;
}

Povm::Povm(std::vector<Matrix> effects, std::vector<std::string> outcome_labels,
           std::string quantity_label, double tol)
    : effects_(std::move(effects)),
      outcome_labels_(std::move(outcome_labels)),
      quantity_label_(std::move(quantity_label)) {
    if (effects_.empty()) throw std::invalid_argument("Povm: no effects");
    if (outcome_labels_.size() != effects_.size())
        throw std::invalid_argument("Povm: outcome label count mismatch");
    const auto d = effects_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : effects_) {
        require_square(e, "Povm effect");
        require_same_dim(e.rows(), d, "Povm");
        if (!is_hermitian(e, tol))
            throw std::invalid_argument("Povm '" + quantity_label_ + "': non-Hermitian effect");
        if (min_eigenvalue(e) < -tol)
            throw std::invalid_argument("Povm '" + quantity_label_ + "': effect not PSD");
        sum += e;
    }
    if (max_abs(sum - Matrix::Identity(d, d)) >= tol)
        throw std::invalid_argument("Povm '" + quantity_label_ + "': effects do not sum to identity");
}

Povm Povm::projective(const Context& context, std::string quantity_label) {
    std::vector<Matrix> effects;
    std::vector<std::string> labels;
    for (int i = 0; i < context.dim(); ++i) {
        effects.push_back(context.projector(i));
        labels.push_back("a" + std::to_string(i));
    }
    return Povm(std::move(effects), std::move(labels), std::move(quantity_label));
}

Preparation Preparation::from_pure(std::string label, const PureState& psi) {
    return Preparation{std::move(label), psi.density_matrix(), psi};
}

Preparation Preparation::from_density(std::string label, Matrix rho, double tol) {
    require_square(rho, "Preparation");
    if (!is_hermitian(rho, tol))
        throw std::invalid_argument("Preparation '" + label + "': rho not Hermitian");
    if (min_eigenvalue(rho) < -tol)
        throw std::invalid_argument("Preparation '" + label + "': rho not PSD");
    if (std::abs(real_trace(rho) - 1.0) > tol)
        throw std::invalid_argument("Preparation '" + label + "': trace != 1");
    return Preparation{std::move(label), std::move(rho), std::nullopt};
}

void Fragment::validate(double tol) const {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("Fragment: dimension out of range");
    for (const auto& p : preparations) {
        require_same_dim(p.rho.rows(), dim, "Fragment preparation '" + p.label + "'");
        if (!is_hermitian(p.rho, tol) || min_eigenvalue(p.rho) < -tol ||
            std::abs(real_trace(p.rho) - 1.0) > tol)
            throw std::invalid_argument("Fragment: invalid density matrix '" + p.label + "'");
    }
    for (const auto& m : measurements)
        require_same_dim(m.dim(), dim, "Fragment measurement '" + m.quantity_label() + "'");
}

const Preparation& Fragment::preparation(const std::string& label) const {
    for (const auto& p : preparations)
        if (p.label == label) return p;
    throw std::invalid_argument("Fragment: unknown preparation '" + label + "'");
}

double born_probability(const Matrix& rho, const Matrix& effect, double tol) {
    require_square(rho, "born_probability rho");
    require_square(effect, "born_probability effect");
    require_same_dim(rho.rows(), effect.rows(), "born_probability");
    if (!is_hermitian(rho, tol))
        throw std::invalid_argument("born_probability: rho not Hermitian within tolerance");
    if (!is_hermitian(effect, tol))
        throw std::invalid_argument("born_probability: effect not Hermitian within tolerance");
    double p = (rho * effect).trace().real();
    if (p < 0.0 || p > 1.0) {
        if (p < -1e-9 || p > 1.0 + 1e-9)
            throw std::domain_error("born_probability: value far outside [0,1]; invalid inputs");
        p = std::clamp(p, 0.0, 1.0);
    }
    return p;
}

bool projectors_commute(const Matrix& p, const Matrix& q, double tol) {
    require_same_dim(p.rows(), q.rows(), "projectors_commute");
    return max_abs(p * q - q * p) < tol;
}

namespace {

// QR with the Haar phase fix (columns scaled so that diag(R) is positive).
Matrix haar_from_gaussian(const Matrix& g) {
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < q.cols(); ++i) {
        const cplx rii = r(i, i);
        if (std::abs(rii) == 0.0) return Matrix();  // degenerate draw
        q.col(i) *= rii / std::abs(rii);
    }
    return q;
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    return g;
}

}  // namespace

Context random_context(int dim, Rng& rng, std::string label) {
    if (dim < 2 || dim > kMaxDim)
        throw std::invalid_argument("random_context: dimension out of range");
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix q = haar_from_gaussian(gaussian_matrix(dim, dim, rng));
        if (q.size() == 0) continue;
        std::vector<PureState> basis;
        for (int i = 0; i < dim; ++i) basis.emplace_back(q.col(i));
        return Context(std::move(basis), std::move(label));
    }
    throw std::runtime_error("random_context: degenerate draws exhausted retry budget");
}

PureState random_pure_state(int dim, Rng& rng) {
    if (dim < 2 || dim > kMaxDim)
        throw std::invalid_argument("random_pure_state: dimension out of range");
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(rng.normal(), rng.normal());
    return PureState(v);
}

Context eigencontext(const Observable& observable, std::string label) {
    if (observable.min_eigenvalue_gap() <= 1e-8)
        throw std::invalid_argument("eigencontext: degenerate spectrum (gap <= 1e-8)");
    std::vector<PureState> basis;
    for (int i = 0; i < observable.dim(); ++i) basis.push_back(observable.eigenvector(i));
    return Context(std::move(basis), std::move(label));
}

Context embedding_context(const PureState& psi, Rng& rng, std::string label) {
    const int d = psi.dim();
    // Gram-Schmidt of random Gaussian vectors against psi.
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Vector> cols{psi.amplitudes()};
        bool ok = true;
        while (static_cast<int>(cols.size()) < d && ok) {
            Vector v = gaussian_matrix(d, 1, rng).col(0);
            for (const auto& c : cols) v -= c.dot(v) * c;
            const double n = v.norm();
            if (n < 1e-8) {
                ok = false;
                break;
            }
            cols.push_back(v / n);
        }
        if (!ok) continue;
        std::vector<PureState> basis;
        for (auto& c : cols) basis.emplace_back(std::move(c));
        return Context(std::move(basis), std::move(label));
    }
    throw std::runtime_error("embedding_context: degenerate draws exhausted retry budget");
}

}  // namespace ontic
