#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ontic {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Global defaults; operations take explicit tolerances where the contract
// depends on them.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kRayTol = 1e-12;
inline constexpr int kMaxDim = 16;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) < tol;
}

inline void require_square(const Matrix& m, const std::string& what) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(what + ": matrix is not square");
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const std::string& what) {
    if (a != b)
        throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
}

inline double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Matrix& m, double tol = kHermitianTol) {
    return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol;
}

inline double real_trace(const Matrix& m) { return m.trace().real(); }

}  // namespace ontic
