#include "ecdc/stationary.hpp"

#include "ecdc/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace ecdc {

namespace {

// Inverse of -U through an LU solve; rejects ill-posed levels.
Matrix neg_inverse(const Matrix& U, int level) {
    const Matrix A = -U;
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) {
        throw NumericalError("censored block -U_" + std::to_string(level) + " is singular", level);
    }
    const Matrix I = Matrix::Identity(A.rows(), A.cols());
    Matrix X = lu.solve(I);
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff() * X.cwiseAbs().maxCoeff());
    if ((A * X - I).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NumericalError("inverse of -U_" + std::to_string(level) + " fails the residual check", level);
    }
    return X;
}

Matrix blocks_to_dense(const std::vector<std::size_t>& off,
                       const std::vector<std::vector<Matrix>>& B) {
    const auto n = static_cast<Eigen::Index>(off.back());
    Matrix M = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < B.size(); ++i) {
        for (std::size_t j = 0; j < B[i].size(); ++j) {
            if (B[i][j].size() == 0) continue;
            M.block(off[i], off[j], B[i][j].rows(), B[i][j].cols()) = B[i][j];
        }
    }
    return M;
}

} // namespace

RGFactorization rg_factorize(const GeneratorMatrix& Gm) {
    const auto& off = Gm.space.level_offsets();
    const int N = Gm.space.num_levels();
    // Working copy of the blocks, censored in place from the top level down.
    std::vector<std::vector<Matrix>> C(N, std::vector<Matrix>(N));
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) C[i][j] = Gm.block(i, j);
    }

    RGFactorization f;
    f.offsets = off;
    f.U.resize(N);
    f.R.assign(N, std::vector<Matrix>(N));
    f.G.assign(N, std::vector<Matrix>(N));

    for (int n = N - 1; n >= 1; --n) {
        f.U[n] = C[n][n];
        const Matrix inv = neg_inverse(C[n][n], n);
        for (int i = 0; i < n; ++i) f.R[i][n] = C[i][n] * inv;
        for (int j = 0; j < n; ++j) f.G[n][j] = inv * C[n][j];
        for (int i = 0; i < n; ++i) {
            if (C[i][n].isZero(0.0)) continue;
            for (int j = 0; j < n; ++j) C[i][j] += f.R[i][n] * C[n][j];
        }
    }
    f.U[0] = C[0][0];
    return f;
}

Matrix RGFactorization::upper_R() const { return blocks_to_dense(offsets, R); }
Matrix RGFactorization::lower_G() const { return blocks_to_dense(offsets, G); }

Matrix RGFactorization::diagonal_U() const {
    std::vector<std::vector<Matrix>> D(U.size(), std::vector<Matrix>(U.size()));
    for (std::size_t n = 0; n < U.size(); ++n) D[n][n] = U[n];
    return blocks_to_dense(offsets, D);
}

double rg_reconstruction_error(const GeneratorMatrix& G, const RGFactorization& f) {
    const auto n = G.Q.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix rebuilt = (I - f.upper_R()) * f.diagonal_U() * (I - f.lower_G());
    return (G.Q - rebuilt).cwiseAbs().maxCoeff() / G.Q.cwiseAbs().maxCoeff();
}

double rg_uniformized_reconstruction_error(const GeneratorMatrix& G, const RGFactorization& f) {
    const auto n = G.Q.rows();
    const Matrix I = Matrix::Identity(n, n);
    double theta = 0.0;
    const Matrix P = uniformized(G.Q, &theta);
    const Matrix Psi = I + f.diagonal_U() / theta;
    const Matrix lhs = I - P;
    const Matrix rebuilt = (I - f.upper_R()) * (I - Psi) * (I - f.lower_G());
    return (lhs - rebuilt).cwiseAbs().maxCoeff() / lhs.cwiseAbs().maxCoeff();
}

Vector stationary_rg(const RGFactorization& f) {
    const int N = f.levels();
    // x0: stationary vector of the censored level-0 generator U_0.
    const Vector x0 = stationary_direct(f.U[0]);
    std::vector<RowVector> pik(N);
    pik[0] = x0.transpose();
    for (int k = 1; k < N; ++k) {
        pik[k] = RowVector::Zero(f.U[k].rows());
        for (int i = 0; i < k; ++i) pik[k] += pik[i] * f.R[i][k];
    }
    Vector pi(static_cast<Eigen::Index>(f.offsets.back()));
    for (int k = 0; k < N; ++k) pi.segment(f.offsets[k], pik[k].size()) = pik[k].transpose();
    const double total = pi.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericalError("RG recursion produced a non-normalizable vector");
    }
    return pi / total;
}

Vector stationary_rg(const GeneratorMatrix& G) { return stationary_rg(rg_factorize(G)); }

Vector stationary_direct(const Matrix& Q) {
    const auto n = Q.rows();
    Matrix A = Q.transpose();
    A.row(n - 1).setOnes();
    Vector b = Vector::Zero(n);
    b(n - 1) = 1.0;
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) {
        throw NumericalError("stationary system is singular (more than one closed class)");
    }
    Vector pi = lu.solve(b);
    // Round-off can leave tiny negative entries on states with zero mass.
    for (Eigen::Index i = 0; i < n; ++i) {
        if (pi(i) < 0.0 && pi(i) > -1e-13) pi(i) = 0.0;
    }
    return pi / pi.sum();
}

Vector stationary(const GeneratorMatrix& G, StationaryMethod method) {
    return method == StationaryMethod::rg ? stationary_rg(G) : stationary_direct(G.Q);
}

double stationary_residual(const Matrix& Q, const Vector& pi) {
    return (pi.transpose() * Q).cwiseAbs().maxCoeff();
}

Matrix uniformized(const Matrix& Q, double* theta) {
    const double t = Q.diagonal().cwiseAbs().maxCoeff();
    if (theta) *theta = t;
    return Matrix::Identity(Q.rows(), Q.cols()) + Q / t;
}

} // namespace ecdc
