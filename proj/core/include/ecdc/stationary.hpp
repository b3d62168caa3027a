#pragma once

#include "ecdc/generator.hpp"

#include <vector>

namespace ecdc {

/// UL-type RG-factorization of a level-structured generator via censoring.
///
/// U[n] is the censored diagonal block Q^{[<=n]}_{n,n}; R[i][j] (i<j) and
/// G[i][j] (i>j) are the rate and path blocks. Empty matrices stand for
/// blocks outside the triangle.
struct RGFactorization {
    std::vector<std::size_t> offsets;
    std::vector<Matrix> U;
    std::vector<std::vector<Matrix>> R;
    std::vector<std::vector<Matrix>> G;

    int levels() const { return static_cast<int>(U.size()); }

    /// Block-assembled R_U, U_D and G_L over the full state space.
    Matrix upper_R() const;
    Matrix diagonal_U() const;
    Matrix lower_G() const;
};

RGFactorization rg_factorize(const GeneratorMatrix& G);

/// max |Q - (I-R_U) U_D (I-G_L)| / max |Q|.
double rg_reconstruction_error(const GeneratorMatrix& G, const RGFactorization& f);

/// Same identity for the uniformized chain P = I + Q/theta:
/// max |(I-P) - (I-R_U)(I-Psi_D)(I-G_L)| / max |I-P|, with Psi_n = I + U_n/theta.
double rg_uniformized_reconstruction_error(const GeneratorMatrix& G, const RGFactorization& f);

/// Stationary vector by the forward recursion pi_k = sum_{i<k} pi_i R_{i,k}.
Vector stationary_rg(const GeneratorMatrix& G);
Vector stationary_rg(const RGFactorization& f);

/// Stationary vector by a pivoted LU solve with the last balance equation
/// replaced by normalization.
Vector stationary_direct(const Matrix& Q);
inline Vector stationary_direct(const GeneratorMatrix& G) { return stationary_direct(G.Q); }

enum class StationaryMethod { direct, rg };

Vector stationary(const GeneratorMatrix& G, StationaryMethod method = StationaryMethod::direct);

/// || pi^T Q ||_inf
double stationary_residual(const Matrix& Q, const Vector& pi);

/// P = I + Q / theta with theta = max_i |Q_ii|.
Matrix uniformized(const Matrix& Q, double* theta = nullptr);

} // namespace ecdc
