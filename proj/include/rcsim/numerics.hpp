#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rcsim/errors.hpp"

namespace rcsim::numerics {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Throws InputError if the operand contains NaN or Inf entries.
void require_finite(const Eigen::Ref<const CMatrix>& m, const char* what);

/// Unnormalized forward DFT of a power-of-two length vector (radix-2).
/// `size` must equal v.size(); anything else is a DimensionError.
CVector fft(const CVector& v, Eigen::Index size);

/// Exact inverse of fft, including the 1/size normalization.
CVector ifft(const CVector& v, Eigen::Index size);

struct Svd {
    CMatrix u;               // orthonormal columns
    Eigen::VectorXd sigma;   // descending, nonnegative
    CMatrix v;               // orthonormal columns; m == u * sigma.asDiagonal() * v^H
};

Svd svd(const CMatrix& m);

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// 1e-12 * sigma_max are truncated.
CMatrix pseudo_inverse(const CMatrix& m);

/// Regularized least-squares fit of H in `observed ~= H * reference`:
///   H = observed * reference^H * (reference * reference^H + noise_var I)^-1.
/// Falls back to observed * pinv(reference) when the regularized Gram matrix
/// is singular (only possible at noise_var == 0 with a rank-deficient
/// reference).
CMatrix lmmse_estimate(const CMatrix& observed, const CMatrix& reference,
                       double noise_var);

}  // namespace rcsim::numerics
