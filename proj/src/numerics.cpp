#include "rcsim/numerics.hpp"

#include <cmath>
#include <numbers>

namespace rcsim::numerics {

void require_finite(const Eigen::Ref<const CMatrix>& m, const char* what) {
    if (!m.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entries");
    }
}

namespace {

bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey, decimation in time.
void fft_inplace(CVector& a, bool inverse) {
    const Eigen::Index n = a.size();
    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const Complex wl = std::polar(1.0, ang);
        for (Eigen::Index i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (Eigen::Index j = 0; j < len / 2; ++j) {
                const Complex u = a[i + j];
                const Complex t = a[i + j + len / 2] * w;
                a[i + j] = u + t;
                a[i + j + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

}  // namespace

CVector fft(const CVector& v, Eigen::Index size) {
    if (v.size() != size) {
        throw DimensionError("fft: size does not match vector length");
    }
    if (!is_pow2(size)) {
        throw DimensionError("fft: size must be a power of two");
    }
    require_finite(v, "fft");
    CVector a = v;
    fft_inplace(a, false);
    return a;
}

CVector ifft(const CVector& v, Eigen::Index size) {
    if (v.size() != size) {
        throw DimensionError("ifft: size does not match vector length");
    }
    if (!is_pow2(size)) {
        throw DimensionError("ifft: size must be a power of two");
    }
    require_finite(v, "ifft");
    CVector a = v;
    fft_inplace(a, true);
    a /= static_cast<double>(size);
    return a;
}

Svd svd(const CMatrix& m) {
    if (m.size() == 0) throw InputError("svd: empty matrix");
    require_finite(m, "svd");
    Eigen::JacobiSVD<CMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return Svd{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMatrix pseudo_inverse(const CMatrix& m) {
    const Svd dec = svd(m);
    const double cutoff = 1e-12 * dec.sigma(0);
    Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(dec.sigma.size());
    for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
        if (dec.sigma(i) > cutoff) inv_sigma(i) = 1.0 / dec.sigma(i);
    }
    return dec.v * inv_sigma.asDiagonal() * dec.u.adjoint();
}

CMatrix lmmse_estimate(const CMatrix& observed, const CMatrix& reference,
                       double noise_var) {
    if (observed.cols() != reference.cols()) {
        throw DimensionError("lmmse_estimate: observation count mismatch");
    }
    if (noise_var < 0.0) throw InputError("lmmse_estimate: negative noise variance");
    require_finite(observed, "lmmse_estimate");
    require_finite(reference, "lmmse_estimate");

    const CMatrix gram =
        reference * reference.adjoint() +
        noise_var * CMatrix::Identity(reference.rows(), reference.rows());
    if (noise_var > 0.0) {
        Eigen::LLT<CMatrix> llt(gram);
        if (llt.info() == Eigen::Success) {
            // H = O R^H G^-1  <=>  G^H H^H = R O^H with G Hermitian.
            return llt.solve(reference * observed.adjoint()).adjoint().eval();
        }
    } else {
        Eigen::FullPivLU<CMatrix> lu(gram);
        if (lu.isInvertible()) {
            return observed * reference.adjoint() * lu.inverse();
        }
    }
    return observed * pseudo_inverse(reference);
}

}  // namespace rcsim::numerics
