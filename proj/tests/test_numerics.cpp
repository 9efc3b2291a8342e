#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rcsim/numerics.hpp"

using namespace rcsim;
using numerics::CMatrix;
using numerics::Complex;
using numerics::CVector;

namespace {

CVector random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
    return v;
}

CMatrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    }
    return m;
}

// Quadratic-time reference DFT, the independent oracle for the fft kernel.
CVector dft_oracle(const CVector& v, bool inverse) {
    const Eigen::Index n = v.size();
    CVector out = CVector::Zero(n);
    const double sign = inverse ? 2.0 : -2.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index t = 0; t < n; ++t) {
            out(k) += v(t) * std::polar(1.0, sign * std::numbers::pi * k * t / n);
        }
    }
    if (inverse) out /= static_cast<double>(n);
    return out;
}

}  // namespace

TEST_CASE("fft of a delta impulse is flat") {
    CVector v = CVector::Zero(4);
    v(0) = 1.0;
    const CVector f = numerics::fft(v, 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(f(i) - Complex(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("fft of a constant is DC only") {
    CVector v = CVector::Ones(4);
    const CVector f = numerics::fft(v, 4);
    CHECK(std::abs(f(0) - Complex(4.0, 0.0)) < 1e-12);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(f(i)) < 1e-12);
}

TEST_CASE("fft round trip and direct DFT agreement") {
    const CVector v = random_vector(64, 7);
    const CVector round = numerics::ifft(numerics::fft(v, 64), 64);
    CHECK((round - v).cwiseAbs().maxCoeff() < 1e-9);

    const CVector f = numerics::fft(v, 64);
    const CVector ref = dft_oracle(v, false);
    CHECK((f - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fft round trip across power-of-two sizes") {
    for (Eigen::Index n : {2, 8, 64, 512, 4096}) {
        const CVector v = random_vector(n, 100 + n);
        const CVector round = numerics::ifft(numerics::fft(v, n), n);
        CHECK((round - v).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("Parseval identity") {
    for (int trial = 0; trial < 5; ++trial) {
        const CVector v = random_vector(256, 40 + trial);
        const CVector f = numerics::fft(v, 256);
        const double lhs = v.squaredNorm();
        const double rhs = f.squaredNorm() / 256.0;
        CHECK(std::abs(lhs - rhs) / lhs < 1e-9);
    }
}

TEST_CASE("fft rejects bad sizes and non-finite input") {
    CVector v = CVector::Ones(6);
    CHECK_THROWS_AS(numerics::fft(v, 8), DimensionError);
    CHECK_THROWS_AS(numerics::fft(v, 6), DimensionError);  // not a power of two
    CVector bad = CVector::Ones(4);
    bad(2) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(numerics::fft(bad, 4), InputError);
}

TEST_CASE("svd of identity and diagonal matrices") {
    const auto id = numerics::svd(CMatrix::Identity(4, 4));
    for (int i = 0; i < 4; ++i) CHECK(id.sigma(i) == doctest::Approx(1.0));

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const auto dec = numerics::svd(d);
    CHECK(dec.sigma(0) == doctest::Approx(3.0));
    CHECK(dec.sigma(1) == doctest::Approx(1.0));
}

TEST_CASE("svd reconstruction and unitarity on random matrices") {
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = random_matrix(4, 4, 500 + trial);
        const auto dec = numerics::svd(m);
        const CMatrix rec =
            dec.u * dec.sigma.cast<Complex>().asDiagonal() * dec.v.adjoint();
        CHECK((rec - m).norm() / m.norm() < 1e-9);
        CHECK((dec.u.adjoint() * dec.u - CMatrix::Identity(4, 4)).norm() < 1e-9);
        CHECK((dec.v.adjoint() * dec.v - CMatrix::Identity(4, 4)).norm() < 1e-9);
        for (int i = 1; i < dec.sigma.size(); ++i) {
            CHECK(dec.sigma(i - 1) >= dec.sigma(i));
        }
    }
}

TEST_CASE("svd rejects empty and non-finite input") {
    CHECK_THROWS_AS(numerics::svd(CMatrix()), InputError);
    CMatrix bad = CMatrix::Ones(2, 2);
    bad(0, 1) = Complex(0.0, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(numerics::svd(bad), InputError);
}

TEST_CASE("pseudo-inverse basics") {
    const CMatrix id = CMatrix::Identity(3, 3);
    CHECK((numerics::pseudo_inverse(id) - id).norm() < 1e-12);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;  // zero singular value gets truncated
    const CMatrix pinv = numerics::pseudo_inverse(d);
    CHECK((pinv - d).norm() < 1e-12);
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose conditions") {
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix z = random_matrix(4, 20, 900 + trial);
        const CMatrix p = numerics::pseudo_inverse(z);
        CHECK((z * p * z - z).norm() / z.norm() < 1e-8);
        CHECK((p * z * p - p).norm() / p.norm() < 1e-8);
        CHECK(((z * p).adjoint() - z * p).norm() / (z * p).norm() < 1e-8);
        CHECK(((p * z).adjoint() - p * z).norm() / (p * z).norm() < 1e-8);
    }
}

TEST_CASE("pseudo-inverse is an involution for full-rank matrices") {
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix m = random_matrix(3, 5, 1200 + trial);
        const CMatrix back = numerics::pseudo_inverse(numerics::pseudo_inverse(m));
        CHECK((back - m).norm() / m.norm() < 1e-7);
    }
}

TEST_CASE("lmmse estimate: consistency, shrinkage and the closed form") {
    // Noise-free with orthogonal reference rows recovers H exactly.
    CMatrix ref = CMatrix::Zero(2, 4);
    ref(0, 0) = ref(1, 1) = Complex(1.0, 0.0);
    ref(0, 2) = Complex(0.0, 1.0);
    ref(1, 3) = Complex(-1.0, 0.0);
    const CMatrix h = random_matrix(2, 2, 31);
    const CMatrix est = numerics::lmmse_estimate(h * ref, ref, 0.0);
    CHECK((est - h).norm() < 1e-9);

    // Strong regularization shrinks the estimate to zero.
    const CMatrix tiny = numerics::lmmse_estimate(h * ref, ref, 1e12);
    CHECK(tiny.cwiseAbs().maxCoeff() < 1e-6);

    // Independently coded closed form on a random instance.
    const CMatrix obs = random_matrix(2, 8, 32);
    const CMatrix r = random_matrix(2, 8, 33);
    const double nv = 0.1;
    const CMatrix expected =
        obs * r.adjoint() *
        (r * r.adjoint() + nv * CMatrix::Identity(2, 2)).inverse();
    const CMatrix got = numerics::lmmse_estimate(obs, r, nv);
    CHECK((got - expected).norm() < 1e-10);
}

TEST_CASE("lmmse estimate falls back to the pseudo-inverse at sigma2 = 0") {
    // Rank-deficient reference: the second pilot row is all zero, so the
    // unregularized Gram matrix is singular.
    CMatrix ref = CMatrix::Zero(2, 2);
    ref(0, 0) = ref(0, 1) = Complex(1.0, 0.0);
    CMatrix obs = CMatrix::Zero(2, 2);
    obs(0, 0) = obs(0, 1) = Complex(2.0, 0.0);
    const CMatrix est = numerics::lmmse_estimate(obs, ref, 0.0);
    const CMatrix expected = obs * numerics::pseudo_inverse(ref);
    CHECK((est - expected).norm() < 1e-9);
    CHECK(std::abs(est(0, 0) - Complex(2.0, 0.0)) < 1e-9);
}
