#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "grr/rings.hpp"

namespace grr {

/// Deterministic random stream: mt19937_64 with hand-rolled uniform and
/// Box-Muller normal transforms.  The standard <random> distributions
/// are implementation-defined, which would break byte-identical output
/// across library versions; these transforms are pinned.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Independent substream: seed and stream id mixed through
    /// splitmix64 so neighboring ids decorrelate.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed * 0x9e3779b97f4a7c15ULL + mix(stream + 1)));
    }

    std::uint64_t bits() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the cosine partner is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double t = 2.0 * M_PI * uniform();
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    Eigen::MatrixXd normal_matrix(int rows, int cols) {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = normal();
        return m;
    }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    /// Haar-distributed special orthogonal matrix: QR of a Gaussian
    /// matrix with the R-diagonal sign fix, then a final column flip
    /// into det = +1.
    Eigen::MatrixXd haar_rotation(int k) {
        Eigen::MatrixXd g = normal_matrix(k, k);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < k; ++j)
            if (r(j, j) < 0) q.col(j) = -q.col(j);
        if (q.determinant() < 0) q.col(k - 1) = -q.col(k - 1);
        return q;
    }

    /// Haar frame: k orthonormal rows in n-space (row space uniform on
    /// the Grassmannian).
    Eigen::MatrixXd haar_frame(int k, int n) {
        Eigen::MatrixXd g = normal_matrix(n, k);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
        return q.transpose();
    }

    /// Complex Gaussian entries (independent real/imaginary parts).
    Eigen::MatrixXcd normal_matrix_c(int rows, int cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal());
        return m;
    }

    /// Haar unitary frame: k orthonormal (Hermitian) rows in C^n.
    Eigen::MatrixXcd haar_frame_c(int k, int n) {
        Eigen::MatrixXcd g = normal_matrix_c(n, k);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
        Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
        return q.adjoint();
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace grr
