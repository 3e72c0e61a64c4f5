// Copyright 2026 The geophase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex matrix kernel and the single-transition (fictitious spin-1/2)
// operator algebra. Level indices are 0-based everywhere in code; user-facing
// text adds one.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "geophase/errors.hpp"

namespace geophase {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

enum class Axis { X, Y, Z };

/// An ordered pair of levels (r, s) with r < s, spanning a fictitious spin-1/2.
class SubspacePair {
   public:
    SubspacePair(std::size_t r, std::size_t s, std::size_t dim) : r_(r), s_(s), dim_(dim) {
        if (!(r < s) || s >= dim) {
            throw InputError("invalid level pair (" + std::to_string(r + 1) + "," + std::to_string(s + 1) +
                             ") in dimension " + std::to_string(dim));
        }
    }
    std::size_t r() const noexcept { return r_; }
    std::size_t s() const noexcept { return s_; }
    std::size_t dim() const noexcept { return dim_; }
    /// 1-based "(r,s)" for reports.
    std::string str() const { return "(" + std::to_string(r_ + 1) + "," + std::to_string(s_ + 1) + ")"; }
    bool operator==(const SubspacePair &) const = default;

   private:
    std::size_t r_;
    std::size_t s_;
    std::size_t dim_;
};

inline double max_abs(const ComplexMatrix &a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const ComplexMatrix &a, double tol = 1e-12) {
    return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

inline bool is_unitary(const ComplexMatrix &u, double tol = 1e-10) {
    return u.rows() == u.cols() && max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

/// I_axis^(r,s): x has 1/2 at (r,s),(s,r); y has -i/2 at (r,s), +i/2 at (s,r); z is diag(+1/2, -1/2) on r, s.
inline ComplexMatrix single_transition_op(std::size_t dim, const SubspacePair &pair, Axis axis) {
    if (pair.dim() != dim) throw InputError("pair dimension does not match operator dimension");
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    const auto r = pair.r(), s = pair.s();
    switch (axis) {
        case Axis::X:
            op(r, s) = 0.5;
            op(s, r) = 0.5;
            break;
        case Axis::Y:
            op(r, s) = Complex(0.0, -0.5);
            op(s, r) = Complex(0.0, 0.5);
            break;
        case Axis::Z:
            op(r, r) = 0.5;
            op(s, s) = -0.5;
            break;
    }
    return op;
}

/// Same operator with the level order given explicitly, so that I^(s,r) can be formed.
/// Swapping the order flips the sign of the y and z operators.
inline ComplexMatrix single_transition_op_ordered(std::size_t dim, std::size_t first, std::size_t second, Axis axis) {
    if (first == second) throw InputError("single-transition operator needs two distinct levels");
    const bool swapped = first > second;
    ComplexMatrix op = single_transition_op(dim, SubspacePair(std::min(first, second), std::max(first, second), dim), axis);
    if (swapped && axis != Axis::X) op = -op;
    return op;
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw InputError("commutator of matrices with mismatched dimensions");
    }
    return a * b - b * a;
}

namespace detail {

inline void require_finite(const ComplexMatrix &a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex z = a.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError("matrix has non-finite entries");
    }
}

// exp(A) by scaling and squaring around a degree-18 Taylor polynomial.
inline ComplexMatrix exp_scaling_squaring(const ComplexMatrix &a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const ComplexMatrix scaled = a / std::ldexp(1.0, squarings);
    const auto n = a.rows();
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    ComplexMatrix sum = term;
    for (int k = 1; k <= 18; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

}  // namespace detail

/// exp(-i t G) for Hermitian G, by eigen-decomposition.
inline ComplexMatrix exp_hermitian(const ComplexMatrix &generator, double t) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(generator);
    if (eig.info() != Eigen::Success) throw InputError("eigen-decomposition failed");
    const Eigen::VectorXd &lambda = eig.eigenvalues();
    ComplexVector phases(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) phases(i) = std::exp(Complex(0.0, -t * lambda(i)));
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Matrix exponential. Hermitian and skew-Hermitian inputs go through an
/// eigen-decomposition; anything else through scaling and squaring.
inline ComplexMatrix mat_exp(const ComplexMatrix &a) {
    if (a.rows() != a.cols()) throw InputError("mat_exp needs a square matrix");
    detail::require_finite(a);
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a + a.adjoint()) <= 1e-14 * scale) {
        // A = -i G with G = iA Hermitian.
        const ComplexMatrix g = kI * a;
        return exp_hermitian(0.5 * (g + g.adjoint()), 1.0);
    }
    if (max_abs(a - a.adjoint()) <= 1e-14 * scale) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (a + a.adjoint()));
        const Eigen::VectorXd ev = eig.eigenvalues().array().exp();
        return eig.eigenvectors() * ev.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    }
    return detail::exp_scaling_squaring(a);
}

/// exp(-i theta (cos(phase) I_x + sin(phase) I_y)) on the given pair; identity elsewhere.
/// Closed form of the two-level rotation, embedded in the full space.
inline ComplexMatrix subspace_rotation(std::size_t dim, const SubspacePair &pair, double angle, double phase) {
    if (pair.dim() != dim) throw InputError("pair dimension does not match rotation dimension");
    if (!std::isfinite(angle) || !std::isfinite(phase)) throw InputError("rotation angle and phase must be finite");
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const auto r = pair.r(), q = pair.s();
    u(r, r) = c;
    u(q, q) = c;
    u(r, q) = -kI * s * std::exp(Complex(0.0, -phase));
    u(q, r) = -kI * s * std::exp(Complex(0.0, phase));
    return u;
}

/// True iff |A - cB|_max <= tol for the unit complex c fixed by the
/// largest-magnitude entry of B (ties: lowest row, then column).
inline bool equal_up_to_global_phase(const ComplexMatrix &a, const ComplexMatrix &b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("global-phase comparison of mismatched dimensions");
    Eigen::Index best_row = 0, best_col = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            if (std::abs(b(i, j)) > best) {
                best = std::abs(b(i, j));
                best_row = i;
                best_col = j;
            }
        }
    }
    if (best <= 0.0) throw InputError("global-phase reference matrix is all zero");
    const Complex ratio = a(best_row, best_col) / b(best_row, best_col);
    const Complex c = std::abs(ratio) > 0.0 ? ratio / std::abs(ratio) : Complex(1.0, 0.0);
    return max_abs(a - c * b) <= tol;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_phase(double x) {
    double y = std::remainder(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    return y;
}

}  // namespace geophase
