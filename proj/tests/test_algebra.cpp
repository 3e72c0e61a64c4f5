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

#include <gtest/gtest.h>

#include <random>

#include "geophase/algebra.hpp"

using namespace geophase;

namespace {

ComplexMatrix taylor_exp(const ComplexMatrix &a, int terms = 30) {
    ComplexMatrix sum = ComplexMatrix::Identity(a.rows(), a.cols());
    ComplexMatrix term = sum;
    for (int k = 1; k < terms; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        sum += term;
    }
    return sum;
}

ComplexMatrix op(std::size_t dim, std::size_t r, std::size_t s, Axis a) { return single_transition_op(dim, SubspacePair(r, s, dim), a); }

ComplexMatrix random_matrix(std::mt19937 &rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m * (scale / m.cwiseAbs().rowwise().sum().maxCoeff());
}

}  // namespace

TEST(SubspacePair, RejectsBadIndices) {
    EXPECT_THROW(SubspacePair(2, 1, 4), InputError);
    EXPECT_THROW(SubspacePair(1, 1, 4), InputError);
    EXPECT_THROW(SubspacePair(1, 4, 4), InputError);
    EXPECT_EQ(SubspacePair(1, 2, 4).str(), "(2,3)");
}

TEST(SingleTransitionOp, MatchesElementDefinition) {
    const std::size_t dim = 4;
    const ComplexMatrix x = op(dim, 1, 2, Axis::X);
    const ComplexMatrix y = op(dim, 1, 2, Axis::Y);
    const ComplexMatrix z = op(dim, 1, 2, Axis::Z);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d_ir_js = (i == 1 && j == 2), d_is_jr = (i == 2 && j == 1);
            const double d_rr = (i == 1 && j == 1), d_ss = (i == 2 && j == 2);
            EXPECT_EQ(x(i, j), Complex(0.5 * (d_ir_js + d_is_jr), 0.0));
            EXPECT_EQ(y(i, j), Complex(0.0, 0.5 * (-d_ir_js + d_is_jr)));
            EXPECT_EQ(z(i, j), Complex(0.5 * (d_rr - d_ss), 0.0));
        }
    }
    EXPECT_EQ(z.trace(), Complex(0.0, 0.0));
}

TEST(SingleTransitionOp, OrderSwapSymmetries) {
    for (std::size_t dim = 3; dim <= 6; ++dim)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t s = r + 1; s < dim; ++s) {
                EXPECT_EQ(single_transition_op_ordered(dim, s, r, Axis::X), single_transition_op_ordered(dim, r, s, Axis::X));
                EXPECT_EQ(single_transition_op_ordered(dim, s, r, Axis::Y), -single_transition_op_ordered(dim, r, s, Axis::Y));
                EXPECT_EQ(single_transition_op_ordered(dim, s, r, Axis::Z), -single_transition_op_ordered(dim, r, s, Axis::Z));
            }
}

TEST(SingleTransitionOp, RejectsMismatchedDimension) {
    EXPECT_THROW(single_transition_op(5, SubspacePair(0, 1, 4), Axis::X), InputError);
}

TEST(Commutator, CyclicAlgebraWithinOnePair) {
    for (std::size_t dim = 2; dim <= 8; ++dim)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t s = r + 1; s < dim; ++s) {
                const auto x = op(dim, r, s, Axis::X), y = op(dim, r, s, Axis::Y), z = op(dim, r, s, Axis::Z);
                EXPECT_LE(max_abs(commutator(x, y) - kI * z), 1e-15);
                EXPECT_LE(max_abs(commutator(y, z) - kI * x), 1e-15);
                EXPECT_LE(max_abs(commutator(z, x) - kI * y), 1e-15);
            }
}

TEST(Commutator, ConnectedTransitionsExhaustive) {
    for (std::size_t dim = 3; dim <= 16; ++dim)
        for (std::size_t t = 0; t < dim; ++t)
            for (std::size_t r = t + 1; r < dim; ++r)
                for (std::size_t s = r + 1; s < dim; ++s) {
                    const auto xtr = op(dim, t, r, Axis::X), ytr = op(dim, t, r, Axis::Y), xts = op(dim, t, s, Axis::X);
                    ASSERT_LE(max_abs(commutator(xtr, xts) - 0.5 * kI * op(dim, r, s, Axis::Y)), 1e-12) << dim << t << r << s;
                    ASSERT_LE(max_abs(commutator(ytr, xts) - 0.5 * kI * op(dim, r, s, Axis::X)), 1e-12) << dim << t << r << s;
                }
}

TEST(Commutator, SelfCommutatorVanishesAndDimsChecked) {
    std::mt19937 rng(3);
    const ComplexMatrix a = random_matrix(rng, 5, 2.0);
    EXPECT_EQ(max_abs(commutator(a, a)), 0.0);
    EXPECT_THROW(commutator(ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(4, 4)), InputError);
}

TEST(MatExp, ZeroIsIdentity) { EXPECT_EQ(mat_exp(ComplexMatrix::Zero(4, 4)), ComplexMatrix::Identity(4, 4)); }

TEST(MatExp, AgreesWithTaylorSeries) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(rng, 1 + trial % 8, 1.0);
        EXPECT_LE(max_abs(mat_exp(a) - taylor_exp(a)), 1e-10);
        const ComplexMatrix h = 0.5 * (a + a.adjoint());
        EXPECT_LE(max_abs(mat_exp(h) - taylor_exp(h)), 1e-10);
        const ComplexMatrix k = -kI * h;
        EXPECT_LE(max_abs(mat_exp(k) - taylor_exp(k)), 1e-10);
    }
}

TEST(MatExp, SkewHermitianGivesUnitary) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(rng, 6, 30.0);
        const ComplexMatrix h = 0.5 * (a + a.adjoint());
        const ComplexMatrix u = mat_exp(-kI * h);
        EXPECT_TRUE(is_unitary(u, 1e-10));
        Eigen::ComplexEigenSolver<ComplexMatrix> eig(u);
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) EXPECT_NEAR(std::abs(eig.eigenvalues()(i)), 1.0, 1e-10);
    }
}

TEST(MatExp, RejectsNonFinite) {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(mat_exp(a), InputError);
}

TEST(MatExp, RotationConvention) {
    const std::size_t dim = 4;
    const SubspacePair p(1, 2, dim);
    const double theta = 0.7;
    const ComplexMatrix u = mat_exp(-kI * theta * single_transition_op(dim, p, Axis::Y));
    const ComplexMatrix rotated = u * single_transition_op(dim, p, Axis::Z) * u.adjoint();
    const ComplexMatrix expected =
        std::cos(theta) * single_transition_op(dim, p, Axis::Z) + std::sin(theta) * single_transition_op(dim, p, Axis::X);
    EXPECT_LE(max_abs(rotated - expected), 1e-14);
    // and the same generator rotates x towards -z
    const ComplexMatrix rx = u * single_transition_op(dim, p, Axis::X) * u.adjoint();
    EXPECT_LE(max_abs(rx - (std::cos(theta) * single_transition_op(dim, p, Axis::X) -
                            std::sin(theta) * single_transition_op(dim, p, Axis::Z))),
              1e-14);
}

TEST(SubspaceRotation, ClosedFormMatchesExponential) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 3 + trial % 6;
        const SubspacePair p(trial % 2, dim - 1, dim);
        const double theta = ang(rng), phase = ang(rng);
        const ComplexMatrix g = std::cos(phase) * single_transition_op(dim, p, Axis::X) + std::sin(phase) * single_transition_op(dim, p, Axis::Y);
        const ComplexMatrix u = subspace_rotation(dim, p, theta, phase);
        EXPECT_TRUE(is_unitary(u, 1e-10));
        EXPECT_LE(max_abs(u - taylor_exp(-kI * theta * g, 80)), 1e-9);
    }
    EXPECT_EQ(subspace_rotation(4, SubspacePair(0, 3, 4), 0.0, 1.3), ComplexMatrix::Identity(4, 4));
}

TEST(SubspaceRotation, ConnectedTransitionHalfAngle) {
    const std::size_t dim = 4;
    const double theta = 1.1;
    const ComplexMatrix u = subspace_rotation(dim, SubspacePair(1, 2, dim), theta, kPi / 2.0);
    const ComplexMatrix out = u * op(dim, 0, 1, Axis::X) * u.adjoint();
    const ComplexMatrix expected = std::cos(theta / 2.0) * op(dim, 0, 1, Axis::X) + std::sin(theta / 2.0) * op(dim, 0, 2, Axis::X);
    EXPECT_LE(max_abs(out - expected), 1e-14);
}

TEST(SubspaceRotation, PulsePairIsPhaseGate) {
    const std::size_t dim = 4;
    const SubspacePair p(1, 2, dim);
    for (double phi : {0.3, kPi / 2.0, kPi, 3.0 * kPi / 2.0, kTwoPi}) {
        const ComplexMatrix u = subspace_rotation(dim, p, kPi, kPi / 2.0 + kPi - phi) * subspace_rotation(dim, p, kPi, kPi / 2.0);
        ComplexMatrix d = ComplexMatrix::Identity(dim, dim);
        d(1, 1) = std::exp(Complex(0.0, phi));
        d(2, 2) = std::exp(Complex(0.0, -phi));
        EXPECT_TRUE(equal_up_to_global_phase(u, d, 1e-12)) << phi;
    }
}

TEST(SubspaceRotation, PulsePairCoherenceMap) {
    const std::size_t dim = 4;
    const SubspacePair p(1, 2, dim);
    const double phi = 0.4;
    const ComplexMatrix first = subspace_rotation(dim, p, kPi, kPi / 2.0);
    const ComplexMatrix u = subspace_rotation(dim, p, kPi, kPi / 2.0 + kPi - phi) * first;
    auto conj = [](const ComplexMatrix &v, const ComplexMatrix &a) { return ComplexMatrix(v * a * v.adjoint()); };
    EXPECT_LE(max_abs(conj(first, op(dim, 0, 1, Axis::X)) - op(dim, 0, 2, Axis::X)), 1e-14);
    EXPECT_LE(max_abs(conj(first, op(dim, 2, 3, Axis::X)) + op(dim, 1, 3, Axis::X)), 1e-14);
    EXPECT_LE(max_abs(conj(u, op(dim, 1, 2, Axis::X)) -
                      (std::cos(2 * phi) * op(dim, 1, 2, Axis::X) - std::sin(2 * phi) * op(dim, 1, 2, Axis::Y))),
              1e-14);
    EXPECT_LE(max_abs(conj(u, op(dim, 0, 1, Axis::X)) - (std::cos(phi) * op(dim, 0, 1, Axis::X) + std::sin(phi) * op(dim, 0, 1, Axis::Y))),
              1e-14);
    EXPECT_LE(max_abs(conj(u, op(dim, 2, 3, Axis::X)) - (std::cos(phi) * op(dim, 2, 3, Axis::X) + std::sin(phi) * op(dim, 2, 3, Axis::Y))),
              1e-14);
}

TEST(GlobalPhase, Equivalence) {
    std::mt19937 rng(23);
    const ComplexMatrix b = random_matrix(rng, 4, 3.0);
    EXPECT_TRUE(equal_up_to_global_phase(std::exp(Complex(0.0, kPi / 6.0)) * b, b, 1e-12));
    EXPECT_TRUE(equal_up_to_global_phase(-b, b, 1e-12));
    ComplexMatrix d1 = ComplexMatrix::Identity(2, 2), d2 = d1;
    d2(1, 1) = -1.0;
    EXPECT_FALSE(equal_up_to_global_phase(d1, d2, 1e-6));
    EXPECT_THROW(equal_up_to_global_phase(d1, ComplexMatrix::Zero(2, 2), 1e-6), InputError);
}

TEST(WrapPhase, Range) {
    EXPECT_DOUBLE_EQ(wrap_phase(kPi), kPi);
    EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-15);
    EXPECT_NEAR(wrap_phase(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_NEAR(wrap_phase(0.25 + 6 * kPi), 0.25, 1e-12);
}
