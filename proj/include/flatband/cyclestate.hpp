#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace flatband {

using Mat16 = Eigen::Matrix<double, 16, 16>;
using Vec16 = Eigen::Matrix<double, 16, 1>;

// Closed-form scalar: sum of (rational + root2 * sqrt(2)) * alpha^ap * d^dp
// terms. Keeps the table weights exact; no decimal constants involved.
struct FormTerm {
    double rational = 0.0;
    double root2 = 0.0;
    int alpha_pow = 0;
    int d_pow = 0;
};

struct ClosedForm {
    std::vector<FormTerm> terms;
    double eval(double alpha, double d) const;
    bool zero() const { return terms.empty(); }
};

// One eigenstate of the 4-site hard-core ring. Coefficients live on the
// 16 occupation masks of one cycle (bit p = edge position p occupied).
struct RingState {
    int index = 0;
    int n_particles = 0;
    std::array<double, 16> coeffs{};
    double excess_energy = 0.0; // eigenvalue = (excess_energy - 2*n_particles) * t
    ClosedForm weight;          // diagonal similarity weight
    ClosedForm removal;         // 1-norm of the weighted corner-pair annihilation
    ClosedForm addition;        // 1-norm of the weighted corner-pair creation
};

struct CycleStateTable {
    std::array<RingState, 16> entries;
    // entries grouped by particle number, ascending index
    std::array<std::vector<int>, 5> sector_indices;
};

// The fixed eigensystem of one cycle. Built once, immutable.
const CycleStateTable& cycle_table();

// Orthogonal change of basis: column i = coefficients of table state i.
const Mat16& table_basis_matrix();

// Hard-core hopping on one 4-ring with amplitude t, in the occupation basis.
Mat16 one_cycle_hamiltonian(double t);

// Corner k sits at vertex slot k of the cycle and touches edge positions
// (k+3)%4 and k.
std::array<int, 2> corner_positions(int corner);

// Matrix elements of the corner-pair operators in the table eigenbasis:
// removal(j,i) = <j| (b_a + b_b) |i>, addition = removal transposed.
const Mat16& pair_removal_matrix(int corner);
const Mat16& pair_addition_matrix(int corner);

struct PairWeights {
    double removal = 0.0;
    double addition = 0.0;
};

// Weighted 1-norms of the corner-pair operators acting on table state i,
// evaluated numerically from the 16x16 operators; must agree with the stored
// closed forms for every corner and admissible (alpha, d).
PairWeights pair_weights_bruteforce(int state, int corner, double alpha, double d);

struct TableCheck {
    std::array<double, 16> residuals{};       // ||H v - E v||_2 per entry at t = 1
    std::array<double, 16> eigenvalue_dev{};  // distance to the nearest sector eigenvalue
    std::array<bool, 16> ok{};
    double max_residual = 0.0;
    double max_gram_deviation = 0.0; // orthonormality defect
    bool all_ok = false;
};

TableCheck verify_table(double tolerance);
TableCheck verify_table(const CycleStateTable& table, double tolerance);

} // namespace flatband
