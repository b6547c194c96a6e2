#pragma once

#include "flatband/lattice.hpp"

#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

namespace flatband {

enum class Exec { serial, parallel };

// Fixed-N hard-core occupation basis: sorted bitmasks, bit s = site s occupied.
struct FockBasis {
    int n_sites = 0;
    int n_particles = 0;
    std::vector<std::uint64_t> states;

    std::size_t size() const { return states.size(); }
    // index of a mask, or -1 if absent
    std::ptrdiff_t rank(std::uint64_t mask) const;
};

FockBasis enumerate_basis(int n_sites, int n_particles);

std::uint64_t binomial(int n, int k);

// Product basis over cycles: 4 bits per cycle hold the table state index.
// Total particle number of each assignment equals n_particles.
struct CycleBasis {
    int n_cycles = 0;
    int n_particles = 0;
    std::vector<std::uint64_t> states;

    std::size_t size() const { return states.size(); }
    std::ptrdiff_t rank(std::uint64_t code) const;
    static int state_of(std::uint64_t code, int cycle) { return (code >> (4 * cycle)) & 0xF; }
    static std::uint64_t with_state(std::uint64_t code, int cycle, int value) {
        return (code & ~(std::uint64_t{0xF} << (4 * cycle))) |
               (std::uint64_t(value) << (4 * cycle));
    }
};

CycleBasis enumerate_cycle_basis(int n_cycles, int n_particles);

enum class BasisKind { site, cycle_product };

// Symmetric sparse operator in CSR layout, both triangles stored.
struct SparseHamiltonian {
    std::size_t dim = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
    BasisKind basis = BasisKind::site;
    double t = 0.0;
    double tp = 0.0;

    std::size_t nnz() const { return vals.size(); }
    double diagonal(std::size_t row) const;
    double entry(std::size_t row, std::size_t col) const;
    double inf_norm() const;
};

struct AssemblyOptions {
    Exec exec = Exec::parallel;
    std::size_t max_nnz = 50'000'000;
};

// Hopping matrix in the site basis. Entries are t or tp exactly; matrix is
// exactly symmetric. Amplitudes outside 0 <= tp <= t only warn via return
// diagnostics at the CLI level, not here.
SparseHamiltonian assemble_site_hamiltonian(const LineGraphModel& model, const FockBasis& basis,
                                            double t, double tp, AssemblyOptions opts = {});

// Same operator written in the cycle-product eigenbasis, assembled directly
// from the one-cycle table: diagonal from per-cycle energies, off-diagonal
// from corner-pair matrix elements.
SparseHamiltonian assemble_cycle_hamiltonian(const LineGraphModel& model, const CycleBasis& basis,
                                             double t, double tp, AssemblyOptions opts = {});

// Orthogonal map from cycle-product coordinates to site coordinates
// (site_dim x cycle_dim). Intended as a cross-check on small instances.
Eigen::SparseMatrix<double> basis_transform(const LineGraphModel& model, int n_particles);

// Indices (by hosting cycle) of the uncoupled-system ground states at
// n_particles = n_cycles + 1: one bound pair on the hosting cycle, the
// single-particle ground state everywhere else.
std::vector<std::size_t> uncoupled_ground_states(const LineGraphModel& model,
                                                 const CycleBasis& basis);

// y = H x. Row-parallel; output is identical in serial and parallel mode.
void matvec(const SparseHamiltonian& h, const double* x, double* y, Exec exec = Exec::parallel);
std::vector<double> matvec(const SparseHamiltonian& h, const std::vector<double>& x,
                           Exec exec = Exec::parallel);

// Dense column-major copy (dim*dim), for LAPACK and small-instance checks.
std::vector<double> to_dense(const SparseHamiltonian& h);

} // namespace flatband
