#pragma once

#include "flatband/bounds.hpp"
#include "flatband/cyclestate.hpp"
#include "flatband/eigensolve.hpp"
#include "flatband/fock.hpp"
#include "flatband/lattice.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flatband {

// Exact singular-value constant of the ground-to-excited coupling block:
// sqrt((2 - sqrt(2))/2) per shared corner. Strictly below constants().b, so
// every bound written in terms of b stays valid.
double pair_coupling_constant();

struct ScalarBlockCheck {
    double expected = 0.0; // -(2(N-2) + 2 sqrt(2)) t
    double max_diag_dev = 0.0;
    double max_offdiag = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// The ground block of the two-block split must be an exact multiple of the
// identity.
ScalarBlockCheck ground_block_check(const LineGraphModel& model, double t, double tp,
                                    Exec exec = Exec::parallel);

struct CouplingBlockCheck {
    std::vector<double> per_state;       // per hosting cycle: norm of the coupled column
    std::vector<double> predicted;       // pair_coupling_constant * sqrt(c(C)) * tp
    std::vector<double> singular_values; // ascending
    double max_deviation = 0.0;
    double max_gram_offdiag = 0.0; // eigenvector property of the block product
    double tolerance = 0.0;
    bool pass = false;
};

CouplingBlockCheck coupling_block_check(const LineGraphModel& model, double t, double tp,
                                        Exec exec = Exec::parallel);

// Pairwise margin matrix of the weighted diagonal-dominance estimate:
// M(i,j) = (e_i + e_j) t / c - (mu_i nu_j + mu_j nu_i) tp, from the table
// closed forms at (alpha, d).
Mat16 coupling_margin_matrix(double tp, double t, int c, double alpha, double d);

// Per-row dominance margins |H_kk - lambda| - sum_i |H_ik| s_k / s_i over the
// excited block, for the requested rows.
std::vector<double> dominance_margins(const SparseHamiltonian& cycle_h, const CycleBasis& basis,
                                      const std::vector<std::size_t>& ground_idx,
                                      const std::vector<std::size_t>& rows, double lambda,
                                      double alpha, double d);

struct DominanceOptions {
    std::size_t sample = 0; // 0 = exhaustive
    std::uint64_t seed = 7;
    Exec exec = Exec::parallel;
};

struct DominanceReport {
    double min_margin = 0.0;
    double rhs = 0.0; // (-2N + 2 e5) t - lambda - a c^2 tp^2 / t
    std::size_t argmin_state = 0;
    std::size_t n_checked = 0;
    bool exhaustive = true;
    std::uint64_t seed = 0;
    bool pass = false;
};

DominanceReport dominance_check(const LineGraphModel& model, int n_particles, double t, double tp,
                                double lambda_probe, DominanceOptions opts = {});

struct ReflectionReport {
    double max_commutator = 0.0; // must be exactly zero
    // signature of the product ground state hosted on cycle C under the
    // reflection at cycle C2: +1 iff C == C2
    std::vector<std::vector<int>> signatures;
    bool signatures_ok = false;
    bool pass = false;
};

ReflectionReport reflection_suite(const LineGraphModel& model, int n_particles, double t,
                                  double tp, Exec exec = Exec::parallel);
// Same checks against a caller-supplied site-basis matrix (fault injection).
ReflectionReport reflection_suite(const LineGraphModel& model, const FockBasis& basis,
                                  const SparseHamiltonian& site_h);

// Applies the local reflection of one cycle to a cycle-basis vector.
std::vector<double> apply_reflection(const LineGraphModel& model, const CycleBasis& basis,
                                     int cycle, const std::vector<double>& vec);

struct CheckEntry {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct TheoremReport {
    double t = 0.0, tp = 0.0;
    int n_particles = 0, n_cycles = 0, c = 0;
    BoundReport bounds;
    int n_in_window = 0;
    double gap_measured = 0.0;
    std::vector<double> eigenvalues; // lowest n_cycles + 2
    std::vector<double> overlaps;    // lowest n_cycles states
    int ground_group_size = 0;
    bool symmetric_checks_run = false;
    std::vector<int> localized_cycle; // hosting cycle per ground state
    std::vector<double> localized_r;
    double max_localization_residual = 0.0;
    std::vector<CheckEntry> checks;
    bool pass = false;
};

// Full end-to-end verification at one particle above critical density:
// window population, gap, overlaps, and for symmetric lattices the exact
// ground degeneracy and single-cycle localization of each ground state.
TheoremReport verify_theorem(const LineGraphModel& model, double t, double tp,
                             SolverOptions solver = {});

} // namespace flatband
