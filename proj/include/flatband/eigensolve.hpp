#pragma once

#include "flatband/fock.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flatband {

struct SolverOptions {
    double tol = 1e-10;                 // relative residual target
    std::size_t dense_threshold = 5000; // dense LAPACK at or below this dimension
    std::uint64_t seed = 12345;         // starting-block generator
    Exec exec = Exec::parallel;
    int block_size = 0;        // 0 = requested count + 2
    int max_block_iters = 250; // Krylov restart-free iteration cap
    bool full_spectrum = false; // dense mode: keep every eigenvalue
};

struct SpectrumResult {
    std::vector<double> eigenvalues; // k lowest, ascending
    std::vector<std::vector<double>> eigenvectors;
    std::vector<double> residuals;      // ||H v - lambda v||_2
    std::vector<double> full_spectrum;  // dense mode with full_spectrum set
    std::string mode;                   // "dense" or "block_krylov"
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    double norm_estimate = 0.0;
};

// k lowest eigenpairs of a symmetric sparse operator. Dense LAPACK below the
// threshold; block Krylov with full reorthogonalisation above it (block size
// covers the requested count + 2 so degenerate clusters converge together).
// Throws ValidityError on bad arguments; non-convergence is reported in the
// result, not thrown.
SpectrumResult lowest_eigs(const SparseHamiltonian& h, int k, SolverOptions opts = {});

// Transitive grouping of an ascending list: neighbours join one group when
// they differ by at most rel_tol * max(scale, |value|).
std::vector<std::vector<int>> degeneracy_groups(const std::vector<double>& ascending,
                                                double rel_tol, double scale = 1.0);

} // namespace flatband
