#include "flatband/eigensolve.hpp"
#include "flatband/errors.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace flatband {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SpectrumResult dense_path(const SparseHamiltonian& h, int k, const SolverOptions& opts) {
    const int n = static_cast<int>(h.dim);
    SpectrumResult res;
    res.mode = "dense";
    res.converged = true;
    res.seed = opts.seed;
    res.norm_estimate = h.inf_norm();

    std::vector<double> a = to_dense(h);
    std::vector<double> w(n);

    // full solve is cheap for small problems and also yields the whole
    // spectrum; larger instances use the selected-pair solver
    const bool full = opts.full_spectrum || n <= 2000;
    if (full) {
        int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
        if (info != 0) throw ValidityError("dense eigensolver failed");
        res.full_spectrum = w;
        for (int i = 0; i < k; ++i) {
            res.eigenvalues.push_back(w[i]);
            res.eigenvectors.emplace_back(a.begin() + std::size_t(i) * n,
                                          a.begin() + std::size_t(i + 1) * n);
        }
    } else {
        std::vector<double> z(std::size_t(n) * k);
        std::vector<lapack_int> isuppz(2 * std::size_t(k));
        lapack_int m = 0;
        int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1,
                                  k, 0.0, &m, w.data(), z.data(), n, isuppz.data());
        if (info != 0 || m < k) throw ValidityError("dense selected eigensolver failed");
        for (int i = 0; i < k; ++i) {
            res.eigenvalues.push_back(w[i]);
            res.eigenvectors.emplace_back(z.begin() + std::size_t(i) * n,
                                          z.begin() + std::size_t(i + 1) * n);
        }
    }

    for (int i = 0; i < k; ++i) {
        auto hv = matvec(h, res.eigenvectors[i], opts.exec);
        double r2 = 0.0;
        for (int j = 0; j < n; ++j) {
            double d = hv[j] - res.eigenvalues[i] * res.eigenvectors[i][j];
            r2 += d * d;
        }
        res.residuals.push_back(std::sqrt(r2));
    }
    return res;
}

void block_matvec(const SparseHamiltonian& h, const MatrixXd& x, MatrixXd& y, Exec exec) {
    y.resize(x.rows(), x.cols());
    for (int c = 0; c < x.cols(); ++c)
        matvec(h, x.col(c).data(), y.col(c).data(), exec);
}

SpectrumResult krylov_path(const SparseHamiltonian& h, int k, const SolverOptions& opts) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(h.dim);
    SpectrumResult res;
    res.mode = "block_krylov";
    res.seed = opts.seed;
    res.norm_estimate = h.inf_norm();
    const double tol_abs = opts.tol * std::max(res.norm_estimate, 1.0);

    const int bs = std::min<std::ptrdiff_t>(opts.block_size > 0 ? opts.block_size : k + 2, n);
    const int max_blocks =
        std::min<std::ptrdiff_t>(opts.max_block_iters, std::max<std::ptrdiff_t>(n / bs, 1));

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;

    std::vector<MatrixXd> v_blocks;
    std::vector<MatrixXd> a_blocks, b_blocks; // block tridiagonal pieces

    MatrixXd v0(n, bs);
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (int j = 0; j < bs; ++j) v0(i, j) = gauss(rng);
    {
        Eigen::HouseholderQR<MatrixXd> qr(v0);
        v0 = qr.householderQ() * MatrixXd::Identity(n, bs);
    }
    v_blocks.push_back(v0);

    auto reorthogonalise = [&](MatrixXd& w) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : v_blocks) w.noalias() -= v * (v.transpose() * w);
    };

    Eigen::SelfAdjointEigenSolver<MatrixXd> small_es;
    std::vector<double> ritz;
    MatrixXd ritz_y;

    int blocks_done = 0;
    for (int j = 0; j < max_blocks; ++j) {
        MatrixXd w;
        block_matvec(h, v_blocks[j], w, opts.exec);
        if (j > 0) w.noalias() -= v_blocks[j - 1] * b_blocks[j - 1].transpose();
        MatrixXd a = v_blocks[j].transpose() * w;
        a = 0.5 * (a + a.transpose().eval());
        w.noalias() -= v_blocks[j] * a;
        reorthogonalise(w);
        a_blocks.push_back(a);

        Eigen::HouseholderQR<MatrixXd> qr(w);
        MatrixXd r = qr.matrixQR().topRows(bs).triangularView<Eigen::Upper>();
        MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, bs);
        // rank loss means an invariant subspace was hit; refresh the dead
        // directions with fresh random vectors
        const double floor = 1e-13 * std::max(res.norm_estimate, 1.0);
        for (int c = 0; c < bs; ++c) {
            if (std::abs(r(c, c)) < floor) {
                for (std::ptrdiff_t i = 0; i < n; ++i) q(i, c) = gauss(rng);
                r.row(c).setZero();
                r.col(c).setZero();
            }
        }
        reorthogonalise(q);
        {
            Eigen::HouseholderQR<MatrixXd> qr2(q);
            q = qr2.householderQ() * MatrixXd::Identity(n, bs);
        }

        blocks_done = j + 1;

        // projected problem
        const int m = blocks_done * bs;
        MatrixXd tmat = MatrixXd::Zero(m, m);
        for (int bI = 0; bI < blocks_done; ++bI) {
            tmat.block(bI * bs, bI * bs, bs, bs) = a_blocks[bI];
            if (bI + 1 < blocks_done) {
                tmat.block((bI + 1) * bs, bI * bs, bs, bs) = b_blocks[bI];
                tmat.block(bI * bs, (bI + 1) * bs, bs, bs) = b_blocks[bI].transpose();
            }
        }
        small_es.compute(tmat);
        ritz.assign(small_es.eigenvalues().data(), small_es.eigenvalues().data() + m);
        ritz_y = small_es.eigenvectors();

        bool done = m >= k + 1;
        for (int i = 0; i < k && done; ++i) {
            double bound = (r * ritz_y.block(m - bs, i, bs, 1)).norm();
            done = bound < tol_abs;
        }
        res.iterations = blocks_done;
        if (done && j >= 1) {
            res.converged = true;
            break;
        }
        if (j + 1 < max_blocks) {
            b_blocks.push_back(r);
            v_blocks.push_back(q);
        }
    }

    const int m = blocks_done * bs;
    for (int i = 0; i < k; ++i) {
        VectorXd x = VectorXd::Zero(n);
        for (int bI = 0; bI < blocks_done; ++bI)
            x.noalias() += v_blocks[bI] * ritz_y.block(bI * bs, i, bs, 1);
        x.normalize();
        res.eigenvalues.push_back(ritz[i]);
        res.eigenvectors.emplace_back(x.data(), x.data() + n);
        auto hv = matvec(h, res.eigenvectors[i], opts.exec);
        double r2 = 0.0;
        for (std::ptrdiff_t p = 0; p < n; ++p) {
            double d = hv[p] - ritz[i] * x(p);
            r2 += d * d;
        }
        res.residuals.push_back(std::sqrt(r2));
    }
    (void)m;
    return res;
}

} // namespace

SpectrumResult lowest_eigs(const SparseHamiltonian& h, int k, SolverOptions opts) {
    if (k < 1 || static_cast<std::size_t>(k) >= h.dim)
        throw ValidityError("requested eigenpair count must satisfy 1 <= k < dimension");
    if (!(opts.tol > 0)) throw ValidityError("solver tolerance must be positive");
    if (h.dim <= opts.dense_threshold) return dense_path(h, k, opts);
    return krylov_path(h, k, opts);
}

std::vector<std::vector<int>> degeneracy_groups(const std::vector<double>& ascending,
                                                double rel_tol, double scale) {
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < static_cast<int>(ascending.size()); ++i) {
        if (!groups.empty()) {
            double prev = ascending[i - 1];
            double gap = ascending[i] - prev;
            if (gap <= rel_tol * std::max(scale, std::abs(prev))) {
                groups.back().push_back(i);
                continue;
            }
        }
        groups.push_back({i});
    }
    return groups;
}

} // namespace flatband
