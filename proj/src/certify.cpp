#include "flatband/certify.hpp"
#include "flatband/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace flatband {

namespace {

const double kRoot2 = std::sqrt(2.0);

void require_above_critical(const LineGraphModel& model, int n_particles) {
    if (n_particles != model.n_cycles + 1)
        throw ValidityError("check requires one particle above the critical density");
}

// weight ratio s_source / s_target over the cycles where the two assignments
// differ; avoids forming the full products, which overflow for many cycles
double weight_ratio(std::uint64_t src, std::uint64_t tgt, int n_cycles,
                    const std::array<double, 16>& s) {
    double ratio = 1.0;
    std::uint64_t diff = src ^ tgt;
    for (int c = 0; c < n_cycles && diff; ++c, diff >>= 4) {
        if (diff & 0xF)
            ratio *= s[CycleBasis::state_of(src, c)] / s[CycleBasis::state_of(tgt, c)];
    }
    return ratio;
}

std::array<double, 16> weight_table(double alpha, double d) {
    std::array<double, 16> s;
    const auto& table = cycle_table();
    for (int i = 0; i < 16; ++i) s[i] = table.entries[i].weight.eval(alpha, d);
    return s;
}

// reflection of one cycle written in the table eigenbasis; sparse columns
std::array<std::vector<std::pair<int, double>>, 16>
reflection_columns(const std::array<int, 4>& perm) {
    Mat16 p_site = Mat16::Zero();
    for (unsigned m = 0; m < 16; ++m) {
        unsigned out = 0;
        for (int pos = 0; pos < 4; ++pos)
            if (m & (1u << pos)) out |= 1u << perm[pos];
        p_site(out, m) = 1.0;
    }
    Mat16 r = table_basis_matrix().transpose() * p_site * table_basis_matrix();
    std::array<std::vector<std::pair<int, double>>, 16> cols;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            if (std::abs(r(j, i)) > 1e-14) cols[i].push_back({j, r(j, i)});
    return cols;
}

} // namespace

double pair_coupling_constant() { return std::sqrt((2.0 - kRoot2) / 2.0); }

ScalarBlockCheck ground_block_check(const LineGraphModel& model, double t, double tp, Exec exec) {
    const int m = model.n_cycles;
    const int n = m + 1;
    CycleBasis basis = enumerate_cycle_basis(m, n);
    SparseHamiltonian h = assemble_cycle_hamiltonian(model, basis, t, tp, {exec});
    auto ground = uncoupled_ground_states(model, basis);

    ScalarBlockCheck check;
    check.expected = -(2.0 * (n - 2) + 2.0 * kRoot2) * t;
    check.tolerance = 1e-12 * t;
    for (std::size_t k = 0; k < ground.size(); ++k) {
        for (std::size_t l = 0; l < ground.size(); ++l) {
            double v = h.entry(ground[k], ground[l]);
            if (k == l)
                check.max_diag_dev = std::max(check.max_diag_dev, std::abs(v - check.expected));
            else
                check.max_offdiag = std::max(check.max_offdiag, std::abs(v));
        }
    }
    check.pass = check.max_diag_dev < check.tolerance && check.max_offdiag < check.tolerance;
    return check;
}

CouplingBlockCheck coupling_block_check(const LineGraphModel& model, double t, double tp,
                                        Exec exec) {
    const int m = model.n_cycles;
    CycleBasis basis = enumerate_cycle_basis(m, m + 1);
    SparseHamiltonian h = assemble_cycle_hamiltonian(model, basis, t, tp, {exec});
    auto ground = uncoupled_ground_states(model, basis);
    std::vector<char> is_ground(basis.size(), 0);
    for (auto g : ground) is_ground[g] = 1;

    // coupled columns: rows of H at the ground states, ground coordinates
    // projected out
    std::vector<std::vector<std::pair<std::int32_t, double>>> cols(m);
    for (int k = 0; k < m; ++k) {
        const std::size_t row = ground[k];
        for (std::int64_t idx = h.row_ptr[row]; idx < h.row_ptr[row + 1]; ++idx)
            if (!is_ground[h.cols[idx]]) cols[k].push_back({h.cols[idx], h.vals[idx]});
    }

    Eigen::MatrixXd gram(m, m);
    for (int k = 0; k < m; ++k) {
        for (int l = k; l < m; ++l) {
            double dot = 0.0;
            auto it_k = cols[k].begin();
            auto it_l = cols[l].begin();
            while (it_k != cols[k].end() && it_l != cols[l].end()) {
                if (it_k->first < it_l->first)
                    ++it_k;
                else if (it_l->first < it_k->first)
                    ++it_l;
                else {
                    dot += it_k->second * it_l->second;
                    ++it_k;
                    ++it_l;
                }
            }
            gram(k, l) = gram(l, k) = dot;
        }
    }

    CouplingBlockCheck check;
    check.tolerance = 1e-10 * t;
    for (int k = 0; k < m; ++k) {
        check.per_state.push_back(std::sqrt(std::max(gram(k, k), 0.0)));
        check.predicted.push_back(pair_coupling_constant() *
                                  std::sqrt(double(model.c_of_cycle[k])) * tp);
        check.max_deviation =
            std::max(check.max_deviation, std::abs(check.per_state[k] - check.predicted[k]));
        for (int l = 0; l < m; ++l)
            if (l != k) check.max_gram_offdiag = std::max(check.max_gram_offdiag,
                                                          std::abs(gram(k, l)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    for (int k = 0; k < m; ++k)
        check.singular_values.push_back(std::sqrt(std::max(es.eigenvalues()(k), 0.0)));
    check.pass = check.max_deviation < check.tolerance;
    return check;
}

Mat16 coupling_margin_matrix(double tp, double t, int c, double alpha, double d) {
    if (c < 1) throw ValidityError("coordination number c must be at least 1");
    if (!(alpha > 0) || !(d > 0)) throw ValidityError("margin matrix needs alpha, d > 0");
    const auto& table = cycle_table();
    std::array<double, 16> mu, nu, e;
    for (int i = 0; i < 16; ++i) {
        mu[i] = table.entries[i].removal.eval(alpha, d);
        nu[i] = table.entries[i].addition.eval(alpha, d);
        e[i] = table.entries[i].excess_energy;
    }
    Mat16 out;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            out(i, j) = (e[i] + e[j]) * t / c - (mu[i] * nu[j] + mu[j] * nu[i]) * tp;
    return out;
}

std::vector<double> dominance_margins(const SparseHamiltonian& cycle_h, const CycleBasis& basis,
                                      const std::vector<std::size_t>& ground_idx,
                                      const std::vector<std::size_t>& rows, double lambda,
                                      double alpha, double d) {
    std::vector<char> is_ground(basis.size(), 0);
    for (auto g : ground_idx) is_ground[g] = 1;
    const auto s = weight_table(alpha, d);

    std::vector<double> margins(rows.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows.size()); ++i) {
        const std::size_t k = rows[i];
        const std::uint64_t code_k = basis.states[k];
        double diag = 0.0, offsum = 0.0;
        for (std::int64_t idx = cycle_h.row_ptr[k]; idx < cycle_h.row_ptr[k + 1]; ++idx) {
            const std::size_t j = cycle_h.cols[idx];
            if (j == k) {
                diag = cycle_h.vals[idx];
            } else if (!is_ground[j]) {
                offsum += std::abs(cycle_h.vals[idx]) *
                          weight_ratio(code_k, basis.states[j], basis.n_cycles, s);
            }
        }
        margins[i] = std::abs(diag - lambda) - offsum;
    }
    return margins;
}

DominanceReport dominance_check(const LineGraphModel& model, int n_particles, double t, double tp,
                                double lambda_probe, DominanceOptions opts) {
    require_above_critical(model, n_particles);
    const auto [e5, a, b] = constants();
    const int c = model.c_max;
    if (!(tp >= 0) || !(tp < std::sqrt(2.0 * e5 / a) * t / c))
        throw ValidityError("dominance check needs 0 <= tp < sqrt(2 e5 / a) t / c");
    const double probe_cap = (-2.0 * (n_particles - 4) - 4.0 * kRoot2) * t;
    if (lambda_probe > probe_cap)
        throw ValidityError("probe energy must stay at or below the first excited shell");

    CycleBasis basis = enumerate_cycle_basis(model.n_cycles, n_particles);
    SparseHamiltonian h = assemble_cycle_hamiltonian(model, basis, t, tp, {opts.exec});
    auto ground = uncoupled_ground_states(model, basis);
    std::vector<char> is_ground(basis.size(), 0);
    for (auto g : ground) is_ground[g] = 1;

    std::vector<std::size_t> excited;
    excited.reserve(basis.size() - ground.size());
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (!is_ground[k]) excited.push_back(k);

    DominanceReport report;
    report.seed = opts.seed;
    report.exhaustive = opts.sample == 0 || opts.sample >= excited.size();
    std::vector<std::size_t> rows;
    if (report.exhaustive) {
        rows = excited;
    } else {
        std::mt19937_64 rng(opts.seed);
        std::sample(excited.begin(), excited.end(), std::back_inserter(rows), opts.sample, rng);
    }

    WeightParams wp = tp > 0 ? weight_parameters(tp, t, c) : WeightParams{1.0, 4.0 / 3.0};
    auto margins = dominance_margins(h, basis, ground, rows, lambda_probe, wp.alpha, wp.d);

    auto it = std::min_element(margins.begin(), margins.end());
    report.min_margin = *it;
    report.argmin_state = rows[it - margins.begin()];
    report.n_checked = rows.size();
    report.rhs = (-2.0 * n_particles + 2.0 * e5) * t - lambda_probe - a * c * c * tp * tp / t;
    report.pass = report.min_margin >= report.rhs - 1e-12 * std::abs(t) * n_particles;
    return report;
}

std::vector<double> apply_reflection(const LineGraphModel& model, const CycleBasis& basis,
                                     int cycle, const std::vector<double>& vec) {
    if (model.reflection_perms.empty())
        throw ValidityError("lattice has no declared reflection axes");
    auto cols = reflection_columns(model.reflection_perms[cycle]);
    std::vector<double> out(basis.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (vec[k] == 0.0) continue;
        const std::uint64_t code = basis.states[k];
        for (auto [j, w] : cols[CycleBasis::state_of(code, cycle)]) {
            auto tgt = basis.rank(CycleBasis::with_state(code, cycle, j));
            out[tgt] += w * vec[k];
        }
    }
    return out;
}

ReflectionReport reflection_suite(const LineGraphModel& model, const FockBasis& basis,
                                  const SparseHamiltonian& site_h) {
    if (model.reflection_perms.empty())
        throw ValidityError("lattice has no declared reflection axes");

    ReflectionReport report;
    // commutator: the reflection is a site permutation, so conjugation must
    // reproduce the matrix entry for entry
    for (int c = 0; c < model.n_cycles; ++c) {
        const auto& perm = model.reflection_perms[c];
        auto permute = [&](std::uint64_t mask) {
            std::uint64_t cycle_bits = (mask >> (4 * c)) & 0xF;
            std::uint64_t out_bits = 0;
            for (int p = 0; p < 4; ++p)
                if (cycle_bits & (1u << p)) out_bits |= std::uint64_t{1} << perm[p];
            return (mask & ~(std::uint64_t{0xF} << (4 * c))) | (out_bits << (4 * c));
        };
        for (std::size_t r = 0; r < site_h.dim; ++r) {
            const std::size_t pr = basis.rank(permute(basis.states[r]));
            for (std::int64_t idx = site_h.row_ptr[r]; idx < site_h.row_ptr[r + 1]; ++idx) {
                const std::size_t pc = basis.rank(permute(basis.states[site_h.cols[idx]]));
                double dev = std::abs(site_h.entry(pr, pc) - site_h.vals[idx]);
                report.max_commutator = std::max(report.max_commutator, dev);
            }
        }
    }

    // signatures of the product ground states, exact from the one-cycle
    // reflection written in the eigenbasis
    report.signatures_ok = true;
    report.signatures.assign(model.n_cycles, std::vector<int>(model.n_cycles, 0));
    for (int c = 0; c < model.n_cycles; ++c) {
        auto cols = reflection_columns(model.reflection_perms[c]);
        auto diag_sign = [&](int state) {
            for (auto [j, w] : cols[state])
                if (j == state) return w;
            return 0.0;
        };
        const double on_single = diag_sign(1);
        const double on_pair = diag_sign(5);
        for (int host = 0; host < model.n_cycles; ++host) {
            double sig = host == c ? on_pair : on_single * 1.0;
            // signature of the product state = eigenvalue of the hosted factor
            double expected = host == c ? 1.0 : -1.0;
            report.signatures[host][c] = sig > 0 ? 1 : -1;
            if (std::abs(sig - expected) > 1e-12) report.signatures_ok = false;
        }
    }
    report.pass = report.max_commutator == 0.0 && report.signatures_ok;
    return report;
}

ReflectionReport reflection_suite(const LineGraphModel& model, int n_particles, double t,
                                  double tp, Exec exec) {
    FockBasis basis = enumerate_basis(model.n_sites(), n_particles);
    SparseHamiltonian h = assemble_site_hamiltonian(model, basis, t, tp, {exec});
    return reflection_suite(model, basis, h);
}

TheoremReport verify_theorem(const LineGraphModel& model, double t, double tp,
                             SolverOptions solver) {
    const int m = model.n_cycles;
    const int n = m + 1;
    const int c = model.c_max;

    TheoremReport report;
    report.t = t;
    report.tp = tp;
    report.n_particles = n;
    report.n_cycles = m;
    report.c = c;
    report.bounds = bound_report(n, t, tp, c); // throws outside validity

    CycleBasis basis = enumerate_cycle_basis(m, n);
    SparseHamiltonian h = assemble_cycle_hamiltonian(model, basis, t, tp, {solver.exec});
    auto ground = uncoupled_ground_states(model, basis);

    const int k = std::min<int>(m + 2, static_cast<int>(basis.size()) - 1);
    SpectrumResult spec = lowest_eigs(h, k, solver);
    report.eigenvalues = spec.eigenvalues;

    const double tol = 1e-9 * t;
    const double lo = report.bounds.window_lo, hi = report.bounds.window_hi;

    if (!spec.full_spectrum.empty()) {
        report.n_in_window = static_cast<int>(
            std::count_if(spec.full_spectrum.begin(), spec.full_spectrum.end(),
                          [&](double x) { return x >= lo - tol && x <= hi + tol; }));
    } else {
        // ascending spectrum: the window is a prefix interval, so the lowest
        // m + 2 values determine the population
        report.n_in_window = static_cast<int>(
            std::count_if(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                          [&](double x) { return x >= lo - tol && x <= hi + tol; }));
    }
    report.gap_measured = spec.eigenvalues[m] - spec.eigenvalues[m - 1];

    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (auto g : ground) acc += spec.eigenvectors[i][g] * spec.eigenvectors[i][g];
        report.overlaps.push_back(std::sqrt(acc));
    }
    const double overlap_min = *std::min_element(report.overlaps.begin(), report.overlaps.end());

    auto groups = degeneracy_groups(spec.eigenvalues, 1e-8, t);
    report.ground_group_size = static_cast<int>(groups.front().size());

    report.checks.push_back({"window_count", double(report.n_in_window), double(m), 0.0,
                             report.n_in_window == m, "eigenvalues inside the enclosure"});
    report.checks.push_back({"window_low_edge", spec.eigenvalues[0], lo, tol,
                             spec.eigenvalues[0] >= lo - tol, "lowest eigenvalue above window_lo"});
    report.checks.push_back({"variational_upper", spec.eigenvalues[m - 1], hi, tol,
                             spec.eigenvalues[m - 1] <= hi + tol,
                             "low block below the uncoupled energy"});
    report.checks.push_back({"gap", report.gap_measured, report.bounds.gap_lower, tol,
                             report.gap_measured >= report.bounds.gap_lower - tol, ""});
    report.checks.push_back({"overlap_min", overlap_min, report.bounds.overlap_lower, tol,
                             overlap_min >= report.bounds.overlap_lower - tol, ""});

    const bool symmetric = model.global_symmetry && !model.reflection_perms.empty();
    report.symmetric_checks_run = symmetric;
    if (symmetric) {
        report.checks.push_back({"ground_degeneracy", double(report.ground_group_size), double(m),
                                 1e-8, report.ground_group_size == m,
                                 "exact degeneracy of the low block"});

        // simultaneous eigenbasis of the commuting reflections inside the
        // (numerically) degenerate ground cluster
        const int gsize = std::min<int>(report.ground_group_size, m);
        std::vector<std::vector<double>> cluster(spec.eigenvectors.begin(),
                                                 spec.eigenvectors.begin() + gsize);
        std::vector<std::vector<int>> blocks{std::vector<int>(gsize)};
        std::iota(blocks[0].begin(), blocks[0].end(), 0);
        for (int cyc = 0; cyc < m; ++cyc) {
            std::vector<std::vector<int>> next_blocks;
            for (const auto& block : blocks) {
                if (block.size() == 1) {
                    next_blocks.push_back(block);
                    continue;
                }
                const int bsz = static_cast<int>(block.size());
                std::vector<std::vector<double>> reflected(bsz);
                for (int i = 0; i < bsz; ++i)
                    reflected[i] = apply_reflection(model, basis, cyc, cluster[block[i]]);
                Eigen::MatrixXd w(bsz, bsz);
                for (int i = 0; i < bsz; ++i)
                    for (int j = 0; j < bsz; ++j) {
                        double dot = 0.0;
                        for (std::size_t p = 0; p < basis.size(); ++p)
                            dot += cluster[block[i]][p] * reflected[j][p];
                        w(i, j) = dot;
                    }
                w = 0.5 * (w + w.transpose().eval());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
                std::vector<std::vector<double>> rotated(bsz,
                                                         std::vector<double>(basis.size(), 0.0));
                for (int col = 0; col < bsz; ++col)
                    for (int i = 0; i < bsz; ++i) {
                        const double f = es.eigenvectors()(i, col);
                        if (f == 0.0) continue;
                        const auto& src = cluster[block[i]];
                        auto& dst = rotated[col];
                        for (std::size_t p = 0; p < basis.size(); ++p) dst[p] += f * src[p];
                    }
                std::vector<int> minus, plus;
                for (int col = 0; col < bsz; ++col) {
                    cluster[block[col]] = std::move(rotated[col]);
                    (es.eigenvalues()(col) < 0 ? minus : plus).push_back(block[col]);
                }
                if (!minus.empty()) next_blocks.push_back(minus);
                if (!plus.empty()) next_blocks.push_back(plus);
            }
            blocks = std::move(next_blocks);
        }

        bool localized_ok = true;
        for (int i = 0; i < gsize; ++i) {
            // the hosting cycle is the one with reflection signature +1
            int host = -1;
            for (int cyc = 0; cyc < m; ++cyc) {
                auto refl = apply_reflection(model, basis, cyc, cluster[i]);
                double sig = 0.0;
                for (std::size_t p = 0; p < basis.size(); ++p) sig += cluster[i][p] * refl[p];
                if (sig > 0) {
                    host = host < 0 ? cyc : -2; // -2: more than one positive signature
                }
                if (std::abs(std::abs(sig) - 1.0) > 1e-8) localized_ok = false;
            }
            if (host < 0) {
                localized_ok = false;
                report.localized_cycle.push_back(-1);
                report.localized_r.push_back(0.0);
                continue;
            }
            double r = cluster[i][ground[host]];
            double resid2 = 0.0;
            for (int g = 0; g < m; ++g) {
                double coeff = cluster[i][ground[g]];
                if (g == host) coeff -= r;
                resid2 += coeff * coeff;
            }
            report.localized_cycle.push_back(host);
            report.localized_r.push_back(std::abs(r));
            report.max_localization_residual =
                std::max(report.max_localization_residual, std::sqrt(resid2));
            if (std::abs(r) < report.bounds.overlap_lower - tol) localized_ok = false;
        }
        // every ground state pins a distinct cycle
        {
            auto hosts = report.localized_cycle;
            std::sort(hosts.begin(), hosts.end());
            if (std::unique(hosts.begin(), hosts.end()) != hosts.end()) localized_ok = false;
        }
        localized_ok = localized_ok && report.max_localization_residual < 1e-8;
        report.checks.push_back({"localization", report.max_localization_residual, 0.0, 1e-8,
                                 localized_ok,
                                 "ground projections collapse onto single hosting cycles"});
    }

    report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const CheckEntry& e) { return e.pass; });
    return report;
}

} // namespace flatband
