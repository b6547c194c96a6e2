#include "flatband/fock.hpp"
#include "flatband/cyclestate.hpp"
#include "flatband/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace flatband {

namespace {

void check_nnz_cap(std::size_t nnz, std::size_t cap) {
    if (nnz > cap) {
        std::ostringstream msg;
        msg << "assembly would produce " << nnz << " nonzeros, above the cap of " << cap;
        throw ValidityError(msg.str());
    }
}

} // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    return static_cast<std::uint64_t>(r);
}

std::ptrdiff_t FockBasis::rank(std::uint64_t mask) const {
    auto it = std::lower_bound(states.begin(), states.end(), mask);
    if (it == states.end() || *it != mask) return -1;
    return it - states.begin();
}

FockBasis enumerate_basis(int n_sites, int n_particles) {
    if (n_sites < 0 || n_sites > 62)
        throw ValidityError("site count must be between 0 and 62");
    if (n_particles < 0 || n_particles > n_sites)
        throw ValidityError("particle number out of range for the basis");

    FockBasis basis;
    basis.n_sites = n_sites;
    basis.n_particles = n_particles;
    basis.states.reserve(binomial(n_sites, n_particles));
    if (n_particles == 0) {
        basis.states.push_back(0);
        return basis;
    }
    // ascending enumeration of fixed-popcount masks
    std::uint64_t m = (std::uint64_t{1} << n_particles) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n_sites;
    while (m < limit) {
        basis.states.push_back(m);
        std::uint64_t c = m & -m;
        std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return basis;
}

std::ptrdiff_t CycleBasis::rank(std::uint64_t code) const {
    auto it = std::lower_bound(states.begin(), states.end(), code);
    if (it == states.end() || *it != code) return -1;
    return it - states.begin();
}

CycleBasis enumerate_cycle_basis(int n_cycles, int n_particles) {
    if (n_cycles < 1 || n_cycles > 15)
        throw ValidityError("cycle count must be between 1 and 15");
    if (n_particles < 0 || n_particles > 4 * n_cycles)
        throw ValidityError("particle number out of range for the cycle basis");

    const auto& table = cycle_table();
    CycleBasis basis;
    basis.n_cycles = n_cycles;
    basis.n_particles = n_particles;

    std::vector<std::uint64_t> stack;
    auto recurse = [&](auto&& self, int cycle, int left, std::uint64_t code) -> void {
        if (cycle == n_cycles) {
            if (left == 0) basis.states.push_back(code);
            return;
        }
        for (int i = 0; i < 16; ++i) {
            int n = table.entries[i].n_particles;
            if (n <= left)
                self(self, cycle + 1, left - n, code | (std::uint64_t(i) << (4 * cycle)));
        }
    };
    recurse(recurse, 0, n_particles, 0);
    std::sort(basis.states.begin(), basis.states.end());
    return basis;
}

double SparseHamiltonian::diagonal(std::size_t row) const { return entry(row, row); }

double SparseHamiltonian::entry(std::size_t row, std::size_t col) const {
    auto begin = cols.begin() + row_ptr[row];
    auto end = cols.begin() + row_ptr[row + 1];
    auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
    if (it == end || *it != static_cast<std::int32_t>(col)) return 0.0;
    return vals[it - cols.begin()];
}

double SparseHamiltonian::inf_norm() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        double s = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += std::abs(vals[k]);
        best = std::max(best, s);
    }
    return best;
}

SparseHamiltonian assemble_site_hamiltonian(const LineGraphModel& model, const FockBasis& basis,
                                            double t, double tp, AssemblyOptions opts) {
    if (basis.n_sites != model.n_sites())
        throw ValidityError("basis site count does not match the model");
    if (!(t > 0)) throw ValidityError("intra-cycle hopping t must be positive");

    struct Bond {
        int a, b;
        bool strong;
    };
    std::vector<Bond> bonds;
    bonds.reserve(model.t_bonds.size() + model.tp_bonds.size());
    for (auto [a, b] : model.t_bonds) bonds.push_back({a, b, true});
    for (const auto& tb : model.tp_bonds) bonds.push_back({tb.a, tb.b, false});

    const std::size_t dim = basis.size();
    SparseHamiltonian h;
    h.dim = dim;
    h.basis = BasisKind::site;
    h.t = t;
    h.tp = tp;
    h.row_ptr.assign(dim + 1, 0);

    const bool par = opts.exec == Exec::parallel;

    // pass 1: count moves per row (one per bond with exactly one occupied end)
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(dim); ++r) {
        const std::uint64_t m = basis.states[r];
        std::int64_t count = 0;
        for (const auto& bond : bonds) {
            bool occ_a = (m >> bond.a) & 1, occ_b = (m >> bond.b) & 1;
            if (occ_a != occ_b) ++count;
        }
        h.row_ptr[r + 1] = count;
    }
    for (std::size_t r = 0; r < dim; ++r) h.row_ptr[r + 1] += h.row_ptr[r];
    check_nnz_cap(static_cast<std::size_t>(h.row_ptr[dim]), opts.max_nnz);
    h.cols.resize(h.row_ptr[dim]);
    h.vals.resize(h.row_ptr[dim]);

    // pass 2: fill, sorted by column within each row. Amplitudes are exact
    // copies of t / tp, so transposed entries match bit for bit.
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(dim); ++r) {
        const std::uint64_t m = basis.states[r];
        std::vector<std::pair<std::int32_t, double>> row;
        for (const auto& bond : bonds) {
            bool occ_a = (m >> bond.a) & 1, occ_b = (m >> bond.b) & 1;
            if (occ_a == occ_b) continue;
            std::uint64_t moved =
                (m & ~((std::uint64_t{1} << bond.a) | (std::uint64_t{1} << bond.b))) |
                (occ_a ? (std::uint64_t{1} << bond.b) : (std::uint64_t{1} << bond.a));
            auto c = basis.rank(moved);
            row.emplace_back(static_cast<std::int32_t>(c), bond.strong ? t : tp);
        }
        std::sort(row.begin(), row.end());
        std::int64_t k = h.row_ptr[r];
        for (auto [c, v] : row) {
            h.cols[k] = c;
            h.vals[k] = v;
            ++k;
        }
    }
    return h;
}

SparseHamiltonian assemble_cycle_hamiltonian(const LineGraphModel& model, const CycleBasis& basis,
                                             double t, double tp, AssemblyOptions opts) {
    if (basis.n_cycles != model.n_cycles)
        throw ValidityError("cycle basis does not match the model");
    if (!(t > 0)) throw ValidityError("intra-cycle hopping t must be positive");

    const auto& table = cycle_table();
    const std::size_t dim = basis.size();
    const bool par = opts.exec == Exec::parallel;

    // sparse columns of the corner-pair operators in the table basis
    struct Elem {
        int target;
        double amp;
    };
    std::array<std::array<std::vector<Elem>, 16>, 4> rem_cols, add_cols;
    for (int corner = 0; corner < 4; ++corner) {
        const Mat16& rem = pair_removal_matrix(corner);
        const Mat16& add = pair_addition_matrix(corner);
        for (int i = 0; i < 16; ++i) {
            for (int j = 0; j < 16; ++j) {
                if (rem(j, i) != 0.0) rem_cols[corner][i].push_back({j, rem(j, i)});
                if (add(j, i) != 0.0) add_cols[corner][i].push_back({j, add(j, i)});
            }
        }
    }

    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(dim);

#pragma omp parallel for schedule(dynamic, 64) if (par)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(dim); ++r) {
        const std::uint64_t code = basis.states[r];
        auto& row = rows[r];

        double diag = 0.0;
        for (int c = 0; c < model.n_cycles; ++c) {
            const auto& entry = table.entries[CycleBasis::state_of(code, c)];
            diag += (entry.excess_energy - 2.0 * entry.n_particles) * t;
        }
        row.emplace_back(static_cast<std::int32_t>(r), diag);

        for (const auto& cc : model.corner_couplings) {
            const int ia = CycleBasis::state_of(code, cc.cycle_a);
            const int ib = CycleBasis::state_of(code, cc.cycle_b);
            // particle hops b -> a, then a -> b
            for (const auto& ea : add_cols[cc.corner_a][ia])
                for (const auto& eb : rem_cols[cc.corner_b][ib]) {
                    std::uint64_t moved = CycleBasis::with_state(
                        CycleBasis::with_state(code, cc.cycle_a, ea.target), cc.cycle_b,
                        eb.target);
                    auto idx = basis.rank(moved);
                    row.emplace_back(static_cast<std::int32_t>(idx), ea.amp * eb.amp * tp);
                }
            for (const auto& ea : rem_cols[cc.corner_a][ia])
                for (const auto& eb : add_cols[cc.corner_b][ib]) {
                    std::uint64_t moved = CycleBasis::with_state(
                        CycleBasis::with_state(code, cc.cycle_a, ea.target), cc.cycle_b,
                        eb.target);
                    auto idx = basis.rank(moved);
                    row.emplace_back(static_cast<std::int32_t>(idx), ea.amp * eb.amp * tp);
                }
        }

        std::sort(row.begin(), row.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        // merge duplicate columns (several corners can hit the same target)
        std::size_t w = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (w > 0 && row[w - 1].first == row[k].first)
                row[w - 1].second += row[k].second;
            else
                row[w++] = row[k];
        }
        row.resize(w);
    }

    SparseHamiltonian h;
    h.dim = dim;
    h.basis = BasisKind::cycle_product;
    h.t = t;
    h.tp = tp;
    h.row_ptr.assign(dim + 1, 0);
    for (std::size_t r = 0; r < dim; ++r) h.row_ptr[r + 1] = h.row_ptr[r] + rows[r].size();
    check_nnz_cap(static_cast<std::size_t>(h.row_ptr[dim]), opts.max_nnz);
    h.cols.resize(h.row_ptr[dim]);
    h.vals.resize(h.row_ptr[dim]);
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(dim); ++r) {
        std::int64_t k = h.row_ptr[r];
        for (auto [c, v] : rows[r]) {
            h.cols[k] = c;
            h.vals[k] = v;
            ++k;
        }
    }
    return h;
}

Eigen::SparseMatrix<double> basis_transform(const LineGraphModel& model, int n_particles) {
    const auto& table = cycle_table();
    const int n_sites = model.n_sites();
    FockBasis site = enumerate_basis(n_sites, n_particles);
    CycleBasis cycle = enumerate_cycle_basis(model.n_cycles, n_particles);

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const std::uint64_t code = cycle.states[k];
        // expand the product state over site masks cycle by cycle
        std::vector<std::pair<std::uint64_t, double>> partial{{0, 1.0}};
        for (int c = 0; c < model.n_cycles; ++c) {
            const auto& entry = table.entries[CycleBasis::state_of(code, c)];
            std::vector<std::pair<std::uint64_t, double>> next;
            for (int m = 0; m < 16; ++m) {
                if (entry.coeffs[m] == 0.0) continue;
                for (const auto& [mask, coeff] : partial)
                    next.emplace_back(mask | (std::uint64_t(m) << (4 * c)),
                                      coeff * entry.coeffs[m]);
            }
            partial = std::move(next);
        }
        for (const auto& [mask, coeff] : partial) {
            auto row = site.rank(mask);
            trip.emplace_back(static_cast<int>(row), static_cast<int>(k), coeff);
        }
    }
    Eigen::SparseMatrix<double> u(static_cast<int>(site.size()), static_cast<int>(cycle.size()));
    u.setFromTriplets(trip.begin(), trip.end());
    return u;
}

std::vector<std::size_t> uncoupled_ground_states(const LineGraphModel& model,
                                                 const CycleBasis& basis) {
    if (basis.n_particles != model.n_cycles + 1)
        throw ValidityError("uncoupled ground states need one particle above critical density");
    std::vector<std::size_t> out(model.n_cycles);
    for (int host = 0; host < model.n_cycles; ++host) {
        std::uint64_t code = 0;
        for (int c = 0; c < model.n_cycles; ++c)
            code |= std::uint64_t(c == host ? 5 : 1) << (4 * c);
        auto idx = basis.rank(code);
        if (idx < 0) throw ValidityError("cycle basis does not contain the product ground state");
        out[host] = static_cast<std::size_t>(idx);
    }
    return out;
}

void matvec(const SparseHamiltonian& h, const double* x, double* y, Exec exec) {
    const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(h.dim); ++r) {
        double acc = 0.0;
        for (std::int64_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k)
            acc += h.vals[k] * x[h.cols[k]];
        y[r] = acc;
    }
}

std::vector<double> matvec(const SparseHamiltonian& h, const std::vector<double>& x, Exec exec) {
    std::vector<double> y(h.dim);
    matvec(h, x.data(), y.data(), exec);
    return y;
}

std::vector<double> to_dense(const SparseHamiltonian& h) {
    std::vector<double> dense(h.dim * h.dim, 0.0);
    for (std::size_t r = 0; r < h.dim; ++r)
        for (std::int64_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k)
            dense[static_cast<std::size_t>(h.cols[k]) * h.dim + r] += h.vals[k];
    return dense;
}

} // namespace flatband
