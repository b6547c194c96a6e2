#include "flatband/cyclestate.hpp"
#include "flatband/errors.hpp"

#include <bit>
#include <cmath>

namespace flatband {

namespace {

const double kRoot2 = std::sqrt(2.0);

int popcount(unsigned m) { return std::popcount(m); }

unsigned mask_of(std::initializer_list<int> sites) {
    unsigned m = 0;
    for (int s : sites) m |= 1u << s;
    return m;
}

ClosedForm form(std::initializer_list<FormTerm> terms) { return ClosedForm{terms}; }

CycleStateTable build_table() {
    CycleStateTable t;
    auto& e = t.entries;
    const double r = kRoot2;

    auto set = [](RingState& s, int idx, int n, double excess) {
        s.index = idx;
        s.n_particles = n;
        s.excess_energy = excess;
    };

    // --- vacuum ---
    set(e[0], 0, 0, 0.0);
    e[0].coeffs[0] = 1.0;
    e[0].weight = form({{1, 0, 0, 0}});
    e[0].removal = form({});
    e[0].addition = form({{1, 1, -1, 0}});

    // --- one particle ---
    set(e[1], 1, 1, 0.0);
    e[1].coeffs[mask_of({0})] = 0.5;
    e[1].coeffs[mask_of({1})] = -0.5;
    e[1].coeffs[mask_of({2})] = 0.5;
    e[1].coeffs[mask_of({3})] = -0.5;
    e[1].weight = form({{1, 0, 1, 0}});
    e[1].removal = form({});
    e[1].addition = form({{0, 1, -1, 0}});

    set(e[2], 2, 1, 2.0);
    e[2].coeffs[mask_of({0})] = 1 / r;
    e[2].coeffs[mask_of({2})] = -1 / r;
    set(e[3], 3, 1, 2.0);
    e[3].coeffs[mask_of({1})] = 1 / r;
    e[3].coeffs[mask_of({3})] = -1 / r;
    for (int i : {2, 3}) {
        e[i].weight = form({{1, 0, 1, 0}});
        e[i].removal = form({{0, 0.5, 1, 0}});
        e[i].addition = form({{0, 0.25, 1, 0}, {1.5, 0.75, -1, 0}});
    }

    set(e[4], 4, 1, 4.0);
    for (int s = 0; s < 4; ++s) e[4].coeffs[mask_of({s})] = 0.5;
    e[4].weight = form({{1, 0, 1, 0}});
    e[4].removal = form({{1, 0, 1, 0}});
    e[4].addition = form({{-0.5, 0.5, 1, 0}, {0.5, 1, -1, 0}});

    // --- two particles ---
    const unsigned diag13 = mask_of({0, 2}), diag24 = mask_of({1, 3});
    const unsigned adj[4] = {mask_of({0, 1}), mask_of({1, 2}), mask_of({2, 3}), mask_of({0, 3})};

    set(e[5], 5, 2, 4.0 - 2 * r); // bound pair, lowest two-particle level
    e[5].coeffs[diag13] = 0.5;
    e[5].coeffs[diag24] = 0.5;
    for (unsigned m : adj) e[5].coeffs[m] = -1 / (2 * r);
    e[5].weight = form({{1, 0, 0, 0}});
    e[5].removal = form({{-0.5, 1, -1, 0}});
    e[5].addition = form({{-0.5, 1, -1, -1}});

    set(e[6], 6, 2, 4.0);
    e[6].coeffs[diag13] = 1 / r;
    e[6].coeffs[diag24] = -1 / r;
    set(e[7], 7, 2, 4.0);
    e[7].coeffs[mask_of({0, 1})] = 1 / r;
    e[7].coeffs[mask_of({2, 3})] = -1 / r;
    set(e[8], 8, 2, 4.0);
    e[8].coeffs[mask_of({0, 3})] = 1 / r;
    e[8].coeffs[mask_of({1, 2})] = -1 / r;
    for (int i : {6, 7, 8}) {
        e[i].weight = form({{1, 0, 2, 0}});
        e[i].removal = form({{1, 0.5, 1, 0}});
        e[i].addition = form({{1, 0.5, 1, -1}});
    }

    set(e[9], 9, 2, 4.0);
    e[9].coeffs[mask_of({0, 3})] = 0.5;
    e[9].coeffs[mask_of({1, 2})] = 0.5;
    e[9].coeffs[mask_of({0, 1})] = -0.5;
    e[9].coeffs[mask_of({2, 3})] = -0.5;
    e[9].weight = form({{1, 0, 2, 0}});
    e[9].removal = form({{0, 1, 1, 0}});
    e[9].addition = form({{0, 1, 1, -1}});

    set(e[10], 10, 2, 4.0 + 2 * r);
    e[10].coeffs[diag13] = 0.5;
    e[10].coeffs[diag24] = 0.5;
    for (unsigned m : adj) e[10].coeffs[m] = 1 / (2 * r);
    e[10].weight = form({{1, 0, 2, 0}});
    e[10].removal = form({{0.5, 1, 1, 0}});
    e[10].addition = form({{0.5, 1, 1, -1}});

    // --- three particles (hole picture: hole at position p) ---
    const unsigned hole[4] = {mask_of({1, 2, 3}), mask_of({0, 2, 3}), mask_of({0, 1, 3}),
                              mask_of({0, 1, 2})};

    set(e[11], 11, 3, 4.0);
    e[11].coeffs[hole[0]] = 0.5;
    e[11].coeffs[hole[1]] = -0.5;
    e[11].coeffs[hole[2]] = 0.5;
    e[11].coeffs[hole[3]] = -0.5;
    e[11].weight = form({{1, 0, 1, 1}});
    e[11].removal = form({{0, 1, -1, 1}});
    e[11].addition = form({});

    set(e[12], 12, 3, 6.0);
    e[12].coeffs[hole[0]] = 1 / r;
    e[12].coeffs[hole[2]] = -1 / r;
    set(e[13], 13, 3, 6.0);
    e[13].coeffs[hole[1]] = 1 / r;
    e[13].coeffs[hole[3]] = -1 / r;
    for (int i : {12, 13}) {
        e[i].weight = form({{1, 0, 1, 1}});
        e[i].removal = form({{0, 0.25, 1, 1}, {1.5, 0.75, -1, 1}});
        e[i].addition = form({{0, 0.5, -1, 1}});
    }

    set(e[14], 14, 3, 8.0);
    for (unsigned m : hole) e[14].coeffs[m] = 0.5;
    e[14].weight = form({{1, 0, 1, 1}});
    e[14].removal = form({{-0.5, 0.5, 1, 1}, {0.5, 1, -1, 1}});
    e[14].addition = form({{1, 0, -1, 1}});

    // --- full cycle ---
    set(e[15], 15, 4, 8.0);
    e[15].coeffs[15] = 1.0;
    e[15].weight = form({{1, 0, 2, 0}});
    e[15].removal = form({{1, 1, 1, -1}});
    e[15].addition = form({});

    for (int i = 0; i < 16; ++i) t.sector_indices[e[i].n_particles].push_back(i);
    return t;
}

Mat16 build_removal_site_matrix(int corner) {
    auto [a, b] = corner_positions(corner);
    Mat16 p = Mat16::Zero();
    for (unsigned m = 0; m < 16; ++m) {
        for (int s : {a, b})
            if (m & (1u << s)) p(m & ~(1u << s), m) += 1.0;
    }
    return p;
}

struct PairMatrices {
    std::array<Mat16, 4> removal;
    std::array<Mat16, 4> addition;
};

const PairMatrices& pair_matrices() {
    static const PairMatrices pm = [] {
        PairMatrices out;
        const Mat16& basis = table_basis_matrix();
        for (int c = 0; c < 4; ++c) {
            out.removal[c] = basis.transpose() * build_removal_site_matrix(c) * basis;
            out.addition[c] = out.removal[c].transpose();
        }
        return out;
    }();
    return pm;
}

} // namespace

double ClosedForm::eval(double alpha, double d) const {
    double v = 0.0;
    for (const auto& term : terms)
        v += (term.rational + term.root2 * kRoot2) * std::pow(alpha, term.alpha_pow) *
             std::pow(d, term.d_pow);
    return v;
}

const CycleStateTable& cycle_table() {
    static const CycleStateTable table = build_table();
    return table;
}

const Mat16& table_basis_matrix() {
    static const Mat16 basis = [] {
        Mat16 b = Mat16::Zero();
        const auto& table = cycle_table();
        for (int i = 0; i < 16; ++i)
            for (int m = 0; m < 16; ++m) b(m, i) = table.entries[i].coeffs[m];
        return b;
    }();
    return basis;
}

Mat16 one_cycle_hamiltonian(double t) {
    Mat16 h = Mat16::Zero();
    constexpr int bonds[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    for (unsigned m = 0; m < 16; ++m) {
        for (auto [a, b] : bonds) {
            for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
                if ((m & (1u << x)) && !(m & (1u << y)))
                    h((m & ~(1u << x)) | (1u << y), m) += t;
            }
        }
    }
    return h;
}

std::array<int, 2> corner_positions(int corner) { return {(corner + 3) % 4, corner}; }

const Mat16& pair_removal_matrix(int corner) { return pair_matrices().removal[corner]; }
const Mat16& pair_addition_matrix(int corner) { return pair_matrices().addition[corner]; }

PairWeights pair_weights_bruteforce(int state, int corner, double alpha, double d) {
    if (state < 0 || state >= 16) throw ValidityError("table state index out of range");
    if (corner < 0 || corner >= 4) throw ValidityError("corner index out of range");
    if (!(alpha > 0) || !(d > 0)) throw ValidityError("weights need alpha > 0 and d > 0");

    const auto& table = cycle_table();
    std::array<double, 16> s;
    for (int j = 0; j < 16; ++j) s[j] = table.entries[j].weight.eval(alpha, d);

    const Mat16& rem = pair_removal_matrix(corner);
    const Mat16& add = pair_addition_matrix(corner);
    PairWeights w;
    for (int j = 0; j < 16; ++j) {
        // column `state` holds the expansion of the moved state; the diagonal
        // similarity scales each target amplitude by s_source / s_target
        w.removal += std::abs(rem(j, state)) * s[state] / s[j];
        w.addition += std::abs(add(j, state)) * s[state] / s[j];
    }
    return w;
}

TableCheck verify_table(double tolerance) { return verify_table(cycle_table(), tolerance); }

TableCheck verify_table(const CycleStateTable& table, double tolerance) {
    TableCheck check;
    Mat16 h = one_cycle_hamiltonian(1.0);

    Mat16 basis = Mat16::Zero();
    for (int i = 0; i < 16; ++i)
        for (int m = 0; m < 16; ++m) basis(m, i) = table.entries[i].coeffs[m];
    check.max_gram_deviation =
        (basis.transpose() * basis - Mat16::Identity()).cwiseAbs().maxCoeff();

    // per-sector dense eigenvalues for the nearest-level comparison
    std::array<std::vector<double>, 5> sector_eigs;
    for (int n = 0; n <= 4; ++n) {
        std::vector<int> masks;
        for (unsigned m = 0; m < 16; ++m)
            if (popcount(m) == n) masks.push_back(static_cast<int>(m));
        Eigen::MatrixXd block(masks.size(), masks.size());
        for (size_t i = 0; i < masks.size(); ++i)
            for (size_t j = 0; j < masks.size(); ++j) block(i, j) = h(masks[i], masks[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
        sector_eigs[n].assign(es.eigenvalues().data(),
                              es.eigenvalues().data() + es.eigenvalues().size());
    }

    check.all_ok = true;
    for (int i = 0; i < 16; ++i) {
        const auto& entry = table.entries[i];
        Vec16 v;
        for (int m = 0; m < 16; ++m) v(m) = entry.coeffs[m];
        const double energy = entry.excess_energy - 2.0 * entry.n_particles;
        check.residuals[i] = (h * v - energy * v).norm();
        double dev = std::numeric_limits<double>::infinity();
        for (double lam : sector_eigs[entry.n_particles])
            dev = std::min(dev, std::abs(lam - energy));
        check.eigenvalue_dev[i] = dev;
        check.ok[i] = check.residuals[i] < tolerance && dev < tolerance &&
                      std::abs(v.norm() - 1.0) < tolerance;
        check.all_ok = check.all_ok && check.ok[i];
        check.max_residual = std::max(check.max_residual, check.residuals[i]);
    }
    return check;
}

} // namespace flatband
