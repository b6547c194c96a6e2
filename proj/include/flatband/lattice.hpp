#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace flatband {

enum class Boundary { open, periodic };
enum class LirVariant { four_one, three_two };

// Base graph given as an edge-disjoint union of quadrilaterals. Each cycle is
// an ordered list of 4 vertex ids; the traversal order fixes the edge
// positions 0..3 (edge p joins vertex p and vertex (p+1)%4).
struct QuadLattice {
    int n_vertices = 0;
    std::vector<std::array<int, 4>> cycles;

    // Per-cycle position permutation of the local reflection that leaves the
    // hopping model invariant (two off-axis sites swapped). Filled by builders
    // that guarantee the symmetry; empty otherwise.
    std::vector<std::array<int, 4>> reflection_perms;

    // Builder-declared global translation/rotation symmetry (exact ground
    // state degeneracy applies).
    bool global_symmetry = false;
};

struct Violation {
    enum class Kind {
        bad_cycle,        // fewer than 4 distinct vertices / id out of range
        duplicate_edge,   // same vertex pair used by two cycles
        disconnected,     // cycle-adjacency graph not connected
        isolated_cycle,   // a cycle sharing no vertex with any other
        multi_shared,     // two cycles sharing >= 2 vertices (warning)
    };
    Kind kind;
    bool warning = false;
    std::string message;
};

std::vector<Violation> validate(const QuadLattice& lattice);
bool has_errors(const std::vector<Violation>& diags);

// One site of the hopping model = one edge of the base graph.
struct LineGraphSite {
    int cycle;
    int position; // 0..3
    int u, v;     // vertex pair of the base graph
};

// Coupling of two cycles at one shared vertex. corner_* is the vertex slot
// (0..3) of the shared vertex inside each cycle; the two incident edge
// positions of slot k are (k+3)%4 and k.
struct CornerCoupling {
    int cycle_a, cycle_b;
    int corner_a, corner_b;
    int vertex;
};

struct TpBond {
    int a, b;   // site indices
    int vertex; // shared vertex of the base graph
};

struct LineGraphModel {
    int n_cycles = 0;
    std::vector<LineGraphSite> sites; // site index = 4*cycle + position
    std::vector<std::pair<int, int>> t_bonds;
    std::vector<TpBond> tp_bonds;
    std::vector<CornerCoupling> corner_couplings; // 4 tp bonds each
    std::vector<int> c_of_cycle;
    int c_max = 0;
    std::vector<std::array<int, 4>> reflection_perms;
    bool global_symmetry = false;

    int n_sites() const { return static_cast<int>(sites.size()); }
};

// Builders. All outputs pass validate() cleanly.
QuadLattice build_chequerboard_chain(int n_cycles, Boundary boundary);
QuadLattice build_rhombi_star(int n);
QuadLattice build_lir(LirVariant variant, int nx, int ny);
QuadLattice build_chequerboard_lattice(int nx, int ny);

// Derives the hopping model. Throws InvalidLattice if validate() reports
// errors. Deterministic: site order is cycle-major, position-minor.
LineGraphModel line_graph(const QuadLattice& lattice);

} // namespace flatband
