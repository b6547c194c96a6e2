#include "flatband/lattice.hpp"
#include "flatband/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace flatband {

namespace {

std::pair<int, int> edge_key(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

// Off-axis reflection for traversal (axis, off, axis, off): swaps edges 0<->3
// and 1<->2.
constexpr std::array<int, 4> kAxisReflection = {3, 2, 1, 0};

} // namespace

std::vector<Violation> validate(const QuadLattice& lattice) {
    std::vector<Violation> out;
    const int m = static_cast<int>(lattice.cycles.size());

    for (int c = 0; c < m; ++c) {
        const auto& cy = lattice.cycles[c];
        std::set<int> distinct(cy.begin(), cy.end());
        bool in_range = std::all_of(cy.begin(), cy.end(), [&](int v) {
            return v >= 0 && v < lattice.n_vertices;
        });
        if (distinct.size() != 4 || !in_range) {
            std::ostringstream msg;
            msg << "cycle " << c << " does not have 4 distinct in-range vertices";
            out.push_back({Violation::Kind::bad_cycle, false, msg.str()});
        }
    }
    if (has_errors(out)) return out; // structural damage, skip derived checks

    // edge-disjointness
    std::map<std::pair<int, int>, int> edge_owner;
    for (int c = 0; c < m; ++c) {
        for (int p = 0; p < 4; ++p) {
            auto key = edge_key(lattice.cycles[c][p], lattice.cycles[c][(p + 1) % 4]);
            auto [it, inserted] = edge_owner.emplace(key, c);
            if (!inserted) {
                std::ostringstream msg;
                msg << "edge (" << key.first << "," << key.second << ") shared by cycles "
                    << it->second << " and " << c;
                out.push_back({Violation::Kind::duplicate_edge, false, msg.str()});
            }
        }
    }

    // cycle adjacency from shared vertices
    std::map<int, std::vector<int>> cycles_at_vertex;
    for (int c = 0; c < m; ++c)
        for (int v : lattice.cycles[c]) cycles_at_vertex[v].push_back(c);

    std::map<std::pair<int, int>, int> shared_count;
    for (const auto& [v, cs] : cycles_at_vertex)
        for (size_t i = 0; i < cs.size(); ++i)
            for (size_t j = i + 1; j < cs.size(); ++j)
                if (cs[i] != cs[j]) ++shared_count[{cs[i], cs[j]}];

    for (const auto& [pair, cnt] : shared_count) {
        if (cnt >= 2) {
            std::ostringstream msg;
            msg << "cycles " << pair.first << " and " << pair.second << " share " << cnt
                << " vertices; neighbour counts treat them as one adjacency";
            out.push_back({Violation::Kind::multi_shared, true, msg.str()});
        }
    }

    if (m >= 2) {
        std::vector<std::set<int>> adj(m);
        for (const auto& [pair, cnt] : shared_count) {
            adj[pair.first].insert(pair.second);
            adj[pair.second].insert(pair.first);
        }
        for (int c = 0; c < m; ++c) {
            if (adj[c].empty()) {
                std::ostringstream msg;
                msg << "cycle " << c << " shares no vertex with any other cycle";
                out.push_back({Violation::Kind::isolated_cycle, false, msg.str()});
            }
        }
        // connectivity (BFS)
        std::vector<char> seen(m, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            for (int d : adj[c])
                if (!seen[d]) {
                    seen[d] = 1;
                    ++reached;
                    stack.push_back(d);
                }
        }
        if (reached != m)
            out.push_back({Violation::Kind::disconnected, false,
                           "cycle-adjacency graph is not connected"});
    }
    return out;
}

bool has_errors(const std::vector<Violation>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Violation& v) { return !v.warning; });
}

LineGraphModel line_graph(const QuadLattice& lattice) {
    auto diags = validate(lattice);
    if (has_errors(diags)) {
        std::string msg = "invalid lattice:";
        for (const auto& d : diags)
            if (!d.warning) msg += " [" + d.message + "]";
        throw InvalidLattice(msg);
    }

    LineGraphModel model;
    model.n_cycles = static_cast<int>(lattice.cycles.size());
    model.reflection_perms = lattice.reflection_perms;
    model.global_symmetry = lattice.global_symmetry;

    for (int c = 0; c < model.n_cycles; ++c) {
        const auto& cy = lattice.cycles[c];
        for (int p = 0; p < 4; ++p) model.sites.push_back({c, p, cy[p], cy[(p + 1) % 4]});
        for (int p = 0; p < 4; ++p) model.t_bonds.emplace_back(4 * c + p, 4 * c + (p + 1) % 4);
    }

    // corner couplings: one record per (cycle pair, shared vertex), ordered by
    // vertex id then cycle ids for determinism
    std::map<int, std::vector<std::pair<int, int>>> slots_at_vertex; // vertex -> (cycle, slot)
    for (int c = 0; c < model.n_cycles; ++c)
        for (int k = 0; k < 4; ++k) slots_at_vertex[lattice.cycles[c][k]].push_back({c, k});

    std::set<std::pair<int, int>> adjacent_pairs;
    for (const auto& [v, slots] : slots_at_vertex) {
        for (size_t i = 0; i < slots.size(); ++i) {
            for (size_t j = i + 1; j < slots.size(); ++j) {
                auto [ca, ka] = slots[i];
                auto [cb, kb] = slots[j];
                if (ca == cb) continue;
                if (ca > cb) {
                    std::swap(ca, cb);
                    std::swap(ka, kb);
                }
                model.corner_couplings.push_back({ca, cb, ka, kb, v});
                adjacent_pairs.insert({ca, cb});
            }
        }
    }
    std::sort(model.corner_couplings.begin(), model.corner_couplings.end(),
              [](const CornerCoupling& x, const CornerCoupling& y) {
                  return std::tie(x.cycle_a, x.cycle_b, x.vertex) <
                         std::tie(y.cycle_a, y.cycle_b, y.vertex);
              });

    for (const auto& cc : model.corner_couplings) {
        const int ea[2] = {(cc.corner_a + 3) % 4, cc.corner_a};
        const int eb[2] = {(cc.corner_b + 3) % 4, cc.corner_b};
        for (int x : ea)
            for (int y : eb)
                model.tp_bonds.push_back({4 * cc.cycle_a + x, 4 * cc.cycle_b + y, cc.vertex});
    }

    model.c_of_cycle.assign(model.n_cycles, 0);
    for (const auto& [a, b] : adjacent_pairs) {
        ++model.c_of_cycle[a];
        ++model.c_of_cycle[b];
    }
    model.c_max = model.n_cycles
                      ? *std::max_element(model.c_of_cycle.begin(), model.c_of_cycle.end())
                      : 0;
    return model;
}

QuadLattice build_chequerboard_chain(int n_cycles, Boundary boundary) {
    if (n_cycles < 1) throw InvalidLattice("chequerboard chain needs at least one cycle");
    if (boundary == Boundary::periodic && n_cycles < 3)
        throw InvalidLattice("periodic chequerboard chain needs at least 3 cycles");

    const bool periodic = boundary == Boundary::periodic;
    const int n_axis = periodic ? n_cycles : n_cycles + 1;

    QuadLattice lat;
    lat.n_vertices = n_axis + 2 * n_cycles;
    for (int a = 0; a < n_cycles; ++a) {
        int left = a;
        int right = periodic ? (a + 1) % n_axis : a + 1;
        int top = n_axis + 2 * a;
        int bottom = n_axis + 2 * a + 1;
        lat.cycles.push_back({left, top, right, bottom});
        lat.reflection_perms.push_back(kAxisReflection);
    }
    lat.global_symmetry = periodic;
    return lat;
}

QuadLattice build_rhombi_star(int n) {
    if (n < 2) throw InvalidLattice("rhombi star needs at least 2 rhombi");
    QuadLattice lat;
    lat.n_vertices = 1 + 3 * n;
    const int centre = 0;
    for (int k = 0; k < n; ++k) {
        int p = 1 + 3 * k, tip = 2 + 3 * k, q = 3 + 3 * k;
        lat.cycles.push_back({centre, p, tip, q});
        lat.reflection_perms.push_back(kAxisReflection);
    }
    lat.global_symmetry = true; // rotation about the centre
    return lat;
}

QuadLattice build_lir(LirVariant variant, int nx, int ny) {
    QuadLattice lat;
    if (variant == LirVariant::four_one) {
        // square lattice of hubs, one rhombus per hub edge
        if (nx < 3 || ny < 3)
            throw InvalidLattice("four_one variant needs nx, ny >= 3");
        auto hub = [&](int x, int y) {
            return ((y % ny + ny) % ny) * nx + ((x % nx + nx) % nx);
        };
        const int n_hubs = nx * ny;
        int next = n_hubs;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                for (int dir = 0; dir < 2; ++dir) { // 0: +x, 1: +y
                    int u = hub(x, y);
                    int v = dir == 0 ? hub(x + 1, y) : hub(x, y + 1);
                    int p = next++, q = next++;
                    lat.cycles.push_back({u, p, v, q});
                    lat.reflection_perms.push_back(kAxisReflection);
                }
            }
        }
        lat.n_vertices = next;
    } else {
        // honeycomb lattice of hubs, two rhombi in series per hub edge
        if (nx < 2 || ny < 2)
            throw InvalidLattice("three_two variant needs nx, ny >= 2");
        auto hub = [&](int x, int y, int s) {
            return 2 * (((y % ny + ny) % ny) * nx + ((x % nx + nx) % nx)) + s;
        };
        int next = 2 * nx * ny;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const int b = hub(x, y, 1);
                const int ends[3] = {hub(x, y, 0), hub(x + 1, y, 0), hub(x, y + 1, 0)};
                for (int k = 0; k < 3; ++k) {
                    int mid = next++;
                    int p1 = next++, q1 = next++, p2 = next++, q2 = next++;
                    lat.cycles.push_back({b, p1, mid, q1});
                    lat.cycles.push_back({mid, p2, ends[k], q2});
                    lat.reflection_perms.push_back(kAxisReflection);
                    lat.reflection_perms.push_back(kAxisReflection);
                }
            }
        }
        lat.n_vertices = next;
    }
    lat.global_symmetry = (nx == ny);
    return lat;
}

QuadLattice build_chequerboard_lattice(int nx, int ny) {
    if (nx < 3 || ny < 3)
        throw InvalidLattice("chequerboard lattice needs nx, ny >= 3");
    // square (a,b) shares its left/right corners with squares (a-1,b)/(a+1,b)
    // and its bottom/top corners with (a,b-1)/(a,b+1)
    auto wrap = [](int k, int n) { return (k % n + n) % n; };
    auto right_corner = [&](int a, int b) { return wrap(a, nx) * ny + wrap(b, ny); };
    auto top_corner = [&](int a, int b) { return nx * ny + wrap(a, nx) * ny + wrap(b, ny); };

    QuadLattice lat;
    lat.n_vertices = 2 * nx * ny;
    for (int a = 0; a < nx; ++a) {
        for (int b = 0; b < ny; ++b) {
            int left = right_corner(a - 1, b);
            int right = right_corner(a, b);
            int top = top_corner(a, b);
            int bottom = top_corner(a, b - 1);
            lat.cycles.push_back({left, top, right, bottom});
        }
    }
    // no local reflection axis: all four corners are shared
    lat.global_symmetry = false;
    return lat;
}

} // namespace flatband
