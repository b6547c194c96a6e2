#pragma once

#include "flatband/lattice.hpp"

#include <string>

namespace flatband {

// Lattice file format: {"n_vertices": <int>, "cycles": [[a,b,c,d], ...]}.
// Generic input carries no declared symmetry axes.
QuadLattice lattice_from_json(const std::string& text);
std::string lattice_to_json(const QuadLattice& lattice);

// Builder spec strings, e.g. "chequerboard:4:periodic", "rhombi:3",
// "lir41:3:3", "lir32:2:2", "chequerboard2d:3:3".
QuadLattice lattice_from_spec(const std::string& spec);

} // namespace flatband
