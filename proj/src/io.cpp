#include "flatband/io.hpp"
#include "flatband/errors.hpp"

#include <json.hpp>

#include <sstream>
#include <vector>

namespace flatband {

QuadLattice lattice_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidLattice(std::string("lattice file is not valid JSON: ") + e.what());
    }
    if (!j.contains("n_vertices") || !j.contains("cycles"))
        throw InvalidLattice("lattice file needs 'n_vertices' and 'cycles'");

    QuadLattice lat;
    lat.n_vertices = j.at("n_vertices").get<int>();
    for (const auto& cy : j.at("cycles")) {
        if (!cy.is_array() || cy.size() != 4)
            throw InvalidLattice("each cycle must list exactly 4 vertex ids");
        lat.cycles.push_back({cy[0].get<int>(), cy[1].get<int>(), cy[2].get<int>(),
                              cy[3].get<int>()});
    }
    return lat;
}

std::string lattice_to_json(const QuadLattice& lattice) {
    nlohmann::ordered_json j;
    j["n_vertices"] = lattice.n_vertices;
    auto& cycles = j["cycles"] = nlohmann::ordered_json::array();
    for (const auto& cy : lattice.cycles) cycles.push_back({cy[0], cy[1], cy[2], cy[3]});
    return j.dump(2);
}

QuadLattice lattice_from_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw InvalidLattice("empty lattice spec");

    auto num = [&](std::size_t i) {
        if (i >= parts.size()) throw InvalidLattice("lattice spec '" + spec + "' is incomplete");
        try {
            return std::stoi(parts[i]);
        } catch (...) {
            throw InvalidLattice("bad number in lattice spec '" + spec + "'");
        }
    };

    const std::string& name = parts[0];
    if (name == "chequerboard") {
        if (parts.size() != 3) throw InvalidLattice("usage: chequerboard:<n>:<open|periodic>");
        Boundary b;
        if (parts[2] == "open")
            b = Boundary::open;
        else if (parts[2] == "periodic")
            b = Boundary::periodic;
        else
            throw InvalidLattice("boundary must be 'open' or 'periodic'");
        return build_chequerboard_chain(num(1), b);
    }
    if (name == "rhombi") return build_rhombi_star(num(1));
    if (name == "lir41") return build_lir(LirVariant::four_one, num(1), num(2));
    if (name == "lir32") return build_lir(LirVariant::three_two, num(1), num(2));
    if (name == "chequerboard2d") return build_chequerboard_lattice(num(1), num(2));
    throw InvalidLattice("unknown lattice builder '" + name + "'");
}

} // namespace flatband
