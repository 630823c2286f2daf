#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fluxgraph/boundary_conditions.hpp"
#include "fluxgraph/diagonal_unitary.hpp"
#include "fluxgraph/gauge_group.hpp"
#include "fluxgraph/homology.hpp"
#include "fluxgraph/spectrum.hpp"
#include "fluxgraph/vector_potential.hpp"

namespace fluxgraph {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed model file: a graph plus optional boundary conditions, potential
/// and unitary sections, all in canonical coordinate order.
struct ModelFile {
    MetricGraph graph;
    std::optional<BoundaryConditions> boundary;
    std::optional<VectorPotential> potential;
    std::optional<DiagonalUnitary> unitary;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

inline const Json& member(const Json& j, const std::string& where, const std::string& key) {
    if (!j.is_object()) parse_fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) parse_fail(where, "missing field '" + key + "'");
    return *it;
}

inline std::string get_string(const Json& j, const std::string& where) {
    if (!j.is_string()) parse_fail(where, "expected a string");
    return j.get<std::string>();
}

inline double get_number(const Json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, "expected a number");
    return j.get<double>();
}

inline Complex get_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) parse_fail(where, "expected a [re, im] pair");
    return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
}

inline CMat get_matrix(const Json& j, std::size_t k, const std::string& where) {
    if (!j.is_array() || j.size() != k)
        parse_fail(where, "expected " + std::to_string(k) + " rows");
    CMat m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < k; ++r) {
        const Json& row = j[r];
        const std::string row_where = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != k)
            parse_fail(row_where, "expected " + std::to_string(k) + " entries");
        for (std::size_t c = 0; c < k; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                get_complex(row[c], row_where + "[" + std::to_string(c) + "]");
    }
    return m;
}

}  // namespace detail

inline MetricGraph parse_graph(const Json& j) {
    using detail::get_number;
    using detail::get_string;
    using detail::member;
    std::vector<std::string> vertices;
    for (const auto& v : member(j, "graph", "vertices"))
        vertices.push_back(get_string(v, "graph.vertices"));

    std::vector<InternalEdge> internal;
    if (j.contains("internal_edges"))
        for (const auto& e : j.at("internal_edges")) {
            InternalEdge edge;
            edge.id = get_string(member(e, "graph.internal_edges", "id"), "graph.internal_edges.id");
            edge.from = get_string(member(e, "graph.internal_edges", "from"), "graph.internal_edges.from");
            edge.to = get_string(member(e, "graph.internal_edges", "to"), "graph.internal_edges.to");
            edge.length = get_number(member(e, "graph.internal_edges", "length"), "graph.internal_edges.length");
            internal.push_back(std::move(edge));
        }

    std::vector<ExternalEdge> external;
    if (j.contains("external_edges"))
        for (const auto& e : j.at("external_edges")) {
            ExternalEdge edge;
            edge.id = get_string(member(e, "graph.external_edges", "id"), "graph.external_edges.id");
            edge.vertex = get_string(member(e, "graph.external_edges", "vertex"), "graph.external_edges.vertex");
            external.push_back(std::move(edge));
        }
    return MetricGraph(std::move(vertices), std::move(internal), std::move(external));
}

inline VectorPotential parse_potential(const Json& j, const MetricGraph& graph) {
    VectorPotential pot = VectorPotential::zero(graph);
    const Json& edges = detail::member(j, "potential", "edges");
    if (!edges.is_object()) detail::parse_fail("potential.edges", "expected an object keyed by edge id");
    for (const auto& [id, pieces] : edges.items()) {
        const std::string where = "potential.edges." + id;
        std::vector<PotentialPiece>* slot = nullptr;
        for (std::size_t i = 0; i < graph.internal_count(); ++i)
            if (graph.internal_edges()[i].id == id) slot = &pot.internal_pieces[i];
        for (std::size_t e = 0; e < graph.external_count(); ++e)
            if (graph.external_edges()[e].id == id) slot = &pot.external_pieces[e];
        if (slot == nullptr) detail::parse_fail(where, "unknown edge id");
        if (!pieces.is_array()) detail::parse_fail(where, "expected a list of [length, value] pairs");
        for (const auto& piece : pieces) {
            if (!piece.is_array() || piece.size() != 2)
                detail::parse_fail(where, "expected a [length, value] pair");
            slot->push_back({detail::get_number(piece[0], where + "[0]"),
                             detail::get_number(piece[1], where + "[1]")});
        }
    }
    return pot;
}

inline DiagonalUnitary parse_unitary(const Json& j, std::size_t k) {
    const Json& phases = detail::member(j, "unitary", "phases");
    if (!phases.is_array() || phases.size() != k)
        detail::parse_fail("unitary.phases", "expected " + std::to_string(k) + " phases");
    RVec v(static_cast<Eigen::Index>(k));
    for (std::size_t s = 0; s < k; ++s)
        v(static_cast<Eigen::Index>(s)) = detail::get_number(phases[s], "unitary.phases");
    return DiagonalUnitary(v);
}

inline ModelFile parse_model(const Json& j) {
    if (!j.is_object()) detail::parse_fail("model", "expected a top-level object");
    MetricGraph graph = parse_graph(detail::member(j, "model", "graph"));
    ModelFile model{std::move(graph), std::nullopt, std::nullopt, std::nullopt};

    const std::size_t k = model.graph.boundary_dim();
    if (j.contains("boundary_conditions")) {
        const Json& bc = j.at("boundary_conditions");
        CMat a = detail::get_matrix(detail::member(bc, "boundary_conditions", "a"), k, "boundary_conditions.a");
        CMat b = detail::get_matrix(detail::member(bc, "boundary_conditions", "b"), k, "boundary_conditions.b");
        model.boundary.emplace(std::move(a), std::move(b));
    }
    if (j.contains("potential")) {
        model.potential = parse_potential(j.at("potential"), model.graph);
        try {
            check_potential(*model.potential, model.graph);
        } catch (const std::invalid_argument& err) {
            detail::parse_fail("potential", err.what());
        }
    }
    if (j.contains("unitary")) model.unitary = parse_unitary(j.at("unitary"), k);
    return model;
}

inline ModelFile parse_model_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid JSON: ") + err.what());
    }
    return parse_model(j);
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_model_text(buffer.str());
}

// --- report construction ----------------------------------------------------

namespace detail {
inline double clean_zero(double x) { return x == 0.0 ? 0.0 : x; }  // drop -0.0
}

inline Json complex_to_json(const Complex& z) {
    return Json::array({detail::clean_zero(z.real()), detail::clean_zero(z.imag())});
}

inline Json matrix_to_json(const CMat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Phase vector in ModelFile syntax, normalized to (-pi, pi].
inline Json unitary_to_json(const DiagonalUnitary& u) {
    Json phases = Json::array();
    for (std::size_t s = 0; s < u.size(); ++s)
        phases.push_back(detail::clean_zero(wrap_angle(u.phase(s))));
    return Json{{"unitary", {{"phases", phases}}}};
}

inline Json check_report(const ModelFile& model, const ToleranceConfig& tol) {
    if (!model.boundary) throw std::domain_error("check: model has no boundary_conditions section");
    const BoundaryCoordinateMap map(model.graph);
    const bool sa = check_self_adjoint(*model.boundary, tol);
    Json report;
    report["self_adjoint"] = sa;
    if (!sa) {
        report["local"] = nullptr;
        return report;
    }
    const bool local = is_local(*model.boundary, map, tol);
    report["local"] = local;
    if (local) {
        const VertexBlocks blocks = local_decomposition(*model.boundary, map, tol);
        Json vb = Json::array();
        for (std::size_t v = 0; v < map.vertex_count(); ++v)
            vb.push_back(Json{{"vertex", model.graph.vertices()[v]},
                              {"a", matrix_to_json(blocks.a_blocks[v])},
                              {"b", matrix_to_json(blocks.b_blocks[v])}});
        report["vertex_blocks"] = std::move(vb);
    }
    return report;
}

inline Json isotropy_report(const ModelFile& model, const std::optional<DiagonalUnitary>& u,
                            const ToleranceConfig& tol) {
    if (!model.boundary) throw std::domain_error("isotropy: model has no boundary_conditions section");
    const BoundaryCoordinateMap map(model.graph);
    const IsotropyDescription iso = isotropy_identity_component(*model.boundary, map, tol);
    Json report;
    report["dimension"] = iso.dimension;
    report["contains_w0"] = iso.contains_w0;
    report["equals_u"] = iso.equals_u;
    Json basis = Json::array();
    for (Eigen::Index c = 0; c < iso.tangent_basis.cols(); ++c) {
        Json dir = Json::array();
        for (Eigen::Index r = 0; r < iso.tangent_basis.rows(); ++r)
            dir.push_back(detail::clean_zero(iso.tangent_basis(r, c)));
        basis.push_back(std::move(dir));
    }
    report["tangent_basis"] = std::move(basis);
    if (u) report["membership"] = isotropy_membership(*model.boundary, *u, tol);
    return report;
}

inline Json homology_report(const ModelFile& model) {
    const CycleBasis basis = cycle_basis(model.graph);
    Json report;
    report["dimension"] = basis.cycles.size();
    Json tree = Json::array();
    for (std::size_t e : basis.tree_edges) tree.push_back(model.graph.internal_edges()[e].id);
    report["spanning_tree"] = std::move(tree);
    Json cycles = Json::array();
    for (std::size_t p = 0; p < basis.cycles.size(); ++p) {
        Json coeff = Json::array();
        for (Eigen::Index i = 0; i < basis.cycles[p].coefficients.size(); ++i)
            coeff.push_back(basis.cycles[p].coefficients(i));
        cycles.push_back(Json{{"chord", model.graph.internal_edges()[basis.chords[p]].id},
                              {"coefficients", std::move(coeff)}});
    }
    report["cycles"] = std::move(cycles);
    return report;
}

inline Json flux_report(const ModelFile& model, const std::optional<DiagonalUnitary>& override_unitary) {
    const BoundaryCoordinateMap map(model.graph);
    std::optional<DiagonalUnitary> u = override_unitary;
    if (!u) u = model.unitary;
    if (!u && model.potential) u = induced_unitary(*model.potential, model.graph);
    if (!u) throw std::domain_error("flux: model provides neither a unitary nor a potential");
    const CycleBasis basis = cycle_basis(model.graph);
    Json fluxes = Json::array();
    for (std::size_t p = 0; p < basis.cycles.size(); ++p)
        fluxes.push_back(Json{{"chord", model.graph.internal_edges()[basis.chords[p]].id},
                              {"phase", flux_map(*u, basis.cycles[p], map)}});
    return Json{{"fluxes", std::move(fluxes)}};
}

inline Json equal_report(const ModelFile& m1, const ModelFile& m2, const ToleranceConfig& tol) {
    if (!m1.boundary || !m2.boundary)
        throw std::domain_error("equal: both models need a boundary_conditions section");
    if (m1.boundary->size() != m2.boundary->size())
        throw std::domain_error("equal: boundary dimensions differ");
    return Json{{"equal", operators_equal(*m1.boundary, *m2.boundary, tol)}};
}

inline Json spectrum_report(const ModelFile& model, double k_max, double grid_step,
                            const ToleranceConfig& tol) {
    if (!model.boundary) throw std::domain_error("spectrum: model has no boundary_conditions section");
    const VectorPotential pot =
        model.potential ? *model.potential : VectorPotential::zero(model.graph);
    const SecularProblem problem(model.graph, *model.boundary, pot, tol);
    const SpectrumResult result = eigenvalues_scan(problem, k_max, grid_step);
    Json roots = Json::array();
    for (const auto& root : result.roots)
        roots.push_back(Json{{"k", root.k}, {"residual", root.residual}});
    return Json{{"k_max", result.k_max}, {"grid_step", result.grid_step}, {"roots", std::move(roots)}};
}

/// Plain-text rendering of a report: one indented "key: value" line per leaf.
inline void render_text(const Json& j, std::ostream& out, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !value.empty() && !value[0].is_number())) {
                out << pad << key << ":\n";
                render_text(value, out, indent + 1);
            } else {
                out << pad << key << ": " << value.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& value : j) {
            if (value.is_object() || value.is_array()) {
                out << pad << "-\n";
                render_text(value, out, indent + 1);
            } else {
                out << pad << "- " << value.dump() << "\n";
            }
        }
    } else {
        out << pad << j.dump() << "\n";
    }
}

}  // namespace fluxgraph
