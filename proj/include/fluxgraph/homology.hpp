#pragma once

#include <optional>
#include <vector>

#include "fluxgraph/boundary_conditions.hpp"
#include "fluxgraph/diagonal_unitary.hpp"
#include "fluxgraph/gauge_group.hpp"

namespace fluxgraph {

/// 1-chain of the internal graph: integer coefficients n_i over I.
struct ChainVector {
    Eigen::VectorXi coefficients;
};

/// Boundary operator d1: c -> sum_i n_i (sigma_{v+(i)} - sigma_{v-(i)}),
/// returned as integer coefficients over the vertices.
inline Eigen::VectorXi boundary_op(const ChainVector& c, const MetricGraph& graph) {
    if (static_cast<std::size_t>(c.coefficients.size()) != graph.internal_count())
        throw std::invalid_argument("boundary_op: chain length does not match internal edge count");
    Eigen::VectorXi out = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(graph.vertex_count()));
    for (std::size_t i = 0; i < graph.internal_count(); ++i) {
        const auto& edge = graph.internal_edges()[i];
        const auto from = graph.vertex_index(edge.from);
        const auto to = graph.vertex_index(edge.to);
        if (!from || !to) throw std::invalid_argument("boundary_op: edge endpoint unresolved");
        out(static_cast<Eigen::Index>(*to)) += c.coefficients(static_cast<Eigen::Index>(i));
        out(static_cast<Eigen::Index>(*from)) -= c.coefficients(static_cast<Eigen::Index>(i));
    }
    return out;
}

inline bool is_cycle(const ChainVector& c, const BoundaryCoordinateMap& map) {
    if (static_cast<std::size_t>(c.coefficients.size()) != map.internal_count())
        throw std::invalid_argument("is_cycle: chain length does not match internal edge count");
    std::vector<int> net(map.vertex_count(), 0);
    for (std::size_t i = 0; i < map.internal_count(); ++i) {
        const auto [from, to] = map.edge_endpoints(i);
        net[to] += c.coefficients(static_cast<Eigen::Index>(i));
        net[from] -= c.coefficients(static_cast<Eigen::Index>(i));
    }
    for (int v : net)
        if (v != 0) return false;
    return true;
}

/// Fundamental cycle basis of H_1: one cycle per chord of a BFS spanning tree
/// of the internal graph, oriented so the chord carries coefficient +1.
struct CycleBasis {
    std::vector<ChainVector> cycles;
    std::vector<std::size_t> chords;      // chords[p] is the chord of cycles[p]
    std::vector<std::size_t> tree_edges;  // spanning tree edge indices
};

inline CycleBasis cycle_basis(const MetricGraph& graph) {
    const BoundaryCoordinateMap map(graph);  // also validates connectivity
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < map.internal_count(); ++i) edges.push_back(map.edge_endpoints(i));
    const auto tree = detail::bfs_spanning_tree(map.vertex_count(), edges);

    CycleBasis basis;
    basis.tree_edges = tree.tree_edges;
    basis.chords = tree.chords;

    // Tree path from each vertex to the root, as signed edge steps.
    auto path_to_root = [&](std::size_t v, Eigen::VectorXi& coeff, int sign) {
        while (tree.parent_edge[v] >= 0) {
            const auto e = static_cast<std::size_t>(tree.parent_edge[v]);
            const auto [from, to] = edges[e];
            if (to == v) {
                coeff(static_cast<Eigen::Index>(e)) -= sign;  // traverse against orientation
                v = from;
            } else {
                coeff(static_cast<Eigen::Index>(e)) += sign;
                v = to;
            }
        }
    };

    for (std::size_t chord : tree.chords) {
        Eigen::VectorXi coeff = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(map.internal_count()));
        const auto [from, to] = edges[chord];
        coeff(static_cast<Eigen::Index>(chord)) = 1;
        // Close the loop: walk from the chord head back to its tail through
        // the tree (head -> root -> tail cancels on the common part).
        path_to_root(to, coeff, 1);
        path_to_root(from, coeff, -1);
        basis.cycles.push_back({std::move(coeff)});
    }
    return basis;
}

/// Flux homomorphism rho: Phi_U(c) = prod_i exp(i n_i (phi_i^+ - phi_i^-)),
/// returned as a phase in (-pi, pi].
inline double flux_map(const DiagonalUnitary& u, const ChainVector& c,
                       const BoundaryCoordinateMap& map) {
    if (u.size() != map.size())
        throw std::invalid_argument("flux_map: unitary size mismatch");
    if (!is_cycle(c, map))
        throw std::invalid_argument("flux_map: chain is not a cycle");
    double total = 0.0;
    for (std::size_t i = 0; i < map.internal_count(); ++i)
        total += c.coefficients(static_cast<Eigen::Index>(i)) *
                 (u.phase(map.edge_end_slot(i)) - u.phase(map.edge_start_slot(i)));
    return wrap_angle(total);
}

/// Prescribed phases e^{i mu_p} on the basis cycles.
struct FluxAssignment {
    std::vector<double> targets;
};

/// Realize prescribed fluxes exactly: put the whole phase gap mu_p on the
/// chord of cycle p and zero everywhere else. Each fundamental cycle contains
/// exactly its own chord, so the targets are hit without any solve.
inline DiagonalUnitary realize_flux(const MetricGraph& graph, const FluxAssignment& target) {
    const BoundaryCoordinateMap map(graph);
    const CycleBasis basis = cycle_basis(graph);
    if (target.targets.size() != basis.cycles.size())
        throw std::invalid_argument("realize_flux: one target per basis cycle required");
    RVec phases = RVec::Zero(static_cast<Eigen::Index>(map.size()));
    for (std::size_t p = 0; p < basis.chords.size(); ++p)
        phases(static_cast<Eigen::Index>(map.edge_end_slot(basis.chords[p]))) = target.targets[p];
    return DiagonalUnitary(phases);
}

enum class CosetStatus { Same, Different, Undecidable };

/// Decide whether u1 and u2 lie in the same coset of U0*W(A,B). Valid only in
/// the regime W(A,B) = W0 (local conditions whose isotropy group is exactly
/// the vertex torus), where Ker rho = U0*W0 makes flux comparison sufficient.
/// Outside that regime the answer is reported as undecidable rather than
/// guessed.
inline CosetStatus same_coset(const DiagonalUnitary& u1, const DiagonalUnitary& u2,
                              const BoundaryConditions& bc, const MetricGraph& graph,
                              const ToleranceConfig& tol = {}) {
    const BoundaryCoordinateMap map(graph);
    if (!check_self_adjoint(bc, tol) || !is_local(bc, map, tol)) return CosetStatus::Undecidable;
    const IsotropyDescription iso = isotropy_identity_component(bc, map, tol);
    if (iso.dimension != map.vertex_count() || !iso.contains_w0) return CosetStatus::Undecidable;

    for (const auto& cycle : cycle_basis(graph).cycles)
        if (angle_distance(flux_map(u1, cycle, map), flux_map(u2, cycle, map)) > tol.eq)
            return CosetStatus::Different;
    return CosetStatus::Same;
}

}  // namespace fluxgraph
