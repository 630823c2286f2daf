#pragma once

#include <vector>

#include "fluxgraph/boundary_conditions.hpp"
#include "fluxgraph/diagonal_unitary.hpp"
#include "fluxgraph/gauge_group.hpp"
#include "fluxgraph/homology.hpp"

namespace fluxgraph {

/// One constant-value segment of a piecewise vector potential.
struct PotentialPiece {
    double length = 0.0;
    double value = 0.0;  // phase per unit length
};

/// Piecewise-constant magnetic potential. Internal piece lengths must sum to
/// the edge length; an empty piece list means zero potential on that edge.
/// On external lines only the value at x=0 enters the operator data.
struct VectorPotential {
    std::vector<std::vector<PotentialPiece>> internal_pieces;  // size m
    std::vector<std::vector<PotentialPiece>> external_pieces;  // size n

    static VectorPotential zero(const MetricGraph& graph) {
        VectorPotential pot;
        pot.internal_pieces.resize(graph.internal_count());
        pot.external_pieces.resize(graph.external_count());
        return pot;
    }
};

inline void check_potential(const VectorPotential& pot, const MetricGraph& graph, double tol = 1e-9) {
    if (pot.internal_pieces.size() != graph.internal_count() ||
        pot.external_pieces.size() != graph.external_count())
        throw std::invalid_argument("potential does not match the graph's edge lists");
    for (std::size_t i = 0; i < graph.internal_count(); ++i) {
        double total = 0.0;
        for (const auto& piece : pot.internal_pieces[i]) {
            if (!(piece.length > 0.0) || !std::isfinite(piece.value))
                throw std::invalid_argument("potential piece with nonpositive length or nonfinite value");
            total += piece.length;
        }
        const double a = graph.internal_edges()[i].length;
        if (!pot.internal_pieces[i].empty() && std::abs(total - a) > tol * std::max(1.0, a))
            throw std::invalid_argument("potential pieces on edge '" + graph.internal_edges()[i].id +
                                        "' do not sum to the edge length");
    }
    for (const auto& pieces : pot.external_pieces)
        for (const auto& piece : pieces)
            if (!(piece.length > 0.0) || !std::isfinite(piece.value))
                throw std::invalid_argument("potential piece with nonpositive length or nonfinite value");
}

/// Exact integral over internal edge i (sum of piece contributions).
inline double edge_integral(const VectorPotential& pot, std::size_t i) {
    double total = 0.0;
    for (const auto& piece : pot.internal_pieces[i]) total += piece.length * piece.value;
    return total;
}

inline double external_value_at_origin(const VectorPotential& pot, std::size_t e) {
    return pot.external_pieces[e].empty() ? 0.0 : pot.external_pieces[e].front().value;
}

inline double internal_value_at_start(const VectorPotential& pot, std::size_t i) {
    return pot.internal_pieces[i].empty() ? 0.0 : pot.internal_pieces[i].front().value;
}

inline double internal_value_at_end(const VectorPotential& pot, std::size_t i) {
    return pot.internal_pieces[i].empty() ? 0.0 : pot.internal_pieces[i].back().value;
}

/// The boundary diagonal matrix of the potential, ordered like the canonical
/// coordinates: A_e(0), A_i(0), -A_i(a_i).
inline RVec boundary_diagonal(const VectorPotential& pot, const MetricGraph& graph) {
    check_potential(pot, graph);
    RVec d(static_cast<Eigen::Index>(graph.boundary_dim()));
    const auto n = graph.external_count();
    const auto m = graph.internal_count();
    for (std::size_t e = 0; e < n; ++e) d(static_cast<Eigen::Index>(e)) = external_value_at_origin(pot, e);
    for (std::size_t i = 0; i < m; ++i) {
        d(static_cast<Eigen::Index>(n + i)) = internal_value_at_start(pot, i);
        d(static_cast<Eigen::Index>(n + m + i)) = -internal_value_at_end(pot, i);
    }
    return d;
}

/// The gauge unitary induced by the potential with the convention that the
/// gauge function vanishes at x=0 on every edge: phi_e = 0, phi_i^- = 0,
/// phi_i^+ = integral of A_i.
inline DiagonalUnitary induced_unitary(const VectorPotential& pot, const MetricGraph& graph) {
    check_potential(pot, graph);
    const auto n = graph.external_count();
    const auto m = graph.internal_count();
    RVec phases = RVec::Zero(static_cast<Eigen::Index>(graph.boundary_dim()));
    for (std::size_t i = 0; i < m; ++i)
        phases(static_cast<Eigen::Index>(n + m + i)) = edge_integral(pot, i);
    return DiagonalUnitary(phases);
}

/// Boundary data the potential induces: the diagonal matrix entries, the
/// per-edge integrals, and the induced gauge unitary.
struct GaugeData {
    RVec boundary_diagonal;
    std::vector<double> edge_integrals;
    DiagonalUnitary induced;
};

inline GaugeData gauge_data(const VectorPotential& pot, const MetricGraph& graph) {
    std::vector<double> integrals(graph.internal_count());
    for (std::size_t i = 0; i < graph.internal_count(); ++i) integrals[i] = edge_integral(pot, i);
    return GaugeData{boundary_diagonal(pot, graph), std::move(integrals), induced_unitary(pot, graph)};
}

/// Flux of the potential through a cycle: exp(i sum_i n_i * integral(A_i)),
/// returned as a phase in (-pi, pi]. Agrees exactly with
/// flux_map(induced_unitary(pot), c).
inline double flux_of_potential(const VectorPotential& pot, const ChainVector& c,
                                const MetricGraph& graph) {
    check_potential(pot, graph);
    const BoundaryCoordinateMap map(graph);
    if (!is_cycle(c, map)) throw std::invalid_argument("flux_of_potential: chain is not a cycle");
    double total = 0.0;
    for (std::size_t i = 0; i < graph.internal_count(); ++i)
        total += c.coefficients(static_cast<Eigen::Index>(i)) * edge_integral(pot, i);
    return wrap_angle(total);
}

/// The gauge unitary used by gauge_eliminate: the free integration constants
/// are fixed by spanning-tree propagation (chi_i(0) = psi_{v-(i)},
/// chi_e(0) = psi_{v(e)}), so that the result lies in W0 exactly when every
/// basis flux vanishes modulo 2*pi.
inline DiagonalUnitary eliminating_unitary(const VectorPotential& pot, const MetricGraph& graph) {
    check_potential(pot, graph);
    const BoundaryCoordinateMap map(graph);
    std::vector<double> delta(graph.internal_count());
    for (std::size_t i = 0; i < graph.internal_count(); ++i) delta[i] = edge_integral(pot, i);
    const auto potentials = detail::propagate_vertex_phases(map, delta);

    RVec phases(static_cast<Eigen::Index>(map.size()));
    for (std::size_t e = 0; e < map.external_count(); ++e)
        phases(static_cast<Eigen::Index>(map.external_slot(e))) = potentials.psi[map.external_vertex(e)];
    for (std::size_t i = 0; i < map.internal_count(); ++i) {
        const double chi0 = potentials.psi[map.edge_endpoints(i).first];
        phases(static_cast<Eigen::Index>(map.edge_start_slot(i))) = chi0;
        phases(static_cast<Eigen::Index>(map.edge_end_slot(i))) = chi0 + delta[i];
    }
    return DiagonalUnitary(phases);
}

/// Eliminate the potential by a gauge transformation: the magnetic operator
/// with data (A, B, pot) equals the zero-potential operator with boundary
/// conditions (A U_G, B U_G).
inline BoundaryConditions gauge_eliminate(const BoundaryConditions& bc, const VectorPotential& pot,
                                          const MetricGraph& graph, const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "gauge_eliminate");
    if (bc.size() != graph.boundary_dim())
        throw std::invalid_argument("gauge_eliminate: boundary conditions do not match the graph");
    const CMat um = eliminating_unitary(pot, graph).matrix();
    return BoundaryConditions(bc.a() * um, bc.b() * um);
}

}  // namespace fluxgraph
