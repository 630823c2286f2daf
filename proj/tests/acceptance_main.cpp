// Acceptance suite: one timed pass/fail line per criterion, nonzero exit if
// any criterion fails. Tolerances are pinned in the checks themselves.

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fluxgraph/gauge_group.hpp"
#include "fluxgraph/homology.hpp"
#include "fluxgraph/spectrum.hpp"
#include "fluxgraph/vector_potential.hpp"
#include "support/generators.hpp"

using namespace fluxgraph;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Check = std::function<Outcome()>;

DiagonalUnitary random_w0_element(std::mt19937& rng, const BoundaryCoordinateMap& map) {
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    RVec phases(static_cast<Eigen::Index>(map.size()));
    for (std::size_t v = 0; v < map.vertex_count(); ++v) {
        const double phi = dist(rng);
        for (std::size_t s : map.vertex_slots(v)) phases(static_cast<Eigen::Index>(s)) = phi;
    }
    return DiagonalUnitary(phases);
}

DiagonalUnitary random_u0_element(std::mt19937& rng, const BoundaryCoordinateMap& map) {
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    RVec phases(static_cast<Eigen::Index>(map.size()));
    for (std::size_t e = 0; e < map.external_count(); ++e)
        phases(static_cast<Eigen::Index>(map.external_slot(e))) = dist(rng);
    for (std::size_t i = 0; i < map.internal_count(); ++i) {
        const double gamma = dist(rng);
        phases(static_cast<Eigen::Index>(map.edge_start_slot(i))) = gamma;
        phases(static_cast<Eigen::Index>(map.edge_end_slot(i))) = gamma;
    }
    return DiagonalUnitary(phases);
}

VectorPotential random_potential(std::mt19937& rng, const MetricGraph& graph) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    VectorPotential pot = VectorPotential::zero(graph);
    for (std::size_t i = 0; i < graph.internal_count(); ++i) {
        const double a = graph.internal_edges()[i].length;
        const int pieces = count(rng);
        for (int p = 0; p < pieces; ++p)
            pot.internal_pieces[i].push_back({a / pieces, value(rng)});
    }
    for (std::size_t e = 0; e < graph.external_count(); ++e)
        pot.external_pieces[e].push_back({1.0, value(rng)});
    return pot;
}

// 1. Self-adjointness classifier on the canonical families.
Outcome criterion_self_adjoint() {
    std::mt19937 rng(1001);
    Outcome out;
    int cases = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const auto graph = testgen::random_connected_graph(rng);
        const auto map = boundary_coordinate_map(graph);
        const auto couplings = testgen::random_couplings(rng, map.vertex_count(), 10.0);
        if (!check_self_adjoint(standard_conditions(map, couplings))) out.pass = false;
        if (!check_self_adjoint(dirichlet(map))) out.pass = false;
        const auto k = static_cast<Eigen::Index>(map.size());
        if (!check_self_adjoint(BoundaryConditions(CMat::Zero(k, k), CMat::Identity(k, k))))
            out.pass = false;  // Neumann
        cases += 3;
    }
    // rank-deficient pairs must be rejected
    for (std::size_t k : {2, 4, 6}) {
        const auto n = static_cast<Eigen::Index>(k);
        CMat a = CMat::Identity(n, n), b = CMat::Zero(n, n);
        a(n - 1, n - 1) = 0.0;  // one joint zero row
        if (check_self_adjoint(BoundaryConditions(a, b))) out.pass = false;
        if (check_self_adjoint(BoundaryConditions(CMat::Zero(n, n), CMat::Zero(n, n)))) out.pass = false;
        cases += 2;
    }
    out.detail = std::to_string(cases) + " exact classifications";
    return out;
}

// 2. Isotropy dimensions: |V| for standard, n+2m for Dirichlet, 1 for the
//    cross-coupled pair.
Outcome criterion_isotropy_dimensions() {
    std::mt19937 rng(1002);
    Outcome out;
    for (int trial = 0; trial < 20; ++trial) {
        const auto graph = testgen::random_connected_graph(rng, {.max_vertices = 6, .max_internal = 8});
        const auto map = boundary_coordinate_map(graph);
        const auto bc = standard_conditions(map, testgen::random_couplings(rng, map.vertex_count()));
        if (isotropy_identity_component(bc, map).dimension != map.vertex_count()) {
            out.pass = false;
            out.detail = "standard conditions gave d != |V|";
        }
    }
    const auto fig1_map = boundary_coordinate_map(testgen::fig1_graph());
    if (isotropy_identity_component(dirichlet(fig1_map), fig1_map).dimension != fig1_map.size()) {
        out.pass = false;
        out.detail = "Dirichlet gave d != n+2m";
    }
    if (isotropy_identity_component(testgen::nonlocal_cross_bc(), fig1_map).dimension != 1) {
        out.pass = false;
        out.detail = "cross-coupled pair gave d != 1";
    }
    if (out.pass) out.detail = "20 random graphs, Dirichlet, cross pair";
    return out;
}

// 3. Rotation-equivalence grid for the cross-coupled pair: equal exactly on
//    the diagonal of a 12x12 phase grid.
Outcome criterion_rotation_grid() {
    const auto bc = testgen::nonlocal_cross_bc();
    Outcome out;
    int wrong = 0;
    for (int a1 = 0; a1 < 12; ++a1)
        for (int a2 = 0; a2 < 12; ++a2) {
            const double p1 = two_pi * a1 / 12.0, p2 = two_pi * a2 / 12.0;
            const CMat um = testgen::cross_bc_unitary(p1, p2).matrix();
            const bool equal = operators_equal(bc, BoundaryConditions(bc.a() * um, bc.b() * um),
                                               ToleranceConfig{.eq = 1e-9});
            if (equal != (a1 == a2)) ++wrong;
        }
    out.pass = (wrong == 0);
    out.detail = std::to_string(wrong) + " misclassifications on the 144-point grid";
    return out;
}

// 4. Factorization over U0*W0 succeeds exactly for flux-trivial unitaries and
//    the parametrization has dimension |E|+|I|+|V|-1.
Outcome criterion_kernel_law() {
    std::mt19937 rng(1004);
    Outcome out;
    for (int trial = 0; trial < 50; ++trial) {
        const auto graph = testgen::random_connected_graph(rng);
        const auto map = boundary_coordinate_map(graph);
        DiagonalUnitary u = testgen::random_unitary(rng, map.size());
        if (trial % 2 == 0) u = random_u0_element(rng, map) * random_w0_element(rng, map);

        bool trivial = true;
        for (const auto& cycle : cycle_basis(graph).cycles)
            if (angle_distance(flux_map(u, cycle, map)) > 1e-9) trivial = false;
        const auto split = factorize_U0W0(u, map);
        if (split.has_value() != trivial) {
            out.pass = false;
            out.detail = "factorization disagrees with the flux test";
        }
        if (split && !(in_U0(split->u0, map) && in_W0(split->w0, map) &&
                       (split->u0 * split->w0).same_element(u))) {
            out.pass = false;
            out.detail = "returned factors are not a valid U0*W0 split";
        }
        const std::size_t expected =
            graph.external_count() + graph.internal_count() + graph.vertex_count() - 1;
        if (u0w0_dimension(map) != expected) {
            out.pass = false;
            out.detail = "parametrization rank mismatch";
        }
    }
    if (out.pass) out.detail = "50 samples, both directions";
    return out;
}

// 5. Homology rank |I| - |V| + 1 on random multigraphs.
Outcome criterion_homology_dimension() {
    std::mt19937 rng(1005);
    Outcome out;
    std::vector<MetricGraph> graphs;
    graphs.push_back(testgen::ring_graph());   // tadpole
    graphs.push_back(testgen::theta_graph());  // parallel edges
    graphs.push_back(MetricGraph({"a"}, {{"t1", "a", "a", 1.0}, {"t2", "a", "a", 0.5}}, {}));
    while (graphs.size() < 50) graphs.push_back(testgen::random_connected_graph(rng));
    for (const auto& graph : graphs) {
        const auto basis = cycle_basis(graph);
        const std::size_t expected = graph.internal_count() - graph.vertex_count() + 1;
        if (basis.cycles.size() != expected) out.pass = false;
        for (const auto& cycle : basis.cycles)
            if (!boundary_op(cycle, graph).isZero()) out.pass = false;
    }
    out.detail = "50 multigraphs with tadpoles and parallel edges";
    return out;
}

// 6. realize_flux round-trips random targets.
Outcome criterion_flux_roundtrip() {
    std::mt19937 rng(1006);
    std::uniform_real_distribution<double> target(-std::numbers::pi, std::numbers::pi);
    Outcome out;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto graph = testgen::random_connected_graph(rng);
        const auto map = boundary_coordinate_map(graph);
        const auto basis = cycle_basis(graph);
        FluxAssignment targets;
        for (std::size_t p = 0; p < basis.cycles.size(); ++p) targets.targets.push_back(target(rng));
        const auto u = realize_flux(graph, targets);
        for (std::size_t p = 0; p < basis.cycles.size(); ++p)
            worst = std::max(worst,
                             angle_distance(flux_map(u, basis.cycles[p], map), targets.targets[p]));
    }
    out.pass = worst < 1e-12;
    std::ostringstream detail;
    detail << "max deviation " << worst;
    out.detail = detail.str();
    return out;
}

// 7. Trees: every unitary factorizes and gauge elimination returns the same
//    operator for standard conditions.
Outcome criterion_trees() {
    std::mt19937 rng(1007);
    Outcome out;
    for (int trial = 0; trial < 20; ++trial) {
        const auto graph = testgen::random_connected_graph(rng, {.max_vertices = 6, .tree_only = true});
        const auto map = boundary_coordinate_map(graph);
        const auto bc = standard_conditions(map, testgen::random_couplings(rng, map.vertex_count()));
        const auto u = testgen::random_unitary(rng, map.size());
        if (!factorize_U0W0(u, map).has_value()) {
            out.pass = false;
            out.detail = "a unitary failed to factorize on a tree";
        }
        const auto pot = random_potential(rng, graph);
        if (!operators_equal(gauge_eliminate(bc, pot, graph), bc)) {
            out.pass = false;
            out.detail = "gauge elimination changed the operator on a tree";
        }
    }
    if (out.pass) out.detail = "20 random trees";
    return out;
}

// 8. Projector sum identity P_A (P_A+P_B)^{-1} P_B = (1/2) P_{Ran A cap Ran B}.
Outcome criterion_projector_identity() {
    std::mt19937 rng(1008);
    Outcome out;
    double worst = 0.0;
    int done = 0;
    while (done < 200) {
        const std::size_t k = 3 + static_cast<std::size_t>(done % 8);
        std::uniform_int_distribution<std::size_t> rank_a(1, k);
        const std::size_t ra = rank_a(rng);
        std::uniform_int_distribution<std::size_t> rank_b(std::max<std::size_t>(1, k - ra), k);
        const CMat a = testgen::random_rank_matrix(rng, k, ra);
        const CMat b = testgen::random_rank_matrix(rng, k, rank_b(rng));
        CMat stacked(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(2 * k));
        stacked << a, b;
        if (numerical_rank(stacked) < k) continue;  // needs maximal rank
        const CMat pa = range(a).projector();
        const CMat pb = range(b).projector();
        const CMat lhs = pa * (pa + pb).partialPivLu().solve(pb);
        worst = std::max(worst, (lhs - 0.5 * intersect(range(a), range(b)).projector()).norm());
        ++done;
    }
    out.pass = worst < 1e-9;
    std::ostringstream detail;
    detail << "200 pairs, max residual " << worst;
    out.detail = detail.str();
    return out;
}

// 9. The recovered C satisfies CA = AU, CB = BU and stays invertible.
Outcome criterion_c_matrix() {
    std::mt19937 rng(1009);
    Outcome out;
    double worst_residual = 0.0, worst_sigma = 1.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::optional<BoundaryConditions> bc;
        std::optional<DiagonalUnitary> u;
        switch (trial % 5) {
            case 0: {
                const auto graph = testgen::random_connected_graph(rng);
                const auto map = boundary_coordinate_map(graph);
                bc = standard_conditions(map, testgen::random_couplings(rng, map.vertex_count()));
                u = random_w0_element(rng, map);
                break;
            }
            case 1: {
                const std::size_t k = 3 + static_cast<std::size_t>(trial % 5);
                bc = dirichlet(k);
                u = testgen::random_unitary(rng, k);
                break;
            }
            case 2: {
                const auto graph = testgen::random_connected_graph(rng);
                const auto map = boundary_coordinate_map(graph);
                bc = testgen::random_local_bc(rng, map);
                u = random_w0_element(rng, map);
                break;
            }
            case 3: {
                // (A, 0) with invertible non-unitary A: C = A U A^{-1} is a
                // genuinely non-unitary member matrix
                const std::size_t k = 3 + static_cast<std::size_t>(trial % 4);
                bc = BoundaryConditions(testgen::random_invertible(rng, k),
                                        CMat::Zero(static_cast<Eigen::Index>(k),
                                                   static_cast<Eigen::Index>(k)));
                u = testgen::random_unitary(rng, k);
                break;
            }
            default: {
                bc = testgen::nonlocal_cross_bc();
                std::uniform_real_distribution<double> dist(-3.0, 3.0);
                const double phi = dist(rng);
                u = testgen::cross_bc_unitary(phi, phi);
                break;
            }
        }
        const CMat c = build_C(*bc, *u);
        const CMat um = u->matrix();
        worst_residual = std::max(worst_residual, (c * bc->a() - bc->a() * um).norm() +
                                                      (c * bc->b() - bc->b() * um).norm());
        Eigen::JacobiSVD<CMat> svd(c);
        worst_sigma = std::min(worst_sigma, svd.singularValues()(svd.singularValues().size() - 1));
    }
    out.pass = worst_residual < 1e-9 && worst_sigma > 1e-8;
    std::ostringstream detail;
    detail << "100 members, max residual " << worst_residual << ", min sigma " << worst_sigma;
    out.detail = detail.str();
    return out;
}

// 10. Flux periodicity of the ring spectrum against the twisted-periodic
//     closed form.
Outcome criterion_ring_periodicity() {
    Outcome out;
    const double k_max = 5.0, grid = 0.005, circumference = two_pi;
    auto scan = [&](double theta) {
        const auto graph = testgen::ring_graph(circumference);
        const auto map = boundary_coordinate_map(graph);
        VectorPotential pot = VectorPotential::zero(graph);
        pot.internal_pieces[0] = {{circumference, theta / circumference}};
        return eigenvalues_scan(SecularProblem(graph, standard_conditions(map, 0.0), pot), k_max, grid);
    };
    auto closed_form = [&](double theta) {
        std::vector<double> ks;
        for (int n = -40; n <= 40; ++n) {
            const double k = std::abs(two_pi * n + theta) / circumference;
            if (k > 1e-12 && k <= k_max) ks.push_back(k);
        }
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-9; }),
                 ks.end());
        return ks;
    };

    double worst = 0.0;
    for (double theta : {0.0, 1.0, std::numbers::pi, 2.0, two_pi + 1.0}) {
        const auto result = scan(theta);
        const auto expected = closed_form(theta);
        if (result.roots.size() != expected.size()) {
            out.pass = false;
            out.detail = "root count mismatch against the closed form";
            return out;
        }
        for (std::size_t j = 0; j < expected.size(); ++j)
            worst = std::max(worst, std::abs(result.roots[j].k - expected[j]));

        const auto shifted = scan(theta + two_pi);
        const auto cmp = compare_spectra(result, shifted, 1e-6);
        if (cmp.unmatched != 0) {
            out.pass = false;
            out.detail = "2*pi-shifted flux changed the spectrum";
            return out;
        }
        worst = std::max(worst, cmp.max_deviation);
    }
    out.pass = worst < 1e-6;
    std::ostringstream detail;
    detail << "5 fluxes + shifts, max deviation " << worst;
    out.detail = detail.str();
    return out;
}

// 11. Gauge invariance of spectra on random compact graphs.
Outcome criterion_gauge_invariant_spectra() {
    std::mt19937 rng(1011);
    Outcome out;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto graph = testgen::random_connected_graph(
            rng, {.max_vertices = 4, .max_internal = 5, .compact = true});
        const auto map = boundary_coordinate_map(graph);
        const auto bc = standard_conditions(map, testgen::random_couplings(rng, map.vertex_count()));
        const auto pot = random_potential(rng, graph);
        const SecularProblem magnetic(graph, bc, pot);
        const SecularProblem eliminated(graph, gauge_eliminate(bc, pot, graph),
                                        VectorPotential::zero(graph));
        const auto cmp = compare_spectra(eigenvalues_scan(magnetic, 5.0, 0.01),
                                         eigenvalues_scan(eliminated, 5.0, 0.01), 1e-6);
        if (cmp.unmatched != 0) {
            out.pass = false;
            out.detail = "root sets differ";
            return out;
        }
        worst = std::max(worst, cmp.max_deviation);
    }
    out.pass = worst < 1e-6;
    std::ostringstream detail;
    detail << "10 graphs, max deviation " << worst;
    out.detail = detail.str();
    return out;
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0 = untimed
    Check run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "self-adjointness classifier", 0.1, criterion_self_adjoint},
        {2, "isotropy group dimensions", 2.0, criterion_isotropy_dimensions},
        {3, "rotation-equivalence phase grid", 0.0, criterion_rotation_grid},
        {4, "factorization kernel law", 1.0, criterion_kernel_law},
        {5, "homology rank", 0.0, criterion_homology_dimension},
        {6, "flux realization round-trip", 0.0, criterion_flux_roundtrip},
        {7, "tree gauge triviality", 0.0, criterion_trees},
        {8, "projector sum identity", 0.0, criterion_projector_identity},
        {9, "C-matrix recovery", 0.0, criterion_c_matrix},
        {10, "ring flux periodicity", 5.0, criterion_ring_periodicity},
        {11, "gauge-invariant spectra", 0.0, criterion_gauge_invariant_spectra},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& err) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + err.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s) {
            outcome.pass = false;
            outcome.detail += " [exceeded " + std::to_string(criterion.time_limit_s) + " s budget]";
        }
        if (!outcome.pass) ++failures;
        std::printf("%s  criterion %2d: %s (%s, %.3f s)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name.c_str(), outcome.detail.c_str(), elapsed);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
