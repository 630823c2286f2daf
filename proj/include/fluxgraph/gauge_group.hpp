#pragma once

#include <optional>
#include <vector>

#include "fluxgraph/boundary_conditions.hpp"
#include "fluxgraph/diagonal_unitary.hpp"

namespace fluxgraph {

/// U0: gauge factors with equal phases at both ends of every internal edge
/// (external phases are free). These come from zero vector potentials.
inline bool in_U0(const DiagonalUnitary& u, const BoundaryCoordinateMap& map, double tol = 1e-9) {
    if (u.size() != map.size())
        throw std::invalid_argument("in_U0: size mismatch");
    for (std::size_t i = 0; i < map.internal_count(); ++i)
        if (angle_distance(u.phase(map.edge_start_slot(i)), u.phase(map.edge_end_slot(i))) > tol)
            return false;
    return true;
}

/// W0: phases constant on each vertex subspace L_v.
inline bool in_W0(const DiagonalUnitary& u, const BoundaryCoordinateMap& map, double tol = 1e-9) {
    if (u.size() != map.size())
        throw std::invalid_argument("in_W0: size mismatch");
    for (std::size_t v = 0; v < map.vertex_count(); ++v) {
        const auto& slots = map.vertex_slots(v);
        for (std::size_t r = 1; r < slots.size(); ++r)
            if (angle_distance(u.phase(slots[r]), u.phase(slots[0])) > tol) return false;
    }
    return true;
}

namespace detail {

struct IsotropyData {
    CMat proj_ker_a, proj_ker_b;
    CMat m_primal;       // A* B
    CMat m_dual;         // B* A
    CMat z_primal;       // basis of B^{-1}(Ran A cap Ran B)
    CMat z_dual;         // basis of A^{-1}(Ran A cap Ran B)
    CMat range_overlap;  // basis of Ran A cap Ran B
};

inline IsotropyData isotropy_data(const BoundaryConditions& bc, const ToleranceConfig& tol) {
    IsotropyData d;
    d.proj_ker_a = kernel(bc.a(), tol).projector();
    d.proj_ker_b = kernel(bc.b(), tol).projector();
    const CMat a_pinv = pseudoinverse(bc.a(), tol);
    const CMat b_pinv = pseudoinverse(bc.b(), tol);
    d.m_primal = a_pinv * bc.b();
    d.m_dual = b_pinv * bc.a();
    const Subspace overlap = intersect(range(bc.a(), tol), range(bc.b(), tol), tol);
    d.range_overlap = overlap.basis();
    d.z_primal = preimage(bc.b(), overlap, tol).basis();
    d.z_dual = preimage(bc.a(), overlap, tol).basis();
    return d;
}

inline bool kernels_invariant(const IsotropyData& d, const CVec& u, double tol_eq) {
    const auto k = u.size();
    const CMat um = u.asDiagonal();
    const CMat id = CMat::Identity(k, k);
    return ((id - d.proj_ker_a) * um * d.proj_ker_a).norm() < tol_eq &&
           ((id - d.proj_ker_b) * um * d.proj_ker_b).norm() < tol_eq;
}

inline bool commutator_vanishes(const CMat& m, const CMat& z, const CVec& u, double tol_eq) {
    const double scale = std::max(1.0, m.norm());
    const CMat um = u.asDiagonal();
    const CMat comm = um * m - m * um;
    for (Eigen::Index c = 0; c < z.cols(); ++c)
        if ((comm * z.col(c)).norm() > tol_eq * scale) return false;
    return true;
}

}  // namespace detail

/// Whether U belongs to the isotropy group W(A,B), i.e. whether
/// (A U, B U) defines the same operator as (A, B). Tests (i) invariance of
/// Ker A and Ker B and (ii) [U, A*B] z = 0 on B^{-1}(Ran A cap Ran B); the
/// equivalent dual condition [U, B*A] z = 0 on A^{-1}(...) is evaluated as a
/// cross-check and must agree.
inline bool isotropy_membership(const BoundaryConditions& bc, const DiagonalUnitary& u,
                                const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "isotropy_membership");
    if (u.size() != bc.size())
        throw std::invalid_argument("isotropy_membership: size mismatch");
    const auto data = detail::isotropy_data(bc, tol);
    const CVec diag = u.diagonal();
    if (!detail::kernels_invariant(data, diag, tol.eq)) return false;
    const bool primal = detail::commutator_vanishes(data.m_primal, data.z_primal, diag, tol.eq);
    const bool dual = detail::commutator_vanishes(data.m_dual, data.z_dual, diag, tol.eq);
    if (primal != dual)
        throw std::logic_error("isotropy_membership: primal and dual commutator checks disagree");
    return primal;
}

/// The invertible matrix C = (A U A* + B U B*)(P_{Ran A} + P_{Ran B})^{-1}
/// with C A = A U and C B = B U, for U in the isotropy group.
inline CMat build_C(const BoundaryConditions& bc, const DiagonalUnitary& u,
                    const ToleranceConfig& tol = {}) {
    if (!isotropy_membership(bc, u, tol))
        throw std::domain_error("build_C: unitary is not in the isotropy group");
    const CMat um = u.matrix();
    const CMat a_pinv = pseudoinverse(bc.a(), tol);
    const CMat b_pinv = pseudoinverse(bc.b(), tol);
    const CMat lhs_a = bc.a() * um * a_pinv;
    const CMat lhs_b = bc.b() * um * b_pinv;

    // Compatibility A U A* y = B U B* y on Ran A cap Ran B.
    const auto data = detail::isotropy_data(bc, tol);
    for (Eigen::Index c = 0; c < data.range_overlap.cols(); ++c) {
        const CVec y = data.range_overlap.col(c);
        if (((lhs_a - lhs_b) * y).norm() > tol.eq * std::max(1.0, lhs_a.norm()))
            throw std::logic_error("build_C: compatibility condition violated on Ran A cap Ran B");
    }

    const CMat p_sum = range(bc.a(), tol).projector() + range(bc.b(), tol).projector();
    return (lhs_a + lhs_b) * p_sum.partialPivLu().solve(CMat::Identity(p_sum.rows(), p_sum.cols()));
}

/// Identity component of W(A,B): dimension, an orthonormal real tangent basis
/// at the identity, and the structural flags.
struct IsotropyDescription {
    std::size_t dimension = 0;
    RMat tangent_basis;  // k x dimension, orthonormal columns
    bool contains_w0 = false;
    bool equals_u = false;
};

namespace detail {

/// All membership conditions are linear in the diagonal entries u_j; collect
/// them as complex row functionals, dropping numerically empty rows and
/// normalizing the rest.
inline CMat isotropy_constraint_rows(const BoundaryConditions& bc, const ToleranceConfig& tol) {
    const auto data = isotropy_data(bc, tol);
    const auto k = static_cast<Eigen::Index>(bc.size());
    std::vector<CVec> rows;

    auto add_kernel_rows = [&](const CMat& p) {
        const CMat q = CMat::Identity(k, k) - p;
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) {
                CVec row(k);
                for (Eigen::Index j = 0; j < k; ++j) row(j) = q(a, j) * p(j, b);
                rows.push_back(std::move(row));
            }
    };
    add_kernel_rows(data.proj_ker_a);
    add_kernel_rows(data.proj_ker_b);

    for (Eigen::Index c = 0; c < data.z_primal.cols(); ++c) {
        const CVec z = data.z_primal.col(c);
        const CVec mz = data.m_primal * z;
        for (Eigen::Index a = 0; a < k; ++a) {
            CVec row(k);
            for (Eigen::Index j = 0; j < k; ++j)
                row(j) = (j == a ? mz(a) : Complex(0)) - data.m_primal(a, j) * z(j);
            rows.push_back(std::move(row));
        }
    }

    CMat out(static_cast<Eigen::Index>(rows.size()), k);
    Eigen::Index kept = 0;
    for (auto& row : rows) {
        const double norm = row.norm();
        if (norm < tol.eq) continue;
        out.row(kept++) = row.transpose() / norm;
    }
    out.conservativeResize(kept, k);
    return out;
}

}  // namespace detail

/// Compute the identity component of W(A,B) by solving the linearized
/// membership constraints sum_j c_j theta_j = 0 over real phase directions.
/// Every reported basis direction is verified by exponentiating it at a few
/// parameters and running the exact membership test.
inline IsotropyDescription isotropy_identity_component(const BoundaryConditions& bc,
                                                       const BoundaryCoordinateMap& map,
                                                       const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "isotropy_identity_component");
    if (bc.size() != map.size())
        throw std::invalid_argument("isotropy_identity_component: boundary conditions do not match the graph");
    const auto k = static_cast<Eigen::Index>(bc.size());
    const CMat rows = detail::isotropy_constraint_rows(bc, tol);

    IsotropyDescription out;
    if (rows.rows() == 0) {
        out.dimension = bc.size();
        out.tangent_basis = RMat::Identity(k, k);
    } else {
        RMat real_rows(2 * rows.rows(), k);
        real_rows.topRows(rows.rows()) = rows.real();
        real_rows.bottomRows(rows.rows()) = rows.imag();
        Eigen::JacobiSVD<RMat> svd(real_rows, Eigen::ComputeFullV);
        const double cutoff = tol.rank * svd.singularValues()(0);
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > cutoff) ++rank;
        out.dimension = static_cast<std::size_t>(k - rank);
        out.tangent_basis = svd.matrixV().rightCols(k - rank);
    }

    for (Eigen::Index c = 0; c < out.tangent_basis.cols(); ++c)
        for (double t : {0.0, 0.3, 1.7})
            if (!isotropy_membership(bc, DiagonalUnitary(t * out.tangent_basis.col(c)), tol))
                throw std::logic_error(
                    "isotropy_identity_component: tangent direction does not exponentiate into the group");

    // W0 containment is exact on the linear constraints: W(A,B) contains W0
    // iff every constraint row annihilates the per-vertex indicator vectors.
    out.contains_w0 = true;
    for (std::size_t v = 0; v < map.vertex_count() && out.contains_w0; ++v) {
        CVec indicator = CVec::Zero(k);
        for (std::size_t s : map.vertex_slots(v)) indicator(static_cast<Eigen::Index>(s)) = 1.0;
        if (rows.rows() > 0 && (rows * indicator).lpNorm<Eigen::Infinity>() > tol.eq)
            out.contains_w0 = false;
    }
    out.equals_u = (out.dimension == bc.size());
    return out;
}

/// Result of factoring u = u0 * w0 with u0 in U0 and w0 in W0.
struct U0W0Factorization {
    DiagonalUnitary u0;
    DiagonalUnitary w0;
};

namespace detail {

/// Vertex phases psi with psi_{v+(i)} - psi_{v-(i)} = delta_i propagated over
/// a BFS spanning tree of the internal graph; chords report their mod-2pi
/// mismatch.
struct VertexPotentials {
    std::vector<double> psi;
    std::vector<std::size_t> chords;
    std::vector<double> chord_mismatch;  // wrap(delta - (psi_+ - psi_-)) per chord
};

inline VertexPotentials propagate_vertex_phases(const BoundaryCoordinateMap& map,
                                                const std::vector<double>& delta) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(map.internal_count());
    for (std::size_t i = 0; i < map.internal_count(); ++i) edges.push_back(map.edge_endpoints(i));
    const auto tree = bfs_spanning_tree(map.vertex_count(), edges);

    VertexPotentials out;
    out.psi.assign(map.vertex_count(), 0.0);
    // settle each vertex once its tree parent is settled
    std::vector<bool> done(map.vertex_count(), false);
    if (!out.psi.empty()) done[0] = true;
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t v = 0; v < map.vertex_count(); ++v) {
            if (done[v] || tree.parent_edge[v] < 0) continue;
            const auto e = static_cast<std::size_t>(tree.parent_edge[v]);
            const auto [from, to] = edges[e];
            const std::size_t other = (to == v ? from : to);
            if (!done[other]) continue;
            out.psi[v] = (to == v ? out.psi[from] + delta[e] : out.psi[to] - delta[e]);
            done[v] = true;
            progress = true;
        }
    }
    for (std::size_t e : tree.chords) {
        const auto [from, to] = edges[e];
        out.chords.push_back(e);
        out.chord_mismatch.push_back(wrap_angle(delta[e] - (out.psi[to] - out.psi[from])));
    }
    return out;
}

}  // namespace detail

/// Factor u into a zero-flux gauge u0 and a vertex-constant w0 by solving the
/// mod-2pi system phi_e = beta_e + psi_v(e), phi_i^± = gamma_i + psi_{v±(i)}
/// via spanning-tree propagation. Returns nothing when a chord (or tadpole)
/// makes the system inconsistent, i.e. when u carries nontrivial flux.
inline std::optional<U0W0Factorization> factorize_U0W0(const DiagonalUnitary& u,
                                                       const BoundaryCoordinateMap& map,
                                                       double tol = 1e-9) {
    if (u.size() != map.size())
        throw std::invalid_argument("factorize_U0W0: size mismatch");
    std::vector<double> delta(map.internal_count());
    for (std::size_t i = 0; i < map.internal_count(); ++i)
        delta[i] = u.phase(map.edge_end_slot(i)) - u.phase(map.edge_start_slot(i));
    const auto potentials = detail::propagate_vertex_phases(map, delta);
    for (double mismatch : potentials.chord_mismatch)
        if (std::abs(mismatch) > tol) return std::nullopt;

    RVec w0_phases(map.size());
    for (std::size_t s = 0; s < map.size(); ++s)
        w0_phases(static_cast<Eigen::Index>(s)) = potentials.psi[map.vertex_of_slot(s)];
    const DiagonalUnitary w0{w0_phases};
    const DiagonalUnitary u0 = u * w0.inverse();
    return U0W0Factorization{u0, w0};
}

/// Parametrization matrix of U0*W0: columns are the external gauge phases
/// beta_e, the edge gauge phases gamma_i and the vertex phases psi_v; rows are
/// the k boundary phases they produce.
inline RMat u0w0_system(const BoundaryCoordinateMap& map) {
    const auto k = static_cast<Eigen::Index>(map.size());
    const auto n = map.external_count();
    const auto m = map.internal_count();
    RMat sys = RMat::Zero(k, static_cast<Eigen::Index>(n + m + map.vertex_count()));
    for (std::size_t e = 0; e < n; ++e) {
        sys(static_cast<Eigen::Index>(map.external_slot(e)), static_cast<Eigen::Index>(e)) = 1.0;
        sys(static_cast<Eigen::Index>(map.external_slot(e)),
            static_cast<Eigen::Index>(n + m + map.external_vertex(e))) = 1.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const auto [from, to] = map.edge_endpoints(i);
        sys(static_cast<Eigen::Index>(map.edge_start_slot(i)), static_cast<Eigen::Index>(n + i)) = 1.0;
        sys(static_cast<Eigen::Index>(map.edge_start_slot(i)), static_cast<Eigen::Index>(n + m + from)) = 1.0;
        sys(static_cast<Eigen::Index>(map.edge_end_slot(i)), static_cast<Eigen::Index>(n + i)) = 1.0;
        sys(static_cast<Eigen::Index>(map.edge_end_slot(i)), static_cast<Eigen::Index>(n + m + to)) = 1.0;
    }
    return sys;
}

/// dim(U0 W0) = rank of the parametrization; equals |E| + |I| + |V| - 1.
inline std::size_t u0w0_dimension(const BoundaryCoordinateMap& map, const ToleranceConfig& tol = {}) {
    const RMat sys = u0w0_system(map);
    Eigen::JacobiSVD<RMat> svd(sys);
    if (svd.singularValues().size() == 0) return 0;
    const double cutoff = tol.rank * svd.singularValues()(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++rank;
    return rank;
}

}  // namespace fluxgraph
