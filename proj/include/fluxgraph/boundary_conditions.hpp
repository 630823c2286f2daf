#pragma once

#include <stdexcept>
#include <vector>

#include "fluxgraph/linalg.hpp"
#include "fluxgraph/metric_graph.hpp"

namespace fluxgraph {

/// Matrix pair (A, B) encoding the vertex conditions A psi + B psi' = 0 on
/// the canonical boundary coordinates.
class BoundaryConditions {
public:
    BoundaryConditions(CMat a, CMat b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.rows() != a_.cols() || b_.rows() != b_.cols() || a_.rows() != b_.rows())
            throw std::invalid_argument("BoundaryConditions: A and B must be square and equally sized");
        if (!a_.allFinite() || !b_.allFinite())
            throw std::invalid_argument("BoundaryConditions: entries must be finite");
    }

    const CMat& a() const { return a_; }
    const CMat& b() const { return b_; }
    std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }

    /// Horizontal stack (A|B), k x 2k.
    CMat stacked() const {
        CMat s(a_.rows(), 2 * a_.cols());
        s << a_, b_;
        return s;
    }

private:
    CMat a_, b_;
};

/// Self-adjointness test: AB† Hermitian and (A|B) of maximal rank k.
inline bool check_self_adjoint(const BoundaryConditions& bc, const ToleranceConfig& tol = {}) {
    const CMat ab = bc.a() * bc.b().adjoint();
    const double scale = std::max(1.0, bc.a().norm() * bc.b().norm());
    if ((ab - ab.adjoint()).norm() > tol.eq * scale) return false;
    return numerical_rank(bc.stacked(), tol) == bc.size();
}

namespace detail {

inline void require_self_adjoint(const BoundaryConditions& bc, const ToleranceConfig& tol,
                                 const char* what) {
    if (!check_self_adjoint(bc, tol))
        throw std::domain_error(std::string(what) + ": boundary conditions are not self-adjoint");
}

}  // namespace detail

/// Canonical symplectic matrix J = [[0, I], [-I, 0]] on C^{2k}.
inline CMat symplectic_form(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(k);
    CMat j = CMat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = CMat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -CMat::Identity(n, n);
    return j;
}

/// The maximal isotropic subspace M(A,B) = Ker(A|B) in C^{2k}.
inline Subspace isotropic_subspace(const BoundaryConditions& bc, const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "isotropic_subspace");
    return kernel(bc.stacked(), tol);
}

/// Whether (A1,B1) and (A2,B2) define the same operator, i.e. the same
/// subspace Ker(A|B) (equivalently, (A2,B2) = (C A1, C B1) for invertible C).
inline bool operators_equal(const BoundaryConditions& bc1, const BoundaryConditions& bc2,
                            const ToleranceConfig& tol = {}) {
    if (bc1.size() != bc2.size())
        throw std::invalid_argument("operators_equal: size mismatch");
    return subspace_equal(kernel(bc1.stacked(), tol), kernel(bc2.stacked(), tol), tol);
}

namespace detail {

/// M(A,B) cap (L_v + L_v) for one vertex, as a subspace of C^{2k}.
inline Subspace vertex_trace(const Subspace& m, const std::vector<std::size_t>& slots,
                             std::size_t k, const ToleranceConfig& tol) {
    CMat coord = CMat::Zero(2 * static_cast<Eigen::Index>(k), 2 * static_cast<Eigen::Index>(slots.size()));
    for (std::size_t r = 0; r < slots.size(); ++r) {
        coord(static_cast<Eigen::Index>(slots[r]), static_cast<Eigen::Index>(r)) = 1.0;
        coord(static_cast<Eigen::Index>(slots[r] + k), static_cast<Eigen::Index>(slots.size() + r)) = 1.0;
    }
    return intersect(m, Subspace(coord, tol), tol);
}

}  // namespace detail

/// Local boundary conditions decompose M(A,B) over the vertex subspaces:
/// sum_v dim(M cap (L_v + L_v)) = k.
inline bool is_local(const BoundaryConditions& bc, const BoundaryCoordinateMap& map,
                     const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "is_local");
    if (bc.size() != map.size())
        throw std::invalid_argument("is_local: boundary conditions do not match the graph");
    const Subspace m = kernel(bc.stacked(), tol);
    std::size_t total = 0;
    for (std::size_t v = 0; v < map.vertex_count(); ++v)
        total += detail::vertex_trace(m, map.vertex_slots(v), map.size(), tol).dim();
    return total == bc.size();
}

/// Per-vertex blocks (A_v, B_v) acting on L_v, plus the invertible mixing
/// matrix C with C*(A|B) equal to the reassembled blocks.
struct VertexBlocks {
    std::vector<CMat> a_blocks;
    std::vector<CMat> b_blocks;
    CMat mixing;
};

/// Assemble per-vertex blocks into global matrices on canonical coordinates.
/// Rows are grouped vertex by vertex; block column r acts on slot
/// vertex_slots(v)[r].
inline BoundaryConditions assemble_local(const BoundaryCoordinateMap& map,
                                         const std::vector<CMat>& a_blocks,
                                         const std::vector<CMat>& b_blocks) {
    if (a_blocks.size() != map.vertex_count() || b_blocks.size() != map.vertex_count())
        throw std::invalid_argument("assemble_local: one block pair per vertex required");
    const auto k = static_cast<Eigen::Index>(map.size());
    CMat a = CMat::Zero(k, k), b = CMat::Zero(k, k);
    Eigen::Index row = 0;
    for (std::size_t v = 0; v < map.vertex_count(); ++v) {
        const auto& slots = map.vertex_slots(v);
        const auto d = static_cast<Eigen::Index>(slots.size());
        if (a_blocks[v].rows() != d || a_blocks[v].cols() != d ||
            b_blocks[v].rows() != d || b_blocks[v].cols() != d)
            throw std::invalid_argument("assemble_local: block size must equal deg(v)");
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c) {
                a(row + r, static_cast<Eigen::Index>(slots[c])) = a_blocks[v](r, c);
                b(row + r, static_cast<Eigen::Index>(slots[c])) = b_blocks[v](r, c);
            }
        row += d;
    }
    return BoundaryConditions(std::move(a), std::move(b));
}

/// Recover per-vertex blocks of local boundary conditions. Each block pair is
/// read off as the annihilator of M(A,B) cap (L_v + L_v) in vertex coordinates.
/// Throws if the conditions are not local.
inline VertexBlocks local_decomposition(const BoundaryConditions& bc, const BoundaryCoordinateMap& map,
                                        const ToleranceConfig& tol = {}) {
    detail::require_self_adjoint(bc, tol, "local_decomposition");
    if (bc.size() != map.size())
        throw std::invalid_argument("local_decomposition: boundary conditions do not match the graph");
    const std::size_t k = map.size();
    const Subspace m = kernel(bc.stacked(), tol);

    VertexBlocks blocks;
    std::size_t total = 0;
    for (std::size_t v = 0; v < map.vertex_count(); ++v) {
        const auto& slots = map.vertex_slots(v);
        const auto d = static_cast<Eigen::Index>(slots.size());
        const Subspace trace = detail::vertex_trace(m, slots, k, tol);
        total += trace.dim();
        if (trace.dim() != slots.size()) continue;

        // Restrict the trace basis to the 2*deg(v) vertex coordinates; the
        // restriction keeps orthonormality because the basis is supported there.
        CMat local(2 * d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            local.row(r) = trace.basis().row(static_cast<Eigen::Index>(slots[static_cast<std::size_t>(r)]));
            local.row(d + r) = trace.basis().row(static_cast<Eigen::Index>(slots[static_cast<std::size_t>(r)] + k));
        }
        const Subspace annihilator = kernel(local.adjoint(), tol);
        const CMat rows = annihilator.basis().adjoint();  // d x 2d
        blocks.a_blocks.push_back(rows.leftCols(d));
        blocks.b_blocks.push_back(rows.rightCols(d));
    }
    if (total != k)
        throw std::domain_error("local_decomposition: boundary conditions are not local");

    const BoundaryConditions assembled = assemble_local(map, blocks.a_blocks, blocks.b_blocks);
    blocks.mixing = assembled.stacked() * pseudoinverse(bc.stacked(), tol);
    return blocks;
}

/// Continuity/derivative-sum conditions with coupling strength k_v per vertex
/// (delta coupling; k_v = 0 gives standard Kirchhoff conditions).
inline BoundaryConditions standard_conditions(const BoundaryCoordinateMap& map,
                                              const std::vector<double>& coupling) {
    if (coupling.size() != map.vertex_count())
        throw std::invalid_argument("standard_conditions: one coupling per vertex required");
    std::vector<CMat> a_blocks, b_blocks;
    for (std::size_t v = 0; v < map.vertex_count(); ++v) {
        const auto d = static_cast<Eigen::Index>(map.vertex_slots(v).size());
        CMat a = CMat::Zero(d, d), b = CMat::Zero(d, d);
        for (Eigen::Index r = 0; r + 1 < d; ++r) {
            a(r, r) = 1.0;
            a(r, r + 1) = -1.0;
        }
        a(d - 1, d - 1) = coupling[v];
        b.row(d - 1).setOnes();
        a_blocks.push_back(std::move(a));
        b_blocks.push_back(std::move(b));
    }
    return assemble_local(map, a_blocks, b_blocks);
}

inline BoundaryConditions standard_conditions(const BoundaryCoordinateMap& map, double coupling = 0.0) {
    return standard_conditions(map, std::vector<double>(map.vertex_count(), coupling));
}

/// Dirichlet conditions (A, B) = (I, 0).
inline BoundaryConditions dirichlet(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(k);
    return BoundaryConditions(CMat::Identity(n, n), CMat::Zero(n, n));
}

inline BoundaryConditions dirichlet(const BoundaryCoordinateMap& map) { return dirichlet(map.size()); }

}  // namespace fluxgraph
