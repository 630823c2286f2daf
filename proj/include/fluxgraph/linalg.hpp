#pragma once

#include <Eigen/SVD>
#include <stdexcept>

#include "fluxgraph/types.hpp"

namespace fluxgraph {

namespace detail {

inline Eigen::JacobiSVD<CMat> full_svd(const CMat& m) {
    return Eigen::JacobiSVD<CMat>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

/// Number of singular values above the relative cutoff.
inline std::size_t svd_rank(const Eigen::JacobiSVD<CMat>& svd, double rel_cutoff) {
    if (svd.singularValues().size() == 0) return 0;
    const double cutoff = rel_cutoff * svd.singularValues()(0);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    return r;
}

}  // namespace detail

/// Subspace of C^ambient stored as an orthonormal column basis.
class Subspace {
public:
    Subspace(CMat orthonormal_basis, const ToleranceConfig& tol = {})
        : basis_(std::move(orthonormal_basis)) {
        if (basis_.cols() > 0) {
            const CMat gram = basis_.adjoint() * basis_;
            const double defect = (gram - CMat::Identity(basis_.cols(), basis_.cols())).norm();
            if (defect > tol.orth * std::max<double>(1.0, std::sqrt(double(basis_.cols()))))
                throw std::invalid_argument("Subspace basis is not orthonormal");
        }
    }

    static Subspace zero(std::size_t ambient) { return Subspace(CMat::Zero(ambient, 0)); }
    static Subspace full(std::size_t ambient) {
        return Subspace(CMat::Identity(static_cast<Eigen::Index>(ambient), static_cast<Eigen::Index>(ambient)));
    }

    /// Orthonormalize the column span of an arbitrary matrix, truncating
    /// directions below the relative rank cutoff.
    static Subspace from_span(const CMat& span, const ToleranceConfig& tol = {}) {
        if (span.cols() == 0 || span.rows() == 0) return zero(span.rows());
        auto svd = detail::full_svd(span);
        const std::size_t r = detail::svd_rank(svd, tol.rank);
        return Subspace(svd.matrixU().leftCols(r), tol);
    }

    std::size_t ambient() const { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
    const CMat& basis() const { return basis_; }

    CMat projector() const { return basis_ * basis_.adjoint(); }

    bool contains(const CVec& v, double tol_eq) const {
        const double norm = v.norm();
        if (norm == 0.0) return true;
        return ((v - basis_ * (basis_.adjoint() * v)).norm()) <= tol_eq * std::max(1.0, norm);
    }

private:
    CMat basis_;
};

inline std::size_t numerical_rank(const CMat& m, const ToleranceConfig& tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return detail::svd_rank(detail::full_svd(m), tol.rank);
}

/// Moore-Penrose pseudoinverse via SVD with relative singular-value cutoff.
inline CMat pseudoinverse(const CMat& m, const ToleranceConfig& tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return CMat::Zero(m.cols(), m.rows());
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = (sv.size() > 0 ? tol.rank * sv(0) : 0.0);
    RVec inv = RVec::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Ker M as a subspace of the domain. `scale` anchors the singular-value
/// cutoff at tol.rank * max(sigma_max, scale); matrices that are mathematically
/// zero but numerically noise (e.g. I - P for a full range) would otherwise
/// pass a purely relative cutoff at full rank.
inline Subspace kernel(const CMat& m, const ToleranceConfig& tol = {}, double scale = 0.0) {
    if (m.cols() == 0) return Subspace::zero(0);
    if (m.rows() == 0) return Subspace::full(m.cols());
    auto svd = detail::full_svd(m);
    const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    const double cutoff = tol.rank * std::max(sigma_max, scale);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    return Subspace(svd.matrixV().rightCols(m.cols() - r), tol);
}

/// Ran M as a subspace of the codomain.
inline Subspace range(const CMat& m, const ToleranceConfig& tol = {}) {
    if (m.rows() == 0) return Subspace::zero(0);
    if (m.cols() == 0) return Subspace::zero(m.rows());
    auto svd = detail::full_svd(m);
    const std::size_t r = detail::svd_rank(svd, tol.rank);
    return Subspace(svd.matrixU().leftCols(static_cast<Eigen::Index>(r)), tol);
}

inline CMat orthoprojector(const Subspace& s) { return s.projector(); }

/// S1 cap S2, computed as the kernel of the stacked orthogonal-complement
/// projectors [I-P1; I-P2].
inline Subspace intersect(const Subspace& s1, const Subspace& s2, const ToleranceConfig& tol = {}) {
    if (s1.ambient() != s2.ambient())
        throw std::invalid_argument("intersect: ambient dimension mismatch");
    const auto k = static_cast<Eigen::Index>(s1.ambient());
    if (s1.dim() == 0 || s2.dim() == 0) return Subspace::zero(s1.ambient());
    CMat stacked(2 * k, k);
    stacked.topRows(k) = CMat::Identity(k, k) - s1.projector();
    stacked.bottomRows(k) = CMat::Identity(k, k) - s2.projector();
    return kernel(stacked, tol, 1.0);  // projector entries carry unit scale
}

/// Preimage {z : Bz in S} = Ker((I - P_S) B).
inline Subspace preimage(const CMat& b, const Subspace& s, const ToleranceConfig& tol = {}) {
    if (static_cast<std::size_t>(b.rows()) != s.ambient())
        throw std::invalid_argument("preimage: matrix codomain does not match subspace ambient");
    const auto k = b.rows();
    return kernel((CMat::Identity(k, k) - s.projector()) * b, tol, b.norm());
}

/// Basis-independent equality via projector distance.
inline bool subspace_equal(const Subspace& s1, const Subspace& s2, const ToleranceConfig& tol = {}) {
    if (s1.ambient() != s2.ambient())
        throw std::invalid_argument("subspace_equal: ambient dimension mismatch");
    if (s1.dim() != s2.dim()) return false;
    return (s1.projector() - s2.projector()).norm() < tol.eq;
}

}  // namespace fluxgraph
