#pragma once

#include <stdexcept>

#include "fluxgraph/types.hpp"

namespace fluxgraph {

/// Element of the group U of diagonal unitaries on the boundary coordinates,
/// stored as a real phase vector in canonical slot order.
class DiagonalUnitary {
public:
    explicit DiagonalUnitary(RVec phases) : phases_(std::move(phases)) {
        if (!phases_.allFinite())
            throw std::invalid_argument("DiagonalUnitary: phases must be finite");
    }

    static DiagonalUnitary identity(std::size_t k) {
        return DiagonalUnitary(RVec::Zero(static_cast<Eigen::Index>(k)));
    }

    std::size_t size() const { return static_cast<std::size_t>(phases_.size()); }
    double phase(std::size_t slot) const { return phases_(static_cast<Eigen::Index>(slot)); }
    const RVec& phases() const { return phases_; }

    CVec diagonal() const {
        CVec d(phases_.size());
        for (Eigen::Index j = 0; j < phases_.size(); ++j)
            d(j) = std::polar(1.0, phases_(j));
        return d;
    }

    CMat matrix() const { return CMat(diagonal().asDiagonal()); }

    DiagonalUnitary inverse() const { return DiagonalUnitary(-phases_); }

    friend DiagonalUnitary operator*(const DiagonalUnitary& lhs, const DiagonalUnitary& rhs) {
        if (lhs.size() != rhs.size())
            throw std::invalid_argument("DiagonalUnitary: size mismatch");
        return DiagonalUnitary(lhs.phases_ + rhs.phases_);
    }

    /// Equality as group elements (phases modulo 2*pi).
    bool same_element(const DiagonalUnitary& other, double tol = 1e-9) const {
        if (size() != other.size()) return false;
        for (Eigen::Index j = 0; j < phases_.size(); ++j)
            if (angle_distance(phases_(j), other.phases_(j)) > tol) return false;
        return true;
    }

private:
    RVec phases_;
};

}  // namespace fluxgraph
