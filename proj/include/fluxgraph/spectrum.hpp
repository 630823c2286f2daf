#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fluxgraph/boundary_conditions.hpp"
#include "fluxgraph/vector_potential.hpp"

namespace fluxgraph {

/// Eigenvalue problem for a compact graph (no external lines). On each edge
/// the solution of (d/dx - i A)^2 psi = -k^2 psi with piecewise-constant A is
/// psi(x) = alpha e^{i(A+k)x} + beta e^{i(A-k)x} per piece; matching psi and
/// the magnetic derivative psi' - iA psi across pieces makes the transfer
/// diagonal, so an edge contributes exactly two unknowns and the accumulated
/// phase Theta_i = integral of A_i. The secular matrix is A X(k) + B Y(k)
/// with X, Y the boundary traces of psi and psi' - i A psi.
class SecularProblem {
public:
    SecularProblem(MetricGraph graph, BoundaryConditions bc,
                   VectorPotential potential, const ToleranceConfig& tol = {})
        : graph_(std::move(graph)), bc_(std::move(bc)), potential_(std::move(potential)) {
        const ValidationReport report = validate(graph_);
        if (!report.ok())
            throw std::invalid_argument("SecularProblem: invalid graph: " + report.issues.front().detail);
        if (!graph_.compact())
            throw std::domain_error("SecularProblem: graph must be compact (no external lines)");
        if (bc_.size() != graph_.boundary_dim())
            throw std::invalid_argument("SecularProblem: boundary conditions do not match the graph");
        detail::require_self_adjoint(bc_, tol, "SecularProblem");
        check_potential(potential_, graph_);
        const std::size_t m = graph_.internal_count();
        lengths_.resize(m);
        phase_integrals_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            lengths_[i] = graph_.internal_edges()[i].length;
            phase_integrals_[i] = edge_integral(potential_, i);
        }
    }

    SecularProblem(MetricGraph graph, BoundaryConditions bc, const ToleranceConfig& tol = {})
        : SecularProblem(std::move(graph), std::move(bc), VectorPotential{}, tol) {}

    const MetricGraph& graph() const { return graph_; }
    const BoundaryConditions& boundary() const { return bc_; }
    const VectorPotential& potential() const { return potential_; }

    CMat matrix(double k) const {
        const auto m = static_cast<Eigen::Index>(graph_.internal_count());
        CMat x = CMat::Zero(2 * m, 2 * m), y = CMat::Zero(2 * m, 2 * m);
        const Complex ik(0.0, k);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double a = lengths_[static_cast<std::size_t>(i)];
            const double theta = phase_integrals_[static_cast<std::size_t>(i)];
            const Complex e_plus = std::polar(1.0, theta + k * a);
            const Complex e_minus = std::polar(1.0, theta - k * a);
            // slots: start = i, end = m + i; columns 2i (alpha), 2i+1 (beta)
            x(i, 2 * i) = 1.0;
            x(i, 2 * i + 1) = 1.0;
            x(m + i, 2 * i) = e_plus;
            x(m + i, 2 * i + 1) = e_minus;
            y(i, 2 * i) = ik;
            y(i, 2 * i + 1) = -ik;
            y(m + i, 2 * i) = -ik * e_plus;
            y(m + i, 2 * i + 1) = ik * e_minus;
        }
        return bc_.a() * x + bc_.b() * y;
    }

    double smallest_singular_value(double k) const {
        Eigen::JacobiSVD<CMat> svd(matrix(k));
        const auto& sv = svd.singularValues();
        return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
    }

private:
    MetricGraph graph_;
    BoundaryConditions bc_;
    VectorPotential potential_;
    std::vector<double> lengths_;
    std::vector<double> phase_integrals_;
};

/// Smallest singular value of the secular matrix; zero exactly at the
/// positive eigenvalue parameters k (eigenvalues k^2).
inline double secular_value(const SecularProblem& problem, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("secular_value: k must be positive");
    return problem.smallest_singular_value(k);
}

struct SpectrumRoot {
    double k = 0.0;
    double residual = 0.0;
};

struct SpectrumResult {
    std::vector<SpectrumRoot> roots;
    double k_max = 0.0;
    double grid_step = 0.0;
    double threshold = 0.0;  // accepted-residual cutoff used by the scan
};

namespace detail {

/// Golden-section minimization; sigma_min is V-shaped near simple roots.
template <typename F>
double golden_minimize(F&& f, double lo, double hi, double x_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Scan (0, k_max] on a uniform grid, refine each local minimum of the
/// secular value by golden-section search, and keep minima whose residual
/// falls below 1e-6 times the median grid value. The grid must resolve the
/// level spacing; grid_step <= pi / (4 * total edge length) is safe.
inline SpectrumResult eigenvalues_scan(const SecularProblem& problem, double k_max, double grid_step) {
    if (!(k_max > 0.0) || !(grid_step > 0.0) || grid_step >= k_max)
        throw std::invalid_argument("eigenvalues_scan: need 0 < grid_step < k_max");
    const auto steps = static_cast<std::size_t>(std::lround(k_max / grid_step));
    std::vector<double> ks(steps), sigma(steps);
    for (std::size_t j = 0; j < steps; ++j) {
        ks[j] = k_max * static_cast<double>(j + 1) / static_cast<double>(steps);
        sigma[j] = problem.smallest_singular_value(ks[j]);
    }

    std::vector<double> sorted = sigma;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double threshold = 1e-6 * sorted[sorted.size() / 2];

    SpectrumResult result;
    result.k_max = k_max;
    result.grid_step = grid_step;
    result.threshold = threshold;

    auto eval = [&problem](double k) { return problem.smallest_singular_value(k); };
    auto try_root = [&](double lo, double hi) {
        const double k_star = detail::golden_minimize(eval, lo, hi, 1e-9);
        const double res = eval(k_star);
        if (res >= threshold) return;
        if (!result.roots.empty() && std::abs(result.roots.back().k - k_star) < 0.5 * grid_step) {
            if (res < result.roots.back().residual) result.roots.back() = {k_star, res};
            return;
        }
        result.roots.push_back({k_star, res});
    };

    for (std::size_t j = 1; j + 1 < steps; ++j)
        if (sigma[j] < sigma[j - 1] && sigma[j] <= sigma[j + 1]) try_root(ks[j - 1], ks[j + 1]);
    // A root sitting at the window edge shows up as a descending final step.
    if (steps >= 2 && sigma[steps - 1] < sigma[steps - 2]) try_root(ks[steps - 2], ks[steps - 1]);

    return result;
}

struct SpectrumComparison {
    double max_deviation = 0.0;
    std::size_t unmatched = 0;
};

/// Greedy matching of two sorted root lists from scans over the same window.
inline SpectrumComparison compare_spectra(const SpectrumResult& r1, const SpectrumResult& r2,
                                          double tol) {
    if (r1.k_max != r2.k_max || r1.grid_step != r2.grid_step)
        throw std::invalid_argument("compare_spectra: scan windows differ");
    SpectrumComparison cmp;
    std::size_t i = 0, j = 0;
    while (i < r1.roots.size() && j < r2.roots.size()) {
        const double d = r1.roots[i].k - r2.roots[j].k;
        if (std::abs(d) <= tol) {
            cmp.max_deviation = std::max(cmp.max_deviation, std::abs(d));
            ++i;
            ++j;
        } else if (d < 0) {
            ++cmp.unmatched;
            ++i;
        } else {
            ++cmp.unmatched;
            ++j;
        }
    }
    cmp.unmatched += (r1.roots.size() - i) + (r2.roots.size() - j);
    return cmp;
}

}  // namespace fluxgraph
