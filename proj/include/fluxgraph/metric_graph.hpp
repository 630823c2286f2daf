#pragma once

#include <cstddef>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fluxgraph/types.hpp"

namespace fluxgraph {

/// Directed internal line [0, length] running from `from` (x=0) to `to` (x=length).
struct InternalEdge {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
};

/// Half-line [0, inf) attached to `vertex` at x=0.
struct ExternalEdge {
    std::string id;
    std::string vertex;
};

/// A finite metric graph with directed internal edges and external half-lines.
/// Multi-edges and tadpoles (from == to) are allowed. Construction accepts raw
/// data; semantic checks live in validate().
class MetricGraph {
public:
    MetricGraph(std::vector<std::string> vertices,
                std::vector<InternalEdge> internal_edges,
                std::vector<ExternalEdge> external_edges)
        : vertices_(std::move(vertices)),
          internal_(std::move(internal_edges)),
          external_(std::move(external_edges)) {
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            vertex_lookup_.emplace(vertices_[i], i);
    }

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<InternalEdge>& internal_edges() const { return internal_; }
    const std::vector<ExternalEdge>& external_edges() const { return external_; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t external_count() const { return external_.size(); }
    std::size_t internal_count() const { return internal_.size(); }

    /// Dimension of the boundary space C^{n+2m}.
    std::size_t boundary_dim() const { return external_.size() + 2 * internal_.size(); }

    bool compact() const { return external_.empty(); }

    std::optional<std::size_t> vertex_index(std::string_view id) const {
        auto it = vertex_lookup_.find(std::string(id));
        if (it == vertex_lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Degree of a vertex; a tadpole contributes two.
    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (const auto& e : external_)
            if (vertex_index(e.vertex) == v) ++d;
        for (const auto& e : internal_) {
            if (vertex_index(e.from) == v) ++d;
            if (vertex_index(e.to) == v) ++d;
        }
        return d;
    }

private:
    std::vector<std::string> vertices_;
    std::vector<InternalEdge> internal_;
    std::vector<ExternalEdge> external_;
    std::unordered_map<std::string, std::size_t> vertex_lookup_;
};

struct ValidationIssue {
    std::string code;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

namespace detail {

struct SpanningTree {
    std::vector<long> parent_edge;    // per vertex; -1 root, -2 unreached
    std::vector<std::size_t> tree_edges;
    std::vector<std::size_t> chords;  // non-tree edges, incl. tadpoles
    bool connected = false;
};

/// BFS spanning tree of an undirected multigraph given as endpoint pairs.
inline SpanningTree bfs_spanning_tree(std::size_t vertex_count,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    SpanningTree out;
    out.parent_edge.assign(vertex_count, -2);
    if (vertex_count == 0) {
        out.connected = true;
        return out;
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(vertex_count);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [a, b] = edges[e];
        adj[a].emplace_back(b, e);
        if (a != b) adj[b].emplace_back(a, e);
    }
    std::vector<bool> edge_used(edges.size(), false);
    std::vector<bool> seen(vertex_count, false);
    std::queue<std::size_t> queue;
    queue.push(0);
    seen[0] = true;
    out.parent_edge[0] = -1;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop();
        for (auto [w, e] : adj[v]) {
            if (seen[w]) continue;
            seen[w] = true;
            edge_used[e] = true;
            out.parent_edge[w] = static_cast<long>(e);
            queue.push(w);
        }
    }
    out.connected = true;
    for (std::size_t v = 0; v < vertex_count; ++v)
        if (!seen[v]) out.connected = false;
    for (std::size_t e = 0; e < edges.size(); ++e)
        (edge_used[e] ? out.tree_edges : out.chords).push_back(e);
    return out;
}

}  // namespace detail

/// Report-style check of the standing assumptions: resolvable endpoints,
/// positive finite lengths, no isolated vertices, connectedness, n+m >= 1.
inline ValidationReport validate(const MetricGraph& graph) {
    ValidationReport report;
    auto flag = [&report](std::string code, std::string detail) {
        report.issues.push_back({std::move(code), std::move(detail)});
    };

    if (graph.vertex_count() == 0) flag("no_vertices", "graph has no vertices");
    if (graph.external_count() + graph.internal_count() == 0)
        flag("no_edges", "graph has no internal or external edges");

    {
        std::unordered_map<std::string, int> seen;
        for (const auto& v : graph.vertices())
            if (++seen[v] == 2) flag("duplicate_id", "vertex id '" + v + "' appears twice");
        seen.clear();
        for (const auto& e : graph.internal_edges()) ++seen[e.id];
        for (const auto& e : graph.external_edges()) ++seen[e.id];
        for (const auto& [id, count] : seen)
            if (count > 1) flag("duplicate_id", "edge id '" + id + "' appears " + std::to_string(count) + " times");
    }

    bool endpoints_ok = true;
    for (const auto& e : graph.external_edges()) {
        if (!graph.vertex_index(e.vertex)) {
            flag("unknown_vertex", "external edge '" + e.id + "' attaches to unknown vertex '" + e.vertex + "'");
            endpoints_ok = false;
        }
    }
    for (const auto& e : graph.internal_edges()) {
        if (!graph.vertex_index(e.from)) {
            flag("unknown_vertex", "internal edge '" + e.id + "' starts at unknown vertex '" + e.from + "'");
            endpoints_ok = false;
        }
        if (!graph.vertex_index(e.to)) {
            flag("unknown_vertex", "internal edge '" + e.id + "' ends at unknown vertex '" + e.to + "'");
            endpoints_ok = false;
        }
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            flag("bad_length", "internal edge '" + e.id + "' has nonpositive or nonfinite length");
    }

    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
        if (graph.degree(v) == 0)
            flag("zero_degree", "vertex '" + graph.vertices()[v] + "' has degree 0");
    }

    if (endpoints_ok && graph.vertex_count() > 0) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        edges.reserve(graph.internal_count());
        for (const auto& e : graph.internal_edges())
            edges.emplace_back(*graph.vertex_index(e.from), *graph.vertex_index(e.to));
        if (!detail::bfs_spanning_tree(graph.vertex_count(), edges).connected)
            flag("disconnected", "graph is not connected");
    }
    return report;
}

/// Kind of a boundary coordinate in the canonical ordering of C^{n+2m}:
/// all external endpoints first, then internal initial endpoints, then
/// internal terminal endpoints, each block in input edge order.
struct BoundaryCoordinate {
    enum class Kind { External, EdgeStart, EdgeEnd };
    Kind kind;
    std::size_t edge;  // index into the respective edge list
};

/// Canonical indexing of the boundary space plus the per-vertex slot sets L_v.
class BoundaryCoordinateMap {
public:
    explicit BoundaryCoordinateMap(const MetricGraph& graph) {
        ValidationReport report = validate(graph);
        if (!report.ok())
            throw std::invalid_argument("boundary_coordinate_map requires a valid graph: " +
                                        report.issues.front().detail);
        n_ = graph.external_count();
        m_ = graph.internal_count();
        vertex_count_ = graph.vertex_count();
        coords_.reserve(n_ + 2 * m_);
        for (std::size_t e = 0; e < n_; ++e)
            coords_.push_back({BoundaryCoordinate::Kind::External, e});
        for (std::size_t i = 0; i < m_; ++i)
            coords_.push_back({BoundaryCoordinate::Kind::EdgeStart, i});
        for (std::size_t i = 0; i < m_; ++i)
            coords_.push_back({BoundaryCoordinate::Kind::EdgeEnd, i});

        slot_vertex_.resize(coords_.size());
        vertex_slots_.resize(vertex_count_);
        external_vertex_.resize(n_);
        edge_endpoints_.resize(m_);
        for (std::size_t e = 0; e < n_; ++e)
            external_vertex_[e] = *graph.vertex_index(graph.external_edges()[e].vertex);
        for (std::size_t i = 0; i < m_; ++i)
            edge_endpoints_[i] = {*graph.vertex_index(graph.internal_edges()[i].from),
                                  *graph.vertex_index(graph.internal_edges()[i].to)};
        for (std::size_t s = 0; s < coords_.size(); ++s) {
            std::size_t v = 0;
            switch (coords_[s].kind) {
                case BoundaryCoordinate::Kind::External: v = external_vertex_[coords_[s].edge]; break;
                case BoundaryCoordinate::Kind::EdgeStart: v = edge_endpoints_[coords_[s].edge].first; break;
                case BoundaryCoordinate::Kind::EdgeEnd: v = edge_endpoints_[coords_[s].edge].second; break;
            }
            slot_vertex_[s] = v;
            vertex_slots_[v].push_back(s);
        }
    }

    std::size_t size() const { return coords_.size(); }  // k = n + 2m
    std::size_t external_count() const { return n_; }
    std::size_t internal_count() const { return m_; }
    std::size_t vertex_count() const { return vertex_count_; }

    std::size_t external_slot(std::size_t e) const { return e; }
    std::size_t edge_start_slot(std::size_t i) const { return n_ + i; }
    std::size_t edge_end_slot(std::size_t i) const { return n_ + m_ + i; }

    const BoundaryCoordinate& coordinate(std::size_t slot) const { return coords_[slot]; }
    std::size_t vertex_of_slot(std::size_t slot) const { return slot_vertex_[slot]; }

    /// Initial and terminal vertex of internal edge i.
    const std::pair<std::size_t, std::size_t>& edge_endpoints(std::size_t i) const {
        return edge_endpoints_[i];
    }
    std::size_t external_vertex(std::size_t e) const { return external_vertex_[e]; }

    /// Slots of L_v in ascending canonical order; |L_v| = deg(v).
    const std::vector<std::size_t>& vertex_slots(std::size_t v) const { return vertex_slots_[v]; }
    const std::vector<std::vector<std::size_t>>& all_vertex_slots() const { return vertex_slots_; }

private:
    std::size_t n_ = 0, m_ = 0, vertex_count_ = 0;
    std::vector<BoundaryCoordinate> coords_;
    std::vector<std::size_t> slot_vertex_;
    std::vector<std::vector<std::size_t>> vertex_slots_;
    std::vector<std::size_t> external_vertex_;
    std::vector<std::pair<std::size_t, std::size_t>> edge_endpoints_;
};

inline BoundaryCoordinateMap boundary_coordinate_map(const MetricGraph& graph) {
    return BoundaryCoordinateMap(graph);
}

}  // namespace fluxgraph
