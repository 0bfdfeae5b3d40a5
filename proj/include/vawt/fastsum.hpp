#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "vawt/biot_savart.hpp"

namespace vawt {

/// Barnes-Hut quadtree over a vortex set.
///
/// Each node stores its circulation total, the |gamma|-weighted centroid and core radius,
/// complex multipole moments sum(gamma_k * d_k^p) about that centroid, and either four
/// children or a contiguous range of leaf vortices. Order 0 is the plain monopole.
/// The tree keeps a copy of the vortices in traversal order.
class VortexTree {
public:
    static constexpr int kMaxDepth = 32;
    static constexpr int kMaxOrder = 8;
    static constexpr int kDefaultOrder = 4;

    struct Node {
        Vec2 center;              // square center
        double half_size = 0.0;   // half edge length
        double total_gamma = 0.0;
        double abs_gamma = 0.0;
        Vec2 centroid;
        double core_radius = 0.0;
        std::int32_t first_child = -1;  // four consecutive nodes, -1 for a leaf
        std::uint32_t begin = 0;        // leaf range into sorted vortices
        std::uint32_t end = 0;
        int depth = 0;

        bool is_leaf() const noexcept { return first_child < 0; }
        double size() const noexcept { return 2.0 * half_size; }
    };

    VortexTree() = default;

    /// Throws std::invalid_argument when leaf_capacity < 1 or the order is outside
    /// [0, kMaxOrder].
    static VortexTree build(std::span<const PointVortex> vortices, int leaf_capacity = 8,
                            int expansion_order = kDefaultOrder);

    /// Induced velocity (no free stream). A node whose size/distance < theta_open is
    /// replaced by its expansion; theta_open = 0 is direct_sum() over the input order.
    Vec2 eval(const Vec2& target, double theta_open) const;
    /// eval() at every source vortex, returned in input order. Equal to calling eval() at
    /// each position, but walks targets in tree order for locality.
    std::vector<Vec2> eval_at_sources(double theta_open) const;

    /// Expansion of node `node_index` truncated at `order` (<= expansion_order()).
    Vec2 node_expansion(std::size_t node_index, const Vec2& target, int order) const noexcept;
    /// Monopole contribution of a single node at `target`.
    Vec2 node_monopole(const Node& node, const Vec2& target) const noexcept;
    /// Exact sum over all vortices below `node`.
    Vec2 node_exact(const Node& node, const Vec2& target) const noexcept;

    bool empty() const noexcept { return nodes_.empty(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    /// Vortices reordered so every leaf owns a contiguous range.
    const std::vector<PointVortex>& sorted_vortices() const noexcept { return sorted_; }
    /// sorted_vortices()[k] is the input vortex index()[k].
    const std::vector<std::uint32_t>& index() const noexcept { return index_; }
    int leaf_capacity() const noexcept { return leaf_capacity_; }
    int expansion_order() const noexcept { return order_; }
    /// Moments m_0..m_order of a node about its centroid.
    std::span<const std::complex<double>> moments(std::size_t node_index) const noexcept {
        const auto stride = static_cast<std::size_t>(order_ + 1);
        return {moments_.data() + node_index * stride, stride};
    }

private:
    // Compact copy of what the traversal reads, so a node is one cache line.
    struct Visit {
        Vec2 centroid;
        double size2 = 0.0;  // squared edge length
        double inv_core2 = 0.0;
        std::int32_t first_child = -1;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        bool skip = false;  // no circulation below this node
        bool always_open = false;
    };

    Vec2 expansion(std::size_t node_index, const Vec2& centroid, double inv_core2,
                   const Vec2& target, int order) const noexcept;
    template <int P>
    Vec2 eval_order(const Vec2& target, double theta2) const noexcept;
    void subdivide(std::size_t node_index);
    void aggregate(Node& node) const noexcept;
    void compute_moments();

    std::vector<Node> nodes_;
    std::vector<PointVortex> input_;   // original order, for exact evaluation
    std::vector<PointVortex> sorted_;
    std::vector<std::uint32_t> index_;
    std::vector<std::complex<double>> moments_;  // order_ + 1 per node
    std::vector<Visit> visit_;
    int leaf_capacity_ = 8;
    int order_ = kDefaultOrder;
};

}  // namespace vawt
