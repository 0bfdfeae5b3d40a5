#include "vawt/fastsum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace vawt {

namespace {

// Monopole-only trees always open nodes whose net circulation cancels below this fraction.
constexpr double kCancellationRatio = 1e-12;
constexpr double kExactFarField = 40.0;

int quadrant(const Vec2& p, const Vec2& center) noexcept {
    return (p.x >= center.x ? 1 : 0) + (p.y >= center.y ? 2 : 0);
}

}  // namespace

VortexTree VortexTree::build(std::span<const PointVortex> vortices, int leaf_capacity,
                             int expansion_order) {
    if (leaf_capacity < 1) throw std::invalid_argument("VortexTree: leaf_capacity must be >= 1");
    if (expansion_order < 0 || expansion_order > kMaxOrder)
        throw std::invalid_argument("VortexTree: expansion order outside [0, 8]");
    VortexTree tree;
    tree.leaf_capacity_ = leaf_capacity;
    tree.order_ = expansion_order;
    if (vortices.empty()) return tree;

    tree.input_.assign(vortices.begin(), vortices.end());
    tree.sorted_ = tree.input_;
    tree.index_.resize(vortices.size());
    std::iota(tree.index_.begin(), tree.index_.end(), 0u);

    Vec2 lo = vortices.front().position;
    Vec2 hi = lo;
    for (const auto& v : vortices) {
        lo.x = std::min(lo.x, v.position.x);
        lo.y = std::min(lo.y, v.position.y);
        hi.x = std::max(hi.x, v.position.x);
        hi.y = std::max(hi.y, v.position.y);
    }
    Node root;
    root.center = 0.5 * (lo + hi);
    const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    // Pad so points on the max edge fall strictly inside.
    root.half_size = 0.5 * extent * (1.0 + 1e-9) + 1e-12 * (1.0 + norm(root.center));
    root.begin = 0;
    root.end = static_cast<std::uint32_t>(vortices.size());
    tree.nodes_.push_back(root);
    tree.subdivide(0);
    tree.compute_moments();
    return tree;
}

void VortexTree::subdivide(std::size_t node_index) {
    {
        Node& node = nodes_[node_index];
        const std::uint32_t count = node.end - node.begin;
        if (count <= static_cast<std::uint32_t>(leaf_capacity_) || node.depth >= kMaxDepth) {
            aggregate(node);
            return;
        }
    }

    // Stable counting partition into the four quadrants keeps the build deterministic.
    const Node parent = nodes_[node_index];
    std::array<std::vector<std::uint32_t>, 4> buckets;
    for (std::uint32_t k = parent.begin; k < parent.end; ++k)
        buckets[quadrant(sorted_[k].position, parent.center)].push_back(k);

    std::vector<PointVortex> tmp_v;
    std::vector<std::uint32_t> tmp_i;
    tmp_v.reserve(parent.end - parent.begin);
    tmp_i.reserve(parent.end - parent.begin);
    std::array<std::uint32_t, 5> offsets{};
    offsets[0] = parent.begin;
    for (int q = 0; q < 4; ++q) {
        for (const auto k : buckets[q]) {
            tmp_v.push_back(sorted_[k]);
            tmp_i.push_back(index_[k]);
        }
        offsets[q + 1] = offsets[q] + static_cast<std::uint32_t>(buckets[q].size());
    }
    std::copy(tmp_v.begin(), tmp_v.end(), sorted_.begin() + parent.begin);
    std::copy(tmp_i.begin(), tmp_i.end(), index_.begin() + parent.begin);

    const auto first_child = static_cast<std::int32_t>(nodes_.size());
    const double h = 0.5 * parent.half_size;
    for (int q = 0; q < 4; ++q) {
        Node child;
        child.center = parent.center + Vec2{(q & 1) ? h : -h, (q & 2) ? h : -h};
        child.half_size = h;
        child.begin = offsets[q];
        child.end = offsets[q + 1];
        child.depth = parent.depth + 1;
        nodes_.push_back(child);
    }
    nodes_[node_index].first_child = first_child;
    for (int q = 0; q < 4; ++q) subdivide(static_cast<std::size_t>(first_child + q));
    aggregate(nodes_[node_index]);
}

void VortexTree::aggregate(Node& node) const noexcept {
    double total = 0.0;
    double abs_total = 0.0;
    Vec2 weighted;
    double weighted_core = 0.0;
    if (node.is_leaf()) {
        for (std::uint32_t k = node.begin; k < node.end; ++k) {
            const auto& v = sorted_[k];
            const double w = std::abs(v.gamma);
            total += v.gamma;
            abs_total += w;
            weighted += w * v.position;
            weighted_core += w * v.core_radius;
        }
    } else {
        for (int q = 0; q < 4; ++q) {
            const Node& c = nodes_[static_cast<std::size_t>(node.first_child + q)];
            total += c.total_gamma;
            abs_total += c.abs_gamma;
            weighted += c.abs_gamma * c.centroid;
            weighted_core += c.abs_gamma * c.core_radius;
        }
    }
    node.total_gamma = total;
    node.abs_gamma = abs_total;
    if (abs_total > 0.0) {
        node.centroid = (1.0 / abs_total) * weighted;
        node.core_radius = weighted_core / abs_total;
    } else {
        node.centroid = node.center;
        node.core_radius = node.is_leaf() && node.end > node.begin ? sorted_[node.begin].core_radius
                                                                   : 0.0;
    }
}

void VortexTree::compute_moments() {
    const auto stride = static_cast<std::size_t>(order_ + 1);
    moments_.assign(nodes_.size() * stride, std::complex<double>{});
    visit_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        const std::complex<double> c(node.centroid.x, node.centroid.y);
        std::complex<double>* m = moments_.data() + i * stride;
        for (std::uint32_t k = node.begin; k < node.end; ++k) {
            const auto& v = sorted_[k];
            const std::complex<double> d = std::complex<double>(v.position.x, v.position.y) - c;
            std::complex<double> power = v.gamma;
            for (int p = 0; p <= order_; ++p) {
                m[p] += power;
                power *= d;
            }
        }
        Visit& h = visit_[i];
        h.centroid = node.centroid;
        h.size2 = node.size() * node.size();
        h.inv_core2 = 1.0 / (node.core_radius * node.core_radius);
        h.first_child = node.first_child;
        h.begin = node.begin;
        h.end = node.end;
        h.skip = node.abs_gamma == 0.0;
        h.always_open =
            order_ == 0 && std::abs(node.total_gamma) < kCancellationRatio * node.abs_gamma;
    }
}

Vec2 VortexTree::node_expansion(std::size_t node_index, const Vec2& target,
                                int order) const noexcept {
    const Node& node = nodes_[node_index];
    if (node.abs_gamma == 0.0) return {};
    return expansion(node_index, node.centroid, 1.0 / (node.core_radius * node.core_radius), target,
                     order);
}

namespace {

// Horner in 1/zeta over m[0..P]; returns sum_p m_p / zeta^(p+1) as (re, im).
template <int P>
inline void horner(const std::complex<double>* m, double ir, double ii, double& wr,
                   double& wi) noexcept {
    wr = m[P].real();
    wi = m[P].imag();
    for (int p = P - 1; p >= 0; --p) {
        const double tr = wr * ir - wi * ii;
        const double ti = wr * ii + wi * ir;
        wr = tr + m[p].real();
        wi = ti + m[p].imag();
    }
    const double tr = wr * ir - wi * ii;
    wi = wr * ii + wi * ir;
    wr = tr;
}

template <int... P>
inline void horner_dispatch(int order, const std::complex<double>* m, double ir, double ii,
                            double& wr, double& wi, std::integer_sequence<int, P...>) noexcept {
    (void)((order == P ? (horner<P>(m, ir, ii, wr, wi), true) : false) || ...);
}

}  // namespace

Vec2 VortexTree::expansion(std::size_t node_index, const Vec2& centroid, double inv_core2,
                           const Vec2& target, int order) const noexcept {
    const Vec2 r = target - centroid;
    const double r2 = norm2(r);
    if (r2 == 0.0) return {};
    // Conjugate velocity u - i v = -i/(2 pi) * sum_p m_p / zeta^(p+1).
    // Plain real arithmetic: std::complex multiply carries NaN recovery we never need.
    const double inv_r2 = 1.0 / r2;
    const double ir = r.x * inv_r2;
    const double ii = -r.y * inv_r2;
    const std::complex<double>* m =
        moments_.data() + node_index * static_cast<std::size_t>(order_ + 1);
    double tr = 0.0, ti = 0.0;
    horner_dispatch(order, m, ir, ii, tr, ti, std::make_integer_sequence<int, kMaxOrder + 1>{});
    const double x = r2 * inv_core2;
    // exp(-x) is below half an ulp of 1 past this point, so the factor is exactly 1.
    const double regularization = x > kExactFarField ? 1.0 : -std::expm1(-x);
    const double scale = kInvTwoPi * regularization;
    // -i * (tr + i ti) = ti - i tr, and v = -imag.
    return {scale * ti, scale * tr};
}

Vec2 VortexTree::node_monopole(const Node& node, const Vec2& target) const noexcept {
    if (node.abs_gamma == 0.0) return {};
    return vortex_kernel(target, node.centroid, node.total_gamma, node.core_radius);
}

Vec2 VortexTree::node_exact(const Node& node, const Vec2& target) const noexcept {
    Vec2 u;
    for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const auto& v = sorted_[k];
        u += vortex_kernel(target, v.position, v.gamma, v.core_radius);
    }
    return u;
}

template <int P>
Vec2 VortexTree::eval_order(const Vec2& target, double theta2) const noexcept {
    const auto stride = static_cast<std::size_t>(P + 1);
    Vec2 u;
    std::array<std::int32_t, 4 * kMaxDepth + 8> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const auto node_index = static_cast<std::size_t>(stack[--top]);
        const Visit& node = visit_[node_index];
        if (node.skip) continue;
        if (node.first_child < 0) {
            for (std::uint32_t k = node.begin; k < node.end; ++k) {
                const auto& v = sorted_[k];
                u += vortex_kernel(target, v.position, v.gamma, v.core_radius);
            }
            continue;
        }
        // size / dist < theta, compared squared.
        const Vec2 r = target - node.centroid;
        const double r2 = norm2(r);
        if (!node.always_open && node.size2 < theta2 * r2) {
            // Same arithmetic as expansion(), unrolled for this order.
            const double inv_r2 = 1.0 / r2;
            double wr = 0.0, wi = 0.0;
            horner<P>(moments_.data() + node_index * stride, r.x * inv_r2, -r.y * inv_r2, wr, wi);
            const double x = r2 * node.inv_core2;
            const double regularization = x > kExactFarField ? 1.0 : -std::expm1(-x);
            const double scale = kInvTwoPi * regularization;
            u += Vec2{scale * wi, scale * wr};
            continue;
        }
        // Push in reverse so children are visited in quadrant order.
        for (int q = 3; q >= 0; --q) stack[top++] = node.first_child + q;
    }
    return u;
}

Vec2 VortexTree::eval(const Vec2& target, double theta_open) const {
    if (theta_open < 0.0) throw std::invalid_argument("VortexTree::eval: theta_open must be >= 0");
    if (visit_.empty()) return {};
    // Same order and arithmetic as the plain sum, so exact mode matches it bit for bit.
    if (theta_open == 0.0) return direct_sum(input_, target);
    const double theta2 = theta_open * theta_open;
    return [&]<int... P>(std::integer_sequence<int, P...>) {
        Vec2 u;
        (void)((order_ == P ? (u = eval_order<P>(target, theta2), true) : false) || ...);
        return u;
    }(std::make_integer_sequence<int, kMaxOrder + 1>{});
}

std::vector<Vec2> VortexTree::eval_at_sources(double theta_open) const {
    std::vector<Vec2> out(sorted_.size());
    // Tree order keeps consecutive targets on shared traversal paths.
    for (std::size_t k = 0; k < sorted_.size(); ++k)
        out[index_[k]] = eval(sorted_[k].position, theta_open);
    return out;
}

}  // namespace vawt
