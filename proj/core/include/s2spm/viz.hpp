#pragma once

#include <Eigen/Dense>
#include <string>
#include <tuple>
#include <vector>

#include "s2spm/model.hpp"
#include "s2spm/sgraph.hpp"

namespace s2spm {

// Archetype anchors on the unit circle, nodes at the membership-weighted
// convex combination, edges of the space's sign attached.
struct CircularLayout {
    Eigen::MatrixXd anchors;  // 2 x K, anchor k at angle 2*pi*k/K
    Eigen::MatrixXd node_xy;  // 2 x N
    std::vector<Edge> edges;
};

CircularLayout circular_layout(const ModelParams& params, const SignedGraph& g, Space space);

// Nodes sorted by (argmax membership, max membership desc, index); the
// adjacency restricted to the space's sign, reordered, as sparse triplets.
struct OrderedAdjacency {
    int n_nodes = 0;
    std::vector<int> permutation;                     // position -> original index
    std::vector<std::tuple<int, int, double>> entries;  // (row, col, value), both triangles

    Eigen::MatrixXd to_dense() const;
};

OrderedAdjacency ordered_adjacency(const ModelParams& params, const SignedGraph& g, Space space);

struct Pca2d {
    Eigen::MatrixXd coords;      // N x 2
    Eigen::Vector2d explained;   // variance ratios of the two components
};

// Mean-centered projection onto the top two principal directions. Each
// direction's largest-magnitude entry is made positive so runs agree.
Pca2d pca_2d(const Eigen::MatrixXd& points);

// Plot-data emitters. Plain CSV, fixed six-decimal floats, byte-stable.
std::string circular_points_csv(const CircularLayout& layout);
std::string circular_edges_csv(const CircularLayout& layout);
std::string adjacency_csv(const OrderedAdjacency& adj);
std::string permutation_csv(const OrderedAdjacency& adj);
std::string pca_csv(const Pca2d& pca);

// Minimal static SVG 1.1 renderings of the same data.
std::string circular_layout_svg(const CircularLayout& layout);
std::string adjacency_svg(const OrderedAdjacency& adj);
std::string pca_svg(const Pca2d& pca);

}  // namespace s2spm
