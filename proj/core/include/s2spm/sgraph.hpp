#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace s2spm {

// Undirected pair with u < v and nonzero aggregate weight.
struct Edge {
    int u = 0;
    int v = 0;
    long y = 0;
};

struct SignedGraph {
    int n_nodes = 0;
    std::vector<std::string> node_ids;  // index -> external id
    std::vector<Edge> edges;            // sorted by (u, v), unique pairs

    std::size_t positive_count() const;
    std::size_t negative_count() const;
    // 2|E| / (N (N-1)), sign blind.
    double density() const;
    long total_pairs() const {
        return static_cast<long>(n_nodes) * (n_nodes - 1) / 2;
    }
};

struct GraphStats {
    int n_nodes = 0;
    std::size_t n_edges = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    double density = 0.0;
};

GraphStats graph_stats(const SignedGraph& g);

// How multiple records for the same unordered pair collapse.
//   net_count:     y = (#positive) - (#negative), pair dropped when zero
//   majority_sign: y = sign(#positive - #negative), pair dropped on ties
enum class AggregationPolicy { net_count, majority_sign };

// Delimited text with columns source, target, sign. Tab or comma delimited,
// optional header row, sign tokens {+1, 1, -1, up-regulates, down-regulates}
// case insensitive. Node indices are assigned by first appearance; self
// referencing records are skipped.
SignedGraph load_edge_list(const std::string& path,
                           AggregationPolicy policy = AggregationPolicy::net_count);

// Keeps the largest component, ties broken toward the component containing
// the smallest original index. Indices are recompacted preserving order.
SignedGraph largest_connected_component(const SignedGraph& g);

struct EdgeSplit {
    SignedGraph train;                            // same nodes, removed edges absent
    std::vector<Edge> test_edges;                 // removed, with weights
    std::vector<std::pair<int, int>> test_zeros;  // non-adjacent pairs, u < v
    double fraction = 0.0;
    double zero_multiplier = 0.0;
    std::uint64_t seed = 0;
};

// Removes floor(fraction * |E|) edges such that the residual stays connected,
// plus floor(zero_multiplier * removed) distinct sampled non-edges.
EdgeSplit split_connectivity_preserving(const SignedGraph& g, double fraction,
                                        double zero_multiplier, std::uint64_t seed);

struct PlantedConfig {
    int n_nodes = 0;
    int k = 0;
    std::uint64_t seed = 1;
    double bias = -0.5;            // gamma_i = delta_i = bias
    double corner_strength = 4.0;  // membership logit bump at the home corner
    double noise_sigma = 0.5;
    double archetype_scale = 3.0;  // ground-truth archetype matrix = scale * I
};

struct PlantedGraph {
    SignedGraph graph;
    Eigen::MatrixXd membership_pos;  // k x n, ground truth
    Eigen::MatrixXd membership_neg;
    std::vector<int> corner_pos;  // home corner per node
    std::vector<int> corner_neg;
};

// Two independent planted archetype structures; weights drawn as Poisson
// differences from the ground-truth rates.
PlantedGraph generate_planted(const PlantedConfig& cfg);

// JSON round trips for the canonical graph and split files.
void save_graph_json(const SignedGraph& g, const std::string& path);
SignedGraph load_graph_json(const std::string& path);
void save_split_json(const EdgeSplit& split, const std::string& path);
EdgeSplit load_split_json(const std::string& path);

}  // namespace s2spm
