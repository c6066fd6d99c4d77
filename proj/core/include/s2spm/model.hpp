#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "s2spm/sgraph.hpp"

namespace s2spm {

enum class Space { pos, neg };

// two_space: independent latent spaces for positive and negative rates.
// single_space: one shared space; the negative rate grows with distance
// (distance push) and keeps its own bias vector.
enum class ModelKind { two_space, single_space };

inline constexpr double kExpClamp = 60.0;    // rate exponent clipped to +-60
inline constexpr double kDistEps = 1e-12;    // smoothing inside the distance sqrt
inline constexpr int kFullNllCeiling = 2000; // max N for the all-pairs loss

struct ModelParams {
    ModelKind kind = ModelKind::two_space;
    Eigen::MatrixXd z_logits;  // k_pos x n, memberships are column softmax
    Eigen::MatrixXd w_logits;  // k_neg x n, empty for single_space
    Eigen::VectorXd gamma;     // n, positive-rate bias
    Eigen::VectorXd delta;     // n, negative-rate bias
    Eigen::MatrixXd r_pos;     // k_pos x k_pos
    Eigen::MatrixXd r_neg;     // empty for single_space
    Eigen::MatrixXd g_pos;     // k_pos x n gate logits
    Eigen::MatrixXd g_neg;     // empty for single_space

    int n_nodes() const { return static_cast<int>(z_logits.cols()); }
    int k_pos() const { return static_cast<int>(z_logits.rows()); }
    int k_neg() const {
        return kind == ModelKind::single_space ? k_pos()
                                               : static_cast<int>(w_logits.rows());
    }
    long parameter_count() const;
    static ModelParams zeros_like(const ModelParams& other);
};

// Visits every live tensor as a flat vector, in a fixed order shared by the
// optimizer state and the finite-difference harness.
template <typename F>
void for_each_tensor(ModelParams& p, F&& f) {
    auto flat = [&](Eigen::MatrixXd& m) {
        if (m.size() > 0) f(Eigen::Map<Eigen::VectorXd>(m.data(), m.size()));
    };
    auto flatv = [&](Eigen::VectorXd& v) {
        if (v.size() > 0) f(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
    };
    flat(p.z_logits);
    flat(p.w_logits);
    flatv(p.gamma);
    flatv(p.delta);
    flat(p.r_pos);
    flat(p.r_neg);
    flat(p.g_pos);
    flat(p.g_neg);
}

struct ArchetypeSet {
    Eigen::MatrixXd a_pos;  // k_pos x k_pos, columns are archetypes
    Eigen::MatrixXd a_neg;
};

struct SpaceState {
    Eigen::MatrixXd membership;  // k x n, columns on the simplex
    Eigen::MatrixXd gate;        // k x n, sigmoid of gate logits
    Eigen::MatrixXd mix;         // n x k, columns sum to one
    Eigen::VectorXd mix_den;     // k, normalizers of mix columns
    Eigen::MatrixXd basis;       // k x k, membership * mix
    Eigen::MatrixXd archetype;   // k x k, r * basis
    Eigen::MatrixXd projected;   // k x n, archetype * membership
};

struct ModelState {
    SpaceState pos;
    SpaceState neg;  // unused when shared
    bool shared = false;
    const SpaceState& space(Space s) const {
        return (s == Space::pos || shared) ? pos : neg;
    }
};

Eigen::MatrixXd memberships(const ModelParams& p, Space s);
// Mixture weights (n x k): membership gated by sigmoid(gate logits), columns
// normalized to one. Throws DegenerateGateError on a zero-mass column.
Eigen::MatrixXd gate_matrix(const ModelParams& p, Space s);
ArchetypeSet archetypes(const ModelParams& p);
ModelState derive(const ModelParams& p);

struct PairRates {
    double lambda_pos = 0.0;
    double lambda_neg = 0.0;
};

// Rates for one unordered pair; i != j required.
PairRates pair_rates(const ModelParams& p, const ModelState& st, int i, int j);

struct NllResult {
    double loss = 0.0;
    ModelParams grads;
};

// Exact negative log likelihood over all node pairs. Refuses graphs larger
// than pair_ceiling nodes; use sampled_nll there.
NllResult full_nll(const ModelParams& p, const SignedGraph& g,
                   int pair_ceiling = kFullNllCeiling);

struct PairSample {
    std::vector<Edge> edges;                       // every graph edge
    std::vector<std::pair<int, int>> non_edges;    // uniform sample, repeats allowed
};

// Unbiased estimate: edge terms enter exactly, non-edge terms are rescaled by
// (#non-edge pairs) / (#sampled non-edges). total_pairs is n(n-1)/2.
NllResult sampled_nll(const ModelParams& p, const SignedGraph& g,
                      const PairSample& sample, long total_pairs);

}  // namespace s2spm
