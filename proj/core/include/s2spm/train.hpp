#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "s2spm/model.hpp"
#include "s2spm/sgraph.hpp"

namespace s2spm {

enum class Sampling { automatic, full, sampled };

struct TrainConfig {
    int k_pos = 8;
    int k_neg = 8;
    ModelKind kind = ModelKind::two_space;
    double lr = 0.05;
    int iterations = 5000;
    std::uint64_t seed = 1;
    Sampling sampling = Sampling::automatic;
    int full_ceiling = kFullNllCeiling;
    double nonedge_multiplier = 10.0;  // sampled batch: this many non-edges per edge
    int checkpoint_every = 500;
    double init_sigma = 0.1;
};

// Greedy furthest-sum selection of k column indices. The random initial pick
// is discarded and reselected once k points are in. Ties on the distance sum
// break toward the larger minimum distance to the selected set, then the
// smaller index.
std::vector<int> furthest_sum_indices(const Eigen::MatrixXd& points, int k,
                                      std::uint64_t seed);

// Gaussian logits and biases, identity rotations, gate logits anchored at the
// furthest-sum nodes of the fresh memberships.
ModelParams init_params(const SignedGraph& g, const TrainConfig& cfg);

struct AdamState {
    std::vector<Eigen::VectorXd> m, v;  // one slot per tensor, flat
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(const ModelParams& p);
// One update in place. Throws NumericError on non-finite gradients.
void adam_step(ModelParams& p, const ModelParams& grads, AdamState& state, double lr);

struct TracePoint {
    int iteration = 0;
    double loss = 0.0;
};

struct FitResult {
    ModelParams params;
    std::vector<TracePoint> trace;
    std::uint64_t seed = 0;
    int iterations = 0;
};

using CheckpointFn =
    std::function<void(int iteration, const ModelParams& params, double loss)>;

FitResult fit(const SignedGraph& g, const TrainConfig& cfg,
              const CheckpointFn& on_checkpoint = nullptr);

// Independent restarts with seeds cfg.seed + 0 .. cfg.seed + runs-1.
std::vector<FitResult> fit_ensemble(const SignedGraph& g, const TrainConfig& cfg, int runs);

}  // namespace s2spm
