#include "s2spm/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"

namespace s2spm {

namespace {

std::uint64_t pair_key(int u, int v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sigma,
                                Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = sigma * rng.next_normal();
    }
    return m;
}

Eigen::MatrixXd anchored_gates(Eigen::Index k, Eigen::Index n, const std::vector<int>& anchors) {
    // Off-anchor logit shrinks with n so the anchor keeps ~99% of the column
    // mass regardless of graph size.
    Eigen::MatrixXd g =
        Eigen::MatrixXd::Constant(k, n, -5.0 - std::log(static_cast<double>(n)));
    for (Eigen::Index d = 0; d < k; ++d) g(d, anchors[static_cast<std::size_t>(d)]) = 5.0;
    return g;
}

Eigen::MatrixXd neighborhood_columns(const SignedGraph& g, int sign) {
    // Column i is node i's interaction profile restricted to one sign (the raw
    // signed profile when sign is zero), so anchor selection spreads over
    // nodes with dissimilar neighborhoods instead of arbitrary ones.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.n_nodes, g.n_nodes);
    for (const Edge& e : g.edges) {
        double v = static_cast<double>(e.y);
        if (sign > 0) v = std::max(v, 0.0);
        if (sign < 0) v = std::max(-v, 0.0);
        if (v == 0.0) continue;
        m(e.u, e.v) = v;
        m(e.v, e.u) = v;
    }
    return m;
}

PairSample draw_sample(const SignedGraph& g, double nonedge_multiplier, Rng& rng,
                       const std::unordered_set<std::uint64_t>& adjacent) {
    PairSample s;
    s.edges = g.edges;
    if (g.total_pairs() == static_cast<long>(g.edges.size())) return s;  // complete graph
    const std::size_t want = std::max<std::size_t>(
        static_cast<std::size_t>(nonedge_multiplier * static_cast<double>(g.edges.size())), 1);
    s.non_edges.reserve(want);
    while (s.non_edges.size() < want) {
        const int u = static_cast<int>(rng.next_below(g.n_nodes));
        const int v = static_cast<int>(rng.next_below(g.n_nodes));
        if (u == v) continue;
        const auto [a, b] = std::minmax(u, v);
        if (adjacent.count(pair_key(a, b))) continue;
        s.non_edges.emplace_back(a, b);
    }
    return s;
}

}  // namespace

std::vector<int> furthest_sum_indices(const Eigen::MatrixXd& points, int k,
                                      std::uint64_t seed) {
    const int n = static_cast<int>(points.cols());
    if (k < 1 || k > n) throw TrainingDataError("furthest_sum_indices: need 1 <= k <= n");
    Rng rng(seed);
    if (k == n) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        return all;
    }

    auto dist = [&](int a, int b) { return (points.col(a) - points.col(b)).norm(); };

    std::vector<char> selected(n, 0);
    std::vector<int> order;
    std::vector<double> dsum(n, 0.0);
    std::vector<double> dmin(n, std::numeric_limits<double>::infinity());

    auto add = [&](int idx) {
        selected[idx] = 1;
        order.push_back(idx);
        for (int i = 0; i < n; ++i) {
            const double d = dist(i, idx);
            dsum[i] += d;
            dmin[i] = std::min(dmin[i], d);
        }
    };
    auto pick = [&]() {
        int best = -1;
        for (int i = 0; i < n; ++i) {
            if (selected[i]) continue;
            if (best == -1 || dsum[i] > dsum[best] ||
                (dsum[i] == dsum[best] && dmin[i] > dmin[best])) {
                best = i;
            }
        }
        return best;
    };

    const int start = static_cast<int>(rng.next_below(n));
    add(start);
    while (static_cast<int>(order.size()) < k) add(pick());
    if (k == 1) return order;

    // Replace the arbitrary starting point now that k informed picks exist.
    selected[start] = 0;
    order.erase(order.begin());
    for (int i = 0; i < n; ++i) {
        dsum[i] -= dist(i, start);
        dmin[i] = std::numeric_limits<double>::infinity();
        for (int s : order) dmin[i] = std::min(dmin[i], dist(i, s));
    }
    add(pick());
    return order;
}

ModelParams init_params(const SignedGraph& g, const TrainConfig& cfg) {
    const int n = g.n_nodes;
    if (n < 1) throw EmptyGraphError("cannot initialize a model on an empty graph");
    if (cfg.k_pos < 1 || cfg.k_pos > n ||
        (cfg.kind == ModelKind::two_space && (cfg.k_neg < 1 || cfg.k_neg > n))) {
        throw TrainingDataError("archetype count must lie in [1, n]");
    }
    Rng rng(cfg.seed);

    ModelParams p;
    p.kind = cfg.kind;
    p.z_logits = gaussian_matrix(cfg.k_pos, n, cfg.init_sigma, rng);
    if (cfg.kind == ModelKind::two_space) {
        p.w_logits = gaussian_matrix(cfg.k_neg, n, cfg.init_sigma, rng);
    }
    p.gamma = gaussian_matrix(n, 1, cfg.init_sigma, rng).col(0);
    p.delta = gaussian_matrix(n, 1, cfg.init_sigma, rng).col(0);
    p.r_pos = Eigen::MatrixXd::Identity(cfg.k_pos, cfg.k_pos);

    const bool two = cfg.kind == ModelKind::two_space;
    const std::vector<int> anchors_pos = furthest_sum_indices(
        neighborhood_columns(g, two ? 1 : 0), cfg.k_pos, rng.derive(1).next_u64());
    p.g_pos = anchored_gates(cfg.k_pos, n, anchors_pos);

    if (two) {
        p.r_neg = Eigen::MatrixXd::Identity(cfg.k_neg, cfg.k_neg);
        const std::vector<int> anchors_neg = furthest_sum_indices(
            neighborhood_columns(g, -1), cfg.k_neg, rng.derive(2).next_u64());
        p.g_neg = anchored_gates(cfg.k_neg, n, anchors_neg);
    }
    return p;
}

AdamState make_adam_state(const ModelParams& p) {
    AdamState st;
    for_each_tensor(const_cast<ModelParams&>(p), [&](Eigen::Map<Eigen::VectorXd> t) {
        st.m.push_back(Eigen::VectorXd::Zero(t.size()));
        st.v.push_back(Eigen::VectorXd::Zero(t.size()));
    });
    return st;
}

void adam_step(ModelParams& p, const ModelParams& grads, AdamState& state, double lr) {
    std::vector<Eigen::Map<Eigen::VectorXd>> gs;
    for_each_tensor(const_cast<ModelParams&>(grads),
                    [&](Eigen::Map<Eigen::VectorXd> t) { gs.push_back(t); });
    for (const auto& g : gs) {
        if (!g.allFinite()) throw NumericError("non-finite gradient; training aborted");
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    std::size_t slot = 0;
    for_each_tensor(p, [&](Eigen::Map<Eigen::VectorXd> theta) {
        const auto& g = gs[slot];
        auto& m = state.m[slot];
        auto& v = state.v[slot];
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
        theta.array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.eps);
        ++slot;
    });
}

FitResult fit(const SignedGraph& g, const TrainConfig& cfg, const CheckpointFn& on_checkpoint) {
    ModelParams params = init_params(g, cfg);
    AdamState adam = make_adam_state(params);

    const bool use_full = cfg.sampling == Sampling::full ||
                          (cfg.sampling == Sampling::automatic && g.n_nodes <= cfg.full_ceiling);
    Rng batch_rng = Rng(cfg.seed).derive(0xBA7C4);
    std::unordered_set<std::uint64_t> adjacent;
    if (!use_full) {
        adjacent.reserve(g.edges.size() * 2);
        for (const Edge& e : g.edges) adjacent.insert(pair_key(e.u, e.v));
        if (g.edges.empty()) throw EmptyGraphError("sampled objective needs at least one edge");
    }

    auto evaluate = [&]() {
        if (use_full) return full_nll(params, g, cfg.full_ceiling);
        const PairSample s = draw_sample(g, cfg.nonedge_multiplier, batch_rng, adjacent);
        return sampled_nll(params, g, s, g.total_pairs());
    };

    FitResult out;
    out.seed = cfg.seed;
    out.iterations = cfg.iterations;
    const int every = std::max(1, cfg.checkpoint_every);
    for (int it = 0; it < cfg.iterations; ++it) {
        NllResult r = evaluate();
        if (!std::isfinite(r.loss)) {
            throw NumericError("non-finite loss at iteration " + std::to_string(it));
        }
        if (it % every == 0) {
            out.trace.push_back({it, r.loss});
            if (on_checkpoint) on_checkpoint(it, params, r.loss);
        }
        adam_step(params, r.grads, adam, cfg.lr);
    }
    const double final_loss = evaluate().loss;
    out.trace.push_back({cfg.iterations, final_loss});
    if (on_checkpoint) on_checkpoint(cfg.iterations, params, final_loss);
    out.params = std::move(params);
    return out;
}

std::vector<FitResult> fit_ensemble(const SignedGraph& g, const TrainConfig& cfg, int runs) {
    if (runs < 1) throw TrainingDataError("ensemble needs at least one run");
    std::vector<FitResult> out;
    out.reserve(runs);
    for (int r = 0; r < runs; ++r) {
        TrainConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(r);
        out.push_back(fit(g, c));
    }
    return out;
}

}  // namespace s2spm
