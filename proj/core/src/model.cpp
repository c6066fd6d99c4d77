#include "s2spm/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "s2spm/errors.hpp"
#include "s2spm/skellam.hpp"

namespace s2spm {

namespace {

Eigen::MatrixXd column_softmax(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.cols(); ++i) {
        const double m = logits.col(i).maxCoeff();
        out.col(i) = (logits.col(i).array() - m).exp();
        out.col(i) /= out.col(i).sum();
    }
    return out;
}

// membership (k x n) gated by sigma(gates), columns renormalized.
void mix_from(const Eigen::MatrixXd& membership, const Eigen::MatrixXd& gates,
              Eigen::MatrixXd& mix, Eigen::VectorXd& den, Eigen::MatrixXd& gate_sig) {
    const Eigen::Index k = membership.rows(), n = membership.cols();
    gate_sig = (1.0 / (1.0 + (-gates.array()).exp())).matrix();
    mix.resize(n, k);
    den.resize(k);
    for (Eigen::Index d = 0; d < k; ++d) {
        const Eigen::ArrayXd num =
            membership.row(d).array().transpose() * gate_sig.row(d).array().transpose();
        den(d) = num.sum();
        if (!(den(d) > 0.0)) {
            throw DegenerateGateError("gate column " + std::to_string(d) +
                                      " has zero total mass");
        }
        mix.col(d) = (num / den(d)).matrix();
    }
}

SpaceState derive_space(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& r,
                        const Eigen::MatrixXd& gates) {
    SpaceState st;
    st.membership = column_softmax(logits);
    mix_from(st.membership, gates, st.mix, st.mix_den, st.gate);
    st.basis = st.membership * st.mix;
    st.archetype = r * st.basis;
    st.projected = st.archetype * st.membership;
#ifndef NDEBUG
    for (Eigen::Index i = 0; i < st.membership.cols(); ++i) {
        assert(std::fabs(st.membership.col(i).sum() - 1.0) < 1e-9);
    }
    for (Eigen::Index d = 0; d < st.mix.cols(); ++d) {
        assert(std::fabs(st.mix.col(d).sum() - 1.0) < 1e-9);
    }
#endif
    return st;
}

// lambda = exp(clamp(expo)) floored; slope is d lambda / d expo, zero when a
// clamp or the floor is active.
inline void rate_and_slope(double expo, double& lambda, double& slope) {
    if (expo > kExpClamp) {
        lambda = std::exp(kExpClamp);
        slope = 0.0;
        return;
    }
    if (expo < -kExpClamp) {
        lambda = kRateFloor;  // exp(-60) is below the floor anyway
        slope = 0.0;
        return;
    }
    lambda = std::exp(expo);
    if (lambda < kRateFloor) {
        lambda = kRateFloor;
        slope = 0.0;
        return;
    }
    slope = lambda;
}

struct PairAccum {
    double loss = 0.0;
    Eigen::MatrixXd gp_pos, gp_neg;  // dL/d projected, per space
    Eigen::VectorXd ggamma, gdelta;
};

// Loss and partial gradients for one pair with weight w. Everything downstream
// of `projected` and the biases accumulates here; the matrix chain to the
// parameters runs once per evaluation in finalize_space.
inline void accumulate_pair(const ModelParams& p, const ModelState& st, int i, int j,
                            long y, double w, PairAccum& acc) {
    const SpaceState& sp = st.pos;
    const auto vi = sp.projected.col(i) - sp.projected.col(j);
    const double dist_pos = std::sqrt(vi.squaredNorm() + kDistEps);

    double lp, slope_pos, ln_rate, slope_neg, dist_neg;
    if (st.shared) {
        dist_neg = dist_pos;
        double e_pos = p.gamma(i) + p.gamma(j) - dist_pos;
        double e_neg = p.delta(i) + p.delta(j) + dist_pos;
        rate_and_slope(e_pos, lp, slope_pos);
        rate_and_slope(e_neg, ln_rate, slope_neg);
    } else {
        dist_neg = std::sqrt((st.neg.projected.col(i) - st.neg.projected.col(j)).squaredNorm() +
                             kDistEps);
        rate_and_slope(p.gamma(i) + p.gamma(j) - dist_pos, lp, slope_pos);
        rate_and_slope(p.delta(i) + p.delta(j) - dist_neg, ln_rate, slope_neg);
    }

    const SkellamTerm t = skellam_nll_grad(y, lp, ln_rate);
    acc.loss += -w * t.log_prob;

    const double ge_pos = w * t.dl_dpos * slope_pos;  // dL/d exponent_pos
    const double ge_neg = w * t.dl_dneg * slope_neg;
    acc.ggamma(i) += ge_pos;
    acc.ggamma(j) += ge_pos;
    acc.gdelta(i) += ge_neg;
    acc.gdelta(j) += ge_neg;

    if (st.shared) {
        // exponent_pos carries -dist, exponent_neg carries +dist
        const double sigma = (-ge_pos + ge_neg) / dist_pos;
        acc.gp_pos.col(i) += sigma * vi;
        acc.gp_pos.col(j) -= sigma * vi;
    } else {
        const double sig_pos = -ge_pos / dist_pos;
        acc.gp_pos.col(i) += sig_pos * vi;
        acc.gp_pos.col(j) -= sig_pos * vi;
        const auto vn = st.neg.projected.col(i) - st.neg.projected.col(j);
        const double sig_neg = -ge_neg / dist_neg;
        acc.gp_neg.col(i) += sig_neg * vn;
        acc.gp_neg.col(j) -= sig_neg * vn;
    }
}

// Backpropagates dL/dP through archetype = r * membership * mix into the
// space's logits, rotation, and gates.
void finalize_space(const SpaceState& sp, const Eigen::MatrixXd& r,
                    const Eigen::MatrixXd& gp, Eigen::MatrixXd& g_logits,
                    Eigen::MatrixXd& g_r, Eigen::MatrixXd& g_gates) {
    const Eigen::Index k = sp.membership.rows(), n = sp.membership.cols();

    const Eigen::MatrixXd ga = gp * sp.membership.transpose();       // dL/dA
    Eigen::MatrixXd gz = sp.archetype.transpose() * gp;              // distance flow
    g_r = ga * sp.basis.transpose();
    const Eigen::MatrixXd gb = r.transpose() * ga;                   // dL/d basis
    gz += gb * sp.mix.transpose();
    const Eigen::MatrixXd gc = sp.membership.transpose() * gb;       // n x k

    g_gates.resize(k, n);
    for (Eigen::Index d = 0; d < k; ++d) {
        const double dot = gc.col(d).dot(sp.mix.col(d));
        const Eigen::ArrayXd gnum = (gc.col(d).array() - dot) / sp.mix_den(d);
        gz.row(d).array() += gnum.transpose() * sp.gate.row(d).array();
        g_gates.row(d) = (gnum.transpose() * sp.membership.row(d).array() *
                          sp.gate.row(d).array() * (1.0 - sp.gate.row(d).array()))
                             .matrix();
    }

    // softmax backprop, per column
    g_logits.resize(k, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dot = gz.col(i).dot(sp.membership.col(i));
        g_logits.col(i) = sp.membership.col(i).cwiseProduct(
            gz.col(i) - Eigen::VectorXd::Constant(k, dot));
    }
}

NllResult finalize(const ModelParams& p, const ModelState& st, PairAccum& acc) {
    NllResult res;
    res.loss = acc.loss;
    res.grads = ModelParams::zeros_like(p);
    res.grads.gamma = acc.ggamma;
    res.grads.delta = acc.gdelta;
    finalize_space(st.pos, p.r_pos, acc.gp_pos, res.grads.z_logits, res.grads.r_pos,
                   res.grads.g_pos);
    if (!st.shared) {
        finalize_space(st.neg, p.r_neg, acc.gp_neg, res.grads.w_logits, res.grads.r_neg,
                       res.grads.g_neg);
    }
    return res;
}

PairAccum make_accum(const ModelParams& p, const ModelState& st) {
    PairAccum acc;
    const int n = p.n_nodes();
    acc.gp_pos = Eigen::MatrixXd::Zero(p.k_pos(), n);
    if (!st.shared) acc.gp_neg = Eigen::MatrixXd::Zero(p.k_neg(), n);
    acc.ggamma = Eigen::VectorXd::Zero(n);
    acc.gdelta = Eigen::VectorXd::Zero(n);
    return acc;
}

void check_params(const ModelParams& p) {
    const int n = p.n_nodes();
    if (n < 1 || p.k_pos() < 1) throw TrainingDataError("model has no nodes or archetypes");
    if (p.gamma.size() != n || p.delta.size() != n) {
        throw TrainingDataError("bias vectors do not match node count");
    }
    if (p.kind == ModelKind::two_space) {
        if (p.w_logits.cols() != n || p.r_neg.rows() != p.k_neg() ||
            p.g_neg.cols() != n) {
            throw TrainingDataError("negative-space tensors do not match dimensions");
        }
    }
}

}  // namespace

long ModelParams::parameter_count() const {
    return z_logits.size() + w_logits.size() + gamma.size() + delta.size() + r_pos.size() +
           r_neg.size() + g_pos.size() + g_neg.size();
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
    ModelParams p;
    p.kind = other.kind;
    p.z_logits = Eigen::MatrixXd::Zero(other.z_logits.rows(), other.z_logits.cols());
    p.w_logits = Eigen::MatrixXd::Zero(other.w_logits.rows(), other.w_logits.cols());
    p.gamma = Eigen::VectorXd::Zero(other.gamma.size());
    p.delta = Eigen::VectorXd::Zero(other.delta.size());
    p.r_pos = Eigen::MatrixXd::Zero(other.r_pos.rows(), other.r_pos.cols());
    p.r_neg = Eigen::MatrixXd::Zero(other.r_neg.rows(), other.r_neg.cols());
    p.g_pos = Eigen::MatrixXd::Zero(other.g_pos.rows(), other.g_pos.cols());
    p.g_neg = Eigen::MatrixXd::Zero(other.g_neg.rows(), other.g_neg.cols());
    return p;
}

Eigen::MatrixXd memberships(const ModelParams& p, Space s) {
    if (s == Space::pos || p.kind == ModelKind::single_space) {
        return column_softmax(p.z_logits);
    }
    return column_softmax(p.w_logits);
}

Eigen::MatrixXd gate_matrix(const ModelParams& p, Space s) {
    const bool shared = p.kind == ModelKind::single_space;
    const Eigen::MatrixXd member = memberships(p, s);
    const Eigen::MatrixXd& gates =
        (s == Space::pos || shared) ? p.g_pos : p.g_neg;
    Eigen::MatrixXd mix, gate_sig;
    Eigen::VectorXd den;
    mix_from(member, gates, mix, den, gate_sig);
    return mix;
}

ArchetypeSet archetypes(const ModelParams& p) {
    const ModelState st = derive(p);
    ArchetypeSet a;
    a.a_pos = st.pos.archetype;
    a.a_neg = st.space(Space::neg).archetype;
    return a;
}

ModelState derive(const ModelParams& p) {
    check_params(p);
    ModelState st;
    st.shared = p.kind == ModelKind::single_space;
    st.pos = derive_space(p.z_logits, p.r_pos, p.g_pos);
    if (!st.shared) st.neg = derive_space(p.w_logits, p.r_neg, p.g_neg);
    return st;
}

PairRates pair_rates(const ModelParams& p, const ModelState& st, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= p.n_nodes() || j >= p.n_nodes()) {
        throw std::domain_error("pair_rates: need two distinct node indices");
    }
    const double dist_pos =
        std::sqrt((st.pos.projected.col(i) - st.pos.projected.col(j)).squaredNorm() + kDistEps);
    PairRates r;
    double slope;
    if (st.shared) {
        rate_and_slope(p.gamma(i) + p.gamma(j) - dist_pos, r.lambda_pos, slope);
        rate_and_slope(p.delta(i) + p.delta(j) + dist_pos, r.lambda_neg, slope);
    } else {
        const double dist_neg = std::sqrt(
            (st.neg.projected.col(i) - st.neg.projected.col(j)).squaredNorm() + kDistEps);
        rate_and_slope(p.gamma(i) + p.gamma(j) - dist_pos, r.lambda_pos, slope);
        rate_and_slope(p.delta(i) + p.delta(j) - dist_neg, r.lambda_neg, slope);
    }
    return r;
}

NllResult full_nll(const ModelParams& p, const SignedGraph& g, int pair_ceiling) {
    check_params(p);
    if (g.n_nodes != p.n_nodes()) throw TrainingDataError("graph and params disagree on n");
    if (g.n_nodes > pair_ceiling) {
        throw TrainingDataError("full likelihood over " + std::to_string(g.n_nodes) +
                                " nodes exceeds the ceiling of " +
                                std::to_string(pair_ceiling) +
                                " nodes; use the sampled objective");
    }
    const ModelState st = derive(p);
    PairAccum acc = make_accum(p, st);

    // Sorted adjacency, walked in lockstep with the j loop.
    std::vector<std::vector<std::pair<int, long>>> adj(g.n_nodes);
    for (const Edge& e : g.edges) {
        adj[e.u].emplace_back(e.v, e.y);
        adj[e.v].emplace_back(e.u, e.y);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());

    for (int i = 0; i < g.n_nodes; ++i) {
        std::size_t ptr = 0;
        const auto& row = adj[i];
        while (ptr < row.size() && row[ptr].first <= i) ++ptr;
        for (int j = i + 1; j < g.n_nodes; ++j) {
            long y = 0;
            if (ptr < row.size() && row[ptr].first == j) {
                y = row[ptr].second;
                ++ptr;
            }
            accumulate_pair(p, st, i, j, y, 1.0, acc);
        }
    }
    return finalize(p, st, acc);
}

NllResult sampled_nll(const ModelParams& p, const SignedGraph& g, const PairSample& sample,
                      long total_pairs) {
    check_params(p);
    if (g.n_nodes != p.n_nodes()) throw TrainingDataError("graph and params disagree on n");
    const long non_edge_total = total_pairs - static_cast<long>(sample.edges.size());
    if (non_edge_total < 0) throw TrainingDataError("total_pairs smaller than edge count");
    if (non_edge_total > 0 && sample.non_edges.empty()) {
        throw TrainingDataError("sampled objective needs at least one non-edge draw");
    }
    const double w = sample.non_edges.empty()
                         ? 0.0
                         : static_cast<double>(non_edge_total) /
                               static_cast<double>(sample.non_edges.size());

    const ModelState st = derive(p);
    PairAccum acc = make_accum(p, st);
    for (const Edge& e : sample.edges) accumulate_pair(p, st, e.u, e.v, e.y, 1.0, acc);
    for (const auto& [u, v] : sample.non_edges) accumulate_pair(p, st, u, v, 0, w, acc);
    return finalize(p, st, acc);
}

}  // namespace s2spm
