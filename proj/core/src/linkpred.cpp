#include "s2spm/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"
#include "s2spm/skellam.hpp"

namespace s2spm {

namespace {

std::uint64_t pair_key(int u, int v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

// Non-edges of the original graph (train plus held-out edges), excluding the
// held-out zeros; distinct, uniform.
std::vector<std::pair<int, int>> sample_train_zeros(const EdgeSplit& split, std::size_t count,
                                                    Rng& rng) {
    std::unordered_set<std::uint64_t> forbidden;
    for (const Edge& e : split.train.edges) forbidden.insert(pair_key(e.u, e.v));
    for (const Edge& e : split.test_edges) forbidden.insert(pair_key(e.u, e.v));
    for (const auto& [u, v] : split.test_zeros) forbidden.insert(pair_key(u, v));
    const long available =
        split.train.total_pairs() - static_cast<long>(forbidden.size());
    if (static_cast<long>(count) > available) {
        throw TrainingDataError("not enough unlabeled pairs to sample training zeros");
    }
    const int n = split.train.n_nodes;
    std::vector<std::pair<int, int>> out;
    std::unordered_set<std::uint64_t> chosen;
    out.reserve(count);
    while (out.size() < count) {
        const int u = static_cast<int>(rng.next_below(n));
        const int v = static_cast<int>(rng.next_below(n));
        if (u == v) continue;
        const auto [a, b] = std::minmax(u, v);
        const std::uint64_t key = pair_key(a, b);
        if (forbidden.count(key) || chosen.count(key)) continue;
        chosen.insert(key);
        out.emplace_back(a, b);
    }
    return out;
}

double objective(const Eigen::MatrixXd& xs, const std::vector<int>& labels,
                 const Eigen::MatrixXd& theta, double l2, int n_classes, int d) {
    const double n = static_cast<double>(labels.size());
    double nll = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Eigen::VectorXd logits = theta.leftCols(d) * xs.row(i).transpose() + theta.col(d);
        const double m = logits.maxCoeff();
        const double lse = m + std::log((logits.array() - m).exp().sum());
        nll -= logits(labels[i]) - lse;
    }
    return nll / n + 0.5 * l2 * theta.leftCols(d).squaredNorm();
}

}  // namespace

Eigen::Vector4d pair_features(const ModelParams& p, const ModelState& st, int i, int j) {
    const PairRates r = pair_rates(p, st, i, j);
    return {r.lambda_pos, r.lambda_neg, std::log(r.lambda_pos), std::log(r.lambda_neg)};
}

Eigen::VectorXd LinearClassifier::predict_proba(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd xs = (x - mean).cwiseQuotient(scale);
    Eigen::VectorXd logits = weights * xs + intercept;
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

int LinearClassifier::predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd proba = predict_proba(x);
    int best = 0;
    for (int c = 1; c < proba.size(); ++c) {
        if (proba(c) > proba(best)) best = c;
    }
    return best;
}

LinearClassifier fit_multinomial_lr(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                    int n_classes, double l2) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n == 0 || static_cast<int>(labels.size()) != n) {
        throw TrainingDataError("classifier needs one label per sample");
    }
    std::vector<long> class_count(n_classes, 0);
    for (int label : labels) {
        if (label < 0 || label >= n_classes) throw TrainingDataError("label out of range");
        ++class_count[label];
    }
    for (int c = 0; c < n_classes; ++c) {
        if (class_count[c] == 0) {
            throw TrainingDataError("class " + std::to_string(c) +
                                    " absent from training data");
        }
    }

    LinearClassifier clf;
    clf.mean = x.colwise().mean();
    clf.scale.resize(d);
    for (int j = 0; j < d; ++j) {
        const double var = (x.col(j).array() - clf.mean(j)).square().mean();
        const double sd = std::sqrt(var);
        clf.scale(j) = sd > 0.0 ? sd : 1.0;
    }
    Eigen::MatrixXd xs = ((x.rowwise() - clf.mean.transpose()).array().rowwise() /
                          clf.scale.transpose().array())
                             .matrix();

    // theta: n_classes x (d+1), last column is the intercept.
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n_classes, d + 1);
    const int np = n_classes * (d + 1);

    for (int iter = 0; iter < 100; ++iter) {
        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n_classes, d + 1);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd xhat(d + 1);
        for (int i = 0; i < n; ++i) {
            xhat.head(d) = xs.row(i).transpose();
            xhat(d) = 1.0;
            Eigen::VectorXd logits = theta * xhat;
            const double m = logits.maxCoeff();
            Eigen::VectorXd prob = (logits.array() - m).exp();
            prob /= prob.sum();
            Eigen::VectorXd resid = prob;
            resid(labels[i]) -= 1.0;
            grad += resid * xhat.transpose();
            const Eigen::MatrixXd outer = xhat * xhat.transpose();
            for (int c = 0; c < n_classes; ++c) {
                for (int c2 = 0; c2 < n_classes; ++c2) {
                    const double coef = prob(c) * ((c == c2 ? 1.0 : 0.0) - prob(c2));
                    if (coef != 0.0) {
                        hess.block(c * (d + 1), c2 * (d + 1), d + 1, d + 1) += coef * outer;
                    }
                }
            }
        }
        grad /= static_cast<double>(n);
        grad.leftCols(d) += l2 * theta.leftCols(d);
        hess /= static_cast<double>(n);
        for (int c = 0; c < n_classes; ++c) {
            for (int j = 0; j < d; ++j) hess(c * (d + 1) + j, c * (d + 1) + j) += l2;
        }
        // Softmax over-parameterization leaves one flat direction; a whisper of
        // ridge keeps the solve well posed without moving the optimum.
        hess.diagonal().array() += 1e-10;

        if (grad.norm() <= 1e-6) break;

        // The Hessian indexes parameter (c, j) at c*(d+1)+j; flatten to match.
        Eigen::VectorXd gflat(np);
        for (int c = 0; c < n_classes; ++c) {
            gflat.segment(c * (d + 1), d + 1) = grad.row(c).transpose();
        }
        const Eigen::VectorXd step = hess.ldlt().solve(gflat);
        Eigen::MatrixXd stepm(n_classes, d + 1);
        for (int c = 0; c < n_classes; ++c) {
            stepm.row(c) = step.segment(c * (d + 1), d + 1).transpose();
        }
        const double f0 = objective(xs, labels, theta, l2, n_classes, d);
        double scale = 1.0;
        for (int half = 0; half < 40; ++half) {
            const Eigen::MatrixXd trial = theta - scale * stepm;
            if (objective(xs, labels, trial, l2, n_classes, d) <= f0) {
                theta = trial;
                break;
            }
            scale *= 0.5;
        }
    }

    clf.weights = theta.leftCols(d);
    clf.intercept = theta.col(d);
    clf.intercept.array() -= clf.intercept.mean();  // gauge, prediction invariant
    return clf;
}

ThreeClassReport report_from_confusion(const std::array<std::array<long, 3>, 3>& confusion) {
    ThreeClassReport rep;
    rep.confusion = confusion;
    double f1[3];
    long support[3];
    for (int c = 0; c < 3; ++c) {
        long tp = confusion[c][c], fn = 0, fp = 0;
        support[c] = 0;
        for (int o = 0; o < 3; ++o) {
            support[c] += confusion[c][o];
            if (o != c) {
                fn += confusion[c][o];
                fp += confusion[o][c];
            }
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        f1[c] = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    rep.f1_neg = f1[0];
    rep.f1_zero = f1[1];
    rep.f1_pos = f1[2];
    const long total = support[0] + support[1] + support[2];
    if (total > 0) {
        rep.f1_weighted =
            (f1[0] * support[0] + f1[1] * support[1] + f1[2] * support[2]) / total;
    }
    return rep;
}

ThreeClassReport evaluate_three_class(const ModelParams& params, const EdgeSplit& split,
                                      std::uint64_t seed) {
    const ModelState st = derive(params);
    Rng rng(seed);

    const std::size_t n_edges = split.train.edges.size();
    if (n_edges == 0) throw TrainingDataError("no training edges to learn from");
    const std::vector<std::pair<int, int>> zeros = sample_train_zeros(split, n_edges, rng);

    Eigen::MatrixXd x(n_edges + zeros.size(), 4);
    std::vector<int> labels(n_edges + zeros.size());
    std::size_t row = 0;
    for (const Edge& e : split.train.edges) {
        x.row(row) = pair_features(params, st, e.u, e.v).transpose();
        labels[row++] = e.y > 0 ? 2 : 0;
    }
    for (const auto& [u, v] : zeros) {
        x.row(row) = pair_features(params, st, u, v).transpose();
        labels[row++] = 1;
    }
    const LinearClassifier clf = fit_multinomial_lr(x, labels, 3);

    std::array<std::array<long, 3>, 3> confusion{};
    for (const Edge& e : split.test_edges) {
        const int truth = e.y > 0 ? 2 : 0;
        ++confusion[truth][clf.predict(pair_features(params, st, e.u, e.v))];
    }
    for (const auto& [u, v] : split.test_zeros) {
        ++confusion[1][clf.predict(pair_features(params, st, u, v))];
    }
    return report_from_confusion(confusion);
}

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    long n_pos = 0;
    for (int l : labels) n_pos += l;
    const long n_neg = static_cast<long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UndefinedAucError("ranking task saw a single class");
    }
    // Mann-Whitney with midranks for ties.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (labels[idx[t]]) rank_sum_pos += midrank;
        }
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    long n_pos = 0;
    for (int l : labels) n_pos += l;
    if (n_pos == 0 || n_pos == static_cast<long>(n)) {
        throw UndefinedAucError("ranking task saw a single class");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    // Step integral of precision over recall, tied scores enter as one block.
    double area = 0.0;
    long tp = 0, fp = 0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        for (std::size_t t = i; t < j; ++t) {
            if (labels[idx[t]]) ++tp;
            else ++fp;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

namespace {

BinaryTaskReport run_binary_task(const Eigen::MatrixXd& x_train, const std::vector<int>& y_train,
                                 const Eigen::MatrixXd& x_test, const std::vector<int>& y_test) {
    const LinearClassifier clf = fit_multinomial_lr(x_train, y_train, 2);
    std::vector<double> scores(static_cast<std::size_t>(x_test.rows()));
    for (Eigen::Index i = 0; i < x_test.rows(); ++i) {
        scores[static_cast<std::size_t>(i)] = clf.predict_proba(x_test.row(i).transpose())(1);
    }
    return {auc_roc(scores, y_test), auc_pr(scores, y_test)};
}

}  // namespace

BinaryTasksReport evaluate_binary_tasks(const ModelParams& params, const EdgeSplit& split,
                                        std::uint64_t seed) {
    const ModelState st = derive(params);
    Rng base(seed);

    auto features_for = [&](const std::vector<std::pair<int, int>>& pairs) {
        Eigen::MatrixXd x(pairs.size(), 4);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            x.row(i) = pair_features(params, st, pairs[i].first, pairs[i].second).transpose();
        }
        return x;
    };
    auto edge_pairs = [](const std::vector<Edge>& es, int sign) {
        std::vector<std::pair<int, int>> out;
        for (const Edge& e : es) {
            if ((sign > 0 && e.y > 0) || (sign < 0 && e.y < 0) || sign == 0) {
                out.emplace_back(e.u, e.v);
            }
        }
        return out;
    };

    BinaryTasksReport rep;

    {  // positive vs negative on held-out edges
        std::vector<std::pair<int, int>> train_pairs = edge_pairs(split.train.edges, 0);
        std::vector<int> y_train;
        for (const Edge& e : split.train.edges) y_train.push_back(e.y > 0 ? 1 : 0);
        std::vector<std::pair<int, int>> test_pairs = edge_pairs(split.test_edges, 0);
        std::vector<int> y_test;
        for (const Edge& e : split.test_edges) y_test.push_back(e.y > 0 ? 1 : 0);
        rep.pos_vs_neg = run_binary_task(features_for(train_pairs), y_train,
                                         features_for(test_pairs), y_test);
    }

    auto edge_vs_zero = [&](int sign, Rng rng) {
        const std::vector<std::pair<int, int>> pos_train = edge_pairs(split.train.edges, sign);
        if (pos_train.empty()) throw UndefinedAucError("no edges of the requested sign");
        const std::vector<std::pair<int, int>> zeros =
            sample_train_zeros(split, pos_train.size(), rng);
        std::vector<std::pair<int, int>> train_pairs = pos_train;
        train_pairs.insert(train_pairs.end(), zeros.begin(), zeros.end());
        std::vector<int> y_train(pos_train.size(), 1);
        y_train.resize(train_pairs.size(), 0);

        std::vector<std::pair<int, int>> test_pairs = edge_pairs(split.test_edges, sign);
        std::vector<int> y_test(test_pairs.size(), 1);
        test_pairs.insert(test_pairs.end(), split.test_zeros.begin(), split.test_zeros.end());
        y_test.resize(test_pairs.size(), 0);
        return run_binary_task(features_for(train_pairs), y_train, features_for(test_pairs),
                               y_test);
    };
    rep.pos_vs_zero = edge_vs_zero(+1, base.derive(1));
    rep.neg_vs_zero = edge_vs_zero(-1, base.derive(2));
    return rep;
}

EvalReport evaluate_link_prediction(const ModelParams& params, const EdgeSplit& split,
                                    std::uint64_t seed) {
    EvalReport rep;
    rep.seed = seed;
    rep.three_class = evaluate_three_class(params, split, seed);
    rep.binary = evaluate_binary_tasks(params, split, seed);
    return rep;
}

}  // namespace s2spm
