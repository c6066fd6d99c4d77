#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "s2spm/errors.hpp"
#include "s2spm/linkpred.hpp"
#include "s2spm/model.hpp"
#include "s2spm/rng.hpp"
#include "s2spm/sgraph.hpp"
#include "s2spm/train.hpp"

using namespace s2spm;

namespace {

double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

struct EvalFixture {
    EdgeSplit split;
    ModelParams params;
};

EvalFixture make_fixture(std::uint64_t seed) {
    PlantedConfig pc;
    pc.n_nodes = 60;
    pc.k = 2;
    pc.seed = seed;
    const SignedGraph g = largest_connected_component(generate_planted(pc).graph);
    EvalFixture fx;
    fx.split = split_connectivity_preserving(g, 0.2, 1.0, seed);
    TrainConfig tc;
    tc.k_pos = 2;
    tc.k_neg = 2;
    tc.iterations = 80;
    tc.checkpoint_every = 80;
    tc.seed = seed;
    fx.params = fit(fx.split.train, tc).params;
    return fx;
}

}  // namespace

TEST_SUITE("linkpred") {

TEST_CASE("pair features are the rates and their logs") {
    PlantedConfig pc;
    pc.n_nodes = 12;
    pc.k = 2;
    const SignedGraph g = generate_planted(pc).graph;
    TrainConfig tc;
    tc.k_pos = 2;
    tc.k_neg = 2;
    const ModelParams p = init_params(g, tc);
    const ModelState st = derive(p);
    const PairRates r = pair_rates(p, st, 2, 7);
    const Eigen::Vector4d f = pair_features(p, st, 2, 7);
    CHECK(f(0) == r.lambda_pos);
    CHECK(f(1) == r.lambda_neg);
    CHECK(f(2) == std::log(r.lambda_pos));
    CHECK(f(3) == std::log(r.lambda_neg));
}

TEST_CASE("constant features collapse to the class priors") {
    const int n = 100;
    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(n, 2, 3.5);
    std::vector<int> labels(n, 0);
    for (int i = 0; i < 40; ++i) labels[i] = 1;
    const LinearClassifier clf = fit_multinomial_lr(x, labels, 2);
    const Eigen::VectorXd proba = clf.predict_proba(Eigen::Vector2d(3.5, 3.5));
    CHECK(proba(0) == doctest::Approx(0.6).epsilon(1e-5));
    CHECK(proba(1) == doctest::Approx(0.4).epsilon(1e-5));
    CHECK(clf.scale(0) == 1.0);  // constant column keeps unit scale
    CHECK(clf.intercept.mean() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ties in the posterior break to the lower class") {
    const int n = 50;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 1);
    std::vector<int> labels(n, 0);
    for (int i = 0; i < 25; ++i) labels[i] = 1;
    const LinearClassifier clf = fit_multinomial_lr(x, labels, 2);
    CHECK(clf.predict(Eigen::VectorXd::Zero(1)) == 0);
}

TEST_CASE("a separable line is classified perfectly") {
    Eigen::MatrixXd x(4, 1);
    x << -2.0, -1.0, 1.0, 2.0;
    const std::vector<int> labels{0, 0, 1, 1};
    const LinearClassifier clf = fit_multinomial_lr(x, labels, 2);
    for (int i = 0; i < 4; ++i) {
        CHECK(clf.predict(x.row(i).transpose()) == labels[i]);
    }
    CHECK(clf.predict_proba(Eigen::VectorXd::Constant(1, 2.0))(1) > 0.9);
}

TEST_CASE("three well separated blobs are recovered") {
    Rng rng(5);
    const int per = 60;
    Eigen::MatrixXd x(3 * per, 2);
    std::vector<int> labels(3 * per);
    const double cx[3] = {0.0, 5.0, 0.0};
    const double cy[3] = {0.0, 0.0, 5.0};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < per; ++i) {
            const int row = c * per + i;
            x(row, 0) = cx[c] + 0.5 * rng.next_normal();
            x(row, 1) = cy[c] + 0.5 * rng.next_normal();
            labels[row] = c;
        }
    }
    const LinearClassifier clf = fit_multinomial_lr(x, labels, 3);
    int hits = 0;
    for (int row = 0; row < 3 * per; ++row) {
        if (clf.predict(x.row(row).transpose()) == labels[row]) ++hits;
    }
    CHECK(static_cast<double>(hits) / (3 * per) >= 0.9);
    CHECK(clf.intercept.mean() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("classifier input validation") {
    Eigen::MatrixXd x(3, 1);
    x << 0.0, 1.0, 2.0;
    CHECK_THROWS_AS(fit_multinomial_lr(x, {0, 0, 0}, 2), TrainingDataError);   // class 1 absent
    CHECK_THROWS_AS(fit_multinomial_lr(x, {0, 1, 5}, 2), TrainingDataError);   // out of range
    CHECK_THROWS_AS(fit_multinomial_lr(x, {0, 1}, 2), TrainingDataError);      // size mismatch
    CHECK_THROWS_AS(fit_multinomial_lr(Eigen::MatrixXd(0, 1), {}, 2), TrainingDataError);
}

TEST_CASE("roc area agrees with the pair counting definition") {
    SUBCASE("hand values") {
        CHECK(auc_roc({0.9, 0.8, 0.7}, {1, 0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(auc_roc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(auc_roc({0.9, 0.8, 0.1, 0.2}, {0, 0, 1, 1}) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(auc_roc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("random scores with heavy ties") {
        Rng rng(13);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> scores;
            std::vector<int> labels;
            for (int i = 0; i < 60; ++i) {
                scores.push_back(0.1 * static_cast<double>(rng.next_below(7)));
                labels.push_back(static_cast<int>(rng.next_below(2)));
            }
            labels[0] = 0;
            labels[1] = 1;  // both classes present
            CHECK(auc_roc(scores, labels) ==
                  doctest::Approx(brute_auc(scores, labels)).epsilon(1e-12));
        }
    }
    SUBCASE("single class is undefined") {
        CHECK_THROWS_AS(auc_roc({0.1, 0.2}, {1, 1}), UndefinedAucError);
        CHECK_THROWS_AS(auc_roc({0.1, 0.2}, {0, 0}), UndefinedAucError);
    }
}

TEST_CASE("pr area follows the step integral") {
    CHECK(auc_pr({0.9, 0.8, 0.7}, {1, 0, 1}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(auc_pr({0.9, 0.8, 0.1}, {1, 1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    // One tied block: area equals the prevalence.
    CHECK(auc_pr({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(auc_pr({0.5, 0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 0, 0}) ==
          doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(auc_pr({0.1, 0.2}, {1, 1}), UndefinedAucError);
}

TEST_CASE("confusion summary arithmetic") {
    SUBCASE("perfect diagonal with one empty class") {
        std::array<std::array<long, 3>, 3> c{};
        c[0][0] = 5;
        c[2][2] = 5;
        const ThreeClassReport rep = report_from_confusion(c);
        CHECK(rep.f1_neg == 1.0);
        CHECK(rep.f1_zero == 0.0);
        CHECK(rep.f1_pos == 1.0);
        CHECK(rep.f1_weighted == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("mixed counts") {
        std::array<std::array<long, 3>, 3> c{};
        c[0] = {2, 1, 0};
        c[1] = {1, 2, 1};
        c[2] = {0, 1, 2};
        const ThreeClassReport rep = report_from_confusion(c);
        CHECK(rep.f1_neg == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(rep.f1_zero == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(rep.f1_pos == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(rep.f1_weighted == doctest::Approx(0.6).epsilon(1e-15));
    }
}

TEST_CASE("three class evaluation fills the confusion by cohort") {
    const EvalFixture fx = make_fixture(21);
    const ThreeClassReport rep = evaluate_three_class(fx.params, fx.split, 77);

    long test_neg = 0, test_pos = 0;
    for (const Edge& e : fx.split.test_edges) (e.y > 0 ? test_pos : test_neg) += 1;
    CHECK(rep.confusion[0][0] + rep.confusion[0][1] + rep.confusion[0][2] == test_neg);
    CHECK(rep.confusion[1][0] + rep.confusion[1][1] + rep.confusion[1][2] ==
          static_cast<long>(fx.split.test_zeros.size()));
    CHECK(rep.confusion[2][0] + rep.confusion[2][1] + rep.confusion[2][2] == test_pos);
    CHECK(rep.f1_weighted >= 0.0);
    CHECK(rep.f1_weighted <= 1.0);

    const ThreeClassReport again = evaluate_three_class(fx.params, fx.split, 77);
    CHECK(rep.confusion == again.confusion);
    CHECK(rep.f1_weighted == again.f1_weighted);
}

TEST_CASE("binary tasks report areas in the unit interval deterministically") {
    const EvalFixture fx = make_fixture(22);
    const BinaryTasksReport rep = evaluate_binary_tasks(fx.params, fx.split, 5);
    for (const BinaryTaskReport* t : {&rep.pos_vs_neg, &rep.pos_vs_zero, &rep.neg_vs_zero}) {
        CHECK(t->auc_roc >= 0.0);
        CHECK(t->auc_roc <= 1.0);
        CHECK(t->auc_pr >= 0.0);
        CHECK(t->auc_pr <= 1.0);
    }
    const BinaryTasksReport again = evaluate_binary_tasks(fx.params, fx.split, 5);
    CHECK(rep.pos_vs_neg.auc_roc == again.pos_vs_neg.auc_roc);
    CHECK(rep.pos_vs_zero.auc_pr == again.pos_vs_zero.auc_pr);
    CHECK(rep.neg_vs_zero.auc_roc == again.neg_vs_zero.auc_roc);
}

TEST_CASE("combined report carries both parts and the seed") {
    const EvalFixture fx = make_fixture(23);
    const EvalReport rep = evaluate_link_prediction(fx.params, fx.split, 31);
    CHECK(rep.seed == 31);
    const ThreeClassReport tc = evaluate_three_class(fx.params, fx.split, 31);
    CHECK(rep.three_class.confusion == tc.confusion);
    CHECK(rep.three_class.f1_weighted == tc.f1_weighted);
}

}  // TEST_SUITE
