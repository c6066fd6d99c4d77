#include <cmath>
#include <vector>

#include <doctest.h>

#include "s2spm/consistency.hpp"
#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"

using namespace s2spm;

namespace {

Eigen::MatrixXd random_simplex(int k, int n, std::uint64_t seed, double sigma = 1.0) {
    Rng rng(seed);
    Eigen::MatrixXd m(k, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < k; ++r) m(r, c) = sigma * rng.next_normal();
        const double mx = m.col(c).maxCoeff();
        m.col(c) = (m.col(c).array() - mx).exp();
        m.col(c) /= m.col(c).sum();
    }
    return m;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, static_cast<int>(labels.size()));
    for (std::size_t c = 0; c < labels.size(); ++c) m(labels[c], static_cast<int>(c)) = 1.0;
    return m;
}

double brute_mi(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
    const int k1 = static_cast<int>(q1.rows());
    const int k2 = static_cast<int>(q2.rows());
    const int n = static_cast<int>(q1.cols());
    std::vector<std::vector<double>> joint(k1, std::vector<double>(k2, 0.0));
    for (int c = 0; c < n; ++c) {
        for (int a = 0; a < k1; ++a) {
            for (int b = 0; b < k2; ++b) joint[a][b] += q1(a, c) * q2(b, c) / n;
        }
    }
    std::vector<double> p1(k1, 0.0), p2(k2, 0.0);
    for (int a = 0; a < k1; ++a) {
        for (int b = 0; b < k2; ++b) {
            p1[a] += joint[a][b];
            p2[b] += joint[a][b];
        }
    }
    double mi = 0.0;
    for (int a = 0; a < k1; ++a) {
        for (int b = 0; b < k2; ++b) {
            if (joint[a][b] > 0.0) mi += joint[a][b] * std::log(joint[a][b] / (p1[a] * p2[b]));
        }
    }
    return mi;
}

}  // namespace

TEST_SUITE("consistency") {

TEST_CASE("soft mi matches a direct reconstruction") {
    const Eigen::MatrixXd q1 = random_simplex(3, 40, 1);
    const Eigen::MatrixXd q2 = random_simplex(5, 40, 2);
    CHECK(soft_mi(q1, q2) == doctest::Approx(brute_mi(q1, q2)).epsilon(1e-12));
    CHECK(soft_mi(q1, q1) == doctest::Approx(brute_mi(q1, q1)).epsilon(1e-12));
}

TEST_CASE("mi of hard assignments reduces to the contingency formula") {
    // Perfectly dependent binary labels carry exactly one bit (ln 2 nats).
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(i % 2);
    const Eigen::MatrixXd q = one_hot(labels, 2);
    CHECK(soft_mi(q, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bnmi(q, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("self comparison scores one") {
    const Eigen::MatrixXd q = random_simplex(4, 60, 7);
    CHECK(bnmi(q, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent assignments score near zero") {
    Rng rng(11);
    std::vector<int> l1, l2;
    for (int i = 0; i < 2000; ++i) {
        l1.push_back(static_cast<int>(rng.next_below(3)));
        l2.push_back(static_cast<int>(rng.next_below(3)));
    }
    const Eigen::MatrixXd q1 = one_hot(l1, 3);
    const Eigen::MatrixXd q2 = one_hot(l2, 3);
    CHECK(soft_mi(q1, q2) < 0.05);
    CHECK(bnmi(q1, q2) < 0.05);
    CHECK(bnmi(q1, q2) >= 0.0);
}

TEST_CASE("relabeling archetypes changes nothing") {
    const Eigen::MatrixXd q1 = random_simplex(4, 50, 3);
    const Eigen::MatrixXd q2 = random_simplex(4, 50, 4);
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(4, 4);
    perm(2, 0) = perm(0, 1) = perm(3, 2) = perm(1, 3) = 1.0;
    CHECK(bnmi(q1, perm * q2) == doctest::Approx(bnmi(q1, q2)).epsilon(1e-12));
}

TEST_CASE("score stays inside the unit interval on random draws") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::MatrixXd q1 = random_simplex(3, 30, seed, 2.0);
        const Eigen::MatrixXd q2 = random_simplex(4, 30, seed + 100, 2.0);
        const double v = bnmi(q1, q2);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-9);
    }
}

TEST_CASE("degenerate and mismatched inputs throw") {
    // Identical columns carry no information about node identity.
    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(3, 20, 1.0 / 3.0);
    CHECK_THROWS_AS(bnmi(flat, flat), UndefinedBnmiError);
    const Eigen::MatrixXd a = random_simplex(3, 10, 1);
    const Eigen::MatrixXd b = random_simplex(3, 11, 2);
    CHECK_THROWS_AS(soft_mi(a, b), UndefinedBnmiError);
    CHECK_THROWS_AS(soft_mi(Eigen::MatrixXd(3, 0), Eigen::MatrixXd(3, 0)), UndefinedBnmiError);
}

TEST_CASE("ensemble summary aggregates every unordered pair") {
    std::vector<Eigen::MatrixXd> runs;
    for (std::uint64_t s = 0; s < 4; ++s) runs.push_back(random_simplex(3, 40, 20 + s));
    const BnmiSummary summary = ensemble_bnmi(runs);
    CHECK(summary.pairs == 6);

    std::vector<double> vals;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) vals.push_back(bnmi(runs[i], runs[j]));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (vals.size() - 1));
    CHECK(summary.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(summary.sd == doctest::Approx(sd).epsilon(1e-12));

    CHECK_THROWS_AS(ensemble_bnmi({runs[0]}), UndefinedBnmiError);
}

TEST_CASE("permutation null sits far below a structured ensemble") {
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) labels.push_back(i < 100 ? 0 : 1);
    const Eigen::MatrixXd q = one_hot(labels, 2);
    const std::vector<Eigen::MatrixXd> runs{q, q};

    const BnmiSummary structured = ensemble_bnmi(runs);
    CHECK(structured.mean == doctest::Approx(1.0).epsilon(1e-12));

    const NullSummary null = permutation_null(runs, 50, 9);
    CHECK(null.draws == 50);
    CHECK(null.mean < 0.1);
    CHECK(null.mean >= 0.0);
    CHECK(null.sd >= 0.0);

    const NullSummary again = permutation_null(runs, 50, 9);
    CHECK(null.mean == again.mean);
    CHECK(null.sd == again.sd);
    const NullSummary other = permutation_null(runs, 50, 10);
    CHECK(null.mean != other.mean);

    CHECK_THROWS_AS(permutation_null({q}, 10, 1), UndefinedBnmiError);
    CHECK_THROWS_AS(permutation_null(runs, 0, 1), UndefinedBnmiError);
}

}  // TEST_SUITE
