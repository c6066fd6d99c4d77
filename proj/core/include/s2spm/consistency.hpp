#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace s2spm {

// Mutual information of two soft assignments over the same nodes. q1 and q2
// are k1 x n and k2 x n with columns on the simplex; nodes weigh 1/n each.
double soft_mi(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

// 2 I(q1,q2) / (I(q1,q1) + I(q2,q2)). Throws UndefinedBnmiError when both
// self informations vanish (all columns identical).
double bnmi(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

struct BnmiSummary {
    double mean = 0.0;
    double sd = 0.0;
    int pairs = 0;  // r(r-1)/2 unordered run pairs
};

BnmiSummary ensemble_bnmi(const std::vector<Eigen::MatrixXd>& runs);

struct NullSummary {
    double mean = 0.0;
    double sd = 0.0;  // across permutation draws
    int draws = 0;
};

// Chance level: every run's node columns are shuffled independently per draw,
// then the pairwise BNMI mean is recomputed.
NullSummary permutation_null(const std::vector<Eigen::MatrixXd>& runs, int n_permutations,
                             std::uint64_t seed);

}  // namespace s2spm
