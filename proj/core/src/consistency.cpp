#include "s2spm/consistency.hpp"

#include <cmath>

#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"

namespace s2spm {

double soft_mi(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
    if (q1.cols() != q2.cols() || q1.cols() == 0) {
        throw UndefinedBnmiError("soft_mi: assignments must cover the same nonempty node set");
    }
    const double n = static_cast<double>(q1.cols());
    const Eigen::MatrixXd joint = (q1 * q2.transpose()) / n;  // k1 x k2
    const Eigen::VectorXd p1 = joint.rowwise().sum();
    const Eigen::VectorXd p2 = joint.colwise().sum();
    double mi = 0.0;
    for (Eigen::Index a = 0; a < joint.rows(); ++a) {
        for (Eigen::Index b = 0; b < joint.cols(); ++b) {
            const double j = joint(a, b);
            if (j > 0.0) mi += j * std::log(j / (p1(a) * p2(b)));
        }
    }
    return mi;
}

double bnmi(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
    const double self1 = soft_mi(q1, q1);
    const double self2 = soft_mi(q2, q2);
    if (self1 + self2 <= 0.0) {
        throw UndefinedBnmiError("bnmi undefined: both assignments carry no information");
    }
    return 2.0 * soft_mi(q1, q2) / (self1 + self2);
}

BnmiSummary ensemble_bnmi(const std::vector<Eigen::MatrixXd>& runs) {
    const int r = static_cast<int>(runs.size());
    if (r < 2) throw UndefinedBnmiError("ensemble_bnmi needs at least two runs");
    BnmiSummary s;
    std::vector<double> vals;
    for (int a = 0; a < r; ++a) {
        for (int b = a + 1; b < r; ++b) vals.push_back(bnmi(runs[a], runs[b]));
    }
    s.pairs = static_cast<int>(vals.size());
    double sum = 0.0;
    for (double v : vals) sum += v;
    s.mean = sum / s.pairs;
    if (s.pairs > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (s.pairs - 1));
    }
    return s;
}

NullSummary permutation_null(const std::vector<Eigen::MatrixXd>& runs, int n_permutations,
                             std::uint64_t seed) {
    if (runs.size() < 2) throw UndefinedBnmiError("permutation null needs at least two runs");
    if (n_permutations < 1) throw UndefinedBnmiError("need at least one permutation draw");
    Rng rng(seed);
    const Eigen::Index n = runs[0].cols();
    std::vector<double> means;
    means.reserve(n_permutations);
    std::vector<Eigen::MatrixXd> shuffled(runs.size());
    for (int draw = 0; draw < n_permutations; ++draw) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(n));
            shuffled[r].resize(runs[r].rows(), n);
            for (Eigen::Index c = 0; c < n; ++c) {
                shuffled[r].col(c) = runs[r].col(static_cast<Eigen::Index>(perm[c]));
            }
        }
        means.push_back(ensemble_bnmi(shuffled).mean);
    }
    NullSummary out;
    out.draws = n_permutations;
    double sum = 0.0;
    for (double m : means) sum += m;
    out.mean = sum / means.size();
    if (means.size() > 1) {
        double ss = 0.0;
        for (double m : means) ss += (m - out.mean) * (m - out.mean);
        out.sd = std::sqrt(ss / (means.size() - 1));
    }
    return out;
}

}  // namespace s2spm
