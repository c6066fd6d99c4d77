#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "s2spm/model.hpp"
#include "s2spm/sgraph.hpp"

namespace s2spm {

// Classifier inputs for one pair: both rates and their logs.
Eigen::Vector4d pair_features(const ModelParams& p, const ModelState& st, int i, int j);

// Multinomial logistic regression with standardized features, unpenalized
// intercepts, and a Newton solver run to gradient norm 1e-6 from zero init.
struct LinearClassifier {
    Eigen::MatrixXd weights;    // n_classes x d, in standardized coordinates
    Eigen::VectorXd intercept;  // n_classes, mean centered
    Eigen::VectorXd mean;       // d
    Eigen::VectorXd scale;      // d, 1 for constant columns

    Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const;
    int predict(const Eigen::VectorXd& x) const;  // ties break to the lower class
};

LinearClassifier fit_multinomial_lr(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                    int n_classes, double l2 = 1e-4);

// Classes: 0 = negative edge, 1 = no edge, 2 = positive edge.
struct ThreeClassReport {
    std::array<std::array<long, 3>, 3> confusion{};  // [true][predicted]
    double f1_neg = 0.0;
    double f1_zero = 0.0;
    double f1_pos = 0.0;
    double f1_weighted = 0.0;
};

ThreeClassReport evaluate_three_class(const ModelParams& params, const EdgeSplit& split,
                                      std::uint64_t seed);

struct BinaryTaskReport {
    double auc_roc = 0.0;
    double auc_pr = 0.0;
};

struct BinaryTasksReport {
    BinaryTaskReport pos_vs_neg;   // sign recovery on removed edges
    BinaryTaskReport pos_vs_zero;  // positive edges vs sampled non-edges
    BinaryTaskReport neg_vs_zero;
};

BinaryTasksReport evaluate_binary_tasks(const ModelParams& params, const EdgeSplit& split,
                                        std::uint64_t seed);

struct EvalReport {
    ThreeClassReport three_class;
    BinaryTasksReport binary;
    std::uint64_t seed = 0;
};

EvalReport evaluate_link_prediction(const ModelParams& params, const EdgeSplit& split,
                                    std::uint64_t seed);

// Rank statistics. labels are 0/1; throws UndefinedAucError on one class.
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);
double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels);

ThreeClassReport report_from_confusion(const std::array<std::array<long, 3>, 3>& confusion);

}  // namespace s2spm
