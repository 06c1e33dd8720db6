#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lbf/dataset.hpp"

namespace lbf {

// Two-class scatter statistics. Class 1 is the positive label.
struct ScatterDecomposition {
    double p1 = 0.0;
    double p2 = 0.0;
    Eigen::VectorXd mu1;
    Eigen::VectorXd mu2;
    Eigen::MatrixXd sigma1;  // normalized by the class count
    Eigen::MatrixXd sigma2;
    Eigen::MatrixXd within;   // W = p1 Sigma1 + p2 Sigma2
    Eigen::MatrixXd between;  // B = (mu1 - mu2)(mu1 - mu2)^T
    Eigen::VectorXd direction;  // d = W^+ (mu1 - mu2)

    // Throws UndefinedMetric unless both classes are present.
    static ScatterDecomposition of(const LabeledDataset& data);
};

// Moore-Penrose pseudo-inverse of a symmetric matrix via eigendecomposition.
// Eigenvalues with |lambda| <= 1e-12 * q * |lambda_max| count as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m);

// Directional-vector maximum Fisher's discriminant ratio,
// 1 / (1 + d^T B d / d^T W d): 0 for linearly separable centroids with no
// spread along d, 1 when the centroids coincide.
double f1v(const LabeledDataset& data);
double f1v(const ScatterDecomposition& s);

// (n1 - n2)^2 / (n1^2 + n2^2).
double c2(std::uint64_t n1, std::uint64_t n2);

struct ComplexityReport {
    double f1v = 0.0;
    double c2 = 0.0;
    std::size_t n1 = 0;  // positives
    std::size_t n2 = 0;  // negatives
};

ComplexityReport measure_complexity(const LabeledDataset& data);

}  // namespace lbf
