#include "lbf/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "lbf/error.hpp"

namespace lbf {

ScatterDecomposition ScatterDecomposition::of(const LabeledDataset& data) {
    const std::size_t q = data.dimension();
    const std::size_t n1 = data.count_positive();
    const std::size_t n2 = data.count_negative();
    if (n1 == 0 || n2 == 0) throw UndefinedMetric("scatter decomposition needs both classes");

    ScatterDecomposition s;
    s.p1 = static_cast<double>(n1) / static_cast<double>(data.size());
    s.p2 = 1.0 - s.p1;
    s.mu1 = Eigen::VectorXd::Zero(q);
    s.mu2 = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Eigen::Map<const Eigen::VectorXd> x(data.row(i).data(), static_cast<Eigen::Index>(q));
        (data.label(i) ? s.mu1 : s.mu2) += x;
    }
    s.mu1 /= static_cast<double>(n1);
    s.mu2 /= static_cast<double>(n2);

    s.sigma1 = Eigen::MatrixXd::Zero(q, q);
    s.sigma2 = Eigen::MatrixXd::Zero(q, q);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Eigen::Map<const Eigen::VectorXd> x(data.row(i).data(), static_cast<Eigen::Index>(q));
        const bool pos = data.label(i) != 0;
        const Eigen::VectorXd centered = x - (pos ? s.mu1 : s.mu2);
        (pos ? s.sigma1 : s.sigma2).selfadjointView<Eigen::Lower>().rankUpdate(centered);
    }
    s.sigma1 = s.sigma1.selfadjointView<Eigen::Lower>();
    s.sigma2 = s.sigma2.selfadjointView<Eigen::Lower>();
    s.sigma1 /= static_cast<double>(n1);
    s.sigma2 /= static_cast<double>(n2);

    s.within = s.p1 * s.sigma1 + s.p2 * s.sigma2;
    const Eigen::VectorXd delta = s.mu1 - s.mu2;
    s.between = delta * delta.transpose();
    s.direction = pseudo_inverse(s.within) * delta;
    return s;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("pseudo_inverse: matrix must be square");
    if (m.size() == 0) return m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double largest = lambda.cwiseAbs().maxCoeff();
    const double cutoff = 1e-12 * static_cast<double>(m.rows()) * largest;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (std::abs(lambda[i]) > cutoff) inv[i] = 1.0 / lambda[i];
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    return v * inv.asDiagonal() * v.transpose();
}

double f1v(const ScatterDecomposition& s) {
    const Eigen::VectorXd delta = s.mu1 - s.mu2;
    const double scale = std::max(s.mu1.cwiseAbs().maxCoeff(), s.mu2.cwiseAbs().maxCoeff());
    if (delta.norm() <= 1e-14 * std::max(1.0, scale)) return 1.0;

    const double spread = s.direction.dot(s.within * s.direction);
    const double separation = s.direction.dot(s.between * s.direction);
    // delta lies in the null space of W: perfectly separable along d.
    if (!(spread > 0) || s.direction.norm() == 0) return 0.0;
    if (!(separation > 0)) return 1.0;
    return std::clamp(1.0 / (1.0 + separation / spread), 0.0, 1.0);
}

double f1v(const LabeledDataset& data) { return f1v(ScatterDecomposition::of(data)); }

double c2(std::uint64_t n1, std::uint64_t n2) {
    if (n1 == 0 && n2 == 0) throw InvalidArgument("c2: both class counts are zero");
    const long double a = n1;
    const long double b = n2;
    return static_cast<double>((a - b) * (a - b) / (a * a + b * b));
}

ComplexityReport measure_complexity(const LabeledDataset& data) {
    ComplexityReport r;
    r.n1 = data.count_positive();
    r.n2 = data.count_negative();
    r.f1v = f1v(data);
    r.c2 = c2(r.n1, r.n2);
    return r;
}

}  // namespace lbf
