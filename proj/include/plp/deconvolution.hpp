#pragma once

#include "plp/core_model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>

namespace plp {

/**
 * Singular value factors stored so that A = U * diag(singular_values) * V.
 *
 * Note V here is the transpose of the usual right singular vector matrix.
 * Each column of U has its first non-negligible entry (|u| > 1e-12) made
 * non-negative; the matching row of V flips with it.
 */
struct SvdFactors {
    Eigen::MatrixXd u;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd v;

    Eigen::MatrixXd reconstruct() const { return u * singular_values.asDiagonal() * v; }
};

SvdFactors compute_svd(const Eigen::MatrixXd& matrix);
inline SvdFactors compute_svd(const ConvolutionMatrix& matrix) { return compute_svd(matrix.entries); }

/// Truncation rule: keep singular values >= fraction * largest, or an explicit count.
class TsvdConfig {
  public:
    static TsvdConfig fraction(double f);
    static TsvdConfig rank(Index r);

    bool is_fraction() const noexcept { return std::holds_alternative<double>(rule_); }
    double cutoff_fraction() const { return std::get<double>(rule_); }
    Index explicit_rank() const { return std::get<Index>(rule_); }

  private:
    explicit TsvdConfig(std::variant<double, Index> rule) : rule_(rule) {}
    std::variant<double, Index> rule_;
};

/// Number of singular values >= fraction * largest (ties kept). Assumes non-increasing order.
Index cutoff_rank(const Eigen::VectorXd& singular_values, double fraction);

enum class Constraint { identity, first_difference };

struct TikhonovConfig {
    double alpha = 0.0;
    Constraint constraint = Constraint::identity;
};

/// D(i,i) = 1, D(i,i+1) = -1.
Eigen::MatrixXd first_difference_matrix(Index n);

enum class InverseMethod { exact, tsvd, tikhonov };

/// Regularized or exact inverse B mapping contrast C to residual R = B C.
struct InverseMatrix {
    Eigen::MatrixXd entries;
    InverseMethod method = InverseMethod::exact;
    std::variant<std::monostate, TsvdConfig, TikhonovConfig> config;
    /// Singular values actually inverted (TSVD); N for the other methods.
    Index effective_rank = 0;
};

InverseMatrix exact_inverse(const Eigen::MatrixXd& matrix);
InverseMatrix tsvd_inverse(const SvdFactors& factors, const TsvdConfig& config);
InverseMatrix tikhonov_inverse(const Eigen::MatrixXd& matrix, const TikhonovConfig& config);

Eigen::VectorXd recover_residual(const InverseMatrix& inverse, const Eigen::VectorXd& contrast);

/// Blood volume, flow and mean transit time in model units.
struct PerfusionTriple {
    double blood_volume = 0.0;
    double blood_flow = 0.0;
    /// Empty when the flow is exactly zero.
    std::optional<double> mean_transit_time;
};

PerfusionTriple perfusion_params(const Eigen::VectorXd& residual, const TimeGrid& grid);

}  // namespace plp
