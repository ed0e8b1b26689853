#pragma once

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

namespace plp {

enum class WeightMethod {
    exact_volume,
    exact_flow,
    tsvd_volume,
    tsvd_flow,
    tikhonov_volume,
    tikhonov_flow,
    axel_volume,
    axel_mtt,
    patlak_vr,
    patlak_perm,
    basis_volume,
    basis_mtt,
    basis_flow,
    fpc,
};

std::string_view to_string(WeightMethod method);
std::optional<WeightMethod> parse_weight_method(std::string_view tag);

/// True for deconvolution volume weights, whose parameter is sum w_i C_i d_i
/// rather than the plain sum w_i C_i.
bool applies_intervals(WeightMethod method);

/// Linear functional over a contrast curve: the parameter equals the weighted sum of C_i.
struct WeightVector {
    TimeGrid grid;
    Eigen::VectorXd weights;
    WeightMethod method = WeightMethod::axel_volume;
    bool normalized = false;
};

/// Unit Euclidean norm copy; already-normalized vectors come back unchanged.
WeightVector normalize(const WeightVector& w);

/// Parameter value for one contrast curve.
double apply_weights(const WeightVector& w, const Eigen::VectorXd& contrast);

struct VolumeFlowWeights {
    WeightVector volume;
    WeightVector flow;
};

struct AxelWeights {
    WeightVector volume;
    WeightVector mtt;
};

struct PatlakWeights {
    WeightVector relative_volume;
    WeightVector permeability;
};

struct BasisWeights {
    WeightVector volume;
    /// Mean transit time moment (direct basis) or flow (convolved basis).
    WeightVector secondary;
};

/**
 * Volume weights are the column sums of B and flow weights its first row.
 *
 * On non-uniform grids the column sums are generalized to
 * (sum_j d_j B(j,i)) / d_i so that sum_i w_i C_i d_i still equals the volume
 * of R = B C; on uniform grids this reduces to the plain column sum, which is
 * what is computed there.
 */
VolumeFlowWeights deconvolution_weights(const InverseMatrix& inverse, const TimeGrid& grid);

/// w^V = d_i, w^T = d_i t_i (scale constants fixed at 1).
AxelWeights axel_weights(const TimeGrid& grid);

/// Weights of the least-squares intercept and slope of the Patlak plot
/// C_k/Ca_k against (sum_{i<=k} Ca_i d_i)/Ca_k.
PatlakWeights patlak_weights(const AifCurve& aif, const TimeGrid& grid);

enum class BasisKind { direct, convolved };

/// Sampled basis functions, one per column. Convolved sets fit C with
/// G_j = Ca (x) H_j and therefore carry the AIF.
struct BasisSet {
    TimeGrid grid;
    Eigen::MatrixXd functions;
    BasisKind kind = BasisKind::direct;
    std::optional<AifCurve> aif;
};

/// Clamped cubic B-splines with uniform knots over [t_1, t_N]; count >= 4 and < N.
BasisSet bspline_basis(const TimeGrid& grid, Index count, BasisKind kind = BasisKind::direct,
                       std::optional<AifCurve> aif = std::nullopt);

/// Monomials s^0..s^degree of s = t / T.
BasisSet polynomial_basis(const TimeGrid& grid, Index degree, BasisKind kind = BasisKind::direct,
                          std::optional<AifCurve> aif = std::nullopt);

BasisWeights basis_weights(const BasisSet& basis, const TimeGrid& grid);

/// Strict sign alternations, skipping entries with |w_i| <= 1e-12 max|w|.
int sign_changes(const Eigen::VectorXd& w);
inline int sign_changes(const WeightVector& w) { return sign_changes(w.weights); }

/// Pearson correlation; 0 when either vector has zero variance.
double centered_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double centered_correlation(const WeightVector& a, const WeightVector& b);

/// max |w| over the last ceil(fraction N) entries divided by max |w| over the rest.
double tail_divergence(const Eigen::VectorXd& w, double tail_fraction);
inline double tail_divergence(const WeightVector& w, double tail_fraction) {
    return tail_divergence(w.weights, tail_fraction);
}

struct ConsistencyStats {
    double correlation = 0.0;
    /// Computed after scaling both vectors to unit root-mean-square, so
    /// constant weight functions compare equal across sampling steps.
    double max_abs_diff = 0.0;
};

/// Compares a reduced-grid weight vector with the full one restricted to kept_indices (0-based).
ConsistencyStats consistency_distance(const WeightVector& full, const WeightVector& reduced,
                                      std::span<const Index> kept_indices);

}  // namespace plp
