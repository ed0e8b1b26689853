#pragma once

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/pca.hpp"
#include "plp/weights.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace plp {

enum class SurfaceKind { condition_log_ratio, cutoff_rank };

/// Values over a grid of gamma AIF parameters, stored a-major:
/// values[ia * b_values.size() + ib].
struct SurfaceGrid {
    std::vector<double> a_values;
    std::vector<double> b_values;
    Index n = 0;
    SurfaceKind kind = SurfaceKind::condition_log_ratio;
    std::vector<double> values;

    double at(std::size_t ia, std::size_t ib) const { return values.at(ia * b_values.size() + ib); }
};

/// Singular values of the convolution matrix of t^a exp(-b t) sampled at t = 1..n.
Eigen::VectorXd gamma_spectrum(double a, double b, Index n);

/// log10(lambda_N / lambda_1) per cell; -inf when the matrix is exactly singular
/// (zero kernel at lag 0) or lambda_N underflows to 0.
SurfaceGrid condition_surface(std::span<const double> a_values, std::span<const double> b_values, Index n);

/// Cutoff rank under the given fraction per cell.
SurfaceGrid cutoff_surface(std::span<const double> a_values, std::span<const double> b_values, Index n,
                           double fraction);

struct PanoramaEntry {
    Index rank = 0;
    WeightVector volume;
    WeightVector flow;
};

/// TSVD weights at each explicit rank, sharing one factorization.
std::vector<PanoramaEntry> weight_panorama(const AifCurve& aif, std::span<const Index> ranks);

/// Keeps 0-based indices first, first + step, ...
struct Subsample {
    Index step = 4;
    Index first = 3;
};

/// Keeps the first `count` samples.
struct Truncate {
    Index count = 14;
};

/// Replaces the listed samples by linear interpolation in time between the
/// samples at `left` and `right` (all 0-based).
struct PeakInterpolate {
    Index left = 3;
    Index right = 6;
    std::vector<Index> replaced{4, 5};
};

using ScheduleStrategy = std::variant<Subsample, Truncate, PeakInterpolate>;

/**
 * Parses the 1-based text form used on the command line and in reports:
 *   subsample:K[:FIRST]   keep FIRST, FIRST+K, ... (FIRST defaults to K)
 *   truncate:M            keep 1..M
 *   interp:L-R            replace every sample strictly between L and R
 */
ScheduleStrategy parse_strategy(std::string_view text);
std::string to_string(const ScheduleStrategy& strategy);

/// Throws InvalidArgument when the strategy does not fit a grid of n samples.
void validate_strategy(const ScheduleStrategy& strategy, Index n);

/// Full-grid indices that survive the strategy (0-based, increasing).
std::vector<Index> kept_indices(const ScheduleStrategy& strategy, Index n);

/// Inputs a weight computation may draw on; pixel data only matter for FPC.
struct MethodSource {
    TimeGrid grid;
    std::optional<AifCurve> aif;
    std::optional<PixelSeriesMatrix> data;
};

struct ReducedSource {
    MethodSource source;
    std::vector<Index> kept;
};

ReducedSource apply_strategy(const MethodSource& source, const ScheduleStrategy& strategy);
AifCurve apply_strategy(const AifCurve& aif, const ScheduleStrategy& strategy);
PixelSeriesMatrix apply_strategy(const PixelSeriesMatrix& data, const ScheduleStrategy& strategy);

struct MethodParams {
    double cutoff_fraction = 0.2;
    /// Explicit TSVD rank; overrides the fraction when set.
    std::optional<Index> rank;
    /// Tikhonov strength; defaults to the singular value at the fraction cutoff.
    std::optional<double> alpha;
    Constraint constraint = Constraint::identity;
    Index basis_size = 8;
    BasisKind basis_kind = BasisKind::direct;
    double tail_fraction = 0.25;
};

/// Singular value lambda_r at the fraction cutoff of the AIF's convolution matrix.
double cutoff_singular_value(const AifCurve& aif, double fraction);

/// The single weight vector a method tag names, computed from the source.
WeightVector method_weights(WeightMethod method, const MethodSource& source, const MethodParams& params);

struct StrategyOutcome {
    ScheduleStrategy strategy;
    std::vector<Index> kept;
    WeightVector reduced;
    double correlation = 0.0;
    double max_abs_diff = 0.0;
    double tail_divergence = 0.0;
    int sign_changes = 0;
};

struct ConsistencyReport {
    WeightMethod method = WeightMethod::fpc;
    WeightVector full;
    double full_tail_divergence = 0.0;
    int full_sign_changes = 0;
    std::vector<StrategyOutcome> outcomes;
};

ConsistencyReport consistency_experiment(WeightMethod method, const MethodSource& source,
                                         std::span<const ScheduleStrategy> strategies,
                                         const MethodParams& params = {});

}  // namespace plp
