#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace plp {

using Index = Eigen::Index;

/**
 * Sampling instants t_1 < ... < t_N of a perfusion sequence, with t_0 = 0 implicit.
 *
 * Intervals are always derived from the instants (d_i = t_i - t_{i-1}), so the
 * two never disagree.
 */
class TimeGrid {
  public:
    /// Instants d, 2d, ..., nd.
    static TimeGrid uniform(Index n, double step);

    /// Arbitrary strictly increasing positive instants; at least two.
    static TimeGrid from_instants(std::vector<double> instants);

    Index size() const noexcept { return instants_.size(); }
    const Eigen::VectorXd& instants() const noexcept { return instants_; }
    const Eigen::VectorXd& intervals() const noexcept { return intervals_; }
    double instant(Index i) const { return instants_(i); }
    double interval(Index i) const { return intervals_(i); }

    /// Total scan duration T = t_N.
    double duration() const { return instants_(size() - 1); }

    /// True when every interval matches the first to 1e-12 relative.
    bool is_uniform() const noexcept { return uniform_; }

    /// Grid made of the listed instants (0-based, strictly increasing).
    TimeGrid subset(std::span<const Index> kept) const;

    friend bool operator==(const TimeGrid& lhs, const TimeGrid& rhs) {
        return lhs.instants_ == rhs.instants_;
    }

  private:
    explicit TimeGrid(Eigen::VectorXd instants);

    Eigen::VectorXd instants_;
    Eigen::VectorXd intervals_;
    bool uniform_ = false;
};

/// Exponent and decay rate of K(t) = t^a exp(-b t).
struct GammaAifParams {
    double a = 3.0;
    double b = 1.0 / 1.5;
};

/**
 * Arterial input function sampled on a grid.
 *
 * K(0) is kept separately because the diagonal of the convolution matrix
 * evaluates the kernel at lag zero, which is not a grid instant.
 */
class AifCurve {
  public:
    AifCurve(TimeGrid grid, Eigen::VectorXd values, double value_at_zero);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double value_at_zero() const noexcept { return value_at_zero_; }

    /// Kernel value at a non-negative lag. Lags matching an instant (to 1e-9 of
    /// the smallest interval) return the stored sample; others interpolate
    /// linearly between neighbouring samples, with (0, K(0)) as the left anchor.
    double at_lag(double lag) const;

  private:
    TimeGrid grid_;
    Eigen::VectorXd values_;
    double value_at_zero_;
};

/// Lower-triangular discretized convolution operator: entry (j, i) = K(t_j - t_i) d_i.
struct ConvolutionMatrix {
    TimeGrid grid;
    Eigen::MatrixXd entries;
};

TimeGrid build_uniform_grid(Index n, double step);

/// Samples t^a exp(-b t) on the grid, with 0^0 taken as 1.
AifCurve gamma_aif(const GammaAifParams& params, const TimeGrid& grid);

ConvolutionMatrix build_convolution_matrix(const AifCurve& aif, const TimeGrid& grid);

/// Rectangular-rule convolution evaluated by direct summation.
Eigen::VectorXd forward_convolve(const AifCurve& aif, const Eigen::VectorXd& residual);

}  // namespace plp
