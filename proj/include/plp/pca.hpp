#pragma once

#include "plp/core_model.hpp"
#include "plp/weights.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace plp {

/// P contrast-enhancement curves (rows) sampled on a common grid, with an
/// optional region-of-interest mask selecting which rows enter the PCA.
class PixelSeriesMatrix {
  public:
    PixelSeriesMatrix(TimeGrid grid, Eigen::MatrixXd values, std::optional<std::vector<bool>> mask = std::nullopt);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::optional<std::vector<bool>>& mask() const noexcept { return mask_; }
    Index pixel_count() const noexcept { return values_.rows(); }

    /// Rows selected by the mask (all rows without one).
    Eigen::MatrixXd selected_rows() const;

    PixelSeriesMatrix with_mask(std::vector<bool> mask) const;

  private:
    TimeGrid grid_;
    Eigen::MatrixXd values_;
    std::optional<std::vector<bool>> mask_;
};

struct PcaResult {
    /// First principal component, unit norm, oriented so that its dot product
    /// with column_means is non-negative.
    Eigen::VectorXd component_weights;
    /// Covariance eigenvalues, non-increasing, clamped at 0.
    Eigen::VectorXd eigenvalues;
    Eigen::VectorXd column_means;
    double energy_ratio = 0.0;
    Index observations = 0;
};

/// Pixels are observations and time points variables; covariance divisor P - 1.
PcaResult fit_pca(const PixelSeriesMatrix& data);

/// Uncentered projection of every pixel (masked or not) onto the component.
Eigen::VectorXd fpc_map(const PixelSeriesMatrix& data, const PcaResult& pca);

/// lambda_1 / sum(lambda).
double energy_ratio(const PcaResult& pca);

/// Energy ratio of the PCA restricted to the given region.
double regional_energy_ratio(const PixelSeriesMatrix& data, const std::vector<bool>& region);

/// Squared singular values of the centered selected rows over (P - 1); an
/// independent route to the covariance eigenvalues.
Eigen::VectorXd centered_spectrum(const PixelSeriesMatrix& data);

WeightVector fpc_weights(const PcaResult& pca, const TimeGrid& grid);

}  // namespace plp
