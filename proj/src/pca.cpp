#include "plp/pca.hpp"

#include "plp/errors.hpp"

#include <cmath>
#include <string>

namespace plp {

PixelSeriesMatrix::PixelSeriesMatrix(TimeGrid grid, Eigen::MatrixXd values, std::optional<std::vector<bool>> mask)
    : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.cols() != grid_.size()) {
        throw InvalidArgument("pixel rows have " + std::to_string(values_.cols()) + " samples for a grid of " +
                              std::to_string(grid_.size()));
    }
    if (!values_.allFinite()) {
        throw InvalidArgument("pixel data contain non-finite values");
    }
    if (mask_ && static_cast<Index>(mask_->size()) != values_.rows()) {
        throw InvalidArgument("mask has " + std::to_string(mask_->size()) + " entries for " +
                              std::to_string(values_.rows()) + " pixels");
    }
}

Eigen::MatrixXd PixelSeriesMatrix::selected_rows() const {
    if (!mask_) {
        return values_;
    }
    std::vector<Index> rows;
    for (Index p = 0; p < values_.rows(); ++p) {
        if ((*mask_)[static_cast<std::size_t>(p)]) {
            rows.push_back(p);
        }
    }
    return values_(rows, Eigen::all);
}

PixelSeriesMatrix PixelSeriesMatrix::with_mask(std::vector<bool> mask) const {
    return PixelSeriesMatrix(grid_, values_, std::move(mask));
}

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& x, Eigen::VectorXd& means) {
    means = x.colwise().mean().transpose();
    return x.rowwise() - means.transpose();
}

Eigen::MatrixXd usable_rows(const PixelSeriesMatrix& data) {
    Eigen::MatrixXd x = data.selected_rows();
    if (x.rows() < 2) {
        throw InvalidArgument("PCA needs at least 2 pixels, got " + std::to_string(x.rows()));
    }
    return x;
}

}  // namespace

PcaResult fit_pca(const PixelSeriesMatrix& data) {
    const Eigen::MatrixXd x = usable_rows(data);
    const Index n = x.cols();
    PcaResult result;
    result.observations = x.rows();
    const Eigen::MatrixXd xc = centered(x, result.column_means);
    const Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(x.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericFailure("covariance eigendecomposition failed");
    }
    // Eigen returns ascending order.
    result.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
    const double total = result.eigenvalues.sum();
    const double scale = x.cwiseAbs().maxCoeff();
    // Identical rows can leave rounding-level variance from the column means.
    if (!(total > 1e-24 * scale * scale * static_cast<double>(n))) {
        throw DegenerateData("all time columns are constant across the selected pixels");
    }
    result.component_weights = eig.eigenvectors().col(n - 1);

    double orientation = result.component_weights.dot(result.column_means);
    if (orientation == 0.0) {
        // Mean curve orthogonal to the component: fall back to the first non-negligible entry.
        for (Index i = 0; i < n && orientation == 0.0; ++i) {
            if (std::abs(result.component_weights(i)) > 1e-12) {
                orientation = result.component_weights(i);
            }
        }
    }
    if (orientation < 0.0) {
        result.component_weights = -result.component_weights;
    }
    result.energy_ratio = result.eigenvalues(0) / total;
    return result;
}

Eigen::VectorXd fpc_map(const PixelSeriesMatrix& data, const PcaResult& pca) {
    if (pca.component_weights.size() != data.grid().size()) {
        throw InvalidArgument("component length does not match pixel series length");
    }
    return data.values() * pca.component_weights;
}

double energy_ratio(const PcaResult& pca) {
    const double total = pca.eigenvalues.sum();
    if (!(total > 0.0)) {
        throw DegenerateData("zero total variance; energy ratio undefined");
    }
    return pca.eigenvalues(0) / total;
}

double regional_energy_ratio(const PixelSeriesMatrix& data, const std::vector<bool>& region) {
    return energy_ratio(fit_pca(data.with_mask(region)));
}

Eigen::VectorXd centered_spectrum(const PixelSeriesMatrix& data) {
    const Eigen::MatrixXd x = usable_rows(data);
    Eigen::VectorXd means;
    const Eigen::MatrixXd xc = centered(x, means);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xc);
    Eigen::VectorXd spectrum = Eigen::VectorXd::Zero(x.cols());
    const Eigen::VectorXd& s = svd.singularValues();
    spectrum.head(s.size()) = s.cwiseAbs2() / static_cast<double>(x.rows() - 1);
    return spectrum;
}

WeightVector fpc_weights(const PcaResult& pca, const TimeGrid& grid) {
    if (pca.component_weights.size() != grid.size()) {
        throw InvalidArgument("component length does not match grid");
    }
    return {grid, pca.component_weights, WeightMethod::fpc, true};
}

}  // namespace plp
