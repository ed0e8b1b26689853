#include "plp/core_model.hpp"

#include "plp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plp {

TimeGrid::TimeGrid(Eigen::VectorXd instants) : instants_(std::move(instants)) {
    const Index n = instants_.size();
    if (n < 2) {
        throw InvalidArgument("time grid needs at least 2 instants, got " + std::to_string(n));
    }
    intervals_.resize(n);
    double previous = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double t = instants_(i);
        if (!std::isfinite(t) || t <= previous) {
            throw InvalidArgument("time grid instants must be finite, positive and strictly increasing (index " +
                                  std::to_string(i + 1) + ")");
        }
        intervals_(i) = t - previous;
        previous = t;
    }
    const double first = intervals_(0);
    uniform_ = (intervals_.array() - first).abs().maxCoeff() <= 1e-12 * first;
}

TimeGrid TimeGrid::uniform(Index n, double step) {
    if (n < 2) {
        throw InvalidArgument("n must be >= 2, got " + std::to_string(n));
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw InvalidArgument("d must be positive and finite");
    }
    Eigen::VectorXd t(n);
    for (Index i = 0; i < n; ++i) {
        t(i) = static_cast<double>(i + 1) * step;
    }
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::from_instants(std::vector<double> instants) {
    return TimeGrid(Eigen::Map<const Eigen::VectorXd>(instants.data(), static_cast<Index>(instants.size())));
}

TimeGrid TimeGrid::subset(std::span<const Index> kept) const {
    Eigen::VectorXd t(static_cast<Index>(kept.size()));
    Index previous = -1;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const Index idx = kept[k];
        if (idx <= previous || idx >= size()) {
            throw InvalidArgument("kept indices must be strictly increasing and within the grid");
        }
        t(static_cast<Index>(k)) = instants_(idx);
        previous = idx;
    }
    return TimeGrid(std::move(t));
}

AifCurve::AifCurve(TimeGrid grid, Eigen::VectorXd values, double value_at_zero)
    : grid_(std::move(grid)), values_(std::move(values)), value_at_zero_(value_at_zero) {
    if (values_.size() != grid_.size()) {
        throw InvalidArgument("AIF has " + std::to_string(values_.size()) + " values for a grid of " +
                              std::to_string(grid_.size()));
    }
    if (!values_.allFinite() || !std::isfinite(value_at_zero_)) {
        throw InvalidArgument("AIF values must be finite");
    }
}

double AifCurve::at_lag(double lag) const {
    if (!(lag >= 0.0)) {
        throw InvalidArgument("kernel lag must be non-negative");
    }
    const auto& t = grid_.instants();
    const double snap = 1e-9 * grid_.intervals().minCoeff();
    if (lag <= snap) {
        return value_at_zero_;
    }
    // First instant >= lag - snap.
    const auto it = std::lower_bound(t.begin(), t.end(), lag - snap);
    if (it == t.end()) {
        return values_(values_.size() - 1);
    }
    const auto k = static_cast<Index>(it - t.begin());
    if (std::abs(t(k) - lag) <= snap) {
        return values_(k);
    }
    const double left_t = k == 0 ? 0.0 : t(k - 1);
    const double left_v = k == 0 ? value_at_zero_ : values_(k - 1);
    const double frac = (lag - left_t) / (t(k) - left_t);
    return left_v + frac * (values_(k) - left_v);
}

TimeGrid build_uniform_grid(Index n, double step) { return TimeGrid::uniform(n, step); }

AifCurve gamma_aif(const GammaAifParams& params, const TimeGrid& grid) {
    if (!std::isfinite(params.a) || !std::isfinite(params.b) || params.a < 0.0 || params.b < 0.0) {
        throw InvalidArgument("gamma AIF parameters a and b must be finite and non-negative");
    }
    Eigen::VectorXd values(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
        const double t = grid.instant(i);
        values(i) = std::pow(t, params.a) * std::exp(-params.b * t);
    }
    // std::pow(0, 0) == 1 already; spelled out for a == 0.
    const double k0 = params.a == 0.0 ? 1.0 : 0.0;
    return AifCurve(grid, std::move(values), k0);
}

ConvolutionMatrix build_convolution_matrix(const AifCurve& aif, const TimeGrid& grid) {
    if (!(aif.grid() == grid)) {
        throw InvalidArgument("AIF grid does not match the requested grid");
    }
    const Index n = grid.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i <= j; ++i) {
            m(j, i) = aif.at_lag(grid.instant(j) - grid.instant(i)) * grid.interval(i);
        }
    }
    return {grid, std::move(m)};
}

Eigen::VectorXd forward_convolve(const AifCurve& aif, const Eigen::VectorXd& residual) {
    const TimeGrid& grid = aif.grid();
    const Index n = grid.size();
    if (residual.size() != n) {
        throw InvalidArgument("residual length " + std::to_string(residual.size()) + " does not match grid size " +
                              std::to_string(n));
    }
    Eigen::VectorXd out(n);
    for (Index j = 0; j < n; ++j) {
        double sum = 0.0;
        for (Index i = 0; i <= j; ++i) {
            sum += aif.at_lag(grid.instant(j) - grid.instant(i)) * residual(i) * grid.interval(i);
        }
        out(j) = sum;
    }
    return out;
}

}  // namespace plp
