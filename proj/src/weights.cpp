#include "plp/weights.hpp"

#include "plp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace plp {

namespace {

constexpr std::array<std::pair<WeightMethod, std::string_view>, 14> kMethodTags{{
    {WeightMethod::exact_volume, "exact-volume"},
    {WeightMethod::exact_flow, "exact-flow"},
    {WeightMethod::tsvd_volume, "tsvd-volume"},
    {WeightMethod::tsvd_flow, "tsvd-flow"},
    {WeightMethod::tikhonov_volume, "tikhonov-volume"},
    {WeightMethod::tikhonov_flow, "tikhonov-flow"},
    {WeightMethod::axel_volume, "axel-volume"},
    {WeightMethod::axel_mtt, "axel-mtt"},
    {WeightMethod::patlak_vr, "patlak-vr"},
    {WeightMethod::patlak_perm, "patlak-perm"},
    {WeightMethod::basis_volume, "basis-volume"},
    {WeightMethod::basis_mtt, "basis-mtt"},
    {WeightMethod::basis_flow, "basis-flow"},
    {WeightMethod::fpc, "fpc"},
}};

void require_grid(const TimeGrid& expected, const TimeGrid& actual, const char* what) {
    if (!(expected == actual)) {
        throw InvalidArgument(std::string(what) + " grid does not match");
    }
}

/// Least-squares operator (X^T X)^{-1} X^T for a full-column-rank X.
Eigen::MatrixXd regression_operator(const Eigen::MatrixXd& x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || !(s(s.size() - 1) > 1e-10 * s(0))) {
        throw SingularInput("basis matrix is rank deficient");
    }
    return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd convolve_columns(const Eigen::MatrixXd& functions, const AifCurve& aif) {
    Eigen::MatrixXd out(functions.rows(), functions.cols());
    for (Index j = 0; j < functions.cols(); ++j) {
        out.col(j) = forward_convolve(aif, functions.col(j));
    }
    return out;
}

BasisSet make_basis(const TimeGrid& grid, Eigen::MatrixXd functions, BasisKind kind, std::optional<AifCurve> aif) {
    if (kind == BasisKind::convolved) {
        if (!aif) {
            throw InvalidArgument("convolved basis needs an AIF");
        }
        require_grid(grid, aif->grid(), "AIF");
    }
    return {grid, std::move(functions), kind, std::move(aif)};
}

}  // namespace

std::string_view to_string(WeightMethod method) {
    for (const auto& [m, tag] : kMethodTags) {
        if (m == method) {
            return tag;
        }
    }
    return "unknown";
}

std::optional<WeightMethod> parse_weight_method(std::string_view tag) {
    for (const auto& [m, t] : kMethodTags) {
        if (t == tag) {
            return m;
        }
    }
    return std::nullopt;
}

bool applies_intervals(WeightMethod method) {
    return method == WeightMethod::exact_volume || method == WeightMethod::tsvd_volume ||
           method == WeightMethod::tikhonov_volume;
}

WeightVector normalize(const WeightVector& w) {
    if (w.normalized) {
        return w;
    }
    const double norm = w.weights.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegenerateData("cannot normalize a zero or non-finite weight vector (" +
                             std::string(to_string(w.method)) + ")");
    }
    WeightVector out = w;
    out.weights /= norm;
    out.normalized = true;
    return out;
}

double apply_weights(const WeightVector& w, const Eigen::VectorXd& contrast) {
    if (contrast.size() != w.weights.size()) {
        throw InvalidArgument("contrast length does not match weight vector");
    }
    if (applies_intervals(w.method)) {
        return (w.weights.array() * contrast.array() * w.grid.intervals().array()).sum();
    }
    return w.weights.dot(contrast);
}

VolumeFlowWeights deconvolution_weights(const InverseMatrix& inverse, const TimeGrid& grid) {
    const Index n = grid.size();
    if (inverse.entries.rows() != n || inverse.entries.cols() != n) {
        throw InvalidArgument("inverse is " + std::to_string(inverse.entries.rows()) + "x" +
                              std::to_string(inverse.entries.cols()) + " but grid has " + std::to_string(n) +
                              " instants");
    }
    WeightMethod volume_tag = WeightMethod::exact_volume;
    WeightMethod flow_tag = WeightMethod::exact_flow;
    switch (inverse.method) {
        case InverseMethod::exact:
            break;
        case InverseMethod::tsvd:
            volume_tag = WeightMethod::tsvd_volume;
            flow_tag = WeightMethod::tsvd_flow;
            break;
        case InverseMethod::tikhonov:
            volume_tag = WeightMethod::tikhonov_volume;
            flow_tag = WeightMethod::tikhonov_flow;
            break;
    }

    Eigen::VectorXd volume;
    if (grid.is_uniform()) {
        volume = inverse.entries.colwise().sum().transpose();
    } else {
        const Eigen::VectorXd& d = grid.intervals();
        volume = (inverse.entries.transpose() * d).cwiseQuotient(d);
    }
    Eigen::VectorXd flow = inverse.entries.row(0).transpose();
    return {{grid, std::move(volume), volume_tag, false}, {grid, std::move(flow), flow_tag, false}};
}

AxelWeights axel_weights(const TimeGrid& grid) {
    Eigen::VectorXd volume = grid.intervals();
    Eigen::VectorXd mtt = grid.intervals().cwiseProduct(grid.instants());
    return {{grid, std::move(volume), WeightMethod::axel_volume, false},
            {grid, std::move(mtt), WeightMethod::axel_mtt, false}};
}

PatlakWeights patlak_weights(const AifCurve& aif, const TimeGrid& grid) {
    require_grid(grid, aif.grid(), "AIF");
    const Index n = grid.size();
    const Eigen::VectorXd& ca = aif.values();

    std::vector<long> zeros;
    for (Index k = 0; k < n; ++k) {
        if (ca(k) == 0.0) {
            zeros.push_back(static_cast<long>(k + 1));
        }
    }
    if (!zeros.empty()) {
        std::string list;
        for (long z : zeros) {
            list += (list.empty() ? "" : ",") + std::to_string(z);
        }
        throw SingularInput("AIF is zero at indices " + list + "; Patlak ratios undefined", zeros);
    }
    if (n < 2) {
        throw InvalidArgument("Patlak fit needs at least 2 points");
    }

    Eigen::VectorXd x(n);
    double cumulative = 0.0;
    for (Index k = 0; k < n; ++k) {
        cumulative += ca(k) * grid.interval(k);
        x(k) = cumulative / ca(k);
    }
    const double mean_x = x.mean();
    const Eigen::VectorXd dx = x.array() - mean_x;
    const double sxx = dx.squaredNorm();
    if (!(sxx > 0.0)) {
        throw SingularInput("Patlak abscissae are all equal; slope undefined");
    }

    // slope = sum dx_k y_k / sxx, intercept = mean(y) - slope * mean(x), with y_k = C_k / Ca_k.
    const Eigen::VectorXd inv_ca = ca.cwiseInverse();
    Eigen::VectorXd perm = dx.cwiseProduct(inv_ca) / sxx;
    Eigen::VectorXd vr = ((1.0 / static_cast<double>(n)) - mean_x * dx.array() / sxx).matrix().cwiseProduct(inv_ca);
    return {{grid, std::move(vr), WeightMethod::patlak_vr, false},
            {grid, std::move(perm), WeightMethod::patlak_perm, false}};
}

BasisSet bspline_basis(const TimeGrid& grid, Index count, BasisKind kind, std::optional<AifCurve> aif) {
    constexpr int degree = 3;
    const Index n = grid.size();
    if (count < degree + 1 || count >= n) {
        throw InvalidArgument("B-spline basis size must be in [4, N-1], got " + std::to_string(count));
    }
    const double lo = grid.instant(0);
    const double hi = grid.duration();

    // Clamped knot vector: degree+1 copies at each end, uniform interior knots.
    const Index interior = count - degree - 1;
    std::vector<double> knots;
    knots.reserve(static_cast<std::size_t>(count + degree + 1));
    for (int i = 0; i <= degree; ++i) {
        knots.push_back(lo);
    }
    for (Index i = 1; i <= interior; ++i) {
        knots.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(interior + 1));
    }
    for (int i = 0; i <= degree; ++i) {
        knots.push_back(hi);
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, count);
    const auto nk = static_cast<Index>(knots.size());
    for (Index r = 0; r < n; ++r) {
        const double t = grid.instant(r);
        // Cox-de Boor, degree 0 up.
        Eigen::VectorXd b = Eigen::VectorXd::Zero(nk - 1);
        for (Index i = 0; i + 1 < nk; ++i) {
            const bool last_span = knots[i + 1] == hi && knots[i] < hi;
            if ((t >= knots[i] && t < knots[i + 1]) || (t == hi && last_span)) {
                b(i) = 1.0;
            }
        }
        for (int p = 1; p <= degree; ++p) {
            for (Index i = 0; i + p + 1 < nk; ++i) {
                double v = 0.0;
                const double left = knots[i + p] - knots[i];
                const double right = knots[i + p + 1] - knots[i + 1];
                if (left > 0.0) {
                    v += (t - knots[i]) / left * b(i);
                }
                if (right > 0.0) {
                    v += (knots[i + p + 1] - t) / right * b(i + 1);
                }
                b(i) = v;
            }
        }
        h.row(r) = b.head(count).transpose();
    }
    return make_basis(grid, std::move(h), kind, std::move(aif));
}

BasisSet polynomial_basis(const TimeGrid& grid, Index degree, BasisKind kind, std::optional<AifCurve> aif) {
    const Index n = grid.size();
    if (degree < 0 || degree + 1 >= n) {
        throw InvalidArgument("polynomial degree must be in [0, N-2]");
    }
    Eigen::MatrixXd h(n, degree + 1);
    for (Index r = 0; r < n; ++r) {
        const double s = grid.instant(r) / grid.duration();
        double p = 1.0;
        for (Index c = 0; c <= degree; ++c) {
            h(r, c) = p;
            p *= s;
        }
    }
    return make_basis(grid, std::move(h), kind, std::move(aif));
}

BasisWeights basis_weights(const BasisSet& basis, const TimeGrid& grid) {
    require_grid(grid, basis.grid, "basis");
    const Index n = grid.size();
    if (basis.functions.rows() != n || basis.functions.cols() < 1 || basis.functions.cols() > n) {
        throw InvalidArgument("basis must have N rows and between 1 and N columns");
    }
    const Eigen::VectorXd& d = grid.intervals();
    const Eigen::VectorXd td = grid.instants().cwiseProduct(d);

    // Volume moment H_j^V = sum_i H_j(t_i) d_i.
    const Eigen::VectorXd volume_moment = basis.functions.transpose() * d;

    if (basis.kind == BasisKind::direct) {
        const Eigen::MatrixXd fit = regression_operator(basis.functions);
        const Eigen::VectorXd mtt_moment = basis.functions.transpose() * td;
        return {{grid, fit.transpose() * volume_moment, WeightMethod::basis_volume, false},
                {grid, fit.transpose() * mtt_moment, WeightMethod::basis_mtt, false}};
    }

    if (!basis.aif) {
        throw InvalidArgument("convolved basis needs an AIF");
    }
    const Eigen::MatrixXd fit = regression_operator(convolve_columns(basis.functions, *basis.aif));
    const Eigen::VectorXd flow_moment = basis.functions.row(0).transpose();
    return {{grid, fit.transpose() * volume_moment, WeightMethod::basis_volume, false},
            {grid, fit.transpose() * flow_moment, WeightMethod::basis_flow, false}};
}

int sign_changes(const Eigen::VectorXd& w) {
    if (w.size() == 0) {
        return 0;
    }
    const double floor = 1e-12 * w.cwiseAbs().maxCoeff();
    int changes = 0;
    int last = 0;
    for (Index i = 0; i < w.size(); ++i) {
        if (std::abs(w(i)) <= floor) {
            continue;
        }
        const int s = w(i) > 0.0 ? 1 : -1;
        if (last != 0 && s != last) {
            ++changes;
        }
        last = s;
    }
    return changes;
}

double centered_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("correlation needs equal lengths (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    const double na = ca.norm();
    const double nb = cb.norm();
    // Rounding-level spread (e.g. intervals of a uniform 0.1 s grid) counts as zero variance.
    const double scale = std::sqrt(static_cast<double>(a.size())) * 1e-12;
    if (na <= scale * a.cwiseAbs().maxCoeff() || nb <= scale * b.cwiseAbs().maxCoeff()) {
        return 0.0;
    }
    return std::clamp(ca.dot(cb) / (na * nb), -1.0, 1.0);
}

double centered_correlation(const WeightVector& a, const WeightVector& b) {
    return centered_correlation(a.weights, b.weights);
}

double tail_divergence(const Eigen::VectorXd& w, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw InvalidArgument("tail fraction must lie in (0, 1)");
    }
    const Index n = w.size();
    // Guard against fractions like 0.25 * 60 landing a hair above an integer.
    const auto tail = static_cast<Index>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
    if (tail < 1 || tail >= n) {
        throw InvalidArgument("tail fraction leaves an empty head or tail for N = " + std::to_string(n));
    }
    const double tail_max = w.tail(tail).cwiseAbs().maxCoeff();
    const double head_max = w.head(n - tail).cwiseAbs().maxCoeff();
    if (tail_max == 0.0) {
        return 0.0;
    }
    if (head_max == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return tail_max / head_max;
}

ConsistencyStats consistency_distance(const WeightVector& full, const WeightVector& reduced,
                                      std::span<const Index> kept_indices) {
    if (static_cast<Index>(kept_indices.size()) != reduced.weights.size()) {
        throw InvalidArgument("kept index count does not match reduced weight length");
    }
    Eigen::VectorXd restricted(reduced.weights.size());
    for (std::size_t k = 0; k < kept_indices.size(); ++k) {
        const Index idx = kept_indices[k];
        if (idx < 0 || idx >= full.weights.size()) {
            throw InvalidArgument("kept index " + std::to_string(idx + 1) + " is outside the full grid");
        }
        restricted(static_cast<Index>(k)) = full.weights(idx);
    }

    const auto rms_scaled = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const double rms = v.norm() / std::sqrt(static_cast<double>(v.size()));
        return rms > 0.0 ? Eigen::VectorXd(v / rms) : v;
    };
    ConsistencyStats stats;
    stats.correlation = centered_correlation(restricted, reduced.weights);
    stats.max_abs_diff = (rms_scaled(restricted) - rms_scaled(reduced.weights)).cwiseAbs().maxCoeff();
    return stats;
}

}  // namespace plp
