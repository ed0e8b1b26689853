#include "plp/experiments.hpp"

#include "plp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <thread>

namespace plp {

namespace {

/// Runs fn(k) for k in [0, count) over a few threads. Each k writes only its own slot.
template <class Fn>
void parallel_cells(std::size_t count, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(count, std::max(1U, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += workers) {
                fn(k);
            }
        });
    }
}

void require_surface_inputs(std::span<const double> a_values, std::span<const double> b_values, Index n) {
    if (a_values.empty() || b_values.empty()) {
        throw InvalidArgument("surface parameter lists must be non-empty");
    }
    if (n < 2) {
        throw InvalidArgument("surface needs n >= 2");
    }
}

Index parse_index(std::string_view text, std::string_view what) {
    long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw InvalidArgument("strategy " + std::string(what) + " is not an integer: '" + std::string(text) + "'");
    }
    return static_cast<Index>(value);
}

}  // namespace

Eigen::VectorXd gamma_spectrum(double a, double b, Index n) {
    const TimeGrid grid = TimeGrid::uniform(n, 1.0);
    return compute_svd(build_convolution_matrix(gamma_aif({a, b}, grid), grid)).singular_values;
}

SurfaceGrid condition_surface(std::span<const double> a_values, std::span<const double> b_values, Index n) {
    require_surface_inputs(a_values, b_values, n);
    SurfaceGrid s{{a_values.begin(), a_values.end()}, {b_values.begin(), b_values.end()}, n,
                  SurfaceKind::condition_log_ratio, std::vector<double>(a_values.size() * b_values.size())};
    parallel_cells(s.values.size(), [&](std::size_t k) {
        const double a = s.a_values[k / s.b_values.size()];
        const double b = s.b_values[k % s.b_values.size()];
        const TimeGrid grid = TimeGrid::uniform(n, 1.0);
        const AifCurve aif = gamma_aif({a, b}, grid);
        const Eigen::VectorXd spectrum = compute_svd(build_convolution_matrix(aif, grid)).singular_values;
        const double smallest = spectrum(n - 1);
        // A zero kernel at lag 0 zeroes the whole diagonal: the triangular matrix is exactly singular.
        if (aif.value_at_zero() == 0.0 || smallest == 0.0 || !(spectrum(0) > 0.0)) {
            s.values[k] = -std::numeric_limits<double>::infinity();
        } else {
            s.values[k] = std::log10(smallest / spectrum(0));
        }
    });
    return s;
}

SurfaceGrid cutoff_surface(std::span<const double> a_values, std::span<const double> b_values, Index n,
                           double fraction) {
    require_surface_inputs(a_values, b_values, n);
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("cutoff fraction must lie in (0, 1)");
    }
    SurfaceGrid s{{a_values.begin(), a_values.end()}, {b_values.begin(), b_values.end()}, n,
                  SurfaceKind::cutoff_rank, std::vector<double>(a_values.size() * b_values.size())};
    parallel_cells(s.values.size(), [&](std::size_t k) {
        const double a = s.a_values[k / s.b_values.size()];
        const double b = s.b_values[k % s.b_values.size()];
        s.values[k] = static_cast<double>(cutoff_rank(gamma_spectrum(a, b, n), fraction));
    });
    return s;
}

std::vector<PanoramaEntry> weight_panorama(const AifCurve& aif, std::span<const Index> ranks) {
    const TimeGrid& grid = aif.grid();
    for (Index r : ranks) {
        if (r < 1 || r > grid.size()) {
            throw InvalidArgument("panorama rank " + std::to_string(r) + " outside [1, " +
                                  std::to_string(grid.size()) + "]");
        }
    }
    const SvdFactors factors = compute_svd(build_convolution_matrix(aif, grid));
    std::vector<PanoramaEntry> entries;
    entries.reserve(ranks.size());
    for (Index r : ranks) {
        auto [volume, flow] = deconvolution_weights(tsvd_inverse(factors, TsvdConfig::rank(r)), grid);
        entries.push_back({r, std::move(volume), std::move(flow)});
    }
    return entries;
}

namespace {

ScheduleStrategy parse_unchecked(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument("strategy '" + std::string(text) + "' must look like kind:args");
    }
    const std::string_view kind = text.substr(0, colon);
    const std::string_view args = text.substr(colon + 1);
    if (kind == "subsample") {
        const auto sep = args.find(':');
        const Index step = parse_index(args.substr(0, sep), "step");
        const Index first = sep == std::string_view::npos ? step : parse_index(args.substr(sep + 1), "offset");
        return Subsample{step, first - 1};
    }
    if (kind == "truncate") {
        return Truncate{parse_index(args, "count")};
    }
    if (kind == "interp") {
        const auto dash = args.find('-');
        if (dash == std::string_view::npos) {
            throw InvalidArgument("interp strategy needs L-R neighbours, got '" + std::string(args) + "'");
        }
        PeakInterpolate p;
        p.left = parse_index(args.substr(0, dash), "left neighbour") - 1;
        p.right = parse_index(args.substr(dash + 1), "right neighbour") - 1;
        p.replaced.clear();
        for (Index k = p.left + 1; k < p.right; ++k) {
            p.replaced.push_back(k);
        }
        return p;
    }
    throw InvalidArgument("unknown strategy kind '" + std::string(kind) + "'");
}

}  // namespace

ScheduleStrategy parse_strategy(std::string_view text) {
    ScheduleStrategy parsed = parse_unchecked(text);
    // Grid-independent checks only; the grid length is validated at use.
    validate_strategy(parsed, std::numeric_limits<Index>::max() / 2);
    return parsed;
}

std::string to_string(const ScheduleStrategy& strategy) {
    if (const auto* s = std::get_if<Subsample>(&strategy)) {
        std::string text = "subsample:" + std::to_string(s->step);
        if (s->first + 1 != s->step) {
            text += ":" + std::to_string(s->first + 1);
        }
        return text;
    }
    if (const auto* t = std::get_if<Truncate>(&strategy)) {
        return "truncate:" + std::to_string(t->count);
    }
    const auto& p = std::get<PeakInterpolate>(strategy);
    return "interp:" + std::to_string(p.left + 1) + "-" + std::to_string(p.right + 1);
}

void validate_strategy(const ScheduleStrategy& strategy, Index n) {
    if (const auto* s = std::get_if<Subsample>(&strategy)) {
        if (s->step < 2) {
            throw InvalidArgument("subsample step must be >= 2");
        }
        if (s->first < 0 || s->first >= n) {
            throw InvalidArgument("subsample offset outside the grid");
        }
        if (s->first + s->step >= n) {
            throw InvalidArgument("subsample keeps fewer than 2 samples");
        }
        return;
    }
    if (const auto* t = std::get_if<Truncate>(&strategy)) {
        if (t->count < 2 || t->count > n) {
            throw InvalidArgument("truncate count must lie in [2, " + std::to_string(n) + "]");
        }
        return;
    }
    const auto& p = std::get<PeakInterpolate>(strategy);
    if (p.left < 0 || p.right >= n || p.left >= p.right) {
        throw InvalidArgument("interpolation neighbours must satisfy 1 <= L < R <= N");
    }
    if (p.replaced.empty()) {
        throw InvalidArgument("interpolation replaces no samples");
    }
    for (Index k : p.replaced) {
        if (k <= p.left || k >= p.right) {
            throw InvalidArgument("replaced index " + std::to_string(k + 1) +
                                  " is not strictly between the neighbours");
        }
    }
}

std::vector<Index> kept_indices(const ScheduleStrategy& strategy, Index n) {
    validate_strategy(strategy, n);
    std::vector<Index> kept;
    if (const auto* s = std::get_if<Subsample>(&strategy)) {
        for (Index k = s->first; k < n; k += s->step) {
            kept.push_back(k);
        }
    } else if (const auto* t = std::get_if<Truncate>(&strategy)) {
        for (Index k = 0; k < t->count; ++k) {
            kept.push_back(k);
        }
    } else {
        for (Index k = 0; k < n; ++k) {
            kept.push_back(k);
        }
    }
    return kept;
}

namespace {

/// Applies a strategy to the columns of a samples matrix (one row per curve).
Eigen::MatrixXd reduce_columns(const Eigen::MatrixXd& x, const TimeGrid& grid, const ScheduleStrategy& strategy,
                               const std::vector<Index>& kept) {
    if (const auto* p = std::get_if<PeakInterpolate>(&strategy)) {
        Eigen::MatrixXd out = x;
        const double tl = grid.instant(p->left);
        const double tr = grid.instant(p->right);
        for (Index k : p->replaced) {
            const double frac = (grid.instant(k) - tl) / (tr - tl);
            out.col(k) = x.col(p->left) + frac * (x.col(p->right) - x.col(p->left));
        }
        return out;
    }
    return x(Eigen::all, kept);
}

TimeGrid reduce_grid(const TimeGrid& grid, const ScheduleStrategy& strategy, const std::vector<Index>& kept) {
    if (std::holds_alternative<PeakInterpolate>(strategy)) {
        return grid;
    }
    return grid.subset(kept);
}

}  // namespace

AifCurve apply_strategy(const AifCurve& aif, const ScheduleStrategy& strategy) {
    const std::vector<Index> kept = kept_indices(strategy, aif.grid().size());
    const Eigen::MatrixXd row = aif.values().transpose();
    Eigen::VectorXd values = reduce_columns(row, aif.grid(), strategy, kept).transpose();
    return AifCurve(reduce_grid(aif.grid(), strategy, kept), std::move(values), aif.value_at_zero());
}

PixelSeriesMatrix apply_strategy(const PixelSeriesMatrix& data, const ScheduleStrategy& strategy) {
    const std::vector<Index> kept = kept_indices(strategy, data.grid().size());
    return PixelSeriesMatrix(reduce_grid(data.grid(), strategy, kept),
                             reduce_columns(data.values(), data.grid(), strategy, kept), data.mask());
}

ReducedSource apply_strategy(const MethodSource& source, const ScheduleStrategy& strategy) {
    std::vector<Index> kept = kept_indices(strategy, source.grid.size());
    ReducedSource out{{reduce_grid(source.grid, strategy, kept), std::nullopt, std::nullopt}, std::move(kept)};
    if (source.aif) {
        out.source.aif = apply_strategy(*source.aif, strategy);
    }
    if (source.data) {
        out.source.data = apply_strategy(*source.data, strategy);
    }
    return out;
}

double cutoff_singular_value(const AifCurve& aif, double fraction) {
    const Eigen::VectorXd s = compute_svd(build_convolution_matrix(aif, aif.grid())).singular_values;
    const Index r = cutoff_rank(s, fraction);
    if (r == 0) {
        throw SingularInput("no singular value passes the cutoff");
    }
    return s(r - 1);
}

WeightVector method_weights(WeightMethod method, const MethodSource& source, const MethodParams& params) {
    const TimeGrid& grid = source.grid;
    const auto need_aif = [&]() -> const AifCurve& {
        if (!source.aif) {
            throw InvalidArgument("method " + std::string(to_string(method)) + " needs an AIF");
        }
        if (!(source.aif->grid() == grid)) {
            throw InvalidArgument("AIF grid does not match the source grid");
        }
        return *source.aif;
    };

    switch (method) {
        case WeightMethod::axel_volume:
            return axel_weights(grid).volume;
        case WeightMethod::axel_mtt:
            return axel_weights(grid).mtt;
        case WeightMethod::patlak_vr:
            return patlak_weights(need_aif(), grid).relative_volume;
        case WeightMethod::patlak_perm:
            return patlak_weights(need_aif(), grid).permeability;
        case WeightMethod::fpc: {
            if (!source.data) {
                throw InvalidArgument("method fpc needs pixel data");
            }
            if (!(source.data->grid() == grid)) {
                throw InvalidArgument("pixel data grid does not match the source grid");
            }
            return fpc_weights(fit_pca(*source.data), grid);
        }
        case WeightMethod::basis_volume:
        case WeightMethod::basis_mtt:
        case WeightMethod::basis_flow: {
            const bool convolved = method == WeightMethod::basis_flow || params.basis_kind == BasisKind::convolved;
            if (method == WeightMethod::basis_mtt && convolved) {
                throw InvalidArgument("basis-mtt is only defined for the direct basis");
            }
            const BasisSet basis =
                convolved ? bspline_basis(grid, params.basis_size, BasisKind::convolved, need_aif())
                          : bspline_basis(grid, params.basis_size, BasisKind::direct);
            BasisWeights w = basis_weights(basis, grid);
            return method == WeightMethod::basis_volume ? w.volume : w.secondary;
        }
        default:
            break;
    }

    // Deconvolution families.
    const AifCurve& aif = need_aif();
    const ConvolutionMatrix a = build_convolution_matrix(aif, grid);
    InverseMatrix inverse;
    const bool volume = method == WeightMethod::exact_volume || method == WeightMethod::tsvd_volume ||
                        method == WeightMethod::tikhonov_volume;
    if (method == WeightMethod::exact_volume || method == WeightMethod::exact_flow) {
        inverse = exact_inverse(a.entries);
    } else if (method == WeightMethod::tsvd_volume || method == WeightMethod::tsvd_flow) {
        const TsvdConfig config = params.rank ? TsvdConfig::rank(std::min(*params.rank, grid.size()))
                                              : TsvdConfig::fraction(params.cutoff_fraction);
        inverse = tsvd_inverse(compute_svd(a), config);
    } else {
        const double alpha = params.alpha ? *params.alpha : cutoff_singular_value(aif, params.cutoff_fraction);
        inverse = tikhonov_inverse(a.entries, {alpha, params.constraint});
    }
    VolumeFlowWeights w = deconvolution_weights(inverse, grid);
    return volume ? w.volume : w.flow;
}

ConsistencyReport consistency_experiment(WeightMethod method, const MethodSource& source,
                                         std::span<const ScheduleStrategy> strategies, const MethodParams& params) {
    for (const auto& strategy : strategies) {
        validate_strategy(strategy, source.grid.size());
    }
    ConsistencyReport report{method, method_weights(method, source, params), 0.0, 0, {}};
    report.full_tail_divergence = tail_divergence(report.full, params.tail_fraction);
    report.full_sign_changes = sign_changes(report.full);

    for (const auto& strategy : strategies) {
        ReducedSource reduced = apply_strategy(source, strategy);
        StrategyOutcome outcome{strategy, {}, method_weights(method, reduced.source, params), 0.0, 0.0, 0.0, 0};
        const ConsistencyStats stats = consistency_distance(report.full, outcome.reduced, reduced.kept);
        outcome.correlation = stats.correlation;
        outcome.max_abs_diff = stats.max_abs_diff;
        outcome.tail_divergence = tail_divergence(outcome.reduced, params.tail_fraction);
        outcome.sign_changes = sign_changes(outcome.reduced);
        outcome.kept = std::move(reduced.kept);
        report.outcomes.push_back(std::move(outcome));
    }
    return report;
}

}  // namespace plp
