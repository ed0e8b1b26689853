#include "plp/phantom.hpp"

#include "plp/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace plp {

namespace {

// splitmix64 finalizer
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void validate(const PhantomSpec& spec) {
    if (!(spec.aif.grid() == spec.grid)) {
        throw InvalidArgument("phantom AIF grid does not match the phantom grid");
    }
    if (spec.classes.empty()) {
        throw InvalidArgument("phantom needs at least one tissue class");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw InvalidArgument("noise_sigma must be finite and >= 0");
    }
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const TissueClass& tissue = spec.classes[c];
        if (tissue.pixel_count < 1) {
            throw InvalidArgument("class " + std::to_string(c) + " needs at least one pixel");
        }
        if (const auto* e = std::get_if<ExponentialResidue>(&tissue.residue)) {
            if (!(e->flow > 0.0) || !(e->mean_transit_time > 0.0)) {
                throw InvalidArgument("class " + std::to_string(c) + ": flow and mean transit time must be positive");
            }
        }
    }
}

}  // namespace

Eigen::VectorXd residue_samples(const TissueClass& tissue, const TimeGrid& grid) {
    if (const auto* e = std::get_if<ExponentialResidue>(&tissue.residue)) {
        return (e->flow * (-grid.instants().array() / e->mean_transit_time).exp()).matrix();
    }
    const auto& r = std::get<Eigen::VectorXd>(tissue.residue);
    if (r.size() != grid.size()) {
        throw InvalidArgument("explicit residue has " + std::to_string(r.size()) + " samples for a grid of " +
                              std::to_string(grid.size()));
    }
    if (!r.allFinite()) {
        throw InvalidArgument("explicit residue contains non-finite values");
    }
    return r;
}

Phantom generate(const PhantomSpec& spec) {
    validate(spec);
    const Index n = spec.grid.size();
    const auto class_count = static_cast<Index>(spec.classes.size());

    Eigen::MatrixXd curves(class_count, n);
    std::vector<PerfusionTriple> class_truth;
    Index total = 0;
    for (Index c = 0; c < class_count; ++c) {
        const TissueClass& tissue = spec.classes[static_cast<std::size_t>(c)];
        const Eigen::VectorXd r = residue_samples(tissue, spec.grid);
        curves.row(c) = forward_convolve(spec.aif, r).transpose();
        class_truth.push_back(perfusion_params(r, spec.grid));
        total += tissue.pixel_count;
    }

    const double peak = curves.cwiseAbs().maxCoeff();
    const double sigma = spec.noise_sigma * peak;

    Eigen::MatrixXd values(total, n);
    std::vector<PerfusionTriple> truth;
    std::vector<Index> labels;
    truth.reserve(static_cast<std::size_t>(total));
    labels.reserve(static_cast<std::size_t>(total));
    Index p = 0;
    for (Index c = 0; c < class_count; ++c) {
        for (Index k = 0; k < spec.classes[static_cast<std::size_t>(c)].pixel_count; ++k, ++p) {
            values.row(p) = curves.row(c);
            if (sigma > 0.0) {
                std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(p)));
                std::normal_distribution<double> noise(0.0, sigma);
                for (Index i = 0; i < n; ++i) {
                    values(p, i) += noise(rng);
                }
            }
            truth.push_back(class_truth[static_cast<std::size_t>(c)]);
            labels.push_back(c);
        }
    }
    return {PixelSeriesMatrix(spec.grid, std::move(values)), std::move(truth), std::move(labels), std::move(curves)};
}

}  // namespace plp
