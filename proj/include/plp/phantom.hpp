#pragma once

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/pca.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <variant>
#include <vector>

namespace plp {

/// R(t) = flow * exp(-t / mean_transit_time).
struct ExponentialResidue {
    double flow = 1.0;
    double mean_transit_time = 4.0;
};

struct TissueClass {
    Index pixel_count = 1;
    /// Closed-form residue or an explicit residue vector on the grid.
    std::variant<ExponentialResidue, Eigen::VectorXd> residue;
};

struct PhantomSpec {
    TimeGrid grid;
    AifCurve aif;
    std::vector<TissueClass> classes;
    /// Gaussian noise standard deviation as a fraction of the peak noise-free contrast.
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct Phantom {
    PixelSeriesMatrix data;
    std::vector<PerfusionTriple> truth;
    /// Class index of every pixel, in row order.
    std::vector<Index> labels;
    /// Noise-free contrast curve of every class (rows).
    Eigen::MatrixXd class_curves;
};

/// Residue of a class sampled on the grid.
Eigen::VectorXd residue_samples(const TissueClass& tissue, const TimeGrid& grid);

/**
 * Pixels are laid out class by class. Each pixel draws its noise from its own
 * generator seeded by mixing the spec seed with the pixel index, so output does
 * not depend on generation order.
 */
Phantom generate(const PhantomSpec& spec);

}  // namespace plp
