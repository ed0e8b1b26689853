#include "doctest.h"

#include "plp/errors.hpp"
#include "plp/pca.hpp"
#include "plp/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace plp;

namespace {

Eigen::MatrixXd noisy_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = g(rng) * (1.0 + static_cast<double>(j));
    return m;
}

// Power iteration on the explicitly formed covariance.
Eigen::VectorXd power_iteration(const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(x.rows() - 1);
    // Repeated squaring first, so small eigengaps do not stall convergence.
    Eigen::MatrixXd p = cov / cov.norm();
    for (int k = 0; k < 60; ++k) {
        p = p * p;
        p /= p.norm();
    }
    Eigen::VectorXd v = (p * Eigen::VectorXd::Ones(cov.rows())).normalized();
    for (int it = 0; it < 100; ++it) v = (cov * v).normalized();
    return v;
}

// Sign-blind angle via the chord, which stays accurate near zero unlike acos.
double angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ua = a.normalized();
    Eigen::VectorXd ub = b.normalized();
    if (ua.dot(ub) < 0.0) ub = -ub;
    return 2.0 * std::asin(std::min(1.0, 0.5 * (ua - ub).norm()));
}

}  // namespace

TEST_CASE("rank-one data") {
    const TimeGrid g = build_uniform_grid(6, 1.0);
    Eigen::VectorXd s(6);
    s << 0.0, 1.0, 3.0, 2.0, 1.0, 0.5;
    Eigen::MatrixXd x(5, 6);
    for (Index p = 0; p < 5; ++p) x.row(p) = (0.5 + static_cast<double>(p)) * s.transpose();
    const PcaResult r = fit_pca(PixelSeriesMatrix(g, x));
    CHECK(r.component_weights.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(angle(r.component_weights, s) <= 1e-10);
    CHECK(r.component_weights.dot(r.column_means) >= 0.0);
    CHECK(r.energy_ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(energy_ratio(r) == r.energy_ratio);
}

TEST_CASE("two-point antisymmetric data") {
    const TimeGrid g = build_uniform_grid(2, 1.0);
    const PcaResult r = fit_pca(PixelSeriesMatrix(g, Eigen::MatrixXd::Identity(2, 2)));
    CHECK(std::abs(r.component_weights(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(r.component_weights(0) == doctest::Approx(-r.component_weights(1)));
    CHECK(r.energy_ratio == doctest::Approx(1.0));
}

TEST_CASE("matches power iteration on random matrices") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::MatrixXd x = noisy_matrix(50, 8, seed);
        const PcaResult r = fit_pca(PixelSeriesMatrix(build_uniform_grid(8, 1.0), x));
        CHECK(angle(r.component_weights, power_iteration(x)) <= 1e-8);
    }
}

TEST_CASE("eigenvalues agree with the centered singular values") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const Eigen::MatrixXd x = noisy_matrix(30, 7, seed);
        const PixelSeriesMatrix data(build_uniform_grid(7, 1.0), x);
        const PcaResult r = fit_pca(data);
        const Eigen::VectorXd s = centered_spectrum(data);
        for (Index i = 0; i < 7; ++i) {
            CHECK(r.eigenvalues(i) == doctest::Approx(s(i)).epsilon(1e-9));
            if (i > 0) CHECK(r.eigenvalues(i) <= r.eigenvalues(i - 1));
            CHECK(r.eigenvalues(i) >= 0.0);
        }
        CHECK(r.energy_ratio == doctest::Approx(r.eigenvalues(0) / r.eigenvalues.sum()));
    }
}

TEST_CASE("scale equivariance and row permutation invariance") {
    const Eigen::MatrixXd x = noisy_matrix(40, 6, 77);
    const TimeGrid g = build_uniform_grid(6, 1.0);
    const PixelSeriesMatrix data(g, x);
    const PcaResult r = fit_pca(data);
    const PcaResult scaled = fit_pca(PixelSeriesMatrix(g, 3.0 * x));
    CHECK((r.component_weights - scaled.component_weights).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((3.0 * fpc_map(data, r) - fpc_map(PixelSeriesMatrix(g, 3.0 * x), scaled)).cwiseAbs().maxCoeff() <= 1e-9);

    std::vector<Index> order(40);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd shuffled(40, 6);
    for (Index i = 0; i < 40; ++i) shuffled.row(i) = x.row(order[static_cast<std::size_t>(i)]);
    const PcaResult p = fit_pca(PixelSeriesMatrix(g, shuffled));
    CHECK((r.component_weights - p.component_weights).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fpc map projections") {
    const TimeGrid g = build_uniform_grid(3, 1.0);
    Eigen::MatrixXd x(3, 3);
    x << 1, 2, 3, 0, 0, 0, -1, 4, 2;
    const PixelSeriesMatrix data(g, x);
    PcaResult e1;
    e1.component_weights = Eigen::VectorXd::Unit(3, 0);
    const Eigen::VectorXd m = fpc_map(data, e1);
    CHECK(m == x.col(0));
    CHECK(m(1) == 0.0);
    PcaResult wrong;
    wrong.component_weights = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(fpc_map(data, wrong), InvalidArgument);
}

TEST_CASE("energy ratio examples") {
    PcaResult r;
    r.eigenvalues = Eigen::Vector2d(3.0, 1.0);
    CHECK(energy_ratio(r) == doctest::Approx(0.75));
    r.eigenvalues = Eigen::Vector2d(2.0, 2.0);
    CHECK(energy_ratio(r) == doctest::Approx(0.5));
    r.eigenvalues = Eigen::Vector2d(0.0, 0.0);
    CHECK_THROWS_AS(energy_ratio(r), DegenerateData);
}

TEST_CASE("degenerate inputs") {
    const TimeGrid g = build_uniform_grid(4, 1.0);
    CHECK_THROWS_AS(fit_pca(PixelSeriesMatrix(g, Eigen::MatrixXd::Ones(5, 4))), DegenerateData);
    CHECK_THROWS_AS(fit_pca(PixelSeriesMatrix(g, Eigen::MatrixXd::Ones(1, 4))), InvalidArgument);
}

TEST_CASE("mask restricts the observations") {
    const TimeGrid g = build_uniform_grid(5, 1.0);
    Eigen::MatrixXd x = noisy_matrix(10, 5, 9);
    std::vector<bool> mask(10, false);
    for (int i = 0; i < 6; ++i) mask[static_cast<std::size_t>(i)] = true;
    const PcaResult masked = fit_pca(PixelSeriesMatrix(g, x, mask));
    const PcaResult top = fit_pca(PixelSeriesMatrix(g, x.topRows(6)));
    CHECK(masked.observations == 6);
    CHECK((masked.component_weights - top.component_weights).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(regional_energy_ratio(PixelSeriesMatrix(g, x), mask) == doctest::Approx(top.energy_ratio));
    // The map still covers every pixel.
    CHECK(fpc_map(PixelSeriesMatrix(g, x, mask), masked).size() == 10);
}

TEST_CASE("noise barely moves the component of a rank-one phantom") {
    const TimeGrid g = build_uniform_grid(30, 1.0);
    const AifCurve aif = gamma_aif({3.0, 1.0 / 1.5}, g);
    std::vector<TissueClass> classes;
    for (int k = 1; k <= 4; ++k) classes.push_back({10, ExponentialResidue{0.25 * k, 4.0}});
    const PcaResult clean = fit_pca(generate({g, aif, classes, 0.0, 1}).data);
    const PcaResult noisy = fit_pca(generate({g, aif, classes, 1e-4, 1}).data);
    CHECK(angle(clean.component_weights, noisy.component_weights) < 1e-2);
}

TEST_CASE("phantom classes separate on the fpc map") {
    const TimeGrid g = build_uniform_grid(60, 1.0);
    const AifCurve aif = gamma_aif({3.0, 1.0 / 1.5}, g);
    const Phantom ph = generate({g, aif, {{60, ExponentialResidue{1.0, 4.0}}, {40, ExponentialResidue{0.4, 6.0}}}, 0.01, 4});
    const PcaResult r = fit_pca(ph.data);
    const Eigen::VectorXd m = fpc_map(ph.data, r);
    const auto stats = [&](Index from, Index count) {
        const Eigen::VectorXd seg = m.segment(from, count);
        const double mean = seg.mean();
        const double sd = std::sqrt((seg.array() - mean).square().sum() / static_cast<double>(count - 1));
        return std::pair{mean, sd};
    };
    const auto [m1, s1] = stats(0, 60);
    const auto [m2, s2] = stats(60, 40);
    CHECK(std::abs(m1 - m2) > 5.0 * std::max(s1, s2));
}

TEST_CASE("a delayed second class lowers the energy ratio") {
    const TimeGrid g = build_uniform_grid(40, 1.0);
    const AifCurve aif = gamma_aif({3.0, 1.0 / 1.5}, g);
    std::vector<TissueClass> single;
    for (double f : {0.5, 1.0, 1.5}) single.push_back({20, ExponentialResidue{f, 4.0}});
    std::vector<TissueClass> two = single;
    for (double amp : {0.3, 0.6, 0.9}) {
        Eigen::VectorXd delayed = Eigen::VectorXd::Zero(40);
        for (Index i = 8; i < 40; ++i) delayed(i) = amp * std::exp(-(g.instant(i) - 8.0) / 10.0);
        two.push_back({20, delayed});
    }
    const double e_single = fit_pca(generate({g, aif, single, 0.005, 2}).data).energy_ratio;
    const double e_two = fit_pca(generate({g, aif, two, 0.005, 2}).data).energy_ratio;
    CHECK(e_two < e_single);
}
