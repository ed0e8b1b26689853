#include "doctest.h"

#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/errors.hpp"
#include "plp/weights.hpp"

#include <cmath>
#include <random>

using namespace plp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

WeightVector wrap(const Eigen::VectorXd& w) {
    return {build_uniform_grid(w.size(), 1.0), w, WeightMethod::axel_volume, false};
}

}  // namespace

TEST_CASE("method tags roundtrip") {
    for (WeightMethod m : {WeightMethod::exact_volume, WeightMethod::tsvd_volume, WeightMethod::tsvd_flow,
                           WeightMethod::tikhonov_volume, WeightMethod::tikhonov_flow, WeightMethod::axel_volume,
                           WeightMethod::axel_mtt, WeightMethod::patlak_vr, WeightMethod::patlak_perm,
                           WeightMethod::basis_volume, WeightMethod::basis_mtt, WeightMethod::basis_flow,
                           WeightMethod::fpc}) {
        CHECK(parse_weight_method(to_string(m)) == m);
    }
    CHECK(to_string(WeightMethod::tsvd_volume) == "tsvd-volume");
    CHECK_FALSE(parse_weight_method("nonsense").has_value());
}

TEST_CASE("deconvolution weights from small inverses") {
    const TimeGrid g = build_uniform_grid(3, 1.0);
    VolumeFlowWeights w = deconvolution_weights(InverseMatrix{Eigen::MatrixXd::Identity(3, 3)}, g);
    CHECK(w.volume.weights == Eigen::VectorXd::Ones(3));
    CHECK(w.flow.weights == vec({1, 0, 0}));

    Eigen::MatrixXd b(2, 2);
    b << 1, 2, 3, 4;
    w = deconvolution_weights(InverseMatrix{b}, build_uniform_grid(2, 1.0));
    CHECK(w.volume.weights == vec({4, 6}));
    CHECK(w.flow.weights == vec({1, 2}));

    CHECK_THROWS_AS(deconvolution_weights(InverseMatrix{b}, g), InvalidArgument);
}

TEST_CASE("weight functionals reproduce residue-based parameters") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (const TimeGrid& g : {build_uniform_grid(8, 1.0), build_uniform_grid(8, 0.5),
                              TimeGrid::from_instants({0.5, 1.0, 2.0, 2.5, 4.0, 6.0, 6.5, 9.0})}) {
        Eigen::MatrixXd b(8, 8);
        for (Index i = 0; i < 8; ++i)
            for (Index j = 0; j < 8; ++j) b(i, j) = n01(rng);
        const InverseMatrix inv{b};
        const VolumeFlowWeights w = deconvolution_weights(inv, g);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd c(8);
            for (Index i = 0; i < 8; ++i) c(i) = n01(rng);
            const Eigen::VectorXd r = b * c;
            const double vb = r.dot(g.intervals());
            CHECK(std::abs(w.volume.weights.cwiseProduct(g.intervals()).dot(c) - vb) <= 1e-10 * std::max(1.0, std::abs(vb)));
            CHECK(std::abs(w.flow.weights.dot(c) - r(0)) <= 1e-10 * std::max(1.0, std::abs(r(0))));
            CHECK(apply_weights(w.volume, c) == doctest::Approx(vb).epsilon(1e-10));
            CHECK(apply_weights(w.flow, c) == doctest::Approx(r(0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("normalization") {
    const WeightVector w = wrap(vec({3, 4}));
    const WeightVector n = normalize(w);
    CHECK(n.normalized);
    CHECK(n.weights.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const WeightVector twice = normalize(n);
    CHECK(twice.weights == n.weights);
    CHECK_THROWS_AS(normalize(wrap(Eigen::VectorXd::Zero(3))), DegenerateData);
}

TEST_CASE("axel weights") {
    AxelWeights w = axel_weights(build_uniform_grid(4, 1.0));
    CHECK(w.volume.weights == Eigen::VectorXd::Ones(4));
    CHECK(w.mtt.weights == vec({1, 2, 3, 4}));
    CHECK(centered_correlation(w.volume, w.mtt) == 0.0);

    w = axel_weights(TimeGrid::from_instants({1.0, 3.0}));
    CHECK(w.volume.weights == vec({1, 2}));
    CHECK(w.mtt.weights == vec({1, 6}));
}

TEST_CASE("patlak two-point fit") {
    const double c = 2.5;
    const TimeGrid g = build_uniform_grid(2, 1.0);
    const AifCurve aif(g, Eigen::VectorXd::Constant(2, c), c);
    const PatlakWeights w = patlak_weights(aif, g);
    CHECK(w.permeability.weights(0) == doctest::Approx(-1.0 / c));
    CHECK(w.permeability.weights(1) == doctest::Approx(1.0 / c));
    CHECK(w.relative_volume.weights(0) == doctest::Approx(2.0 / c));
    CHECK(w.relative_volume.weights(1) == doctest::Approx(-1.0 / c));
}

TEST_CASE("patlak recovers synthetic model constants") {
    const TimeGrid g = TimeGrid::from_instants({1.0, 2.0, 3.5, 4.0, 6.0, 7.0, 9.0, 12.0});
    const AifCurve aif = gamma_aif({2.0, 0.4}, g);
    const PatlakWeights w = patlak_weights(aif, g);
    const double vr = 0.7, perm = 0.03;
    Eigen::VectorXd cumulative(g.size());
    double sum = 0.0;
    for (Index k = 0; k < g.size(); ++k) {
        sum += aif.values()(k) * g.interval(k);
        cumulative(k) = sum;
    }
    const Eigen::VectorXd contrast = vr * aif.values() + perm * cumulative;
    CHECK(std::abs(apply_weights(w.relative_volume, contrast) - vr) <= 1e-9);
    CHECK(std::abs(apply_weights(w.permeability, contrast) - perm) <= 1e-9);
    CHECK(apply_weights(w.permeability, 2.0 * contrast) == doctest::Approx(2.0 * perm));
    CHECK(apply_weights(w.relative_volume, 2.0 * contrast) == doctest::Approx(2.0 * vr));
}

TEST_CASE("patlak errors") {
    const TimeGrid g = build_uniform_grid(10, 1.0);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(10);
    v(3) = 0.0;
    v(7) = 0.0;
    try {
        patlak_weights(AifCurve(g, v, 1.0), g);
        FAIL("expected SingularInput");
    } catch (const SingularInput& e) {
        CHECK(e.indices() == std::vector<long>{4, 8});
    }
}

TEST_CASE("basis weights: full pass-through reduces to axel") {
    const TimeGrid g = TimeGrid::from_instants({1.0, 2.0, 4.0, 5.0, 7.5});
    const BasisSet basis{g, Eigen::MatrixXd::Identity(5, 5), BasisKind::direct, std::nullopt};
    const BasisWeights w = basis_weights(basis, g);
    const AxelWeights axel = axel_weights(g);
    CHECK((w.volume.weights - axel.volume.weights).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((w.secondary.weights - axel.mtt.weights).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("basis weights: single constant function") {
    const TimeGrid g = build_uniform_grid(12, 1.0);
    const BasisSet basis{g, Eigen::MatrixXd::Ones(12, 1), BasisKind::direct, std::nullopt};
    const BasisWeights w = basis_weights(basis, g);
    const double expected = g.duration() / 12.0;
    CHECK((w.volume.weights.array() - expected).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("basis weights: cubic polynomial two-step oracle") {
    const TimeGrid g = build_uniform_grid(20, 1.0);
    const BasisSet basis = polynomial_basis(g, 3);
    CHECK(basis.functions.cols() == 4);
    const BasisWeights w = basis_weights(basis, g);
    Eigen::VectorXd c(20);
    for (Index i = 0; i < 20; ++i) {
        const double t = g.instant(i);
        c(i) = t * t * std::exp(-t / 4.0) + 0.1 * std::sin(t);
    }
    // Fit by normal equations, then integrate the fitted curve with Axel weights.
    const Eigen::MatrixXd& h = basis.functions;
    const Eigen::VectorXd coef = (h.transpose() * h).ldlt().solve(h.transpose() * c);
    const Eigen::VectorXd fitted = h * coef;
    const AxelWeights axel = axel_weights(g);
    CHECK(apply_weights(w.volume, c) == doctest::Approx(apply_weights(axel.volume, fitted)).epsilon(1e-9));
    CHECK(apply_weights(w.secondary, c) == doctest::Approx(apply_weights(axel.mtt, fitted)).epsilon(1e-9));
}

TEST_CASE("basis weights: convolved kind fits the residue") {
    const TimeGrid g = build_uniform_grid(24, 1.0);
    const AifCurve aif = gamma_aif({2.0, 0.5}, g);
    const BasisSet basis = bspline_basis(g, 8, BasisKind::convolved, aif);
    const BasisWeights w = basis_weights(basis, g);
    CHECK(w.secondary.method == WeightMethod::basis_flow);
    // A residue inside the basis span is recovered exactly.
    Eigen::VectorXd h(8);
    h << 1.0, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05;
    const Eigen::VectorXd r = basis.functions * h;
    const Eigen::VectorXd c = forward_convolve(aif, r);
    CHECK(apply_weights(w.volume, c) == doctest::Approx(r.dot(g.intervals())).epsilon(1e-8));
    CHECK(apply_weights(w.secondary, c) == doctest::Approx(r(0)).epsilon(1e-8));
}

TEST_CASE("b-spline basis shape") {
    const TimeGrid g = build_uniform_grid(30, 1.0);
    const BasisSet b = bspline_basis(g, 6);
    CHECK(b.functions.cols() == 6);
    const Eigen::VectorXd row_sums = b.functions.rowwise().sum();
    CHECK((row_sums.array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(b.functions.minCoeff() >= 0.0);
    CHECK_THROWS_AS(bspline_basis(g, 3), InvalidArgument);
    CHECK_THROWS_AS(bspline_basis(g, 30), InvalidArgument);
    CHECK_THROWS_AS(bspline_basis(g, 6, BasisKind::convolved), InvalidArgument);
}

TEST_CASE("rank-deficient basis is rejected") {
    const TimeGrid g = build_uniform_grid(6, 1.0);
    Eigen::MatrixXd h = Eigen::MatrixXd::Ones(6, 2);
    const BasisSet basis{g, h, BasisKind::direct, std::nullopt};
    CHECK_THROWS_AS(basis_weights(basis, g), SingularInput);
}

TEST_CASE("sign changes") {
    CHECK(sign_changes(vec({1, -1, 1})) == 2);
    CHECK(sign_changes(vec({1, 1, 1})) == 0);
    CHECK(sign_changes(vec({1, 0, -1})) == 1);
    CHECK(sign_changes(Eigen::VectorXd::Zero(4)) == 0);
}

TEST_CASE("centered correlation") {
    const Eigen::VectorXd w = vec({0.3, -1.0, 2.0, 0.5});
    CHECK(centered_correlation(w, w) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(centered_correlation(Eigen::VectorXd::Constant(4, 2.0), w) == 0.0);
    CHECK(centered_correlation(vec({1, 2, 3, 4}), vec({4, 3, 2, 1})) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(centered_correlation(w, vec({1, 2})), InvalidArgument);
}

TEST_CASE("tail divergence") {
    CHECK(tail_divergence(vec({0.1, 0.1, 0.1, 10}), 0.25) == doctest::Approx(100.0));
    CHECK(tail_divergence(Eigen::VectorXd::Constant(8, -3.0), 0.25) == 1.0);
    CHECK(tail_divergence(Eigen::VectorXd::Zero(8), 0.25) == 0.0);
    CHECK_THROWS_AS(tail_divergence(vec({1, 2}), 0.0), InvalidArgument);
    CHECK_THROWS_AS(tail_divergence(vec({1, 2}), 1.0), InvalidArgument);
}

TEST_CASE("tsvd volume weights diverge at the end for the gamma kernel") {
    const TimeGrid g = build_uniform_grid(60, 1.0);
    const AifCurve aif = gamma_aif({3.0, 1.0 / 1.5}, g);
    const InverseMatrix b = tsvd_inverse(compute_svd(build_convolution_matrix(aif, g)), TsvdConfig::fraction(0.2));
    const VolumeFlowWeights w = deconvolution_weights(b, g);
    // Ratio computed by hand from the raw weights.
    const Eigen::VectorXd a = w.volume.weights.cwiseAbs();
    const double expected = a.tail(15).maxCoeff() / a.head(45).maxCoeff();
    CHECK(tail_divergence(w.volume, 0.25) == doctest::Approx(expected));
    CHECK(tail_divergence(w.volume, 0.25) > 1.0);
}

TEST_CASE("consistency distance") {
    const WeightVector full = wrap(vec({1, 5, 2, 8, 3, 7, 4, 6}));
    const std::vector<Index> kept{1, 3, 5, 7};
    const WeightVector reduced = wrap(vec({5, 8, 7, 6}));
    const ConsistencyStats s = consistency_distance(full, reduced, kept);
    CHECK(s.correlation == doctest::Approx(1.0));
    CHECK(s.max_abs_diff <= 1e-12);

    const WeightVector flat_full = wrap(Eigen::VectorXd::Ones(8));
    const WeightVector flat_reduced = wrap(Eigen::VectorXd::Ones(4));
    const ConsistencyStats f = consistency_distance(flat_full, flat_reduced, kept);
    CHECK(f.correlation == 0.0);
    CHECK(f.max_abs_diff == 0.0);

    const std::vector<Index> bad{1, 3, 5, 9};
    CHECK_THROWS_AS(consistency_distance(full, reduced, bad), InvalidArgument);
}
