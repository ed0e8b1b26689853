#include "plp/deconvolution.hpp"

#include "plp/errors.hpp"

#include <cmath>
#include <string>

namespace plp {

namespace {

void require_square_finite(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidArgument(std::string(what) + " must be a non-empty square matrix");
    }
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + " contains non-finite entries");
    }
}

}  // namespace

SvdFactors compute_svd(const Eigen::MatrixXd& matrix) {
    require_square_finite(matrix, "SVD input");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw NumericFailure("Jacobi SVD did not converge on a " + std::to_string(matrix.rows()) + "x" +
                             std::to_string(matrix.cols()) + " matrix");
    }

    SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
    if (!f.u.allFinite() || !f.v.allFinite() || !f.singular_values.allFinite()) {
        throw NumericFailure("SVD produced non-finite factors");
    }

    for (Index k = 0; k < f.u.cols(); ++k) {
        for (Index i = 0; i < f.u.rows(); ++i) {
            const double x = f.u(i, k);
            if (std::abs(x) > 1e-12) {
                if (x < 0.0) {
                    f.u.col(k) *= -1.0;
                    f.v.row(k) *= -1.0;
                }
                break;
            }
        }
    }
    return f;
}

TsvdConfig TsvdConfig::fraction(double f) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw InvalidArgument("cutoff fraction must lie in [0, 1]");
    }
    return TsvdConfig(f);
}

TsvdConfig TsvdConfig::rank(Index r) {
    if (r < 1) {
        throw InvalidArgument("TSVD rank must be >= 1");
    }
    return TsvdConfig(r);
}

Index cutoff_rank(const Eigen::VectorXd& singular_values, double fraction) {
    if (singular_values.size() == 0) {
        return 0;
    }
    const double threshold = fraction * singular_values(0);
    Index r = 0;
    while (r < singular_values.size() && singular_values(r) >= threshold) {
        ++r;
    }
    return r;
}

Eigen::MatrixXd first_difference_matrix(Index n) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
    for (Index i = 0; i + 1 < n; ++i) {
        d(i, i + 1) = -1.0;
    }
    return d;
}

InverseMatrix exact_inverse(const Eigen::MatrixXd& matrix) {
    require_square_finite(matrix, "matrix");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(matrix);
    // Exact zeros on a triangular diagonal must be reported as singular even when
    // the LU threshold would not catch them.
    if (!lu.isInvertible() || lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) {
        throw SingularInput("matrix is singular; exact inversion impossible");
    }
    InverseMatrix inv;
    inv.entries = lu.inverse();
    inv.method = InverseMethod::exact;
    inv.effective_rank = matrix.rows();
    return inv;
}

InverseMatrix tsvd_inverse(const SvdFactors& factors, const TsvdConfig& config) {
    const Index n = factors.singular_values.size();
    Index r = 0;
    if (config.is_fraction()) {
        if (n == 0 || !(factors.singular_values(0) > 0.0)) {
            throw SingularInput("largest singular value is zero; fraction cutoff undefined");
        }
        r = cutoff_rank(factors.singular_values, config.cutoff_fraction());
    } else {
        r = config.explicit_rank();
        if (r > n) {
            throw InvalidArgument("TSVD rank " + std::to_string(r) + " exceeds matrix size " + std::to_string(n));
        }
    }
    for (Index k = 0; k < r; ++k) {
        if (!(factors.singular_values(k) > 0.0)) {
            throw SingularInput("TSVD would invert a zero singular value", {static_cast<long>(k + 1)});
        }
    }

    // B = V^T S_r^{-1} U^T
    const Eigen::VectorXd inv_s = factors.singular_values.head(r).cwiseInverse();
    InverseMatrix inv;
    inv.entries = factors.v.topRows(r).transpose() * inv_s.asDiagonal() * factors.u.leftCols(r).transpose();
    inv.method = InverseMethod::tsvd;
    inv.config = config;
    inv.effective_rank = r;
    return inv;
}

InverseMatrix tikhonov_inverse(const Eigen::MatrixXd& matrix, const TikhonovConfig& config) {
    require_square_finite(matrix, "matrix");
    if (!std::isfinite(config.alpha) || config.alpha < 0.0) {
        throw InvalidArgument("alpha must be finite and >= 0");
    }
    const Index n = matrix.rows();
    const Eigen::MatrixXd l =
        config.constraint == Constraint::identity ? Eigen::MatrixXd::Identity(n, n) : first_difference_matrix(n);
    const Eigen::MatrixXd normal = matrix.transpose() * matrix + config.alpha * (l.transpose() * l);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
    if (!qr.isInvertible()) {
        throw SingularInput("regularized normal matrix is singular (alpha = " + std::to_string(config.alpha) + ")");
    }
    InverseMatrix inv;
    inv.entries = qr.solve(matrix.transpose());
    if (!inv.entries.allFinite()) {
        throw NumericFailure("Tikhonov solve produced non-finite entries");
    }
    inv.method = InverseMethod::tikhonov;
    inv.config = config;
    inv.effective_rank = n;
    return inv;
}

Eigen::VectorXd recover_residual(const InverseMatrix& inverse, const Eigen::VectorXd& contrast) {
    if (inverse.entries.cols() != contrast.size()) {
        throw InvalidArgument("contrast length " + std::to_string(contrast.size()) + " does not match inverse with " +
                              std::to_string(inverse.entries.cols()) + " columns");
    }
    return inverse.entries * contrast;
}

PerfusionTriple perfusion_params(const Eigen::VectorXd& residual, const TimeGrid& grid) {
    if (residual.size() != grid.size()) {
        throw InvalidArgument("residual length does not match grid");
    }
    PerfusionTriple p;
    p.blood_volume = residual.dot(grid.intervals());
    p.blood_flow = residual(0);
    if (p.blood_flow != 0.0) {
        p.mean_transit_time = p.blood_volume / p.blood_flow;
    }
    return p;
}

}  // namespace plp
