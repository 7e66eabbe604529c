#pragma once

#include <Eigen/Dense>

namespace gur {

/// First and second moments of the particle positions and momenta of an
/// N-particle state. cov_q(i,j) and cov_p(i,j) are the covariance
/// functions C_Q(i,j) = <Q_i Q_j> - <Q_i><Q_j> (same for P); position
/// operators of distinct particles commute, so both matrices are ordinary
/// symmetric positive-semidefinite covariance matrices.
///
/// This is the single input type for every inequality evaluation.
struct MomentTable {
    int n = 0;
    Eigen::VectorXd mean_q;
    Eigen::VectorXd mean_p;
    Eigen::MatrixXd cov_q;
    Eigen::MatrixXd cov_p;

    MomentTable() = default;
    MomentTable(int n_, Eigen::VectorXd mean_q_, Eigen::VectorXd mean_p_,
                Eigen::MatrixXd cov_q_, Eigen::MatrixXd cov_p_);

    double var_q(int i) const { return cov_q(i, i); }
    double var_p(int i) const { return cov_p(i, i); }
};

/// Validates the MomentTable invariants (shapes, symmetry within 1e-12
/// relative, non-negative diagonals, PSD with eigenvalue floor
/// -1e-10 * trace). Throws std::invalid_argument naming the violation.
/// Constructors call this; it is exposed for states assembled by hand.
void validate(const MomentTable& m);

/// Variances of the collective operators Q = Q_1 + ... + Q_N and
/// P = P_1 + ... + P_N: the full double sums of the covariance matrices.
struct CollectiveDispersions {
    double dq2;
    double dp2;
};
CollectiveDispersions collective_dispersions(const MomentTable& m);

/// Canonical rescaling q -> lambda q, p -> p / lambda. Preserves the
/// commutation relations, so every uncertainty-relation verdict must be
/// invariant under it.
MomentTable rescaled(const MomentTable& m, double lambda);

} // namespace gur
