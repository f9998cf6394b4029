#ifndef ROOTCAST_LINALG_HPP
#define ROOTCAST_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Dense numerical kernels shared by every estimator: SVD, truncated SVD,
// minimum-norm least squares, dense eigenvalues, the real FFT pair, and
// Hungarian assignment. SVD/eigen/least-squares are LAPACK-backed; the FFT
// pair is FFTW-backed. All functions are pure and safe to call concurrently.
namespace rootcast::linalg {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;

/// Thin SVD, singular values sorted descending.
struct SvdResult {
    MatrixXd left_vectors;      // a x k, orthonormal columns
    VectorXd singular_values;   // k, descending, >= 0
    MatrixXd right_vectors;     // b x k, orthonormal columns

    MatrixXd reconstruct() const {
        return left_vectors * singular_values.asDiagonal() * right_vectors.transpose();
    }
};

/// Thin SVD of a real matrix (LAPACK dgesdd). Throws on non-finite input.
SvdResult svd(const MatrixXd& matrix);

/// Best rank-rho approximation U_rho S_rho V_rho^T. rho must be in [1, k].
MatrixXd truncate_rank(const SvdResult& s, Eigen::Index rank);

/// Minimum-Frobenius-norm W solving min ||B - A W||_F via SVD (LAPACK
/// dgelsd). Singular values below max(a,b) * 1e-12 * sigma_max count as zero.
MatrixXd least_squares(const MatrixXd& A, const MatrixXd& B);

/// All eigenvalues of a square real matrix, with multiplicity, unordered.
VectorXcd eigenvalues(const MatrixXd& matrix);

/// Forward real FFT: length n -> floor(n/2)+1 bins, unnormalized.
VectorXcd rfft(const VectorXd& x);

/// Inverse of rfft, dividing by n. Imaginary parts of the DC bin (and the
/// Nyquist bin when n is even) do not influence the output.
VectorXd irfft(const VectorXcd& spectrum, Eigen::Index n);

/// Row-wise rfft of an n x len real matrix.
MatrixXcd rfft_rows(const MatrixXd& x);

/// Row-wise irfft back to n columns.
MatrixXd irfft_rows(const MatrixXcd& spectra, Eigen::Index n);

/// Minimum-cost assignment for a square cost matrix. result[row] = column.
/// Callers pad rectangular problems with constant-cost dummy rows.
std::vector<Eigen::Index> hungarian_match(const MatrixXd& cost);

// BLAS-routed products for matrices with a large leading dimension; small
// operands go through Eigen expressions at the call site instead.
MatrixXd matmul(const MatrixXd& A, const MatrixXd& B);
MatrixXd gram(const MatrixXd& X);                       // X^T X
MatrixXd crossprod(const MatrixXd& X, const MatrixXd& Y); // X^T Y

}  // namespace rootcast::linalg

#endif
