#include "rootcast/linalg.hpp"

#include <fftw3.h>
#include <lapacke.h>
#include <cblas.h>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace rootcast::linalg {

namespace {

void require_finite(const MatrixXd& m, const char* who) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": input contains non-finite entries");
    }
}

void lapack_check(lapack_int info, const char* routine) {
    if (info != 0) {
        throw std::runtime_error(std::string(routine) + " failed with info=" + std::to_string(info));
    }
}

}  // namespace

SvdResult svd(const MatrixXd& matrix) {
    require_finite(matrix, "svd");
    const lapack_int m = static_cast<lapack_int>(matrix.rows());
    const lapack_int n = static_cast<lapack_int>(matrix.cols());
    const lapack_int k = std::min(m, n);
    if (k == 0) throw std::invalid_argument("svd: empty matrix");

    MatrixXd a = matrix;  // dgesdd overwrites its input
    SvdResult out;
    out.left_vectors.resize(m, k);
    out.singular_values.resize(k);
    out.right_vectors.resize(n, k);
    MatrixXd vt(k, n);

    lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m,
                                     out.singular_values.data(),
                                     out.left_vectors.data(), m, vt.data(), k);
    lapack_check(info, "dgesdd");
    out.right_vectors = vt.transpose();
    return out;
}

MatrixXd truncate_rank(const SvdResult& s, Eigen::Index rank) {
    const Eigen::Index k = s.singular_values.size();
    if (rank < 1 || rank > k) {
        throw std::invalid_argument("truncate_rank: rank " + std::to_string(rank) +
                                    " outside [1, " + std::to_string(k) + "]");
    }
    return s.left_vectors.leftCols(rank) *
           s.singular_values.head(rank).asDiagonal() *
           s.right_vectors.leftCols(rank).transpose();
}

MatrixXd least_squares(const MatrixXd& A, const MatrixXd& B) {
    require_finite(A, "least_squares");
    require_finite(B, "least_squares");
    if (A.rows() != B.rows()) {
        throw std::invalid_argument("least_squares: row mismatch between A and B");
    }
    const lapack_int m = static_cast<lapack_int>(A.rows());
    const lapack_int n = static_cast<lapack_int>(A.cols());
    const lapack_int nrhs = static_cast<lapack_int>(B.cols());
    if (m < 1 || n < 1) throw std::invalid_argument("least_squares: empty system");

    MatrixXd a = A;
    const lapack_int ldb = std::max(m, n);
    MatrixXd b = MatrixXd::Zero(ldb, nrhs);
    b.topRows(m) = B;

    // Relative cutoff: sigma_i <= max(m,n) * 1e-12 * sigma_max counts as zero,
    // so exactly representable rank-deficient systems get the min-norm solution.
    const double rcond = static_cast<double>(std::max(m, n)) * 1e-12;
    VectorXd s(std::min(m, n));
    lapack_int rank = 0;
    lapack_int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, m, n, nrhs, a.data(), m,
                                     b.data(), ldb, s.data(), rcond, &rank);
    lapack_check(info, "dgelsd");
    return b.topRows(n);
}

VectorXcd eigenvalues(const MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("eigenvalues: matrix is not square");
    }
    require_finite(matrix, "eigenvalues");
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    if (n == 0) throw std::invalid_argument("eigenvalues: empty matrix");

    MatrixXd a = matrix;
    VectorXd wr(n), wi(n);
    lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n,
                                    wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    lapack_check(info, "dgeev");
    VectorXcd w(n);
    for (lapack_int i = 0; i < n; ++i) w[i] = std::complex<double>(wr[i], wi[i]);
    return w;
}

// ---------------------------------------------------------------------------
// FFT pair. One cached FFTW plan pair per length, executed on internal
// buffers under a lock; FFTW planning is not thread-safe and the buffers are
// shared, so the whole transform is serialized. Plans use FFTW_ESTIMATE to
// keep plan selection deterministic.
// ---------------------------------------------------------------------------

namespace {

struct FftwPlans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    double* real_buf = nullptr;
    fftw_complex* cplx_buf = nullptr;
    Eigen::Index n = 0;

    explicit FftwPlans(Eigen::Index length) : n(length) {
        real_buf = fftw_alloc_real(static_cast<size_t>(n));
        cplx_buf = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_buf, cplx_buf, FFTW_ESTIMATE);
        inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx_buf, real_buf, FFTW_ESTIMATE);
    }
    ~FftwPlans() {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
        if (real_buf) fftw_free(real_buf);
        if (cplx_buf) fftw_free(cplx_buf);
    }
    FftwPlans(const FftwPlans&) = delete;
    FftwPlans& operator=(const FftwPlans&) = delete;
};

std::mutex fft_mutex;

FftwPlans& plans_for(Eigen::Index n) {
    static std::map<Eigen::Index, std::unique_ptr<FftwPlans>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<FftwPlans>(n)).first;
    }
    return *it->second;
}

void rfft_into(const double* x, Eigen::Index n, std::complex<double>* out) {
    FftwPlans& p = plans_for(n);
    std::copy(x, x + n, p.real_buf);
    fftw_execute(p.forward);
    const Eigen::Index k = n / 2 + 1;
    for (Eigen::Index i = 0; i < k; ++i) {
        out[i] = std::complex<double>(p.cplx_buf[i][0], p.cplx_buf[i][1]);
    }
}

void irfft_into(const std::complex<double>* spec, Eigen::Index n, double* out) {
    FftwPlans& p = plans_for(n);
    const Eigen::Index k = n / 2 + 1;
    for (Eigen::Index i = 0; i < k; ++i) {
        p.cplx_buf[i][0] = spec[i].real();
        p.cplx_buf[i][1] = spec[i].imag();
    }
    // The real-output transform is only defined for a Hermitian spectrum; the
    // imaginary parts of the DC and Nyquist bins are projected away so the
    // map stays linear in the supplied values.
    p.cplx_buf[0][1] = 0.0;
    if (n % 2 == 0) p.cplx_buf[n / 2][1] = 0.0;
    fftw_execute(p.inverse);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = p.real_buf[i] * inv_n;
}

}  // namespace

VectorXcd rfft(const VectorXd& x) {
    const Eigen::Index n = x.size();
    if (n < 1) throw std::invalid_argument("rfft: empty input");
    VectorXcd out(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fft_mutex);
    rfft_into(x.data(), n, out.data());
    return out;
}

VectorXd irfft(const VectorXcd& spectrum, Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("irfft: length must be positive");
    if (spectrum.size() != n / 2 + 1) {
        throw std::invalid_argument("irfft: expected " + std::to_string(n / 2 + 1) +
                                    " bins for length " + std::to_string(n) + ", got " +
                                    std::to_string(spectrum.size()));
    }
    VectorXd out(n);
    std::lock_guard<std::mutex> lock(fft_mutex);
    irfft_into(spectrum.data(), n, out.data());
    return out;
}

MatrixXcd rfft_rows(const MatrixXd& x) {
    const Eigen::Index n = x.rows(), len = x.cols();
    if (len < 1) throw std::invalid_argument("rfft_rows: empty rows");
    MatrixXcd out(n, len / 2 + 1);
    VectorXd row(len);
    VectorXcd spec(len / 2 + 1);
    std::lock_guard<std::mutex> lock(fft_mutex);
    for (Eigen::Index i = 0; i < n; ++i) {
        row = x.row(i);
        rfft_into(row.data(), len, spec.data());
        out.row(i) = spec;
    }
    return out;
}

MatrixXd irfft_rows(const MatrixXcd& spectra, Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("irfft_rows: length must be positive");
    if (spectra.cols() != n / 2 + 1) {
        throw std::invalid_argument("irfft_rows: bin count does not match output length");
    }
    MatrixXd out(spectra.rows(), n);
    VectorXcd spec(spectra.cols());
    VectorXd row(n);
    std::lock_guard<std::mutex> lock(fft_mutex);
    for (Eigen::Index i = 0; i < spectra.rows(); ++i) {
        spec = spectra.row(i);
        irfft_into(spec.data(), n, row.data());
        out.row(i) = row;
    }
    return out;
}

// Jonker-Volgenant shortest augmenting path assignment, O(p^3).
std::vector<Eigen::Index> hungarian_match(const MatrixXd& cost) {
    if (cost.rows() != cost.cols()) {
        throw std::invalid_argument("hungarian_match: cost matrix is not square");
    }
    require_finite(cost, "hungarian_match");
    const Eigen::Index p = cost.rows();
    if (p == 0) return {};

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(p + 1, 0.0), v(p + 1, 0.0), minv(p + 1);
    std::vector<Eigen::Index> assigned_row(p + 1, 0), way(p + 1, 0);

    for (Eigen::Index i = 1; i <= p; ++i) {
        assigned_row[0] = i;
        Eigen::Index j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<bool> used(p + 1, false);
        do {
            used[j0] = true;
            const Eigen::Index i0 = assigned_row[j0];
            double delta = inf;
            Eigen::Index j1 = 0;
            for (Eigen::Index j = 1; j <= p; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Eigen::Index j = 0; j <= p; ++j) {
                if (used[j]) {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (assigned_row[j0] != 0);
        do {
            const Eigen::Index j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<Eigen::Index> result(p, -1);
    for (Eigen::Index j = 1; j <= p; ++j) {
        result[assigned_row[j] - 1] = j - 1;
    }
    return result;
}

MatrixXd matmul(const MatrixXd& A, const MatrixXd& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    MatrixXd C(A.rows(), B.cols());
    if (C.size() == 0) return C;
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans,
                static_cast<int>(A.rows()), static_cast<int>(B.cols()), static_cast<int>(A.cols()),
                1.0, A.data(), static_cast<int>(A.rows()),
                B.data(), static_cast<int>(B.rows()),
                0.0, C.data(), static_cast<int>(C.rows()));
    return C;
}

MatrixXd gram(const MatrixXd& X) {
    const int n = static_cast<int>(X.cols());
    MatrixXd G = MatrixXd::Zero(n, n);
    if (X.size() == 0) return G;
    cblas_dsyrk(CblasColMajor, CblasLower, CblasTrans, n, static_cast<int>(X.rows()),
                1.0, X.data(), static_cast<int>(X.rows()), 0.0, G.data(), n);
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return G;
}

MatrixXd crossprod(const MatrixXd& X, const MatrixXd& Y) {
    if (X.rows() != Y.rows()) throw std::invalid_argument("crossprod: row mismatch");
    MatrixXd C(X.cols(), Y.cols());
    if (C.size() == 0) return C;
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans,
                static_cast<int>(X.cols()), static_cast<int>(Y.cols()), static_cast<int>(X.rows()),
                1.0, X.data(), static_cast<int>(X.rows()),
                Y.data(), static_cast<int>(Y.rows()),
                0.0, C.data(), static_cast<int>(X.cols()));
    return C;
}

}  // namespace rootcast::linalg
