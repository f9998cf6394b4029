#ifndef ROOTCAST_ROOTS_HPP
#define ROOTCAST_ROOTS_HPP

#include "rootcast/estimators.hpp"
#include "rootcast/series.hpp"

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

// Characteristic-root machinery: companion matrices, per-horizon root
// extraction from weight columns, Hungarian-matched root-set distance, and
// root-subset generalization testing.
namespace rootcast::roots {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using estimators::LinearModel;
using series::TimeSeries;

enum class RootSource { weight_column, recurrence_coeffs };

/// Multiset of characteristic roots attributed to one forecasting horizon.
/// Repeated roots keep their multiplicity; the count equals the degree of
/// the generating polynomial (L + j - 1 for weight column j).
struct RootSet {
    VectorXcd roots;
    Eigen::Index horizon_index = 1;
    RootSource source = RootSource::weight_column;
};

/// Companion matrix of y_t = a_1 y_{t-1} + ... + a_p y_{t-p}: coefficient
/// vector in the first row, ones on the subdiagonal. Its eigenvalues are the
/// roots of r^p - a_1 r^{p-1} - ... - a_p.
MatrixXd companion_matrix(const VectorXd& coeffs);

/// Roots of column j's monic polynomial
///   P_j(r) = r^{L+j-1} - sum_i W_{i,j} r^{L-i}
/// via the companion eigenproblem. The j-1 leading intermediate coefficients
/// are zero. Rows are in recurrence order: W_{1,j} multiplies the most
/// recent lag. Weights fitted on chronological history rows (oldest first)
/// go through model_roots, which flips the lag order.
RootSet column_roots(const MatrixXd& weight, Eigen::Index horizon_index);

/// Characteristic roots of a trained model's horizon-j map, folding the
/// normalization into the weight and converting the chronological row
/// layout of fitted weights into recurrence order.
RootSet model_roots(const LinearModel& model, Eigen::Index horizon_index);

RootSet recurrence_roots(const VectorXd& coeffs);

/// Mean absolute complex distance over the Hungarian-optimal pairing. Sets
/// of unequal size match the smaller set into the larger one and average
/// over the matched pairs only.
double root_distance(const RootSet& a, const RootSet& b);

struct GeneralizationResult {
    bool generalizes = false;
    double mse = 0.0;
    double probe_variance = 0.0;
};

/// Forecast the probe series with the model and compare the MSE against
/// tol * Var(probe): below means the probe's roots lie inside the model's.
GeneralizationResult generalization_test(const LinearModel& model, const TimeSeries& probe,
                                         double tol);

/// JSON text for a root set: {"horizon": j, "source": ..., "roots": [[re,im],...]}.
std::string to_json(const RootSet& set);

}  // namespace rootcast::roots

#endif
