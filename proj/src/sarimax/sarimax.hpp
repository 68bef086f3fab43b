#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <optional>

#include "core/error.hpp"

namespace edf::sarimax {

struct SarimaxOrder {
    int p = 0, d = 0, q = 0;  // non-seasonal AR, differencing, MA
    int P = 0, D = 0, Q = 0;  // seasonal counterparts
    int s = 7;

    int n_arma() const { return p + q + P + Q; }
    void validate(std::int64_t series_len) const;
    bool operator==(const SarimaxOrder&) const = default;
    std::string to_string() const;
};

/// Coefficients use the convention phi(B) = 1 - sum phi_i B^i and
/// theta(B) = 1 - sum theta_i B^i, so z_t = sum phi_i z_{t-i} + eps_t
/// - sum theta_i eps_{t-i} on the differenced scale.
struct ArmaParams {
    Eigen::VectorXd phi;     // p
    Eigen::VectorXd theta;   // q
    Eigen::VectorXd sphi;    // P
    Eigen::VectorXd stheta;  // Q
};

struct SarimaxFit {
    SarimaxOrder order;
    ArmaParams params;
    Eigen::VectorXd beta;
    std::vector<std::string> exog_names;
    double sigma2 = 0;
    double loglik = 0;
    double aic = 0;
    bool projected_to_invertible = false;
};

struct FitOptions {
    int restarts = 5;
    int max_iter = 200;
    double grad_tol = 1e-8;
    std::uint64_t seed = 0;
};

/// Applies (1-B)^d then (1-B^s)^D; output length len - d - D*s.
std::vector<double> difference(const std::vector<double>& y, int d, int D, int s);
Eigen::VectorXd difference(const Eigen::VectorXd& y, int d, int D, int s);
Eigen::MatrixXd difference_cols(const Eigen::MatrixXd& X, int d, int D, int s);

/// Profile Gaussian log-likelihood of a zero-mean seasonal ARMA at fixed
/// coefficients, innovation variance concentrated out. Exposed for oracle
/// testing against a dense-covariance evaluation.
double profile_loglik(const Eigen::VectorXd& z, const ArmaParams& params, int s,
                      double* sigma2_hat = nullptr);

/// Maximum-likelihood fit of regression with seasonal-ARMA errors on the
/// differenced scale. X may have zero columns.
SarimaxFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const SarimaxOrder& order,
               const FitOptions& options = {},
               const std::vector<std::string>& exog_names = {});

struct OrderSearchSpace {
    std::vector<int> p{0, 1, 2}, d{0, 1}, q{0, 1, 2};
    std::vector<int> P{0, 1, 2}, D{0, 1}, Q{0, 1, 2};
    int s = 7;
};

/// Minimizes AIC over the grid; candidates that fail to fit are skipped.
/// Ties break toward fewer parameters, then lexicographic on
/// (p,d,q,P,D,Q). The winning order is refit with `final_options`.
SarimaxFit select_order(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const OrderSearchSpace& space = {},
                        const FitOptions& search_options = {1, 80, 1e-6, 0},
                        const FitOptions& final_options = {},
                        const std::vector<std::string>& exog_names = {});

/// Conditional-mean forecasts for h = 1..s_horizon days past the end of
/// history, undoing all differencing. X_future must have one row per day.
Eigen::VectorXd forecast(const SarimaxFit& fit, const Eigen::VectorXd& y_history,
                         const Eigen::MatrixXd& X_history, const Eigen::MatrixXd& X_future,
                         int horizon = 7);

/// Draws a series from the model for use as a parameter-recovery oracle.
Eigen::VectorXd simulate(const SarimaxOrder& order, const ArmaParams& params, double sigma,
                         std::int64_t n, std::uint64_t seed, int burn_in = 300);

nlohmann::json to_json(const SarimaxFit& fit);
SarimaxFit fit_from_json(const nlohmann::json& j);
void save_fit(const SarimaxFit& fit, const std::string& path);
SarimaxFit load_fit(const std::string& path);

}  // namespace edf::sarimax
