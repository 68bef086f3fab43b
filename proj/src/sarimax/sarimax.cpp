#include "sarimax/sarimax.hpp"

#include <algorithm>
#include <cmath>

#include "core/csv.hpp"
#include "util/rng.hpp"

namespace edf::sarimax {

void SarimaxOrder::validate(std::int64_t series_len) const {
    if (s < 1) fail_config("sarimax: seasonal period must be >= 1");
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0)
        fail_config("sarimax: orders must be non-negative");
    std::int64_t need = d + static_cast<std::int64_t>(D) * s + std::max(p, q) +
                        static_cast<std::int64_t>(s) * std::max(P, Q);
    if (need >= series_len)
        fail_data("sarimax: series of length " + std::to_string(series_len) +
                  " too short for order " + to_string());
}

std::string SarimaxOrder::to_string() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" +
           std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + ")_" +
           std::to_string(s);
}

std::vector<double> difference(const std::vector<double>& y, int d, int D, int s) {
    if (static_cast<std::int64_t>(y.size()) <= d + static_cast<std::int64_t>(D) * s)
        fail_data("sarimax: series too short to difference");
    std::vector<double> out = y;
    for (int k = 0; k < d; ++k) {
        std::vector<double> next(out.size() - 1);
        for (size_t i = 0; i + 1 < out.size(); ++i) next[i] = out[i + 1] - out[i];
        out = std::move(next);
    }
    for (int k = 0; k < D; ++k) {
        std::vector<double> next(out.size() - static_cast<size_t>(s));
        for (size_t i = 0; i < next.size(); ++i) next[i] = out[i + static_cast<size_t>(s)] - out[i];
        out = std::move(next);
    }
    return out;
}

Eigen::VectorXd difference(const Eigen::VectorXd& y, int d, int D, int s) {
    std::vector<double> v(y.data(), y.data() + y.size());
    auto out = difference(v, d, D, s);
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::MatrixXd difference_cols(const Eigen::MatrixXd& X, int d, int D, int s) {
    Eigen::Index out_rows = X.rows() - d - static_cast<Eigen::Index>(D) * s;
    Eigen::MatrixXd out(out_rows, X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        out.col(c) = difference(Eigen::VectorXd(X.col(c)), d, D, s);
    return out;
}

namespace {

// Product (1 - sum a_i B^i)(1 - sum b_j B^{s j}); returns the full
// polynomial coefficients, index 0 holding the constant 1.
Eigen::VectorXd poly_product(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int s) {
    Eigen::Index la = a.size(), lb = b.size() * s;
    Eigen::VectorXd pa = Eigen::VectorXd::Zero(la + 1), pb = Eigen::VectorXd::Zero(lb + 1);
    pa(0) = 1;
    for (Eigen::Index i = 0; i < la; ++i) pa(i + 1) = -a(i);
    pb(0) = 1;
    for (Eigen::Index j = 0; j < b.size(); ++j) pb((j + 1) * s) = -b(j);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(la + lb + 1);
    for (Eigen::Index i = 0; i <= la; ++i)
        for (Eigen::Index j = 0; j <= lb; ++j) out(i + j) += pa(i) * pb(j);
    return out;
}

struct StateSpace {
    Eigen::MatrixXd T;    // companion transition, r x r
    Eigen::VectorXd R;    // innovation loading (unit variance innovations)
    int r = 1;
};

// Builds the observable companion form of the expanded seasonal ARMA.
// Recursion form: z_t = sum f_i z_{t-i} + eps_t + sum m_i eps_{t-i}.
StateSpace build_state_space(const ArmaParams& params, int s) {
    Eigen::VectorXd ar_poly = poly_product(params.phi, params.sphi, s);
    Eigen::VectorXd ma_poly = poly_product(params.theta, params.stheta, s);
    Eigen::Index pbar = ar_poly.size() - 1, qbar = ma_poly.size() - 1;
    StateSpace ss;
    ss.r = static_cast<int>(std::max(pbar, qbar + 1));
    if (ss.r < 1) ss.r = 1;
    ss.T = Eigen::MatrixXd::Zero(ss.r, ss.r);
    for (Eigen::Index i = 0; i < pbar; ++i) ss.T(i, 0) = -ar_poly(i + 1);
    for (int i = 0; i + 1 < ss.r; ++i) ss.T(i, i + 1) = 1;
    ss.R = Eigen::VectorXd::Zero(ss.r);
    ss.R(0) = 1;
    for (Eigen::Index i = 0; i < qbar; ++i) ss.R(i + 1) = ma_poly(i + 1);
    return ss;
}

// Stationary solution of P = T P T' + R R' by doubling.
Eigen::MatrixXd stationary_covariance(const StateSpace& ss) {
    Eigen::MatrixXd A = ss.T;
    Eigen::MatrixXd Q = ss.R * ss.R.transpose();
    for (int it = 0; it < 60; ++it) {
        Eigen::MatrixXd Qn = Q + A * Q * A.transpose();
        Eigen::MatrixXd An = A * A;
        double step = (Qn - Q).cwiseAbs().maxCoeff();
        Q = std::move(Qn);
        A = std::move(An);
        if (step < 1e-14 * (1 + Q.cwiseAbs().maxCoeff())) break;
    }
    return Q;
}

struct GainSequence {
    std::vector<Eigen::VectorXd> K;  // per-step gains until steady state
    std::vector<double> F;           // innovation variances (sigma^2 = 1 scale)
    Eigen::VectorXd K_steady;
    double F_steady = 1;
    double sum_log_F = 0;  // over all n steps
};

// One covariance filter pass; the gain sequence depends only on the
// parameters, so it is shared across every data column filtered afterwards.
GainSequence compute_gains(const StateSpace& ss, Eigen::Index n) {
    GainSequence g;
    Eigen::MatrixXd P = stationary_covariance(ss);
    Eigen::MatrixXd RRt = ss.R * ss.R.transpose();
    bool steady = false;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (steady) {
            g.sum_log_F += std::log(g.F_steady);
            continue;
        }
        double F = P(0, 0);
        if (!(F > 1e-12)) fail_model("sarimax: degenerate innovation variance in filter");
        Eigen::VectorXd K = ss.T * P.col(0) / F;
        g.F.push_back(F);
        g.K.push_back(K);
        g.sum_log_F += std::log(F);
        Eigen::MatrixXd Pn = ss.T * P * ss.T.transpose() - F * K * K.transpose() + RRt;
        if ((Pn - P).cwiseAbs().maxCoeff() < 1e-13 * (1 + P.cwiseAbs().maxCoeff())) {
            steady = true;
            g.K_steady = K;
            g.F_steady = F;
        }
        P = std::move(Pn);
    }
    if (!steady && !g.F.empty()) {
        g.K_steady = g.K.back();
        g.F_steady = g.F.back();
    }
    return g;
}

// Innovations for each column of `data` under the shared gain sequence.
Eigen::MatrixXd apply_innovations(const StateSpace& ss, const GainSequence& g,
                                  const Eigen::MatrixXd& data) {
    const Eigen::Index n = data.rows(), k = data.cols();
    Eigen::MatrixXd V(n, k);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ss.r, k);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::VectorXd& K =
            t < static_cast<Eigen::Index>(g.K.size()) ? g.K[static_cast<size_t>(t)] : g.K_steady;
        V.row(t) = data.row(t) - a.row(0);
        a = ss.T * a + K * V.row(t);
    }
    return V;
}

double innovation_variance_at(const GainSequence& g, Eigen::Index t) {
    return t < static_cast<Eigen::Index>(g.F.size()) ? g.F[static_cast<size_t>(t)] : g.F_steady;
}

constexpr double kSigmaFloor = 1e-12;

// Profile log-likelihood with beta (GLS on innovations) and sigma^2
// concentrated out.
double eval_loglik(const Eigen::VectorXd& yd, const Eigen::MatrixXd& Xd, const ArmaParams& params,
                   int s, Eigen::VectorXd* beta_out, double* sigma2_out) {
    const Eigen::Index n = yd.size(), k = Xd.cols();
    StateSpace ss = build_state_space(params, s);
    GainSequence g = compute_gains(ss, n);

    Eigen::MatrixXd data(n, k + 1);
    data.col(0) = yd;
    if (k > 0) data.rightCols(k) = Xd;
    Eigen::MatrixXd V = apply_innovations(ss, g, data);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    double rss = 0;
    if (k > 0) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
        for (Eigen::Index t = 0; t < n; ++t) {
            double w = 1.0 / innovation_variance_at(g, t);
            Eigen::VectorXd vx = V.row(t).tail(k).transpose();
            A += w * vx * vx.transpose();
            b += w * V(t, 0) * vx;
        }
        beta = A.ldlt().solve(b);
        for (Eigen::Index t = 0; t < n; ++t) {
            double res = V(t, 0) - V.row(t).tail(k).dot(beta);
            rss += res * res / innovation_variance_at(g, t);
        }
    } else {
        for (Eigen::Index t = 0; t < n; ++t)
            rss += V(t, 0) * V(t, 0) / innovation_variance_at(g, t);
    }
    double sigma2 = std::max(rss / static_cast<double>(n), kSigmaFloor);
    double ll = -0.5 * n * (std::log(2 * M_PI) + 1 + std::log(sigma2)) - 0.5 * g.sum_log_F;
    if (beta_out) *beta_out = beta;
    if (sigma2_out) *sigma2_out = sigma2;
    return ll;
}

// Durbin-Levinson map from partial autocorrelations in (-1,1) to the
// coefficients of a stationary (equivalently invertible) polynomial.
Eigen::VectorXd pacf_to_coeffs(const Eigen::VectorXd& pacf) {
    Eigen::Index k = pacf.size();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd prev = a;
        a(j) = pacf(j);
        for (Eigen::Index i = 0; i < j; ++i) a(i) = prev(i) - pacf(j) * prev(j - 1 - i);
    }
    return a;
}

ArmaParams unpack_params(const Eigen::VectorXd& u, const SarimaxOrder& order) {
    ArmaParams p;
    Eigen::Index pos = 0;
    auto block = [&](int len) {
        Eigen::VectorXd pacf = u.segment(pos, len).array().tanh();
        pos += len;
        return pacf_to_coeffs(pacf);
    };
    p.phi = block(order.p);
    p.theta = block(order.q);
    p.sphi = block(order.P);
    p.stheta = block(order.Q);
    return p;
}

struct BfgsResult {
    Eigen::VectorXd x;
    double f = 0;
    bool converged = false;
};

template <typename F>
Eigen::VectorXd numerical_gradient(F&& f, const Eigen::VectorXd& x) {
    const double h = 1e-6;
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i) = x(i) + h;
        double fp = f(xp);
        xp(i) = x(i) - h;
        double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2 * h);
    }
    return g;
}

template <typename F>
BfgsResult bfgs_minimize(F&& f, Eigen::VectorXd x0, int max_iter, double grad_tol) {
    const Eigen::Index n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    if (!std::isfinite(res.f)) return res;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = numerical_gradient(f, res.x);

    for (int iter = 0; iter < max_iter; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() < grad_tol) {
            res.converged = true;
            return res;
        }
        Eigen::VectorXd dir = -H * g;
        if (dir.dot(g) > -1e-14) {
            H.setIdentity();
            dir = -g;
        }
        double step = 1.0, fn = 0;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            fn = f(res.x + step * dir);
            if (std::isfinite(fn) && fn <= res.f + 1e-4 * step * g.dot(dir)) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) {
            // flat to line-search precision: accept as a stationary point
            res.converged = true;
            return res;
        }
        Eigen::VectorXd xn = res.x + step * dir;
        Eigen::VectorXd gn = numerical_gradient(f, xn);
        Eigen::VectorXd sv = xn - res.x, yv = gn - g;
        bool stagnated = std::fabs(res.f - fn) < 1e-12 * (1 + std::fabs(res.f));
        res.x = std::move(xn);
        res.f = fn;
        g = std::move(gn);
        if (stagnated) {
            res.converged = true;
            return res;
        }
        double sy = sv.dot(yv);
        if (sy > 1e-12) {
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Eigen::MatrixXd L = I - sv * yv.transpose() / sy;
            H = L * H * L.transpose() + sv * sv.transpose() / sy;
        }
    }
    res.converged = g.lpNorm<Eigen::Infinity>() < std::max(grad_tol, 1e-4);
    return res;
}

}  // namespace

double profile_loglik(const Eigen::VectorXd& z, const ArmaParams& params, int s,
                      double* sigma2_hat) {
    Eigen::MatrixXd empty(z.size(), 0);
    return eval_loglik(z, empty, params, s, nullptr, sigma2_hat);
}

SarimaxFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const SarimaxOrder& order,
               const FitOptions& options, const std::vector<std::string>& exog_names) {
    order.validate(y.size());
    if (X.cols() > 0 && X.rows() != y.rows()) fail_data("sarimax: y and X are not aligned");
    if (!y.allFinite() || !X.allFinite()) fail_data("sarimax: non-finite values in input");

    Eigen::VectorXd yd = difference(y, order.d, order.D, order.s);
    Eigen::MatrixXd Xd = X.cols() > 0 ? difference_cols(X, order.d, order.D, order.s)
                                      : Eigen::MatrixXd(yd.size(), 0);
    if (yd.size() < order.n_arma() + static_cast<Eigen::Index>(X.cols()) + 3)
        fail_data("sarimax: too few observations after differencing");

    SarimaxFit out;
    out.order = order;
    out.exog_names = exog_names;

    const int dim = order.n_arma();
    if (dim == 0) {
        out.params = unpack_params(Eigen::VectorXd::Zero(0), order);
        out.loglik = eval_loglik(yd, Xd, out.params, order.s, &out.beta, &out.sigma2);
    } else {
        auto objective = [&](const Eigen::VectorXd& u) {
            return -eval_loglik(yd, Xd, unpack_params(u, order), order.s, nullptr, nullptr);
        };
        Rng rng(options.seed ^ 0x5a71'9c3du);
        bool any = false;
        BfgsResult best;
        for (int r = 0; r < std::max(1, options.restarts); ++r) {
            Eigen::VectorXd u0 = Eigen::VectorXd::Zero(dim);
            if (r > 0)
                for (int i = 0; i < dim; ++i) u0(i) = rng.uniform() * 1.6 - 0.8;
            BfgsResult res = bfgs_minimize(objective, u0, options.max_iter, options.grad_tol);
            if (!std::isfinite(res.f) || !res.converged) continue;
            if (!any || res.f < best.f) {
                best = res;
                any = true;
            }
        }
        if (!any)
            fail_model("sarimax: optimizer failed to converge for order " + order.to_string());
        out.params = unpack_params(best.x, order);
        out.loglik = eval_loglik(yd, Xd, out.params, order.s, &out.beta, &out.sigma2);
    }
    int k = order.n_arma() + static_cast<int>(out.beta.size()) + 1;
    out.aic = 2.0 * k - 2.0 * out.loglik;
    return out;
}

SarimaxFit select_order(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const OrderSearchSpace& space, const FitOptions& search_options,
                        const FitOptions& final_options,
                        const std::vector<std::string>& exog_names) {
    bool have_best = false;
    double best_aic = 0;
    SarimaxOrder best_order;
    std::string last_error = "empty search space";
    auto better = [&](double aic, const SarimaxOrder& o) {
        if (!have_best) return true;
        if (std::fabs(aic - best_aic) > 1e-9) return aic < best_aic;
        if (o.n_arma() != best_order.n_arma()) return o.n_arma() < best_order.n_arma();
        auto tup = [](const SarimaxOrder& x) {
            return std::make_tuple(x.p, x.d, x.q, x.P, x.D, x.Q);
        };
        return tup(o) < tup(best_order);
    };
    for (int d : space.d)
        for (int D : space.D)
            for (int p : space.p)
                for (int q : space.q)
                    for (int P : space.P)
                        for (int Q : space.Q) {
                            SarimaxOrder o{p, d, q, P, D, Q, space.s};
                            try {
                                SarimaxFit f = fit(y, X, o, search_options, exog_names);
                                if (better(f.aic, o)) {
                                    have_best = true;
                                    best_aic = f.aic;
                                    best_order = o;
                                }
                            } catch (const Error& e) {
                                last_error = e.what();
                            }
                        }
    if (!have_best) fail_model("sarimax: every candidate order failed; last error: " + last_error);
    return fit(y, X, best_order, final_options, exog_names);
}

Eigen::VectorXd forecast(const SarimaxFit& f, const Eigen::VectorXd& y_history,
                         const Eigen::MatrixXd& X_history, const Eigen::MatrixXd& X_future,
                         int horizon) {
    const SarimaxOrder& o = f.order;
    o.validate(y_history.size());
    const Eigen::Index k = f.beta.size();
    if (k > 0 && (X_history.cols() != k || X_future.cols() != k))
        fail_data("sarimax: exogenous column count does not match the fitted model");
    if (k > 0 && X_future.rows() < horizon)
        fail_data("sarimax: future exogenous values missing for some horizons");
    if (k > 0 && X_history.rows() != y_history.rows())
        fail_data("sarimax: exogenous history is not aligned");

    Eigen::VectorXd yd = difference(y_history, o.d, o.D, o.s);
    Eigen::MatrixXd Xd_hist(yd.size(), k), Xd_fut(horizon, k);
    if (k > 0) {
        Eigen::MatrixXd stacked(X_history.rows() + horizon, k);
        stacked.topRows(X_history.rows()) = X_history;
        stacked.bottomRows(horizon) = X_future.topRows(horizon);
        Eigen::MatrixXd sd = difference_cols(stacked, o.d, o.D, o.s);
        Xd_hist = sd.topRows(yd.size());
        Xd_fut = sd.bottomRows(horizon);
    }
    Eigen::VectorXd z = k > 0 ? Eigen::VectorXd(yd - Xd_hist * f.beta) : yd;

    StateSpace ss = build_state_space(f.params, o.s);
    GainSequence g = compute_gains(ss, z.size());
    Eigen::VectorXd a = Eigen::VectorXd::Zero(ss.r);
    for (Eigen::Index t = 0; t < z.size(); ++t) {
        const Eigen::VectorXd& K =
            t < static_cast<Eigen::Index>(g.K.size()) ? g.K[static_cast<size_t>(t)] : g.K_steady;
        double v = z(t) - a(0);
        a = ss.T * a + K * v;
    }

    // forecasts on the fully differenced scale
    Eigen::VectorXd wd(horizon);
    for (int h = 0; h < horizon; ++h) {
        wd(h) = a(0);
        if (k > 0) wd(h) += Xd_fut.row(h).dot(f.beta);
        a = ss.T * a;
    }

    // undo differencing level by level; each level keeps its own history
    std::vector<std::vector<double>> levels;
    levels.emplace_back(y_history.data(), y_history.data() + y_history.size());
    std::vector<int> lag;  // lag removed at each level
    for (int i = 0; i < o.d; ++i) lag.push_back(1);
    for (int i = 0; i < o.D; ++i) lag.push_back(o.s);
    for (size_t i = 0; i < lag.size(); ++i)
        levels.push_back(difference(levels[i], lag[i] == 1 ? 1 : 0, lag[i] == 1 ? 0 : 1, o.s));

    Eigen::VectorXd out(horizon);
    for (int h = 0; h < horizon; ++h) {
        levels.back().push_back(wd(h));
        for (size_t i = lag.size(); i-- > 0;) {
            const auto& deeper = levels[i + 1];
            auto& level = levels[i];
            double prev = level[level.size() - static_cast<size_t>(lag[i])];
            level.push_back(deeper.back() + prev);
        }
        out(h) = levels.front().back();
    }
    if (!out.allFinite()) fail_model("sarimax: non-finite forecast");
    return out;
}

Eigen::VectorXd simulate(const SarimaxOrder& order, const ArmaParams& params, double sigma,
                         std::int64_t n, std::uint64_t seed, int burn_in) {
    if (static_cast<Eigen::Index>(params.phi.size()) != order.p ||
        static_cast<Eigen::Index>(params.theta.size()) != order.q ||
        static_cast<Eigen::Index>(params.sphi.size()) != order.P ||
        static_cast<Eigen::Index>(params.stheta.size()) != order.Q)
        fail_config("sarimax: parameter lengths do not match the order");
    Eigen::VectorXd ar_poly = poly_product(params.phi, params.sphi, order.s);
    Eigen::VectorXd ma_poly = poly_product(params.theta, params.stheta, order.s);
    Eigen::Index pbar = ar_poly.size() - 1, qbar = ma_poly.size() - 1;

    Rng rng(seed);
    std::int64_t total = n + burn_in;
    std::vector<double> z(static_cast<size_t>(total), 0.0), eps(static_cast<size_t>(total), 0.0);
    for (std::int64_t t = 0; t < total; ++t) {
        eps[static_cast<size_t>(t)] = sigma * rng.normal();
        double v = eps[static_cast<size_t>(t)];
        for (Eigen::Index i = 1; i <= pbar; ++i)
            if (t - i >= 0) v -= ar_poly(i) * z[static_cast<size_t>(t - i)];
        for (Eigen::Index i = 1; i <= qbar; ++i)
            if (t - i >= 0) v += ma_poly(i) * eps[static_cast<size_t>(t - i)];
        z[static_cast<size_t>(t)] = v;
    }
    std::vector<double> w(z.end() - n, z.end());

    // integrate: seasonal sums first, then regular, inverse of difference()
    for (int kI = 0; kI < order.D; ++kI)
        for (size_t t = static_cast<size_t>(order.s); t < w.size(); ++t)
            w[t] += w[t - static_cast<size_t>(order.s)];
    for (int kI = 0; kI < order.d; ++kI)
        for (size_t t = 1; t < w.size(); ++t) w[t] += w[t - 1];
    return Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd json_vec(const nlohmann::json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = a.at(static_cast<size_t>(i)).get<double>();
    return v;
}

}  // namespace

nlohmann::json to_json(const SarimaxFit& f) {
    return nlohmann::json{
        {"kind", "sarimax"},
        {"order",
         {{"p", f.order.p},
          {"d", f.order.d},
          {"q", f.order.q},
          {"P", f.order.P},
          {"D", f.order.D},
          {"Q", f.order.Q},
          {"s", f.order.s}}},
        {"phi", vec_json(f.params.phi)},
        {"theta", vec_json(f.params.theta)},
        {"seasonal_phi", vec_json(f.params.sphi)},
        {"seasonal_theta", vec_json(f.params.stheta)},
        {"beta", vec_json(f.beta)},
        {"exog_names", f.exog_names},
        {"sigma2", f.sigma2},
        {"loglik", f.loglik},
        {"aic", f.aic}};
}

SarimaxFit fit_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "sarimax") fail_data("not a sarimax model artifact");
    SarimaxFit f;
    const auto& o = j.at("order");
    f.order = {o.at("p"), o.at("d"), o.at("q"), o.at("P"), o.at("D"), o.at("Q"), o.at("s")};
    f.params.phi = json_vec(j.at("phi"));
    f.params.theta = json_vec(j.at("theta"));
    f.params.sphi = json_vec(j.at("seasonal_phi"));
    f.params.stheta = json_vec(j.at("seasonal_theta"));
    f.beta = json_vec(j.at("beta"));
    f.exog_names = j.value("exog_names", std::vector<std::string>{});
    f.sigma2 = j.at("sigma2");
    f.loglik = j.at("loglik");
    f.aic = j.at("aic");
    return f;
}

void save_fit(const SarimaxFit& f, const std::string& path) {
    write_text_file(path, to_json(f).dump(2) + "\n");
}

SarimaxFit load_fit(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail_io(std::string("cannot parse model artifact: ") + e.what());
    }
    return fit_from_json(j);
}

}  // namespace edf::sarimax
