#include <doctest.h>

#include <filesystem>
#include <utility>

#include "lstm/lstm.hpp"

using namespace edf;
using namespace edf::lstm;

namespace {

LstmConfig tiny_config() {
    LstmConfig c;
    c.hidden_size = 4;
    c.n_layers = 2;
    c.dropout_p = 0.0;
    c.dense_units = 6;
    c.seed = 3;
    return c;
}

// Scalar loss used by the gradient check: 0.5 * |out - y|^2.
double loss_at(const LstmParams& p, const LstmConfig& c, const Eigen::MatrixXd& X,
               const Eigen::VectorXd& y) {
    Eigen::VectorXd out = forward(p, c, X, false, 0);
    return 0.5 * (out - y).squaredNorm();
}

std::vector<features::WindowSample> make_windows(int n, double target, std::uint64_t seed,
                                                 int F = 5) {
    Rng rng(seed);
    std::vector<features::WindowSample> out;
    for (int i = 0; i < n; ++i) {
        features::WindowSample s;
        s.origin = CalendarDate{2018, 1, 1}.plus_days(i);
        s.X.resize(features::kInputLen, F);
        for (Eigen::Index r = 0; r < s.X.rows(); ++r)
            for (Eigen::Index cix = 0; cix < s.X.cols(); ++cix) s.X(r, cix) = rng.normal();
        s.y = Eigen::VectorXd::Constant(features::kHorizon, target);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("forward basics") {
    LstmConfig c = tiny_config();
    Rng rng(7);
    SUBCASE("all-zero parameters give the zero vector") {
        LstmParams p = init_params(c, 3, rng);
        p.set_zero();
        Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
        Eigen::VectorXd out = forward(p, c, X, false, 0);
        CHECK(out.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("eval mode is deterministic") {
        LstmParams p = init_params(c, 3, rng);
        Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
        CHECK(forward(p, c, X, false, 0) == forward(p, c, X, false, 99));
    }
    SUBCASE("dropout_p = 0 makes train and eval identical") {
        LstmParams p = init_params(c, 3, rng);
        Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
        CHECK(forward(p, c, X, true, 1) == forward(p, c, X, false, 0));
    }
    SUBCASE("non-finite input errors") {
        LstmParams p = init_params(c, 3, rng);
        Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
        X(2, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(forward(p, c, X, false, 0), Error);
    }
    SUBCASE("a sample evaluated inside a batch matches its solo evaluation") {
        LstmParams p = init_params(c, 3, rng);
        std::vector<Eigen::MatrixXd> steps(5, Eigen::MatrixXd(3, 3));
        for (auto& s : steps) s.setRandom();
        Eigen::MatrixXd batch_out = forward_batch(p, c, steps, false, nullptr, nullptr);
        for (int row = 0; row < 3; ++row) {
            Eigen::MatrixXd X(5, 3);
            for (int t = 0; t < 5; ++t) X.row(t) = steps[static_cast<size_t>(t)].row(row);
            Eigen::VectorXd solo = forward(p, c, X, false, 0);
            CHECK((solo - batch_out.row(row).transpose()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    LstmConfig c = tiny_config();
    Rng rng(11);
    const int F = 3, L = 5;
    LstmParams p = init_params(c, F, rng);
    Eigen::MatrixXd X(L, F);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < F; ++j) X(i, j) = rng.normal();
    Eigen::VectorXd y(features::kHorizon);
    for (int h = 0; h < features::kHorizon; ++h) y(h) = rng.normal();

    ForwardCache cache;
    Eigen::VectorXd out = forward(p, c, X, true, 0, &cache);
    Eigen::MatrixXd grad_out = (out - y).transpose();  // dLoss/dOut for 0.5|out-y|^2
    LstmParams analytic = backward(p, c, cache, grad_out);

    const double h = 1e-4;
    auto ablocks = analytic.blocks();
    auto pblocks = p.blocks();
    for (size_t b = 0; b < pblocks.size(); ++b) {
        CAPTURE(b);
        double max_rel = 0;
        for (Eigen::Index i = 0; i < pblocks[b].size(); ++i) {
            double orig = pblocks[b](i);
            pblocks[b](i) = orig + h;
            double fp = loss_at(p, c, X, y);
            pblocks[b](i) = orig - h;
            double fm = loss_at(p, c, X, y);
            pblocks[b](i) = orig;
            double numeric = (fp - fm) / (2 * h);
            double denom = std::max({1e-8, std::fabs(numeric), std::fabs(ablocks[b](i))});
            max_rel = std::max(max_rel, std::fabs(numeric - ablocks[b](i)) / denom);
        }
        CHECK(max_rel <= 1e-4);
    }
}

TEST_CASE("backward edge behavior") {
    LstmConfig c = tiny_config();
    Rng rng(13);
    LstmParams p = init_params(c, 3, rng);
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
    ForwardCache cache;
    forward(p, c, X, true, 0, &cache);
    SUBCASE("zero output gradient gives all-zero parameter gradients") {
        LstmParams g = backward(p, c, cache, Eigen::MatrixXd::Zero(1, features::kHorizon));
        for (const auto& b : std::as_const(g).blocks()) CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("projection-layer gradient is determined by the dense activation") {
        Eigen::MatrixXd go = Eigen::MatrixXd::Ones(1, features::kHorizon);
        LstmParams g = backward(p, c, cache, go);
        // dWp = A' * grad_out exactly; independent of anything upstream
        Eigen::MatrixXd expect = cache.A.transpose() * go;
        CHECK((g.Wp - expect).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("one Adam step with a small rate reduces loss on a fixed batch") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        LstmConfig c = tiny_config();
        c.seed = seed;
        c.learning_rate = 1e-4;
        auto windows = make_windows(8, 3.0, seed);
        // hand-run one step on the raw standardized batch
        auto [scaled, stand] = features::standardize(windows, {});
        Rng rng(seed);
        LstmParams p = init_params(c, 5, rng);

        std::vector<Eigen::MatrixXd> steps(features::kInputLen, Eigen::MatrixXd(8, 5));
        Eigen::MatrixXd y(8, features::kHorizon);
        for (int i = 0; i < 8; ++i) {
            for (int t = 0; t < features::kInputLen; ++t)
                steps[static_cast<size_t>(t)].row(i) = scaled.first[static_cast<size_t>(i)].X.row(t);
            y.row(i) = scaled.first[static_cast<size_t>(i)].y.transpose();
        }
        auto loss_of = [&](const LstmParams& q) {
            Eigen::MatrixXd out = forward_batch(q, c, steps, false, nullptr, nullptr);
            return (out - y).array().square().sum() / static_cast<double>(out.size());
        };
        double before = loss_of(p);
        ForwardCache cache;
        Eigen::MatrixXd out = forward_batch(p, c, steps, true, nullptr, &cache);
        Eigen::MatrixXd go = 2.0 * (out - y) / static_cast<double>(out.size());
        LstmParams grads = backward(p, c, cache, go);
        // one Adam step; at t=1 bias correction reduces it to g/(|g| + eps)
        auto pb = p.blocks();
        auto gb = grads.blocks();
        for (size_t i = 0; i < pb.size(); ++i)
            pb[i].array() -= c.learning_rate * gb[i].array() / (gb[i].array().abs() + 1e-8);
        CHECK(loss_of(p) < before);
    }
}

TEST_CASE("training on constant targets converges and early-stops deterministically") {
    LstmConfig c;
    c.hidden_size = 8;
    c.n_layers = 1;
    c.dense_units = 16;
    c.dropout_p = 0.0;
    c.batch_size = 16;
    c.max_epochs = 120;
    c.patience = 10;
    c.learning_rate = 0.01;
    c.seed = 4;
    auto windows = make_windows(60, 9.0, 17);

    auto model = train(windows, c);
    REQUIRE(!model.report.val_curve.empty());
    double best = *std::min_element(model.report.val_curve.begin(), model.report.val_curve.end());
    CHECK(model.report.val_curve[static_cast<size_t>(model.report.best_epoch)] ==
          doctest::Approx(best).epsilon(1e-15));
    CHECK(best < 1e-3);  // standardized units; optimum is the constant map

    auto probe = make_windows(1, 9.0, 99).front();
    Eigen::VectorXd pred = predict(model, probe);
    REQUIRE(pred.size() == 7);
    for (int h = 0; h < 7; ++h) CHECK(pred(h) == doctest::Approx(9.0).epsilon(0.05));

    SUBCASE("same seed reproduces the curves exactly") {
        auto again = train(windows, c);
        CHECK(again.report.train_curve == model.report.train_curve);
        CHECK(again.report.val_curve == model.report.val_curve);
    }
    SUBCASE("patience zero stops at the first non-improving epoch") {
        LstmConfig c0 = c;
        c0.patience = 0;
        auto m0 = train(windows, c0);
        if (m0.report.early_stopped) {
            size_t n = m0.report.val_curve.size();
            REQUIRE(n >= 2);
            // every epoch before the last improved on the running best
            double run = m0.report.val_curve[0];
            for (size_t i = 1; i + 1 < n; ++i) {
                CHECK(m0.report.val_curve[i] < run);
                run = std::min(run, m0.report.val_curve[i]);
            }
            CHECK(m0.report.val_curve[n - 1] >= run);
        }
    }
}

TEST_CASE("artifact round trip preserves predictions exactly") {
    LstmConfig c = tiny_config();
    c.max_epochs = 5;
    c.patience = 5;
    auto windows = make_windows(30, 4.0, 23);
    auto model = train(windows, c);
    auto path = (std::filesystem::temp_directory_path() / "edf_lstm.json").string();
    save_trained(model, path);
    auto loaded = load_trained(path);
    auto probe = make_windows(1, 4.0, 7).front();
    CHECK(predict(loaded, probe) == predict(model, probe));
    CHECK(loaded.report.val_curve == model.report.val_curve);

    CHECK_THROWS_AS(trained_from_json(nlohmann::json{{"kind", "other"}}), Error);
    probe.X.conservativeResize(features::kInputLen, 9);
    CHECK_THROWS_AS(predict(model, probe), Error);
}

TEST_CASE("config validation") {
    LstmConfig c;
    c.dropout_p = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = LstmConfig{};
    c.hidden_size = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = LstmConfig{};
    c.learning_rate = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(train({}, LstmConfig{}), Error);
}
