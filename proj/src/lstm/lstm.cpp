#include "lstm/lstm.hpp"

#include <algorithm>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace edf::lstm {

void LstmConfig::validate() const {
    if (hidden_size < 1 || n_layers < 1 || dense_units < 1 || batch_size < 1 || max_epochs < 1)
        fail_config("lstm: sizes and epoch counts must be positive");
    if (!(dropout_p >= 0 && dropout_p < 1)) fail_config("lstm: dropout_p must be in [0, 1)");
    if (!(learning_rate > 0)) fail_config("lstm: learning_rate must be positive");
    if (patience < 0) fail_config("lstm: patience must be >= 0");
    if (!(grad_clip > 0)) fail_config("lstm: grad_clip must be positive");
}

void to_json(nlohmann::json& j, const LstmConfig& c) {
    j = {{"hidden_size", c.hidden_size}, {"n_layers", c.n_layers},
         {"dropout_p", c.dropout_p},     {"dense_units", c.dense_units},
         {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
         {"max_epochs", c.max_epochs},   {"patience", c.patience},
         {"grad_clip", c.grad_clip},     {"forget_bias", c.forget_bias},
         {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, LstmConfig& c) {
    c = LstmConfig{};
    c.hidden_size = j.value("hidden_size", c.hidden_size);
    c.n_layers = j.value("n_layers", c.n_layers);
    c.dropout_p = j.value("dropout_p", c.dropout_p);
    c.dense_units = j.value("dense_units", c.dense_units);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.forget_bias = j.value("forget_bias", c.forget_bias);
    c.seed = j.value("seed", c.seed);
}

std::vector<Eigen::Map<Eigen::VectorXd>> LstmParams::blocks() {
    std::vector<Eigen::Map<Eigen::VectorXd>> out;
    for (auto& l : layers) {
        out.emplace_back(l.Wx.data(), l.Wx.size());
        out.emplace_back(l.Wh.data(), l.Wh.size());
        out.emplace_back(l.b.data(), l.b.size());
    }
    out.emplace_back(Wd.data(), Wd.size());
    out.emplace_back(bd.data(), bd.size());
    out.emplace_back(Wp.data(), Wp.size());
    out.emplace_back(bp.data(), bp.size());
    return out;
}

std::vector<Eigen::Map<const Eigen::VectorXd>> LstmParams::blocks() const {
    std::vector<Eigen::Map<const Eigen::VectorXd>> out;
    for (const auto& l : layers) {
        out.emplace_back(l.Wx.data(), l.Wx.size());
        out.emplace_back(l.Wh.data(), l.Wh.size());
        out.emplace_back(l.b.data(), l.b.size());
    }
    out.emplace_back(Wd.data(), Wd.size());
    out.emplace_back(bd.data(), bd.size());
    out.emplace_back(Wp.data(), Wp.size());
    out.emplace_back(bp.data(), bp.size());
    return out;
}

void LstmParams::set_zero() {
    for (auto b : blocks()) b.setZero();
}

namespace {

LstmParams make_shape(const LstmConfig& config, int input_size) {
    LstmParams p;
    p.input_size = input_size;
    const int H = config.hidden_size;
    for (int l = 0; l < config.n_layers; ++l) {
        int fin = l == 0 ? input_size : H;
        p.layers.push_back({Eigen::MatrixXd::Zero(fin, 4 * H), Eigen::MatrixXd::Zero(H, 4 * H),
                            Eigen::VectorXd::Zero(4 * H)});
    }
    p.Wd = Eigen::MatrixXd::Zero(H, config.dense_units);
    p.bd = Eigen::VectorXd::Zero(config.dense_units);
    p.Wp = Eigen::MatrixXd::Zero(config.dense_units, features::kHorizon);
    p.bp = Eigen::VectorXd::Zero(features::kHorizon);
    return p;
}

}  // namespace

LstmParams init_params(const LstmConfig& config, int input_size, Rng& rng) {
    config.validate();
    LstmParams p = make_shape(config, input_size);
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_size));
    auto fill = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = (2 * rng.uniform() - 1) * bound;
    };
    const int H = config.hidden_size;
    for (auto& l : p.layers) {
        fill(l.Wx);
        fill(l.Wh);
        l.b.segment(H, H).setConstant(config.forget_bias);  // forget gate block
    }
    fill(p.Wd);
    fill(p.Wp);
    return p;
}

Eigen::MatrixXd forward_batch(const LstmParams& params, const LstmConfig& config,
                              const std::vector<Eigen::MatrixXd>& steps, bool train_mode,
                              Rng* dropout_rng, ForwardCache* cache) {
    const int L = static_cast<int>(steps.size());
    if (L == 0) fail_data("lstm: empty input sequence");
    const Eigen::Index B = steps.front().rows();
    const int H = config.hidden_size;
    if (steps.front().cols() != params.input_size)
        fail_data("lstm: input feature count does not match the trained network");
    for (const auto& s : steps)
        if (!s.allFinite()) fail_data("lstm: non-finite input");

    ForwardCache local;
    ForwardCache& cc = cache ? *cache : local;
    const int nl = config.n_layers;
    cc.I.assign(nl, {});
    cc.F.assign(nl, {});
    cc.G.assign(nl, {});
    cc.O.assign(nl, {});
    cc.C.assign(nl, {});
    cc.TanhC.assign(nl, {});
    cc.H.assign(nl, {});
    cc.X = steps;

    std::vector<Eigen::MatrixXd> input = steps;
    for (int l = 0; l < nl; ++l) {
        const LayerParams& lp = params.layers[static_cast<size_t>(l)];
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(B, H);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(B, H);
        cc.H[static_cast<size_t>(l)].push_back(h);
        std::vector<Eigen::MatrixXd> out_seq;
        for (int t = 0; t < L; ++t) {
            Eigen::MatrixXd Z = input[static_cast<size_t>(t)] * lp.Wx + h * lp.Wh;
            Z.rowwise() += lp.b.transpose();
            Eigen::MatrixXd I = (1.0 / (1.0 + (-Z.leftCols(H).array()).exp())).matrix();
            Eigen::MatrixXd F = (1.0 / (1.0 + (-Z.middleCols(H, H).array()).exp())).matrix();
            Eigen::MatrixXd G = Z.middleCols(2 * H, H).array().tanh().matrix();
            Eigen::MatrixXd O = (1.0 / (1.0 + (-Z.rightCols(H).array()).exp())).matrix();
            Eigen::MatrixXd cn = F.cwiseProduct(c) + I.cwiseProduct(G);
            Eigen::MatrixXd tc = cn.array().tanh().matrix();
            h = O.cwiseProduct(tc);
            c = cn;
            cc.I[static_cast<size_t>(l)].push_back(std::move(I));
            cc.F[static_cast<size_t>(l)].push_back(std::move(F));
            cc.G[static_cast<size_t>(l)].push_back(std::move(G));
            cc.O[static_cast<size_t>(l)].push_back(std::move(O));
            cc.C[static_cast<size_t>(l)].push_back(c);
            cc.TanhC[static_cast<size_t>(l)].push_back(std::move(tc));
            cc.H[static_cast<size_t>(l)].push_back(h);
            out_seq.push_back(h);
        }
        input = std::move(out_seq);
    }

    Eigen::MatrixXd htop = cc.H[static_cast<size_t>(nl - 1)].back();
    cc.dropout_mask = Eigen::MatrixXd::Ones(B, H);
    if (train_mode && config.dropout_p > 0) {
        if (!dropout_rng) fail_config("lstm: train-mode forward needs a dropout stream");
        double keep = 1.0 - config.dropout_p;
        for (Eigen::Index i = 0; i < B; ++i)
            for (int j = 0; j < H; ++j)
                cc.dropout_mask(i, j) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
    cc.HD = htop.cwiseProduct(cc.dropout_mask);
    cc.U = cc.HD * params.Wd;
    cc.U.rowwise() += params.bd.transpose();
    cc.A = cc.U.cwiseMax(0.0);
    Eigen::MatrixXd out = cc.A * params.Wp;
    out.rowwise() += params.bp.transpose();
    if (!out.allFinite()) fail_model("lstm: non-finite forward output");
    return out;
}

Eigen::VectorXd forward(const LstmParams& params, const LstmConfig& config,
                        const Eigen::MatrixXd& X, bool train_mode, std::uint64_t seed,
                        ForwardCache* cache) {
    std::vector<Eigen::MatrixXd> steps;
    for (Eigen::Index t = 0; t < X.rows(); ++t) steps.push_back(X.row(t));
    Rng rng(seed);
    return forward_batch(params, config, steps, train_mode, &rng, cache).row(0).transpose();
}

LstmParams backward(const LstmParams& params, const LstmConfig& config, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_out) {
    const int nl = config.n_layers;
    const int H = config.hidden_size;
    const int L = static_cast<int>(cache.X.size());
    const Eigen::Index B = grad_out.rows();
    LstmParams g = make_shape(config, params.input_size);

    // head: projection, ReLU dense, dropout
    g.Wp = cache.A.transpose() * grad_out;
    g.bp = grad_out.colwise().sum().transpose();
    Eigen::MatrixXd dA = grad_out * params.Wp.transpose();
    Eigen::MatrixXd dU = dA.cwiseProduct((cache.U.array() > 0).cast<double>().matrix());
    g.Wd = cache.HD.transpose() * dU;
    g.bd = dU.colwise().sum().transpose();
    Eigen::MatrixXd dHtop = (dU * params.Wd.transpose()).cwiseProduct(cache.dropout_mask);

    // gradient flowing into each layer's output sequence; top layer only at
    // the final step
    std::vector<std::vector<Eigen::MatrixXd>> dseq(
        static_cast<size_t>(nl),
        std::vector<Eigen::MatrixXd>(static_cast<size_t>(L), Eigen::MatrixXd::Zero(B, H)));
    dseq[static_cast<size_t>(nl - 1)][static_cast<size_t>(L - 1)] = dHtop;

    for (int l = nl - 1; l >= 0; --l) {
        const LayerParams& lp = params.layers[static_cast<size_t>(l)];
        LayerParams& gl = g.layers[static_cast<size_t>(l)];
        Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(B, H);
        Eigen::MatrixXd dc_rec = Eigen::MatrixXd::Zero(B, H);
        const Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(B, H);
        for (int t = L - 1; t >= 0; --t) {
            const auto li = static_cast<size_t>(l);
            const auto ti = static_cast<size_t>(t);
            const Eigen::MatrixXd& I = cache.I[li][ti];
            const Eigen::MatrixXd& F = cache.F[li][ti];
            const Eigen::MatrixXd& G = cache.G[li][ti];
            const Eigen::MatrixXd& O = cache.O[li][ti];
            const Eigen::MatrixXd& tc = cache.TanhC[li][ti];
            const Eigen::MatrixXd& c_prev = t == 0 ? zero_state : cache.C[li][ti - 1];
            const Eigen::MatrixXd& h_prev = cache.H[li][ti];  // H[l][t] is pre-step hidden

            Eigen::MatrixXd dh = dseq[li][ti] + dh_rec;
            Eigen::MatrixXd dO = dh.cwiseProduct(tc);
            Eigen::MatrixXd dC =
                dh.cwiseProduct(O).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_rec;
            Eigen::MatrixXd dI = dC.cwiseProduct(G);
            Eigen::MatrixXd dG = dC.cwiseProduct(I);
            Eigen::MatrixXd dF = dC.cwiseProduct(c_prev);
            dc_rec = dC.cwiseProduct(F);

            Eigen::MatrixXd dZ(B, 4 * H);
            dZ.leftCols(H) = dI.array() * I.array() * (1.0 - I.array());
            dZ.middleCols(H, H) = dF.array() * F.array() * (1.0 - F.array());
            dZ.middleCols(2 * H, H) = dG.array() * (1.0 - G.array().square());
            dZ.rightCols(H) = dO.array() * O.array() * (1.0 - O.array());

            const Eigen::MatrixXd& xin = l == 0 ? cache.X[ti] : cache.H[li - 1][ti + 1];
            gl.Wx += xin.transpose() * dZ;
            gl.Wh += h_prev.transpose() * dZ;
            gl.b += dZ.colwise().sum().transpose();
            dh_rec = dZ * lp.Wh.transpose();
            if (l > 0) dseq[li - 1][ti] += dZ * lp.Wx.transpose();
        }
    }
    return g;
}

namespace {

double batch_mse(const Eigen::MatrixXd& out, const Eigen::MatrixXd& y) {
    return (out - y).array().square().sum() / static_cast<double>(out.size());
}

struct Adam {
    LstmParams m, v;
    long t = 0;
    double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    void step(LstmParams& p, LstmParams& grad, double lr, double clip) {
        auto gb = grad.blocks();
        double norm2 = 0;
        for (const auto& b : gb) norm2 += b.squaredNorm();
        double norm = std::sqrt(norm2);
        if (norm > clip)
            for (auto& b : gb) b *= clip / norm;
        ++t;
        auto pb = p.blocks();
        auto mb = m.blocks();
        auto vb = v.blocks();
        double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (size_t i = 0; i < pb.size(); ++i) {
            mb[i] = b1 * mb[i] + (1 - b1) * gb[i];
            vb[i] = b2 * vb[i] + (1 - b2) * gb[i].cwiseProduct(gb[i]);
            pb[i].array() -=
                lr * (mb[i].array() / c1) / ((vb[i].array() / c2).sqrt() + eps);
        }
    }
};

std::vector<Eigen::MatrixXd> gather_steps(const std::vector<features::WindowSample>& windows,
                                          const std::vector<size_t>& idx) {
    const Eigen::Index L = windows.front().X.rows(), F = windows.front().X.cols();
    std::vector<Eigen::MatrixXd> steps(static_cast<size_t>(L),
                                       Eigen::MatrixXd(static_cast<Eigen::Index>(idx.size()), F));
    for (size_t i = 0; i < idx.size(); ++i)
        for (Eigen::Index t = 0; t < L; ++t)
            steps[static_cast<size_t>(t)].row(static_cast<Eigen::Index>(i)) = windows[idx[i]].X.row(t);
    return steps;
}

Eigen::MatrixXd gather_targets(const std::vector<features::WindowSample>& windows,
                               const std::vector<size_t>& idx) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(idx.size()), features::kHorizon);
    for (size_t i = 0; i < idx.size(); ++i)
        y.row(static_cast<Eigen::Index>(i)) = windows[idx[i]].y.transpose();
    return y;
}

}  // namespace

TrainedLstm train(const std::vector<features::WindowSample>& train_windows,
                  const LstmConfig& config) {
    config.validate();
    if (train_windows.size() < 10) fail_data("lstm: need at least 10 training windows");

    std::vector<features::WindowSample> ordered = train_windows;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.origin < b.origin; });
    size_t n_val = std::max<size_t>(1, ordered.size() / 5);
    size_t n_fit = ordered.size() - n_val;
    std::vector<features::WindowSample> fit_part(ordered.begin(),
                                                 ordered.begin() + static_cast<std::ptrdiff_t>(n_fit));
    std::vector<features::WindowSample> val_part(ordered.begin() + static_cast<std::ptrdiff_t>(n_fit),
                                                 ordered.end());
    auto [scaled, stand] = features::standardize(fit_part, val_part);
    auto& fit_s = scaled.first;
    auto& val_s = scaled.second;

    TrainedLstm model;
    model.config = config;
    model.standardization = stand;
    Rng init_rng = Rng::substream(config.seed, 1);
    Rng shuffle_rng = Rng::substream(config.seed, 2);
    Rng dropout_rng = Rng::substream(config.seed, 3);
    model.params = init_params(config, static_cast<int>(fit_s.front().X.cols()), init_rng);

    std::vector<size_t> val_idx(val_s.size());
    for (size_t i = 0; i < val_idx.size(); ++i) val_idx[i] = i;
    auto val_steps = gather_steps(val_s, val_idx);
    auto val_y = gather_targets(val_s, val_idx);

    Adam adam;
    adam.m = make_shape(config, model.params.input_size);
    adam.v = make_shape(config, model.params.input_size);

    LstmParams best = model.params;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = -1, wait = 0;
    TrainReport& rep = model.report;

    std::vector<size_t> order(fit_s.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_u64() % i]);
        double epoch_loss = 0;
        int n_batches = 0;
        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
            std::vector<size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(std::min(
                                        order.size(), start + static_cast<size_t>(config.batch_size))));
            auto steps = gather_steps(fit_s, idx);
            auto y = gather_targets(fit_s, idx);
            ForwardCache cache;
            Eigen::MatrixXd out =
                forward_batch(model.params, config, steps, true, &dropout_rng, &cache);
            double loss = batch_mse(out, y);
            if (!std::isfinite(loss))
                fail_model("lstm: training diverged at epoch " + std::to_string(epoch));
            epoch_loss += loss;
            ++n_batches;
            Eigen::MatrixXd grad_out = 2.0 * (out - y) / static_cast<double>(out.size());
            LstmParams grads = backward(model.params, config, cache, grad_out);
            adam.step(model.params, grads, config.learning_rate, config.grad_clip);
        }
        rep.train_curve.push_back(epoch_loss / std::max(1, n_batches));

        Eigen::MatrixXd vout = forward_batch(model.params, config, val_steps, false, nullptr, nullptr);
        double vloss = batch_mse(vout, val_y);
        rep.val_curve.push_back(vloss);
        rep.epochs_run = epoch + 1;
        if (vloss < best_val) {
            best_val = vloss;
            best = model.params;
            best_epoch = epoch;
            wait = 0;
        } else if (++wait > config.patience) {
            rep.early_stopped = true;
            break;
        }
    }
    model.params = best;
    rep.best_epoch = best_epoch;
    return model;
}

Eigen::VectorXd predict(const TrainedLstm& model, const features::WindowSample& sample) {
    if (sample.X.cols() != model.params.input_size)
        fail_data("lstm: window feature count does not match the trained network");
    Eigen::MatrixXd xs = model.standardization.scale_features(sample.X);
    Eigen::VectorXd out = forward(model.params, model.config, xs, false, 0);
    return model.standardization.unscale_target(out);
}

namespace {

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

Eigen::MatrixXd json_mat(const nlohmann::json& rows) {
    Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
    Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nc; ++j)
            m(i, j) = rows.at(static_cast<size_t>(i)).at(static_cast<size_t>(j)).get<double>();
    return m;
}

nlohmann::json vecj(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd jvec(const nlohmann::json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = a.at(static_cast<size_t>(i)).get<double>();
    return v;
}

}  // namespace

nlohmann::json to_json(const TrainedLstm& model) {
    nlohmann::json j;
    j["kind"] = "lstm";
    to_json(j["config"], model.config);
    j["input_size"] = model.params.input_size;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : model.params.layers)
        j["layers"].push_back({{"Wx", mat_json(l.Wx)}, {"Wh", mat_json(l.Wh)}, {"b", vecj(l.b)}});
    j["Wd"] = mat_json(model.params.Wd);
    j["bd"] = vecj(model.params.bd);
    j["Wp"] = mat_json(model.params.Wp);
    j["bp"] = vecj(model.params.bp);
    j["standardization"] = {{"feature_mean", vecj(model.standardization.feature_mean)},
                            {"feature_std", vecj(model.standardization.feature_std)},
                            {"target_mean", model.standardization.target_mean},
                            {"target_std", model.standardization.target_std}};
    j["report"] = {{"epochs_run", model.report.epochs_run},
                   {"train_curve", model.report.train_curve},
                   {"val_curve", model.report.val_curve},
                   {"best_epoch", model.report.best_epoch},
                   {"early_stopped", model.report.early_stopped}};
    return j;
}

TrainedLstm trained_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "lstm") fail_data("not an lstm model artifact");
    TrainedLstm m;
    from_json(j.at("config"), m.config);
    m.params.input_size = j.at("input_size").get<int>();
    for (const auto& l : j.at("layers"))
        m.params.layers.push_back({json_mat(l.at("Wx")), json_mat(l.at("Wh")), jvec(l.at("b"))});
    m.params.Wd = json_mat(j.at("Wd"));
    m.params.bd = jvec(j.at("bd"));
    m.params.Wp = json_mat(j.at("Wp"));
    m.params.bp = jvec(j.at("bp"));
    const auto& s = j.at("standardization");
    m.standardization.feature_mean = jvec(s.at("feature_mean"));
    m.standardization.feature_std = jvec(s.at("feature_std"));
    m.standardization.target_mean = s.at("target_mean").get<double>();
    m.standardization.target_std = s.at("target_std").get<double>();
    const auto& r = j.at("report");
    m.report.epochs_run = r.at("epochs_run").get<int>();
    m.report.train_curve = r.at("train_curve").get<std::vector<double>>();
    m.report.val_curve = r.at("val_curve").get<std::vector<double>>();
    m.report.best_epoch = r.at("best_epoch").get<int>();
    m.report.early_stopped = r.at("early_stopped").get<bool>();
    return m;
}

void save_trained(const TrainedLstm& model, const std::string& path) {
    write_text_file(path, to_json(model).dump() + "\n");
}

TrainedLstm load_trained(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail_io(std::string("cannot parse model artifact: ") + e.what());
    }
    return trained_from_json(j);
}

}  // namespace edf::lstm
