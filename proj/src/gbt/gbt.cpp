#include "gbt/gbt.hpp"

#include <algorithm>
#include <fstream>

#include "core/csv.hpp"

namespace edf::gbt {

void GbtConfig::validate() const {
    if (n_trees < 1) fail_config("gbt: n_trees must be >= 1");
    if (!(learning_rate > 0 && learning_rate <= 1))
        fail_config("gbt: learning_rate must be in (0, 1]");
    if (max_depth < 0) fail_config("gbt: max_depth must be >= 0");
    if (lambda < 0) fail_config("gbt: lambda must be >= 0");
    if (gamma < 0) fail_config("gbt: gamma must be >= 0");
    if (min_child_weight < 0) fail_config("gbt: min_child_weight must be >= 0");
}

void to_json(nlohmann::json& j, const GbtConfig& c) {
    j = {{"n_trees", c.n_trees},         {"learning_rate", c.learning_rate},
         {"max_depth", c.max_depth},     {"lambda", c.lambda},
         {"gamma", c.gamma},             {"min_child_weight", c.min_child_weight},
         {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, GbtConfig& c) {
    c = GbtConfig{};
    c.n_trees = j.value("n_trees", c.n_trees);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_depth = j.value("max_depth", c.max_depth);
    c.lambda = j.value("lambda", c.lambda);
    c.gamma = j.value("gamma", c.gamma);
    c.min_child_weight = j.value("min_child_weight", c.min_child_weight);
    c.seed = j.value("seed", c.seed);
}

double Tree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    int i = 0;
    while (nodes[static_cast<size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        if (n.feature >= x.size()) fail_model("tree references a feature outside the input");
        i = x(n.feature) < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(i)].weight;
}

int Tree::depth() const {
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const TreeNode& n = nodes[i];
        if (n.feature < 0) {
            best = std::max(best, d[i]);
            continue;
        }
        // children always appear after their parent
        d[static_cast<size_t>(n.left)] = d[i] + 1;
        d[static_cast<size_t>(n.right)] = d[i] + 1;
    }
    return best;
}

SplitChoice best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& grad,
                       const Eigen::VectorXd& hess, const std::vector<int>& samples,
                       const GbtConfig& config) {
    SplitChoice best;
    if (samples.size() < 2) return best;
    double G = 0, H = 0;
    for (int i : samples) {
        G += grad(i);
        H += hess(i);
    }
    const double parent_score = G * G / (H + config.lambda);

    std::vector<int> order = samples;
    for (int f = 0; f < X.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
            return a < b;
        });
        double GL = 0, HL = 0;
        for (size_t k = 0; k + 1 < order.size(); ++k) {
            GL += grad(order[k]);
            HL += hess(order[k]);
            double v = X(order[k], f), w = X(order[k + 1], f);
            if (!(v < w)) continue;  // no boundary between equal values
            double GR = G - GL, HR = H - HL;
            if (HL < config.min_child_weight || HR < config.min_child_weight) continue;
            double gain = 0.5 * (GL * GL / (HL + config.lambda) + GR * GR / (HR + config.lambda) -
                                 parent_score) -
                          config.gamma;
            // ties keep the first candidate: features ascend, thresholds ascend
            if (!best.found || gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (v + w);
                best.gain = gain;
            }
        }
    }
    if (best.found && best.gain <= 0) best.found = false;
    return best;
}

namespace {

struct Builder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& grad;
    const Eigen::VectorXd& hess;
    const GbtConfig& config;
    Tree tree;

    int grow(std::vector<int>&& samples, int depth) {
        double G = 0, H = 0;
        for (int i : samples) {
            G += grad(i);
            H += hess(i);
        }
        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes[static_cast<size_t>(id)].cover = H;

        SplitChoice split;
        if (depth < config.max_depth) split = best_split(X, grad, hess, samples, config);
        if (!split.found) {
            tree.nodes[static_cast<size_t>(id)].weight = -G / (H + config.lambda);
            return id;
        }
        std::vector<int> left, right;
        for (int i : samples)
            (X(i, split.feature) < split.threshold ? left : right).push_back(i);
        samples.clear();
        samples.shrink_to_fit();
        int l = grow(std::move(left), depth + 1);
        int r = grow(std::move(right), depth + 1);
        TreeNode& n = tree.nodes[static_cast<size_t>(id)];
        n.feature = split.feature;
        n.threshold = split.threshold;
        n.gain = split.gain;
        n.left = l;
        n.right = r;
        return id;
    }
};

}  // namespace

double HorizonEnsemble::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double out = base_score;
    for (const Tree& t : trees) out += learning_rate * t.predict(x);
    return out;
}

HorizonEnsemble fit_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const GbtConfig& config, int horizon,
                             std::vector<double>* train_mse_curve) {
    config.validate();
    const Eigen::Index n = X.rows();
    if (n < 2) fail_data("gbt: need at least 2 training samples");
    if (y.size() != n) fail_data("gbt: target length mismatch");
    if (!X.allFinite() || !y.allFinite())
        fail_data("gbt: training data contains non-finite values");

    HorizonEnsemble ens;
    ens.horizon = horizon;
    ens.learning_rate = config.learning_rate;
    ens.base_score = y.mean();

    Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, ens.base_score);
    Eigen::VectorXd hess = Eigen::VectorXd::Ones(n);
    std::vector<int> all(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = static_cast<int>(i);

    for (int m = 0; m < config.n_trees; ++m) {
        Eigen::VectorXd grad = pred - y;
        Builder b{X, grad, hess, config, {}};
        b.grow(std::vector<int>(all), 0);
        for (Eigen::Index i = 0; i < n; ++i)
            pred(i) += config.learning_rate * b.tree.predict(X.row(i).transpose());
        if (train_mse_curve) train_mse_curve->push_back((pred - y).squaredNorm() / n);
        ens.trees.push_back(std::move(b.tree));
    }
    return ens;
}

Eigen::VectorXd flatten(const features::WindowSample& sample) {
    const Eigen::Index L = sample.X.rows(), F = sample.X.cols();
    Eigen::VectorXd out(L * F);
    for (Eigen::Index d = 0; d < L; ++d) out.segment(d * F, F) = sample.X.row(d).transpose();
    return out;
}

std::vector<std::string> flatten_names(const std::vector<std::string>& per_day_names) {
    std::vector<std::string> out;
    out.reserve(features::kInputLen * per_day_names.size());
    for (int d = 0; d < features::kInputLen; ++d) {
        int offset = d - (features::kInputLen - 1);  // -13 .. 0
        std::string prefix = "d" + std::to_string(offset) + "_";
        for (const auto& name : per_day_names) out.push_back(prefix + name);
    }
    return out;
}

MultistepGbt fit_multistep(const std::vector<features::WindowSample>& train,
                           const GbtConfig& config,
                           const std::vector<std::string>& per_day_names) {
    if (train.empty()) fail_data("gbt: empty training set");
    MultistepGbt model;
    model.config = config;
    model.feature_manifest = flatten_names(per_day_names);
    if (model.feature_manifest.size() !=
        static_cast<size_t>(train.front().X.rows() * train.front().X.cols()))
        fail_data("gbt: feature manifest does not match window shape");

    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(model.feature_manifest.size()));
    for (Eigen::Index i = 0; i < n; ++i)
        X.row(i) = flatten(train[static_cast<size_t>(i)]).transpose();

    for (int h = 1; h <= features::kHorizon; ++h) {
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = train[static_cast<size_t>(i)].y(h - 1);
        model.ensembles.push_back(fit_ensemble(X, y, config, h));
    }
    return model;
}

Eigen::VectorXd MultistepGbt::predict(const features::WindowSample& sample) const {
    Eigen::VectorXd x = flatten(sample);
    if (x.size() != static_cast<Eigen::Index>(feature_manifest.size()))
        fail_data("gbt: input window shape does not match the trained manifest");
    Eigen::VectorXd out(features::kHorizon);
    for (int h = 0; h < features::kHorizon; ++h) out(h) = ensembles[static_cast<size_t>(h)].predict(x);
    if (!out.allFinite()) fail_model("gbt: non-finite prediction");
    return out;
}

namespace {

// preorder serialization; children follow their parent recursively
void emit_node(const Tree& tree, int id, nlohmann::json& out) {
    const TreeNode& n = tree.nodes[static_cast<size_t>(id)];
    nlohmann::json j;
    if (n.feature < 0) {
        j = {{"leaf", n.weight}, {"cover", n.cover}};
        out.push_back(std::move(j));
        return;
    }
    j = {{"feature", n.feature}, {"threshold", n.threshold}, {"gain", n.gain}, {"cover", n.cover}};
    out.push_back(std::move(j));
    emit_node(tree, n.left, out);
    emit_node(tree, n.right, out);
}

int read_node(const nlohmann::json& arr, size_t& pos, Tree& tree) {
    const nlohmann::json& j = arr.at(pos++);
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    if (j.contains("leaf")) {
        tree.nodes[static_cast<size_t>(id)].weight = j.at("leaf").get<double>();
        tree.nodes[static_cast<size_t>(id)].cover = j.value("cover", 0.0);
        return id;
    }
    int l = read_node(arr, pos, tree);
    int r = read_node(arr, pos, tree);
    TreeNode& n = tree.nodes[static_cast<size_t>(id)];
    n.feature = j.at("feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.gain = j.value("gain", 0.0);
    n.cover = j.value("cover", 0.0);
    n.left = l;
    n.right = r;
    return id;
}

}  // namespace

nlohmann::json to_json(const MultistepGbt& model) {
    nlohmann::json j;
    j["kind"] = "gbt_multistep";
    to_json(j["config"], model.config);
    j["feature_manifest"] = model.feature_manifest;
    j["ensembles"] = nlohmann::json::array();
    for (const auto& ens : model.ensembles) {
        nlohmann::json je;
        je["horizon"] = ens.horizon;
        je["base_score"] = ens.base_score;
        je["learning_rate"] = ens.learning_rate;
        je["trees"] = nlohmann::json::array();
        for (const Tree& t : ens.trees) {
            nlohmann::json nodes = nlohmann::json::array();
            emit_node(t, 0, nodes);
            je["trees"].push_back(std::move(nodes));
        }
        j["ensembles"].push_back(std::move(je));
    }
    return j;
}

MultistepGbt multistep_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "gbt_multistep") fail_data("not a gbt model artifact");
    MultistepGbt model;
    from_json(j.at("config"), model.config);
    model.feature_manifest = j.at("feature_manifest").get<std::vector<std::string>>();
    for (const auto& je : j.at("ensembles")) {
        HorizonEnsemble ens;
        ens.horizon = je.at("horizon").get<int>();
        ens.base_score = je.at("base_score").get<double>();
        ens.learning_rate = je.at("learning_rate").get<double>();
        for (const auto& nodes : je.at("trees")) {
            Tree t;
            size_t pos = 0;
            read_node(nodes, pos, t);
            if (pos != nodes.size()) fail_data("malformed tree array in gbt artifact");
            ens.trees.push_back(std::move(t));
        }
        model.ensembles.push_back(std::move(ens));
    }
    if (model.ensembles.size() != features::kHorizon)
        fail_data("gbt artifact must carry exactly 7 ensembles");
    return model;
}

void save_multistep(const MultistepGbt& model, const std::string& path) {
    write_text_file(path, to_json(model).dump(2) + "\n");
}

MultistepGbt load_multistep(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail_io(std::string("cannot parse model artifact: ") + e.what());
    }
    return multistep_from_json(j);
}

}  // namespace edf::gbt
