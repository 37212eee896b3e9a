#include "geocmd/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace geocmd {

namespace {

using json = nlohmann::json;

json header(std::string_view kind, const std::vector<std::string>& classes, const Vocabulary& vocab) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = kind;
    j["classes"] = classes;
    j["vocabulary"] = {{"terms", vocab.terms()}, {"idf", vocab.idf()}};
    return j;
}

[[noreturn]] void corrupt(const std::string& what) { throw ModelError(ModelErrorKind::CorruptModel, what); }

void require(bool ok, const std::string& what) {
    if (!ok) corrupt(what);
}

std::vector<std::string> read_classes(const json& j) {
    auto classes = j.at("classes").get<std::vector<std::string>>();
    require(classes.size() >= 2, "model needs at least two classes");
    return classes;
}

Vocabulary read_vocabulary(const json& j) {
    const json& v = j.at("vocabulary");
    return Vocabulary(v.at("terms").get<std::vector<std::string>>(), v.at("idf").get<std::vector<double>>());
}

SvmModel read_svm(const json& j) {
    SvmModel m;
    m.classes = read_classes(j);
    m.vocabulary = read_vocabulary(j);
    const json& hp = j.at("hyperparameters");
    m.options.C = hp.at("C").get<double>();
    m.options.tol = hp.at("tol").get<double>();
    m.options.max_iter = hp.at("max_iter").get<std::uint32_t>();
    m.options.seed = hp.at("seed").get<std::uint64_t>();
    const json& body = j.at("body");
    m.weights = body.at("weights").get<std::vector<std::vector<double>>>();
    m.bias = body.at("bias").get<std::vector<double>>();
    require(m.weights.size() == m.classes.size() && m.bias.size() == m.classes.size(),
            "svm weight rows do not match classes");
    for (const auto& w : m.weights) require(w.size() == m.vocabulary.size(), "svm weight row has wrong dimension");
    return m;
}

ForestModel read_forest(const json& j) {
    ForestModel m;
    m.classes = read_classes(j);
    m.vocabulary = read_vocabulary(j);
    const json& hp = j.at("hyperparameters");
    m.options.n_trees = hp.at("n_trees").get<std::uint32_t>();
    m.options.seed = hp.at("seed").get<std::uint64_t>();
    const auto rule = hp.at("max_features").get<std::string>();
    require(rule == "sqrt" || rule == "all", "unknown max_features rule '" + rule + "'");
    m.options.max_features = rule == "sqrt" ? FeatureRule::Sqrt : FeatureRule::All;
    m.options.min_samples_split = hp.at("min_samples_split").get<std::uint32_t>();
    m.options.min_samples_leaf = hp.at("min_samples_leaf").get<std::uint32_t>();
    m.options.bootstrap = hp.at("bootstrap").get<bool>();

    const json& trees = j.at("body").at("trees");
    require(trees.is_array() && trees.size() == m.options.n_trees, "tree count does not match n_trees");
    const auto dim = static_cast<std::int64_t>(m.vocabulary.size());
    for (const json& t : trees) {
        DecisionTree tree;
        require(t.is_array() && !t.empty(), "empty tree");
        const auto n_nodes = static_cast<std::int64_t>(t.size());
        for (const json& n : t) {
            require(n.is_array() && n.size() == 7, "tree node must have 7 fields");
            TreeNode node;
            node.feature = n[0].get<std::int32_t>();
            node.threshold = n[1].get<double>();
            node.left = n[2].get<std::int32_t>();
            node.right = n[3].get<std::int32_t>();
            node.label = n[4].get<std::uint32_t>();
            node.impurity = n[5].get<double>();
            node.n_samples = n[6].get<std::uint32_t>();
            require(node.label < m.classes.size(), "leaf label out of range");
            if (!node.is_leaf()) {
                require(node.feature < dim, "split feature out of range");
                // Children always come after their parent.
                const auto self = static_cast<std::int64_t>(tree.nodes.size());
                require(node.left > self && node.left < n_nodes && node.right > self && node.right < n_nodes,
                        "child index out of range");
            }
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

} // namespace

std::string to_model_text(const SvmModel& model) {
    json j = header("svm", model.classes, model.vocabulary);
    j["hyperparameters"] = {{"C", model.options.C},
                            {"tol", model.options.tol},
                            {"max_iter", model.options.max_iter},
                            {"seed", model.options.seed},
                            {"loss", "squared_hinge"},
                            {"penalty", "l2"},
                            {"fit_intercept", true},
                            {"multi_class", "ovr"}};
    j["body"] = {{"weights", model.weights}, {"bias", model.bias}};
    return j.dump() + "\n";
}

std::string to_model_text(const ForestModel& model) {
    json j = header("rf", model.classes, model.vocabulary);
    j["hyperparameters"] = {{"n_trees", model.options.n_trees},
                            {"seed", model.options.seed},
                            {"max_features", model.options.max_features == FeatureRule::Sqrt ? "sqrt" : "all"},
                            {"min_samples_split", model.options.min_samples_split},
                            {"min_samples_leaf", model.options.min_samples_leaf},
                            {"bootstrap", model.options.bootstrap},
                            {"criterion", "gini"},
                            {"max_depth", nullptr}};
    json trees = json::array();
    for (const DecisionTree& tree : model.trees) {
        json nodes = json::array();
        for (const TreeNode& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label, n.impurity, n.n_samples});
        trees.push_back(std::move(nodes));
    }
    j["body"] = {{"trees", std::move(trees)}};
    return j.dump() + "\n";
}

AnyModel model_from_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        corrupt(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        require(j.is_object() && j.contains("format_version"), "missing format_version");
        const json& version = j.at("format_version");
        if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
            throw ModelError(ModelErrorKind::VersionMismatch,
                             "unsupported model format_version " + version.dump() + " (expected " +
                                 std::to_string(kModelFormatVersion) + ")");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "svm") return read_svm(j);
        if (kind == "rf") return read_forest(j);
        corrupt("unknown model kind '" + kind + "'");
    } catch (const json::exception& e) {
        corrupt(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError(ModelErrorKind::Io, "cannot write " + path.string());
    out << to_model_text(model);
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError(ModelErrorKind::Io, "cannot write " + path.string());
    out << to_model_text(model);
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError(ModelErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_text(buf.str());
}

std::string predict_label(const AnyModel& model, std::string_view query) {
    return std::visit([&](const auto& m) { return m.predict_query(query); }, model);
}

} // namespace geocmd
