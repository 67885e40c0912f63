#include "nsatc/model.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nsatc/error.hpp"
#include "nsatc/text.hpp"

namespace nsatc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void count_splits(const TreeModel& t, std::vector<std::uint64_t>& counts) {
  for (const auto& n : t.nodes)
    if (!n.is_leaf()) counts[static_cast<std::size_t>(n.feature)] += 1;
}

void write_tree(const TreeModel& t, std::ostream& out) {
  out << "tree " << t.nodes.size() << '\n';
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const TreeNode& n = t.nodes[stack.back()];
    stack.pop_back();
    if (n.is_leaf()) {
      out << "leaf " << text::format_double(n.value) << '\n';
    } else {
      out << "split " << n.feature << ' ' << text::format_double(n.threshold) << '\n';
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> tokens;
      std::istringstream ss(line);
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      return tokens;
    }
    error("unexpected end of model file");
  }

  std::vector<std::string> expect(std::string_view key, std::size_t n_values) {
    auto t = next();
    if (t.empty() || t[0] != key || t.size() != n_values + 1)
      error("expected '" + std::string(key) + "' with " + std::to_string(n_values) + " value(s)");
    return t;
  }

  double real(std::string_view key) {
    auto t = expect(key, 1);
    return to_double(t[1]);
  }

  std::uint64_t integer(std::string_view key) {
    auto t = expect(key, 1);
    return to_uint(t[1]);
  }

  double to_double(const std::string& s) {
    auto v = text::parse_double(s);
    if (!v) error("malformed number '" + s + "'");
    return *v;
  }

  std::uint64_t to_uint(const std::string& s, int base = 10) {
    auto v = text::parse_int<std::uint64_t>(s, base);
    if (!v) error("malformed integer '" + s + "'");
    return *v;
  }

  TreeModel tree(std::size_t n_features) {
    auto header = expect("tree", 1);
    auto count = to_uint(header[1]);
    TreeModel t;
    t.nodes.reserve(count);
    read_node(t, n_features);
    if (t.nodes.size() != count) error("tree node count does not match its header");
    return t;
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Format, "model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::int32_t read_node(TreeModel& t, std::size_t n_features) {
    auto tok = next();
    auto id = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    if (tok.size() == 2 && tok[0] == "leaf") {
      t.nodes[id].value = to_double(tok[1]);
      return id;
    }
    if (tok.size() != 3 || tok[0] != "split") error("expected 'leaf' or 'split'");
    auto feature = to_uint(tok[1]);
    if (feature >= n_features) error("split feature beyond n_features");
    t.nodes[id].feature = static_cast<std::int32_t>(feature);
    t.nodes[id].threshold = to_double(tok[2]);
    auto l = read_node(t, n_features);
    auto r = read_node(t, n_features);
    t.nodes[id].left = l;
    t.nodes[id].right = r;
    return id;
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gbdt: return "gbdt";
    case ModelKind::Forest: return "rf";
    case ModelKind::Cart: return "cart";
    case ModelKind::Logistic: return "logistic";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::Gbdt, ModelKind::Forest, ModelKind::Cart, ModelKind::Logistic})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string LearnerConfig::describe() const {
  using text::format_double;
  std::ostringstream s;
  switch (kind) {
    case ModelKind::Gbdt:
      s << "trees=" << gbdt.trees << " learning_rate=" << format_double(gbdt.learning_rate)
        << " max_leaves=" << gbdt.max_leaves << " max_depth=" << gbdt.max_depth
        << " min_leaf=" << gbdt.min_leaf << " bins=" << gbdt.bins;
      break;
    case ModelKind::Forest:
      s << "trees=" << forest.trees << " seed=" << forest.seed
        << " feature_subsample=" << format_double(forest.feature_subsample)
        << " max_depth=" << forest.tree.max_depth << " min_leaf=" << forest.tree.min_leaf
        << " bins=" << forest.tree.bins;
      break;
    case ModelKind::Cart:
      s << "max_depth=" << cart.max_depth << " min_leaf=" << cart.min_leaf << " bins=" << cart.bins;
      break;
    case ModelKind::Logistic:
      s << "epochs=" << logistic.epochs << " step=" << format_double(logistic.step);
      break;
  }
  return s.str();
}

Classifier train_classifier(const LearnerConfig& config, const Matrix& x,
                            std::span<const std::uint8_t> y, std::uint64_t schema_fingerprint) {
  require(x.rows > 0 && x.rows == y.size(), ErrorKind::DegenerateClass,
          "training needs a non-empty sample matrix with one label per row");
  std::size_t pos = 0;
  for (auto l : y) pos += l ? 1 : 0;
  if (pos == 0 || pos == y.size())
    fail(ErrorKind::DegenerateClass, "training samples contain a single class (" +
                                         std::to_string(pos) + " of " + std::to_string(y.size()) +
                                         " positive)");
  Classifier model;
  switch (config.kind) {
    case ModelKind::Gbdt: model = gbdt_train(x, y, config.gbdt); break;
    case ModelKind::Forest: model = rf_train(x, y, config.forest); break;
    case ModelKind::Cart: model = cart_train(x, y, config.cart); break;
    case ModelKind::Logistic: model = logistic_baseline_train(x, y, config.logistic); break;
  }
  set_schema_fingerprint(model, schema_fingerprint);
  return model;
}

std::string_view kind_name(const Classifier& model) {
  return std::visit(overloaded{[](const BoostedModel&) { return std::string_view("gbdt"); },
                               [](const ForestModel&) { return std::string_view("rf"); },
                               [](const CartModel&) { return std::string_view("cart"); },
                               [](const LogisticModel&) { return std::string_view("logistic"); }},
                    model);
}

std::size_t feature_count(const Classifier& model) {
  return std::visit([](const auto& m) { return m.n_features; }, model);
}

std::uint64_t schema_fingerprint(const Classifier& model) {
  return std::visit([](const auto& m) { return m.schema_fingerprint; }, model);
}

void set_schema_fingerprint(Classifier& model, std::uint64_t fingerprint) {
  std::visit([&](auto& m) { m.schema_fingerprint = fingerprint; }, model);
}

double predict_proba(const Classifier& model, std::span<const double> v) {
  return std::visit([&](const auto& m) { return m.predict_proba(v); }, model);
}

int predict(const Classifier& model, std::span<const double> v) {
  if (const auto* lr = std::get_if<LogisticModel>(&model)) return lr->predict(v);
  return predict_proba(model, v) > 0.5 ? 1 : 0;
}

std::vector<std::uint64_t> feature_importance(const Classifier& model) {
  std::vector<std::uint64_t> counts(feature_count(model), 0);
  std::visit(overloaded{[&](const BoostedModel& m) {
                          for (const auto& t : m.trees) count_splits(t, counts);
                        },
                        [&](const ForestModel& m) {
                          for (const auto& t : m.trees) count_splits(t, counts);
                        },
                        [&](const CartModel& m) { count_splits(m.tree, counts); },
                        [&](const LogisticModel&) {
                          fail(ErrorKind::UnsupportedModel,
                               "split-frequency importance needs a tree-based model");
                        }},
             model);
  return counts;
}

std::size_t tree_count(const Classifier& model) {
  return std::visit(overloaded{[](const BoostedModel& m) { return m.trees.size(); },
                               [](const ForestModel& m) { return m.trees.size(); },
                               [](const CartModel&) { return std::size_t{1}; },
                               [](const LogisticModel&) { return std::size_t{0}; }},
                    model);
}

std::size_t leaf_count(const Classifier& model) {
  std::size_t total = 0;
  std::visit(overloaded{[&](const BoostedModel& m) {
                          for (const auto& t : m.trees) total += t.leaf_count();
                        },
                        [&](const ForestModel& m) {
                          for (const auto& t : m.trees) total += t.leaf_count();
                        },
                        [&](const CartModel& m) { total = m.tree.leaf_count(); },
                        [](const LogisticModel&) {}},
             model);
  return total;
}

void write_model(const Classifier& model, std::ostream& out) {
  out << "nsatc-model " << kModelFormatMajor << '.' << kModelFormatMinor << '\n';
  out << "kind " << kind_name(model) << '\n';
  out << "schema_fingerprint " << text::hex64(schema_fingerprint(model)) << '\n';
  out << "n_features " << feature_count(model) << '\n';
  std::visit(overloaded{[&](const BoostedModel& m) {
                          out << "init_log_odds " << text::format_double(m.init_log_odds) << '\n';
                          out << "learning_rate " << text::format_double(m.learning_rate) << '\n';
                          out << "trees " << m.trees.size() << '\n';
                          for (const auto& t : m.trees) write_tree(t, out);
                        },
                        [&](const ForestModel& m) {
                          out << "bootstrap_seed " << m.bootstrap_seed << '\n';
                          out << "feature_subsample " << text::format_double(m.feature_subsample)
                              << '\n';
                          out << "trees " << m.trees.size() << '\n';
                          for (const auto& t : m.trees) write_tree(t, out);
                        },
                        [&](const CartModel& m) { write_tree(m.tree, out); },
                        [&](const LogisticModel& m) {
                          out << "bias " << text::format_double(m.bias) << '\n';
                          out << "weights " << m.weights.size() << '\n';
                          for (std::size_t j = 0; j < m.weights.size(); ++j)
                            out << "w " << text::format_double(m.weights[j]) << ' '
                                << text::format_double(m.mean[j]) << ' '
                                << text::format_double(m.scale[j]) << '\n';
                        }},
             model);
  out << "end\n";
}

Classifier read_model(std::istream& in) {
  ModelReader r(in);
  auto header = r.next();
  if (header.size() != 2 || header[0] != "nsatc-model") r.error("not an nsatc model file");
  auto version = text::split(header[1], '.');
  auto major = version.size() == 2 ? text::parse_int<int>(version[0]) : std::nullopt;
  if (!major) r.error("malformed format version '" + header[1] + "'");
  if (*major > kModelFormatMajor)
    r.error("format version " + header[1] + " is newer than this reader (" +
            std::to_string(kModelFormatMajor) + ".x)");

  std::string kind = r.expect("kind", 1)[1];
  std::uint64_t fingerprint = r.to_uint(r.expect("schema_fingerprint", 1)[1], 16);
  std::size_t n_features = r.integer("n_features");

  Classifier model;
  if (kind == "gbdt") {
    BoostedModel m;
    m.init_log_odds = r.real("init_log_odds");
    m.learning_rate = r.real("learning_rate");
    auto n = r.integer("trees");
    for (std::uint64_t t = 0; t < n; ++t) m.trees.push_back(r.tree(n_features));
    m.n_features = n_features;
    model = std::move(m);
  } else if (kind == "rf") {
    ForestModel m;
    m.bootstrap_seed = r.integer("bootstrap_seed");
    m.feature_subsample = r.real("feature_subsample");
    auto n = r.integer("trees");
    if (n == 0) r.error("a forest needs at least one tree");
    for (std::uint64_t t = 0; t < n; ++t) m.trees.push_back(r.tree(n_features));
    m.n_features = n_features;
    model = std::move(m);
  } else if (kind == "cart") {
    CartModel m;
    m.tree = r.tree(n_features);
    m.n_features = n_features;
    model = std::move(m);
  } else if (kind == "logistic") {
    LogisticModel m;
    m.bias = r.real("bias");
    auto n = r.integer("weights");
    if (n != n_features) r.error("weight count does not match n_features");
    for (std::uint64_t j = 0; j < n; ++j) {
      auto t = r.expect("w", 3);
      m.weights.push_back(r.to_double(t[1]));
      m.mean.push_back(r.to_double(t[2]));
      m.scale.push_back(r.to_double(t[3]));
    }
    m.n_features = n_features;
    model = std::move(m);
  } else {
    r.error("unknown model kind '" + kind + "'");
  }
  set_schema_fingerprint(model, fingerprint);
  r.expect("end", 0);
  return model;
}

void save_model(const Classifier& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_model(model, out);
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

Classifier load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  try {
    return read_model(in);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) fail(ErrorKind::Format, path + ": " + e.what());
    throw;
  }
}

}  // namespace nsatc
