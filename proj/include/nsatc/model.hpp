#pragma once

// Uniform handling of the four learners: prediction, split-frequency
// importance and the versioned text persistence format.
//
//   nsatc-model 1.0
//   kind gbdt
//   schema_fingerprint 5a0c...
//   n_features 710
//   init_log_odds -0.1823215567939546
//   learning_rate 0.1
//   trees 100
//   tree
//   split 12 153.5          <- preorder: node, left subtree, right subtree
//   leaf -0.75
//   ...
//   end
//
// Every real number is written as the shortest decimal that reads back to the
// same double, so a reloaded model predicts bit-identically.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nsatc/forest.hpp"
#include "nsatc/gbdt.hpp"
#include "nsatc/logistic.hpp"

namespace nsatc {

using Classifier = std::variant<BoostedModel, ForestModel, CartModel, LogisticModel>;

inline constexpr int kModelFormatMajor = 1;
inline constexpr int kModelFormatMinor = 0;

enum class ModelKind { Gbdt, Forest, Cart, Logistic };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Hyperparameters of every learner; only the block matching `kind` is used.
struct LearnerConfig {
  ModelKind kind = ModelKind::Gbdt;
  GbdtParams gbdt;
  ForestParams forest;
  CartParams cart;
  LogisticParams logistic;

  /// "key=value" pairs of the active learner, space separated.
  std::string describe() const;
};

Classifier train_classifier(const LearnerConfig& config, const Matrix& x,
                            std::span<const std::uint8_t> y, std::uint64_t schema_fingerprint);

std::string_view kind_name(const Classifier& model);
std::size_t feature_count(const Classifier& model);
std::uint64_t schema_fingerprint(const Classifier& model);
void set_schema_fingerprint(Classifier& model, std::uint64_t fingerprint);

double predict_proba(const Classifier& model, std::span<const double> v);
/// 1 iff the probability (logistic: log-odds) is strictly above the midpoint.
int predict(const Classifier& model, std::span<const double> v);

/// Internal-node count per feature over every tree. Throws UnsupportedModel
/// for the logistic baseline.
std::vector<std::uint64_t> feature_importance(const Classifier& model);

std::size_t tree_count(const Classifier& model);
std::size_t leaf_count(const Classifier& model);

void write_model(const Classifier& model, std::ostream& out);
Classifier read_model(std::istream& in);
void save_model(const Classifier& model, const std::string& path);
Classifier load_model(const std::string& path);

}  // namespace nsatc
