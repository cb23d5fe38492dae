#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qgen {

struct RelevanceLabel {
  std::string name;
  int rank = 0;  // higher = more relevant

  bool operator==(const RelevanceLabel& other) const {
    return name == other.name && rank == other.rank;
  }
};

// Ordered label vocabulary, strictly descending by rank.
class LabelSet {
 public:
  LabelSet() = default;
  // Validates: size >= 2, distinct names, strictly descending distinct ranks.
  explicit LabelSet(std::vector<RelevanceLabel> labels);

  const std::vector<RelevanceLabel>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  const RelevanceLabel& top() const { return labels_.front(); }
  const RelevanceLabel& bottom() const { return labels_.back(); }

  std::optional<RelevanceLabel> find(const std::string& name) const;
  // case-insensitive lookup
  std::optional<RelevanceLabel> find_ci(const std::string& name) const;

  bool is_binary() const { return labels_.size() == 2; }

  static LabelSet binary();  // relevant / irrelevant
  static LabelSet shopping();  // Exact / Substitute / Complement / Irrelevant

 private:
  std::vector<RelevanceLabel> labels_;
};

}  // namespace qgen
