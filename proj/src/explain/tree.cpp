#include "cais/explain.hpp"

#include <algorithm>
#include <functional>

#include "cais/error.hpp"

namespace cais::explain {

using model::FeatureKind;

std::size_t LabeledDataset::count_non_compliant() const {
  return static_cast<std::size_t>(std::count(non_compliant.begin(), non_compliant.end(), true));
}

void LabeledDataset::add(const FeatureAssignment& a, bool nc) {
  std::vector<double> row;
  row.reserve(columns.size());
  for (const auto& c : columns) {
    const auto it = a.find(c.name);
    if (it == a.end()) throw DomainError("row misses feature " + c.name);
    check_in_domain(c, it->second);
    row.push_back(numeric_value(c, it->second));
  }
  rows.push_back(std::move(row));
  non_compliant.push_back(nc);
}

LabeledDataset build_dataset(const falsify::Archive& archive, const falsify::FeatureSpace& space) {
  if (archive.empty()) throw DomainError("empty archive");
  LabeledDataset d;
  d.columns = space.dims();
  for (const auto& p : archive.points) d.add(p.assignment, p.verdict.label == sim::Label::kNonCompliance);
  return d;
}

bool SplitTest::goes_left(const std::vector<double>& row) const {
  const double v = row[feature];
  return categorical ? v == static_cast<double>(category) : v <= threshold;
}

double gini(std::size_t non_compliant, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(non_compliant) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

namespace {

double split_gain(std::size_t nc, std::size_t n, std::size_t nc_left, std::size_t n_left) {
  const std::size_t n_right = n - n_left;
  const std::size_t nc_right = nc - nc_left;
  const double weighted = (static_cast<double>(n_left) * gini(nc_left, n_left) +
                           static_cast<double>(n_right) * gini(nc_right, n_right)) /
                          static_cast<double>(n);
  return gini(nc, n) - weighted;
}

}  // namespace

std::optional<Split> best_split(const LabeledDataset& data, const std::vector<std::size_t>& rows,
                                std::size_t column, std::size_t min_leaf) {
  const std::size_t n = rows.size();
  std::size_t nc = 0;
  for (auto r : rows) nc += data.non_compliant[r] ? 1 : 0;
  if (n < 2 || nc == 0 || nc == n) return std::nullopt;
  min_leaf = std::max<std::size_t>(min_leaf, 1);

  std::optional<Split> best;
  auto consider = [&](const SplitTest& t, std::size_t nc_left, std::size_t n_left) {
    if (n_left < min_leaf || n - n_left < min_leaf) return;
    const double g = split_gain(nc, n, nc_left, n_left);
    if (!best || g > best->gain + kGainTolerance) best = Split{t, g};
  };

  const auto& col = data.columns[column];
  if (col.kind == FeatureKind::kCategorical) {
    for (std::size_t k = 0; k < col.categories.size(); ++k) {
      std::size_t n_left = 0, nc_left = 0;
      for (auto r : rows) {
        if (data.rows[r][column] == static_cast<double>(k)) {
          ++n_left;
          nc_left += data.non_compliant[r] ? 1 : 0;
        }
      }
      if (n_left == 0 || n_left == n) continue;
      consider({column, true, 0.0, k}, nc_left, n_left);
    }
    return best;
  }

  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(n);
  for (auto r : rows) sorted.emplace_back(data.rows[r][column], data.non_compliant[r]);
  std::sort(sorted.begin(), sorted.end());
  std::size_t nc_left = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    nc_left += sorted[i].second ? 1 : 0;
    const double a = sorted[i].first;
    const double b = sorted[i + 1].first;
    if (a == b) continue;
    double mid = a + (b - a) / 2.0;
    if (!(mid < b)) mid = a;
    consider({column, false, mid, 0}, nc_left, i + 1);
  }
  return best;
}

std::optional<Split> best_split_any(const LabeledDataset& data, const std::vector<std::size_t>& rows,
                                    std::size_t min_leaf) {
  std::optional<Split> best;
  for (std::size_t c = 0; c < data.columns.size(); ++c) {
    const auto s = best_split(data, rows, c, min_leaf);
    if (s && (!best || s->gain > best->gain + kGainTolerance)) best = s;
  }
  return best;
}

double Node::likelihood() const {
  const std::size_t n = samples();
  return n ? static_cast<double>(non_compliant) / static_cast<double>(n) : 0.0;
}

std::size_t DecisionTree::leaf_of(const std::vector<double>& row) const {
  std::size_t i = 0;
  while (!nodes[i].leaf) i = static_cast<std::size_t>(nodes[i].test.goes_left(row) ? nodes[i].left : nodes[i].right);
  return i;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, static_cast<std::size_t>(n.depth));
  return d;
}

DecisionTree induce_tree(const LabeledDataset& data, const TreeParams& params) {
  if (data.size() == 0) throw DomainError("empty dataset");
  DecisionTree tree;
  tree.columns = data.columns;
  const auto min_leaf = static_cast<std::size_t>(std::max(params.min_leaf, 1));

  std::function<int(const std::vector<std::size_t>&, int)> grow = [&](const std::vector<std::size_t>& rows, int depth) {
    Node node;
    node.depth = depth;
    for (auto r : rows) (data.non_compliant[r] ? node.non_compliant : node.compliant) += 1;
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    if (depth >= params.max_depth || rows.size() < 2 * min_leaf) return id;
    if (node.compliant == 0 || node.non_compliant == 0) return id;
    const auto s = best_split_any(data, rows, min_leaf);
    if (!s || s->gain < params.min_gain) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (s->test.goes_left(data.rows[r]) ? left : right).push_back(r);
    tree.nodes[id].leaf = false;
    tree.nodes[id].test = s->test;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  };

  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  grow(all, 0);
  return tree;
}

double predict(const DecisionTree& tree, const FeatureAssignment& a) {
  std::vector<double> row;
  for (const auto& c : tree.columns) {
    const auto it = a.find(c.name);
    if (it == a.end()) throw DomainError("assignment misses feature " + c.name);
    check_in_domain(c, it->second);
    row.push_back(numeric_value(c, it->second));
  }
  return tree.nodes[tree.leaf_of(row)].likelihood();
}

model::Likelihood estimate_event_likelihood(const LabeledDataset& data) {
  if (data.size() == 0) throw DomainError("empty dataset");
  return {static_cast<double>(data.count_non_compliant()) / static_cast<double>(data.size()),
          static_cast<std::int64_t>(data.size())};
}

}  // namespace cais::explain
