#include <algorithm>

#include "doctest.h"

#include "cais/error.hpp"
#include "cais/explain.hpp"
#include "cais/rng.hpp"

using namespace cais;
using namespace cais::explain;

namespace {

model::DomainFeature continuous(const std::string& name, double lo, double hi) {
  model::DomainFeature f;
  f.name = name;
  f.lo = lo;
  f.hi = hi;
  return f;
}

LabeledDataset one_column(const std::vector<double>& xs, const std::vector<bool>& nc) {
  LabeledDataset d;
  d.columns = {continuous("x", 0.0, 10.0)};
  for (std::size_t i = 0; i < xs.size(); ++i) d.add({{"x", xs[i]}}, nc[i]);
  return d;
}

std::vector<std::size_t> all_rows(const LabeledDataset& d) {
  std::vector<std::size_t> r(d.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
  return r;
}

/// 500 uniform illuminance samples over [50, 10000], non-compliant below 100.
LabeledDataset dark_dataset(std::vector<double>* xs = nullptr) {
  LabeledDataset d;
  d.columns = {continuous("illuminance", 50.0, 10000.0)};
  Rng rng(123);
  for (int i = 0; i < 500; ++i) {
    const double e = rng.uniform(50.0, 10000.0);
    d.add({{"illuminance", e}}, e < 100.0);
    if (xs) xs->push_back(e);
  }
  return d;
}

}  // namespace

TEST_CASE("gini") {
  CHECK(gini(0, 10) == 0.0);
  CHECK(gini(10, 10) == 0.0);
  CHECK(gini(5, 10) == 0.5);
  CHECK(gini(1, 4) == doctest::Approx(0.375));
}

TEST_CASE("best split on one column") {
  SUBCASE("midpoint between the classes") {
    const auto d = one_column({1, 2, 3, 4}, {true, true, false, false});
    const auto s = best_split(d, all_rows(d), 0);
    REQUIRE(s);
    CHECK(s->test.threshold == 2.5);
    CHECK(s->gain == doctest::Approx(0.5));
  }
  SUBCASE("pure rows") {
    const auto d = one_column({1, 2, 3}, {false, false, false});
    CHECK_FALSE(best_split(d, all_rows(d), 0));
  }
  SUBCASE("identical values cannot be separated") {
    const auto d = one_column({2, 2}, {true, false});
    CHECK_FALSE(best_split(d, all_rows(d), 0));
  }
  SUBCASE("equal gains go to the lower threshold") {
    const auto d = one_column({1, 2, 3, 4}, {true, false, false, true});
    const auto s = best_split(d, all_rows(d), 0);
    REQUIRE(s);
    CHECK(s->test.threshold == 1.5);
  }
  SUBCASE("min_leaf removes candidates") {
    const auto d = one_column({1, 2, 3, 4, 5, 6}, {true, false, false, false, false, false});
    CHECK(best_split(d, all_rows(d), 0, 1)->test.threshold == 1.5);
    CHECK(best_split(d, all_rows(d), 0, 2)->test.threshold == 2.5);
  }
}

TEST_CASE("categorical one-vs-rest split and column ties") {
  LabeledDataset d;
  model::DomainFeature c;
  c.name = "mode";
  c.kind = model::FeatureKind::kCategorical;
  c.categories = {"a", "b", "c"};
  d.columns = {c, continuous("x", 0.0, 10.0)};
  d.add({{"mode", std::string("a")}, {"x", 1.0}}, false);
  d.add({{"mode", std::string("b")}, {"x", 2.0}}, true);
  d.add({{"mode", std::string("c")}, {"x", 3.0}}, false);
  const auto s = best_split_any(d, all_rows(d));
  REQUIRE(s);
  CHECK(s->test.feature == 0);
  CHECK(s->test.categorical);
  CHECK(s->test.category == 1);
  CHECK_THROWS_AS(d.add({{"mode", std::string("z")}, {"x", 1.0}}, true), DomainError);
  CHECK_THROWS_AS(d.add({{"mode", std::string("a")}}, true), DomainError);
}

TEST_CASE("tree induction") {
  SUBCASE("pure dataset is a single leaf") {
    const auto t = induce_tree(one_column({1, 2, 3, 4, 5, 6}, std::vector<bool>(6, false)));
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].likelihood() == 0.0);
  }
  SUBCASE("fewer rows than two leaves") {
    const auto t = induce_tree(one_column({1, 2, 3, 4}, {true, true, false, false}));
    CHECK(t.nodes.size() == 1);
  }
  SUBCASE("dark illuminance threshold") {
    std::vector<double> xs;
    const auto d = dark_dataset(&xs);
    // Only a handful of samples fall below 100 lux, so leaves may be tiny.
    const auto t = induce_tree(d, {6, 1, 1e-6});
    CHECK(t.depth() == 1);
    REQUIRE_FALSE(t.nodes[0].leaf);
    double below = 0.0, above = 1e9;
    for (double x : xs) {
      if (x < 100.0) below = std::max(below, x);
      if (x >= 100.0) above = std::min(above, x);
    }
    CHECK(t.nodes[0].test.threshold > below);
    CHECK(t.nodes[0].test.threshold < above);

    CHECK(predict(t, {{"illuminance", 80.0}}) == 1.0);
    CHECK(predict(t, {{"illuminance", 5000.0}}) == 0.0);
    CHECK_THROWS_AS(predict(t, {}), DomainError);

    const auto rules = extract_rules(t, 0.5);
    REQUIRE(rules.size() == 1);
    const auto* c = rules[0].find("illuminance");
    REQUIRE(c);
    CHECK(c->lo == 50.0);
    CHECK(c->hi == t.nodes[0].test.threshold);
    CHECK(rules[0].likelihood == 1.0);
    CHECK(rules[0].to_string().rfind("rule #1: illuminance in [50, ", 0) == 0);
  }
  SUBCASE("partition law") {
    Rng rng(8);
    LabeledDataset d;
    d.columns = {continuous("a", 0.0, 1.0), continuous("b", 0.0, 1.0)};
    for (int i = 0; i < 300; ++i) {
      const double a = rng.uniform(), b = rng.uniform();
      d.add({{"a", a}, {"b", b}}, (a < 0.3 && b > 0.6) || rng.uniform() < 0.05);
    }
    const auto t = induce_tree(d);
    std::size_t total = 0;
    std::vector<std::size_t> nc(t.nodes.size()), n(t.nodes.size());
    for (std::size_t r = 0; r < d.size(); ++r) {
      const auto leaf = t.leaf_of(d.rows[r]);
      ++n[leaf];
      nc[leaf] += d.non_compliant[r] ? 1 : 0;
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      if (!t.nodes[i].leaf) continue;
      total += t.nodes[i].samples();
      CHECK(n[i] == t.nodes[i].samples());
      CHECK(nc[i] == t.nodes[i].non_compliant);
    }
    CHECK(total == d.size());
    CHECK(t.depth() <= 6);
  }
}

TEST_CASE("rules intersect the tests along their path") {
  DecisionTree t;
  t.columns = {continuous("illuminance", 10.0, 10000.0)};
  Node root;
  root.leaf = false;
  root.test = {0, false, 5000.0, 0};
  root.left = 1;
  root.right = 4;
  Node mid;
  mid.leaf = false;
  mid.depth = 1;
  mid.test = {0, false, 300.0, 0};
  mid.left = 2;
  mid.right = 3;
  Node dark;
  dark.depth = 2;
  dark.non_compliant = 9;
  dark.compliant = 1;
  Node dim;
  dim.depth = 2;
  dim.non_compliant = 3;
  dim.compliant = 7;
  Node bright;
  bright.depth = 1;
  bright.compliant = 20;
  t.nodes = {root, mid, dark, dim, bright};

  const auto rules = extract_rules(t, 0.2);
  REQUIRE(rules.size() == 2);
  REQUIRE(rules[0].constraints.size() == 1);
  CHECK(rules[0].constraints[0].to_string() == "illuminance in [10, 300]");
  CHECK(rules[0].likelihood == doctest::Approx(0.9));
  CHECK(rules[1].constraints[0].to_string() == "illuminance in (300, 5000]");
  CHECK_FALSE(rules[1].satisfied_by({{"illuminance", 300.0}}));
  CHECK(rules[1].satisfied_by({{"illuminance", 300.5}}));
  CHECK(rules[0].to_string() == "rule #1: illuminance in [10, 300] → non-compliance, likelihood 0.900, support 10");
  CHECK(extract_rules(t, 0.5).size() == 1);
  CHECK(extract_rules(t, 1.0).empty());
  CHECK_THROWS_AS(extract_rules(t, 1.5), DomainError);

  DecisionTree single;
  single.columns = t.columns;
  single.nodes = {bright};
  CHECK(extract_rules(single, 0.01).empty());
  Node mixed;
  mixed.non_compliant = 12;
  mixed.compliant = 88;
  single.nodes = {mixed};
  CHECK(predict(single, {{"illuminance", 42.0}}) == doctest::Approx(0.12));
}

TEST_CASE("rules agree with the tree and with a rising threshold") {
  Rng rng(21);
  LabeledDataset d;
  model::DomainFeature k;
  k.name = "k";
  k.kind = model::FeatureKind::kInteger;
  k.lo = 0;
  k.hi = 9;
  model::DomainFeature c;
  c.name = "c";
  c.kind = model::FeatureKind::kCategorical;
  c.categories = {"r", "g", "b"};
  d.columns = {continuous("x", 0.0, 1.0), k, c};
  auto draw = [&] {
    return FeatureAssignment{{"x", rng.uniform()},
                             {"k", static_cast<std::int64_t>(rng.below(10))},
                             {"c", c.categories[rng.below(3)]}};
  };
  for (int i = 0; i < 400; ++i) {
    const auto a = draw();
    const bool nc = (std::get<double>(a.at("x")) > 0.6 && std::get<std::int64_t>(a.at("k")) <= 4) ||
                    (std::get<std::string>(a.at("c")) == "g" && rng.uniform() < 0.5);
    d.add(a, nc);
  }
  const auto t = induce_tree(d);
  const falsify::FeatureSpace space(d.columns);
  std::size_t last = 1000;
  for (double theta : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto rules = extract_rules(t, theta);
    CHECK(rules.size() <= last);
    last = rules.size();
    for (std::size_t i = 1; i < rules.size(); ++i) CHECK(rules[i - 1].likelihood >= rules[i].likelihood);
    for (int s = 0; s < 1000; ++s) {
      const auto a = draw();
      const bool covered = std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return r.satisfied_by(a); });
      CHECK(covered == (predict(t, a) >= theta));
    }
    for (const auto& r : rules) {
      const auto set = generate_counterexamples(r, space, 25, 3);
      CHECK(set.rule_id == r.id);
      REQUIRE(set.assignments.size() == 25);
      for (const auto& a : set.assignments) {
        CHECK(r.satisfied_by(a));
        for (const auto& f : d.columns) CHECK(in_domain(f, a.at(f.name)));
      }
      CHECK(generate_counterexamples(r, space, 25, 3).assignments == set.assignments);
    }
  }
}

TEST_CASE("counterexample regions") {
  const falsify::FeatureSpace space({continuous("illuminance", 10.0, 10000.0), continuous("speed", 0.1, 0.5)});
  Rule r;
  r.id = 2;
  Constraint c;
  c.feature = "illuminance";
  c.lo = 50.0;
  c.hi = 100.0;
  r.constraints = {c};
  const auto set = generate_counterexamples(r, space, 10, 1);
  REQUIRE(set.assignments.size() == 10);
  for (const auto& a : set.assignments) {
    const double e = std::get<double>(a.at("illuminance"));
    CHECK(e >= 50.0);
    CHECK(e <= 100.0);
    CHECK(std::get<double>(a.at("speed")) >= 0.1);
  }
  CHECK(generate_counterexamples(r, space, 0, 1).assignments.empty());
  r.constraints[0].lo = 20000.0;
  r.constraints[0].hi = 30000.0;
  CHECK_THROWS_WITH_AS(generate_counterexamples(r, space, 5, 1), "empty region for rule #2 on feature illuminance",
                       DomainError);
}

TEST_CASE("event likelihood estimate") {
  std::vector<bool> nc(200, false);
  std::fill(nc.begin(), nc.begin() + 23, true);
  std::vector<double> xs(200, 1.0);
  const auto l = estimate_event_likelihood(one_column(xs, nc));
  CHECK(l.fraction == doctest::Approx(0.115));
  CHECK(l.samples == 200);
  CHECK(estimate_event_likelihood(one_column({1, 2}, {false, false})).fraction == 0.0);
  CHECK(estimate_event_likelihood(one_column({1, 2}, {true, true})).fraction == 1.0);
  CHECK_THROWS_AS(estimate_event_likelihood(LabeledDataset{}), DomainError);
}

TEST_CASE("datasets from archives") {
  const falsify::FeatureSpace space({continuous("x", 0.0, 1.0)});
  falsify::Archive a;
  CHECK_THROWS_WITH_AS(build_dataset(a, space), "empty archive", DomainError);
  falsify::EvaluatedPoint p;
  p.assignment = {{"x", 0.4}};
  p.robustness = 0.2;
  a.add(p);
  const auto d = build_dataset(a, space);
  CHECK(d.size() == 1);
  CHECK(d.count_non_compliant() == 0);
}

TEST_CASE("tree JSON nests tests and counts") {
  const auto t = induce_tree(dark_dataset(), {6, 1, 1e-6});
  const auto j = to_json(t);
  CHECK(j.at("depth") == 1);
  CHECK(j.at("root").at("feature") == "illuminance");
  CHECK(j.at("root").at("test").at("op") == "<=");
  CHECK(j.at("root").at("samples") == 500);
  CHECK(j.at("root").at("left").at("likelihood") == 1.0);
}
