#include "cais/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "cais/error.hpp"
#include "cais/rng.hpp"

namespace cais::falsify {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kRandom: return "random";
    case Algorithm::kHillClimb: return "hill_climb";
    case Algorithm::kSimulatedAnnealing: return "simulated_annealing";
    case Algorithm::kGenetic: return "genetic";
  }
  return "random";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kRandom, Algorithm::kHillClimb, Algorithm::kSimulatedAnnealing, Algorithm::kGenetic}) {
    if (to_string(a) == name) return a;
  }
  throw DomainError("unknown search algorithm " + std::string(name));
}

void check_config(const SearchConfig& c) {
  if (c.budget < 1) throw DomainError("budget must be >= 1");
  if (!(c.sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (!(c.t0 > 0.0)) throw DomainError("t0 must be > 0");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
  if (c.population < 2) throw DomainError("population must be >= 2");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) throw DomainError("crossover rate must be in [0, 1]");
  if (c.tournament < 1) throw DomainError("tournament size must be >= 1");
  if (c.restart_after < 1) throw DomainError("restart_after must be >= 1");
  if (c.threads < 1) throw DomainError("threads must be >= 1");
}

void Archive::add(EvaluatedPoint p) {
  p.index = points.size();
  if (p.robustness < 0.0) violations.push_back(p.index);
  if (points.empty() || p.robustness < points[best].robustness) best = p.index;
  points.push_back(std::move(p));
}

std::size_t Archive::first_violation() const { return violations.empty() ? points.size() : violations.front(); }

namespace {

using Point = std::vector<double>;

class Runner {
 public:
  Runner(const FeatureSpace& space, const Evaluator& evaluate, const SearchConfig& c)
      : space_(space), evaluate_(evaluate), c_(c), propose_(derive_seed(c.seed, 1)), accept_(derive_seed(c.seed, 2)) {}

  Archive run() {
    switch (c_.algorithm) {
      case Algorithm::kRandom: random(); break;
      case Algorithm::kHillClimb: local(false); break;
      case Algorithm::kSimulatedAnnealing: local(true); break;
      case Algorithm::kGenetic: genetic(); break;
    }
    return std::move(archive_);
  }

 private:
  bool done() const {
    if (archive_.points.size() >= static_cast<std::size_t>(c_.budget)) return true;
    return c_.stop_at_first_violation && !archive_.violations.empty();
  }

  std::size_t remaining() const { return static_cast<std::size_t>(c_.budget) - archive_.points.size(); }

  Point uniform_point() {
    Point x(space_.size());
    for (auto& v : x) v = propose_.uniform();
    return x;
  }

  Point mutate_all(const Point& x) {
    Point y = x;
    for (auto& v : y) v = std::clamp(v + c_.sigma * propose_.normal(), 0.0, 1.0);
    return y;
  }

  void record(const FeatureAssignment& a, Evaluation e) {
    archive_.add({0, a, e.robustness, std::move(e.verdict), e.seed});
  }

  double eval(const Point& x) {
    const FeatureAssignment a = space_.decode(x);
    Evaluation e = evaluate_(a);
    const double r = e.robustness;
    record(a, std::move(e));
    return r;
  }

  void random() {
    while (!done()) eval(uniform_point());
  }

  // Hill climbing, or annealing when `anneal` is set; both restart from a
  // uniform point after restart_after consecutive rejections.
  void local(bool anneal) {
    Point x = uniform_point();
    double rx = eval(x);
    double temp = c_.t0;
    int rejections = 0;
    while (!done()) {
      if (rejections >= c_.restart_after) {
        x = uniform_point();
        rx = eval(x);
        rejections = 0;
        continue;
      }
      Point y = mutate_all(x);
      const double ry = eval(y);
      bool take = ry < rx;
      if (!take && anneal && ry > rx) take = accept_.uniform() < std::exp(-(ry - rx) / temp);
      if (anneal) temp *= c_.alpha;
      if (take) {
        x = std::move(y);
        rx = ry;
        rejections = 0;
      } else {
        ++rejections;
      }
    }
  }

  std::vector<double> eval_batch(const std::vector<Point>& batch) {
    std::vector<FeatureAssignment> as;
    as.reserve(batch.size());
    for (const auto& x : batch) as.push_back(space_.decode(x));
    std::vector<std::optional<Evaluation>> out(batch.size());
    const auto workers = c_.stop_at_first_violation ? 1u : std::min<std::size_t>(c_.threads, batch.size());
    if (workers <= 1) {
      std::vector<double> r;
      for (std::size_t i = 0; i < as.size() && !done(); ++i) {
        Evaluation e = evaluate_(as[i]);
        r.push_back(e.robustness);
        record(as[i], std::move(e));
      }
      return r;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < as.size(); i = next++) out[i] = evaluate_(as[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    std::vector<double> r;
    for (std::size_t i = 0; i < out.size(); ++i) {
      r.push_back(out[i]->robustness);
      record(as[i], std::move(*out[i]));
    }
    return r;
  }

  std::size_t tournament(const std::vector<double>& fit) {
    std::size_t best = propose_.below(fit.size());
    for (int k = 1; k < c_.tournament; ++k) {
      const std::size_t i = propose_.below(fit.size());
      if (fit[i] < fit[best] || (fit[i] == fit[best] && i < best)) best = i;
    }
    return best;
  }

  void genetic() {
    const auto n = space_.size();
    const auto pop_size = static_cast<std::size_t>(c_.population);
    std::vector<Point> pop;
    for (std::size_t i = 0; i < std::min(pop_size, remaining()); ++i) pop.push_back(uniform_point());
    std::vector<double> fit = eval_batch(pop);
    pop.resize(fit.size());
    const double p_gene = 1.0 / static_cast<double>(n);

    while (!done()) {
      const auto elite = static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
      const std::size_t n_children = std::min(pop_size - 1, remaining());
      std::vector<Point> children;
      for (std::size_t k = 0; k < n_children; ++k) {
        const Point& p1 = pop[tournament(fit)];
        const Point& p2 = pop[tournament(fit)];
        Point child = p1;
        if (propose_.uniform() < c_.crossover_rate) {
          for (std::size_t g = 0; g < n; ++g) child[g] = propose_.uniform() < 0.5 ? p1[g] : p2[g];
        }
        for (auto& v : child) {
          if (propose_.uniform() < p_gene) v = std::clamp(v + c_.sigma * propose_.normal(), 0.0, 1.0);
        }
        children.push_back(std::move(child));
      }
      std::vector<double> child_fit = eval_batch(children);
      children.resize(child_fit.size());
      std::vector<Point> next{pop[elite]};
      std::vector<double> next_fit{fit[elite]};
      for (std::size_t k = 0; k < children.size(); ++k) {
        next.push_back(std::move(children[k]));
        next_fit.push_back(child_fit[k]);
      }
      pop = std::move(next);
      fit = std::move(next_fit);
    }
  }

  const FeatureSpace& space_;
  const Evaluator& evaluate_;
  SearchConfig c_;
  Rng propose_;
  Rng accept_;
  Archive archive_;
};

}  // namespace

Archive run_search(const FeatureSpace& space, const Evaluator& evaluate, const SearchConfig& config) {
  check_config(config);
  return Runner(space, evaluate, config).run();
}

}  // namespace cais::falsify
