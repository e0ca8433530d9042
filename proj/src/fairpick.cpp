// Copyright 2026 The vdaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vdaudit/fairpick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vdaudit/error.hpp"
#include "vdaudit/kmeans.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::fairpick {
namespace {

std::size_t group_row(data::Group g) { return g == data::Group::kProtected ? 0 : 1; }

// The linear system for one anchoring. Cell (i, j) has residual
//   e(i, j) = base(i, j) - q(i, j)(x),
//   q(i, j)(x) = x(i, j) / D(i) - sum_{l != i} x(l, j) / comp(i),
// with D the anchors, comp(i) the sum of the other anchors and base the
// anchored dvar of the untouched counts minus the target.
struct System {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> upper;  // cell populations
  std::vector<double> inv_d;
  std::vector<double> inv_comp;
  std::vector<double> base;
  double lipschitz = 0.0;

  System(const ClusteredData& cd, double threshold, const std::vector<double>& anchors,
         const DvarMatrix& pre)
      : n(cd.groups), k(cd.k), upper(n * k), inv_d(n), inv_comp(n), base(n * k) {
    const double anchor_sum = std::accumulate(anchors.begin(), anchors.end(), 0.0);
    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double comp = anchor_sum - anchors[i];
      if (!(anchors[i] > 0.0) || !(comp > 0.0)) {
        throw InvalidArgument("every group and its complement need records");
      }
      inv_d[i] = 1.0 / anchors[i];
      inv_comp[i] = 1.0 / comp;
      frob += inv_d[i] * inv_d[i] + static_cast<double>(n - 1) * inv_comp[i] * inv_comp[i];
    }
    // Clusters decouple into identical n x n blocks, so twice the block's
    // squared Frobenius norm bounds the gradient's Lipschitz constant.
    lipschitz = 2.0 * frob;
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) upper[i * k + j] = static_cast<double>(cd.count(i, j));
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        base[i * k + j] = q(upper, i, j) - threshold * pre.at(i, j);
      }
    }
  }

  template <typename V>
  double q(const V& x, std::size_t i, std::size_t j) const {
    double others = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l != i) others += static_cast<double>(x[l * k + j]);
    }
    return static_cast<double>(x[i * k + j]) * inv_d[i] - others * inv_comp[i];
  }

  template <typename V>
  double cluster_objective(const V& x, std::size_t j) const {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = base[i * k + j] - q(x, i, j);
      f += e * e;
    }
    return f;
  }

  template <typename V>
  double objective(const V& x) const {
    double f = 0.0;
    for (std::size_t j = 0; j < k; ++j) f += cluster_objective(x, j);
    return f;
  }

  void gradient(const std::vector<double>& x, std::vector<double>& g) const {
    std::vector<double> e(n);
    for (std::size_t j = 0; j < k; ++j) {
      double weighted = 0.0;  // sum_i e(i, j) / comp(i)
      for (std::size_t i = 0; i < n; ++i) {
        e[i] = base[i * k + j] - q(x, i, j);
        weighted += e[i] * inv_comp[i];
      }
      for (std::size_t l = 0; l < n; ++l) {
        const double others = weighted - e[l] * inv_comp[l];
        g[l * k + j] = -2.0 * (e[l] * inv_d[l] - others);
      }
    }
  }
};

struct Descent {
  std::vector<double> x;
  int iterations = 0;
};

// Gradient descent from zero with step 1 / L; with `box` the iterate is
// projected onto 0 <= x <= upper after every step, which keeps the objective
// non-increasing.
Descent descend(const System& sys, bool box, const SolverOptions& options) {
  Descent d;
  d.x.assign(sys.n * sys.k, 0.0);
  std::vector<double> g(d.x.size());
  const double step = 1.0 / sys.lipschitz;
  for (d.iterations = 1; d.iterations <= options.max_iterations; ++d.iterations) {
    sys.gradient(d.x, g);
    double moved = 0.0;
    for (std::size_t c = 0; c < d.x.size(); ++c) {
      double next = d.x[c] - step * g[c];
      if (box) next = std::clamp(next, 0.0, sys.upper[c]);
      moved += (next - d.x[c]) * (next - d.x[c]);
      d.x[c] = next;
    }
    if (sys.lipschitz * moved <= options.stationarity) return d;
  }
  throw SolverError("deletion solver did not reach stationarity in " +
                        std::to_string(options.max_iterations) + " iterations",
                    sys.objective(d.x));
}

// Largest-remainder rounding inside each group: the group's rounded total
// is kept, floors are topped up in order of decreasing fractional part.
std::vector<std::size_t> round_per_group(const System& sys, const std::vector<double>& x) {
  std::vector<std::size_t> out(x.size());
  for (std::size_t i = 0; i < sys.n; ++i) {
    double sum = 0.0;
    std::size_t cap = 0;
    std::vector<std::pair<double, std::size_t>> fractions;
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < sys.k; ++j) {
      const std::size_t c = i * sys.k + j;
      const double v = std::clamp(x[c], 0.0, sys.upper[c]);
      sum += v;
      cap += static_cast<std::size_t>(sys.upper[c]);
      const double fl = std::floor(v + 1e-9);
      out[c] = static_cast<std::size_t>(std::min(fl, sys.upper[c]));
      assigned += out[c];
      if (static_cast<double>(out[c]) < sys.upper[c]) fractions.emplace_back(v - fl, j);
    }
    const auto wanted = std::min(static_cast<std::size_t>(std::llround(sum)), cap);
    std::stable_sort(fractions.begin(), fractions.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [frac, j] : fractions) {
      if (assigned >= wanted) break;
      ++out[i * sys.k + j];
      ++assigned;
    }
  }
  return out;
}

struct CellPlan {
  double optimum = std::numeric_limits<double>::infinity();  // exact minimum over the box
  std::size_t a = 0;  // deletions from group 0
  std::size_t b = 0;  // deletions from group 1
};

// Two groups: every cluster is an independent problem whose residual is
// convex in the second group's deletions, so scanning the first group's
// deletions and trying the two integers around the real optimum for the
// second gives the exact integer optimum over the box [0, amax] x [0, bmax].
// A second scan then picks the plan with the fewest deletions among those
// within `slack` of it.
CellPlan best_cell_plan(const System& sys, std::size_t j, std::size_t amax, std::size_t bmax,
                        double slack) {
  const std::size_t k = sys.k;
  std::vector<std::size_t> cell(2 * k, 0);
  const auto b_hi = static_cast<double>(bmax);
  auto objective = [&](std::size_t a, std::size_t b) {
    cell[j] = a;
    cell[k + j] = b;
    return sys.cluster_objective(cell, j);
  };
  // Zero residual for group 0: base - a / D0 + b / D1 = 0.
  auto b_real = [&](std::size_t a) {
    return (static_cast<double>(a) * sys.inv_d[0] - sys.base[j]) / sys.inv_d[1];
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a <= amax; ++a) {
    const double b = b_real(a);
    for (const double c : {std::floor(b), std::ceil(b)}) {
      best = std::min(best, objective(a, static_cast<std::size_t>(std::clamp(c, 0.0, b_hi))));
    }
  }
  CellPlan plan{best, amax, bmax};
  for (std::size_t a = 0; a <= amax && a < plan.a + plan.b; ++a) {
    auto b = static_cast<std::size_t>(std::clamp(std::ceil(b_real(a)), 0.0, b_hi));
    if (objective(a, b) > best + slack) {
      b = static_cast<std::size_t>(std::clamp(std::floor(b_real(a)), 0.0, b_hi));
      if (objective(a, b) > best + slack) continue;
    }
    // Convex in b, so walk down while still within the slack.
    while (b > 0 && objective(a, b - 1) <= best + slack) --b;
    if (a + b < plan.a + plan.b) {
      plan.a = a;
      plan.b = b;
    }
  }
  return plan;
}

// Exact integer polish for two groups under the constraint that each group
// keeps at least one record. Per cluster, the best plan is found for each
// required pattern of kept groups; a four-state dynamic program over the
// clusters then picks the combination with the lowest summed box optima
// that keeps both groups, preferring fewer deletions on exact ties.
void polish_two_groups(const System& sys, double tie_tolerance, std::vector<std::size_t>& del) {
  const std::size_t k = sys.k;
  const double slack = tie_tolerance / static_cast<double>(k);
  struct State {
    double objective = std::numeric_limits<double>::infinity();
    std::size_t deletions = 0;
    std::vector<CellPlan> plans;
  };
  // State index: bit g set when group g already keeps a record.
  std::vector<State> states(4);
  states[0].objective = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto s0 = static_cast<std::size_t>(sys.upper[j]);
    const auto s1 = static_cast<std::size_t>(sys.upper[k + j]);
    std::vector<CellPlan> options;
    for (unsigned required = 0; required < 4; ++required) {
      const bool keep0 = required & 1u, keep1 = required & 2u;
      if ((keep0 && s0 == 0) || (keep1 && s1 == 0)) continue;
      options.push_back(best_cell_plan(sys, j, s0 - (keep0 ? 1 : 0), s1 - (keep1 ? 1 : 0), slack));
    }
    std::vector<State> next(4);
    for (unsigned from = 0; from < 4; ++from) {
      if (!std::isfinite(states[from].objective)) continue;
      for (const CellPlan& p : options) {
        const unsigned kept = (p.a < s0 ? 1u : 0u) | (p.b < s1 ? 2u : 0u);
        State candidate{states[from].objective + p.optimum,
                        states[from].deletions + p.a + p.b, {}};
        State& to = next[from | kept];
        if (candidate.objective < to.objective ||
            (candidate.objective == to.objective && candidate.deletions < to.deletions)) {
          candidate.plans = states[from].plans;
          candidate.plans.push_back(p);
          to = std::move(candidate);
        }
      }
    }
    states = std::move(next);
  }
  // Unreachable only when a group has no records at all, which the anchors
  // already rule out; fall back to the best state just in case.
  const State* best = &states[3];
  for (const State& st : states) {
    if (!std::isfinite(best->objective) && std::isfinite(st.objective)) best = &st;
  }
  for (std::size_t j = 0; j < k && j < best->plans.size(); ++j) {
    del[j] = best->plans[j].a;
    del[k + j] = best->plans[j].b;
  }
}

// Unit moves on single cells while any strictly improves the objective.
void polish_local(const System& sys, std::vector<std::size_t>& del) {
  const int max_moves = 100000;
  for (int move = 0; move < max_moves; ++move) {
    double best_gain = 1e-15;
    std::size_t best_cell = del.size();
    bool best_up = false;
    for (std::size_t j = 0; j < sys.k; ++j) {
      const double current = sys.cluster_objective(del, j);
      for (std::size_t i = 0; i < sys.n; ++i) {
        const std::size_t c = i * sys.k + j;
        for (const bool up : {true, false}) {
          if (up && static_cast<double>(del[c]) >= sys.upper[c]) continue;
          if (!up && del[c] == 0) continue;
          del[c] = up ? del[c] + 1 : del[c] - 1;
          const double gain = current - sys.cluster_objective(del, j);
          del[c] = up ? del[c] - 1 : del[c] + 1;
          if (gain > best_gain) {
            best_gain = gain;
            best_cell = c;
            best_up = up;
          }
        }
      }
    }
    if (best_cell == del.size()) return;
    del[best_cell] = best_up ? del[best_cell] + 1 : del[best_cell] - 1;
  }
}

// A group that would lose every record of this class gets back the record
// whose return costs the least.
void keep_every_group(const System& sys, std::vector<std::size_t>& del) {
  for (std::size_t i = 0; i < sys.n; ++i) {
    double remaining = 0.0;
    for (std::size_t j = 0; j < sys.k; ++j) {
      remaining += sys.upper[i * sys.k + j] - static_cast<double>(del[i * sys.k + j]);
    }
    if (remaining > 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_cell = del.size();
    for (std::size_t j = 0; j < sys.k; ++j) {
      const std::size_t c = i * sys.k + j;
      if (del[c] == 0) continue;
      --del[c];
      const double f = sys.objective(del);
      ++del[c];
      if (f < best) {
        best = f;
        best_cell = c;
      }
    }
    if (best_cell < del.size()) --del[best_cell];
  }
}

std::vector<double> post_deletion_anchors(const ClusteredData& cd,
                                          const std::vector<std::size_t>& del) {
  std::vector<double> anchors(cd.groups, 0.0);
  for (std::size_t i = 0; i < cd.groups; ++i) {
    for (std::size_t j = 0; j < cd.k; ++j) {
      anchors[i] += static_cast<double>(cd.count(i, j) - del[i * cd.k + j]);
    }
  }
  return anchors;
}

struct Solved {
  std::vector<std::size_t> deletions;
  std::vector<double> relaxed;
  std::size_t negatives = 0;
  double residual = 0.0;
  int iterations = 0;
};

Solved solve_once(const ClusteredData& cd, double threshold, const std::vector<double>& anchors,
                  const DvarMatrix& pre, const SolverOptions& options) {
  const System sys(cd, threshold, anchors, pre);
  Solved s;
  // Negative entries of the unconstrained minimum-norm solution are
  // duplication requests; they are counted and then clamped by the box.
  const Descent free = descend(sys, false, options);
  for (const double v : free.x) {
    if (v < -1e-6) ++s.negatives;
  }
  const Descent boxed = descend(sys, true, options);
  s.relaxed = boxed.x;
  s.iterations = free.iterations + boxed.iterations;
  s.deletions = round_per_group(sys, boxed.x);
  if (sys.n == 2) {
    polish_two_groups(sys, options.tie_tolerance, s.deletions);
  } else {
    polish_local(sys, s.deletions);
  }
  keep_every_group(sys, s.deletions);
  s.residual = sys.objective(s.deletions);
  return s;
}

// The unlinearized objective: denominators are the plan's own surviving
// group totals.
double self_consistent_objective(const ClusteredData& cd, double threshold,
                                 const std::vector<std::size_t>& del, const DvarMatrix& pre) {
  const std::vector<double> anchors = post_deletion_anchors(cd, del);
  const System sys(cd, threshold, anchors, pre);
  return sys.objective(del);
}

nlohmann::json matrix_json(std::size_t rows, std::size_t cols, const auto& values) {
  nlohmann::json m = nlohmann::json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < cols; ++j) row.push_back(values[i * cols + j]);
    m.push_back(std::move(row));
  }
  return m;
}

template <typename T>
std::vector<T> matrix_from_json(const nlohmann::json& m, std::size_t rows, std::size_t cols) {
  if (m.size() != rows) throw ParseError("deletion plan matrix has wrong row count", 0);
  std::vector<T> out;
  out.reserve(rows * cols);
  for (const auto& row : m) {
    if (row.size() != cols) throw ParseError("deletion plan matrix has wrong column count", 0);
    for (const auto& v : row) out.push_back(v.get<T>());
  }
  return out;
}

std::vector<double> feature_matrix(const data::Dataset& subset,
                                   const std::vector<std::size_t>& columns) {
  const std::size_t dim = columns.size();
  std::vector<double> points(subset.size() * dim);
  for (std::size_t r = 0; r < subset.size(); ++r) {
    for (std::size_t f = 0; f < dim; ++f) points[r * dim + f] = subset.value(r, columns[f]);
  }
  cluster::minmax_scale(points, dim);
  return points;
}

template <typename F>
auto with_class_label(int label, F&& body) {
  const std::string prefix = "class " + std::to_string(label) + ": ";
  try {
    return body();
  } catch (const SolverError& e) {
    throw SolverError(prefix + e.what(), e.residual());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

ClusteredData from_counts(std::size_t groups, std::size_t k,
                          const std::vector<std::size_t>& counts) {
  if (groups < 2 || k == 0 || counts.size() != groups * k) {
    throw InvalidArgument("from_counts: need at least 2 groups, 1 cluster and groups x k counts");
  }
  ClusteredData cd;
  cd.groups = groups;
  cd.k = k;
  cd.counts = counts;
  cd.group_totals.assign(groups, 0);
  for (std::size_t i = 0; i < groups; ++i) {
    for (std::size_t j = 0; j < k; ++j) cd.group_totals[i] += counts[i * k + j];
  }
  return cd;
}

std::size_t DeletionPlan::total() const {
  return std::accumulate(deletions.begin(), deletions.end(), std::size_t{0});
}

nlohmann::json DeletionPlan::to_json() const {
  return {{"groups", groups},
          {"k", k},
          {"threshold", threshold},
          {"deletions", matrix_json(groups, k, deletions)},
          {"relaxed", matrix_json(groups, k, relaxed)},
          {"ignored_negative_requests", ignored_negative_requests},
          {"residual", residual},
          {"iterations", iterations},
          {"passes", passes}};
}

DeletionPlan DeletionPlan::from_json(const nlohmann::json& j) {
  DeletionPlan p;
  p.groups = j.at("groups").get<std::size_t>();
  p.k = j.at("k").get<std::size_t>();
  p.threshold = j.at("threshold").get<double>();
  p.deletions = matrix_from_json<std::size_t>(j.at("deletions"), p.groups, p.k);
  p.relaxed = matrix_from_json<double>(j.at("relaxed"), p.groups, p.k);
  p.ignored_negative_requests = j.at("ignored_negative_requests").get<std::size_t>();
  p.residual = j.at("residual").get<double>();
  p.iterations = j.at("iterations").get<int>();
  p.passes = j.at("passes").get<int>();
  return p;
}

std::vector<double> pre_deletion_anchors(const ClusteredData& cd) {
  return {cd.group_totals.begin(), cd.group_totals.end()};
}

double linearized_objective(const ClusteredData& cd, double threshold,
                            const std::vector<std::size_t>& deletions,
                            const std::vector<double>& anchors) {
  if (deletions.size() != cd.groups * cd.k || anchors.size() != cd.groups) {
    throw InvalidArgument("linearized_objective: shape mismatch");
  }
  const System sys(cd, threshold, anchors, compute_dvar(cd));
  return sys.objective(deletions);
}

ClusteredData aggregate_features(const data::Dataset& subset,
                                 const data::GroupAssignment& groups, std::size_t k,
                                 std::uint64_t seed) {
  if (groups.labels.size() != subset.size()) {
    throw InvalidArgument("group labels do not match the dataset");
  }
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (k > subset.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(subset.size()) + " records");
  }
  const data::Schema& schema = subset.schema();
  const std::size_t protected_col = schema.index_of(groups.attribute);
  ClusteredData cd;
  cd.groups = 2;
  cd.k = k;
  for (std::size_t c = 0; c < schema.width(); ++c) {
    if (c != schema.class_index() && c != protected_col) cd.feature_columns.push_back(c);
  }
  const std::size_t dim = cd.feature_columns.size();
  if (dim == 0) throw InvalidArgument("no non-protected features to cluster on");
  const std::vector<double> points = feature_matrix(subset, cd.feature_columns);
  cluster::KMeansResult km = cluster::kmeans(points, dim, k, derive_seed(seed, "kmeans", k));
  cd.centers = std::move(km.centers);
  cd.assignment = std::move(km.assignment);
  cd.counts.assign(cd.groups * k, 0);
  cd.group_totals.assign(cd.groups, 0);
  cd.group_of.resize(subset.size());
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const std::size_t g = group_row(groups.labels[r]);
    cd.group_of[r] = g;
    ++cd.counts[g * k + static_cast<std::size_t>(cd.assignment[r])];
    ++cd.group_totals[g];
  }
  return cd;
}

std::size_t choose_k(const data::Dataset& subset, const data::GroupAssignment& groups,
                     std::size_t min_per_cluster, std::uint64_t seed) {
  if (min_per_cluster == 0) throw InvalidArgument("min_per_cluster must be at least 1");
  if (subset.empty()) throw InvalidArgument("choose_k: empty subset");
  const std::size_t n = 2;
  std::size_t k_max = subset.size() / (min_per_cluster * n);
  for (const data::Group g : {data::Group::kProtected, data::Group::kUnprotected}) {
    k_max = std::min(k_max, groups.count(g) / (min_per_cluster + 1));
  }
  auto qualifies = [&](std::size_t k) {
    const ClusteredData cd = aggregate_features(subset, groups, k, seed);
    return std::all_of(cd.counts.begin(), cd.counts.end(),
                       [&](std::size_t c) { return c > min_per_cluster; });
  };
  // Halve K until a candidate qualifies, then scan the gap above it from
  // the top down.
  std::size_t failed_above = k_max + 1;
  for (std::size_t k = k_max; k >= 1; k /= 2) {
    if (qualifies(k)) {
      for (std::size_t probe = failed_above - 1; probe > k; --probe) {
        if (qualifies(probe)) return probe;
      }
      return k;
    }
    failed_above = k;
  }
  throw InvalidArgument("no K gives every cluster more than " + std::to_string(min_per_cluster) +
                        " records of each group; use a smaller min_per_cluster");
}

DvarMatrix compute_dvar(const ClusteredData& cd) {
  DvarMatrix m;
  m.groups = cd.groups;
  m.k = cd.k;
  m.values.assign(cd.groups * cd.k, 0.0);
  const std::size_t all = std::accumulate(cd.group_totals.begin(), cd.group_totals.end(),
                                          std::size_t{0});
  for (std::size_t i = 0; i < cd.groups; ++i) {
    const std::size_t own = cd.group_totals[i];
    const std::size_t comp = all - own;
    if (own == 0) throw InvalidArgument("group " + std::to_string(i) + " has no records");
    if (comp == 0) throw InvalidArgument("complement of group " + std::to_string(i) + " is empty");
    for (std::size_t j = 0; j < cd.k; ++j) {
      std::size_t others = 0;
      for (std::size_t l = 0; l < cd.groups; ++l) {
        if (l != i) others += cd.count(l, j);
      }
      m.values[i * cd.k + j] = static_cast<double>(cd.count(i, j)) / static_cast<double>(own) -
                               static_cast<double>(others) / static_cast<double>(comp);
    }
  }
  return m;
}

DeletionPlan solve_deletions(const ClusteredData& cd, double threshold,
                             const SolverOptions& options) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("T must lie in [0, 1]");
  const DvarMatrix pre = compute_dvar(cd);
  for (const double v : pre.values) {
    if (!std::isfinite(v)) throw InvalidArgument("dvar matrix is not finite");
  }
  DeletionPlan plan;
  plan.groups = cd.groups;
  plan.k = cd.k;
  plan.threshold = threshold;

  Solved current = solve_once(cd, threshold, pre_deletion_anchors(cd), pre, options);
  plan.passes = 1;
  plan.iterations = current.iterations;
  Solved best = current;
  double best_true = self_consistent_objective(cd, threshold, current.deletions, pre);
  for (int pass = 0; pass < options.refine_passes; ++pass) {
    Solved next = solve_once(cd, threshold, post_deletion_anchors(cd, current.deletions), pre,
                             options);
    ++plan.passes;
    plan.iterations += next.iterations;
    const bool unchanged = next.deletions == current.deletions;
    current = std::move(next);
    if (unchanged) break;
    const double f = self_consistent_objective(cd, threshold, current.deletions, pre);
    if (f < best_true) {
      best_true = f;
      best = current;
    }
  }
  plan.deletions = std::move(best.deletions);
  plan.relaxed = std::move(best.relaxed);
  plan.ignored_negative_requests = best.negatives;
  plan.residual = best.residual;
  return plan;
}

data::Dataset apply_plan(const data::Dataset& subset, const ClusteredData& cd,
                         const DeletionPlan& plan, std::uint64_t seed) {
  if (cd.assignment.size() != subset.size() || cd.group_of.size() != subset.size()) {
    throw InvalidArgument("clustering does not match the dataset");
  }
  if (plan.groups != cd.groups || plan.k != cd.k || plan.deletions.size() != cd.groups * cd.k) {
    throw InvalidArgument("plan shape does not match the clustering");
  }
  std::vector<std::vector<std::size_t>> cells(cd.groups * cd.k);
  for (std::size_t r = 0; r < subset.size(); ++r) {
    cells[cd.group_of[r] * cd.k + static_cast<std::size_t>(cd.assignment[r])].push_back(r);
  }
  std::vector<bool> removed(subset.size(), false);
  Rng rng(seed);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<std::size_t>& rows = cells[c];
    const std::size_t del = plan.deletions[c];
    if (del > rows.size()) {
      throw InvalidArgument("plan deletes " + std::to_string(del) + " records from a cell of " +
                            std::to_string(rows.size()));
    }
    // Partial Fisher-Yates: the first `del` slots become a uniform sample.
    for (std::size_t t = 0; t < del; ++t) {
      std::swap(rows[t], rows[t + rng.below(rows.size() - t)]);
      removed[rows[t]] = true;
    }
  }
  std::vector<std::size_t> keep;
  keep.reserve(subset.size());
  for (std::size_t r = 0; r < subset.size(); ++r) {
    if (!removed[r]) keep.push_back(r);
  }
  return subset.subset(keep);
}

nlohmann::json FairPickResult::diagnostics() const {
  nlohmann::json out = nlohmann::json::array();
  for (const ClassOutcome& c : classes) {
    out.push_back({{"label", c.label},
                   {"k", c.k},
                   {"dvar_before", matrix_json(c.dvar_before.groups, c.dvar_before.k,
                                               c.dvar_before.values)},
                   {"plan", c.plan.to_json()}});
  }
  return out;
}

FairPickResult fairpick(const data::Dataset& train, const data::GroupAssignment& groups,
                        double threshold, std::size_t min_per_cluster, std::uint64_t seed,
                        const SolverOptions& options) {
  if (groups.labels.size() != train.size()) {
    throw InvalidArgument("group labels do not match the dataset");
  }
  FairPickResult result;
  std::vector<bool> survives(train.size(), true);
  const int classes = train.class_count();
  for (int label = 0; label < classes; ++label) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < train.size(); ++r) {
      if (train.label(r) == label) rows.push_back(r);
    }
    if (rows.empty()) continue;
    with_class_label(label, [&] {
      const data::Dataset part = train.subset(rows);
      data::GroupAssignment part_groups{groups.attribute, {}};
      for (const std::size_t r : rows) part_groups.labels.push_back(groups.labels[r]);
      const std::uint64_t class_seed = derive_seed(seed, "class", static_cast<std::uint64_t>(label));
      ClassOutcome outcome;
      outcome.label = label;
      outcome.k = choose_k(part, part_groups, min_per_cluster, class_seed);
      const ClusteredData cd = aggregate_features(part, part_groups, outcome.k, class_seed);
      outcome.dvar_before = compute_dvar(cd);
      outcome.plan = solve_deletions(cd, threshold, options);
      // Mark the deleted rows by the same sampling apply_plan performs.
      const data::Dataset kept = apply_plan(part, cd, outcome.plan, derive_seed(class_seed, "apply"));
      std::vector<bool> kept_id(part.size(), false);
      std::size_t cursor = 0;
      for (std::size_t r = 0; r < part.size() && cursor < kept.size(); ++r) {
        if (part.id(r) == kept.id(cursor)) {
          kept_id[r] = true;
          ++cursor;
        }
      }
      for (std::size_t r = 0; r < part.size(); ++r) {
        if (!kept_id[r]) survives[rows[r]] = false;
      }
      result.classes.push_back(std::move(outcome));
      return 0;
    });
  }
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (survives[r]) keep.push_back(r);
  }
  result.data = train.subset(keep);
  return result;
}

}  // namespace vdaudit::fairpick
