#include "monolab/polylp.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "monolab/errors.hpp"

namespace monolab {

LinearProgram::LinearProgram(std::size_t num_vars)
    : objective_(num_vars, Rational(0)), lower_(num_vars, Rational(0)), upper_(num_vars) {}

void LinearProgram::set_objective(std::vector<Rational> coeffs, Sense sense) {
  if (coeffs.size() != num_vars()) throw StructuralError("objective length does not match variable count");
  objective_ = std::move(coeffs);
  sense_ = sense;
}

void LinearProgram::add_constraint(Constraint constraint) {
  for (const LinearTerm& t : constraint.terms) {
    if (t.var >= num_vars()) throw StructuralError("constraint refers to variable out of range");
  }
  constraints_.push_back(std::move(constraint));
}

void LinearProgram::add_constraints(std::span<const Constraint> constraints) {
  for (const Constraint& c : constraints) add_constraint(c);
}

void LinearProgram::set_bounds(std::size_t var, std::optional<Rational> lower, std::optional<Rational> upper) {
  if (var >= num_vars()) throw StructuralError("bound refers to variable out of range");
  lower_[var] = std::move(lower);
  upper_[var] = std::move(upper);
}

const char* to_string(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

// x_j = offset + sign * x'_col - x'_neg_col (neg_col only for free variables)
struct VariableMap {
  Rational offset;
  int sign = 1;
  std::size_t col = 0;
  std::optional<std::size_t> neg_col;
};

// min cost^T x' + cost_offset  s.t.  rows x' = rhs >= 0, x' >= 0
struct StandardForm {
  std::size_t cols = 0;
  std::vector<std::vector<LinearTerm>> rows;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;
  Rational cost_offset;
  std::vector<int> row_sign;
  // Index into LinearProgram::constraints(), or npos for bound rows.
  std::vector<std::size_t> row_origin;
  std::vector<VariableMap> vars;
  std::vector<std::size_t> duplicate_of;  // per original constraint; npos when kept
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::vector<LinearTerm> merged_terms(const std::vector<LinearTerm>& terms) {
  std::map<std::size_t, Rational> acc;
  for (const LinearTerm& t : terms) acc[t.var] += t.coef;
  std::vector<LinearTerm> out;
  out.reserve(acc.size());
  for (auto& [var, coef] : acc) {
    if (sgn(coef) != 0) out.push_back({var, coef});
  }
  return out;
}

std::string row_key(const std::vector<LinearTerm>& terms, Relation rel, const Rational& rhs) {
  std::string key = std::to_string(static_cast<int>(rel)) + "|" + rhs.get_str();
  for (const LinearTerm& t : terms) key += "|" + std::to_string(t.var) + ":" + t.coef.get_str();
  return key;
}

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm sf;
  const std::size_t n = lp.num_vars();
  const bool maximize = lp.sense() == Sense::kMaximize;
  sf.vars.resize(n);

  struct BoundRow {
    std::size_t col;
    Rational rhs;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& lo = lp.lower(j);
    const auto& up = lp.upper(j);
    VariableMap& vm = sf.vars[j];
    vm.col = sf.cols++;
    if (lo) {
      vm.offset = *lo;
      vm.sign = 1;
      if (up) bound_rows.push_back({vm.col, Rational(*up - *lo)});
    } else if (up) {
      vm.offset = *up;
      vm.sign = -1;
    } else {
      vm.offset = 0;
      vm.sign = 1;
      vm.neg_col = sf.cols++;
    }
  }

  sf.cost.assign(sf.cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    Rational c = maximize ? Rational(-lp.objective()[j]) : lp.objective()[j];
    const VariableMap& vm = sf.vars[j];
    sf.cost[vm.col] = vm.sign > 0 ? c : Rational(-c);
    if (vm.neg_col) sf.cost[*vm.neg_col] = -c;
    sf.cost_offset += c * vm.offset;
  }

  std::map<std::string, std::size_t> seen;
  sf.duplicate_of.assign(lp.constraints().size(), npos);
  std::vector<std::size_t> slack_of_row;
  for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
    const Constraint& con = lp.constraints()[i];
    std::vector<LinearTerm> terms = merged_terms(con.terms);
    std::string key = row_key(terms, con.relation, con.rhs);
    if (auto it = seen.find(key); it != seen.end()) {
      sf.duplicate_of[i] = it->second;
      continue;
    }
    seen.emplace(std::move(key), i);

    std::vector<LinearTerm> row;
    Rational rhs = con.rhs;
    for (const LinearTerm& t : terms) {
      const VariableMap& vm = sf.vars[t.var];
      rhs -= t.coef * vm.offset;
      row.push_back({vm.col, vm.sign > 0 ? t.coef : Rational(-t.coef)});
      if (vm.neg_col) row.push_back({*vm.neg_col, Rational(-t.coef)});
    }
    if (con.relation != Relation::kEqual) {
      row.push_back({sf.cols++, Rational(con.relation == Relation::kLessEqual ? 1 : -1)});
    }
    sf.rows.push_back(std::move(row));
    sf.rhs.push_back(std::move(rhs));
    sf.row_origin.push_back(i);
  }
  for (BoundRow& br : bound_rows) {
    sf.rows.push_back({{br.col, Rational(1)}, {sf.cols++, Rational(1)}});
    sf.rhs.push_back(std::move(br.rhs));
    sf.row_origin.push_back(npos);
  }
  sf.cost.resize(sf.cols, Rational(0));

  sf.row_sign.assign(sf.rows.size(), 1);
  for (std::size_t r = 0; r < sf.rows.size(); ++r) {
    if (sgn(sf.rhs[r]) < 0) {
      sf.row_sign[r] = -1;
      sf.rhs[r] = -sf.rhs[r];
      for (LinearTerm& t : sf.rows[r]) t.coef = -t.coef;
    }
  }
  return sf;
}

// Dense tableau B^-1 [A | I | b] with artificial columns kept for dual recovery.
class Tableau {
 public:
  Tableau(const StandardForm& sf, const SolveOptions& options)
      : options_(options),
        rows_(sf.rows.size()),
        structural_(sf.cols),
        cols_(sf.cols + sf.rows.size()),
        a_(rows_, std::vector<Rational>(cols_, Rational(0))),
        b_(sf.rhs),
        basis_(rows_, npos),
        redundant_(rows_, false),
        z_(cols_, Rational(0)) {
    std::vector<std::size_t> nnz(structural_, 0);
    std::vector<std::size_t> unit_row(structural_, npos);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (const LinearTerm& t : sf.rows[r]) {
        a_[r][t.var] += t.coef;
      }
      a_[r][structural_ + r] = 1;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t j = 0; j < structural_; ++j) {
        if (sgn(a_[r][j]) != 0) {
          ++nnz[j];
          unit_row[j] = a_[r][j] == 1 ? r : npos;
        }
      }
    }
    std::vector<bool> used(structural_, false);
    for (std::size_t j = 0; j < structural_; ++j) {
      if (nnz[j] == 1 && unit_row[j] != npos && basis_[unit_row[j]] == npos && !used[j]) {
        basis_[unit_row[j]] = j;
        used[j] = true;
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] == npos) basis_[r] = structural_ + r;
    }
  }

  // Phase 1: minimize the sum of artificials that start in the basis.
  LPStatus phase_one() {
    std::vector<Rational> cost(cols_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] >= structural_) cost[basis_[r]] = 1;
    }
    price(cost);
    run();
    if (sgn(z0_) != 0) return LPStatus::kInfeasible;
    // Drive remaining artificials out of the basis; rows that cannot be
    // pivoted are linearly dependent on the rest.
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < structural_) continue;
      std::size_t entering = npos;
      for (std::size_t j = 0; j < structural_; ++j) {
        if (sgn(a_[r][j]) != 0) {
          entering = j;
          break;
        }
      }
      if (entering == npos) {
        redundant_[r] = true;
      } else {
        pivot(r, entering);
      }
    }
    return LPStatus::kOptimal;
  }

  LPStatus phase_two(const std::vector<Rational>& structural_cost) {
    std::vector<Rational> cost(cols_, Rational(0));
    std::copy(structural_cost.begin(), structural_cost.end(), cost.begin());
    cost_ = cost;
    price(cost);
    return run();
  }

  // Objective value of the current basis, without the constant offset.
  Rational value() const { return Rational(-z0_); }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(structural_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < structural_) x[basis_[r]] = b_[r];
    }
    return x;
  }

  // y = c_B^T B^-1, read from the artificial columns.
  std::vector<Rational> duals() const {
    std::vector<Rational> y(rows_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      const Rational& cb = cost_[basis_[r]];
      if (sgn(cb) == 0) continue;
      for (std::size_t i = 0; i < rows_; ++i) {
        const Rational& entry = a_[r][structural_ + i];
        if (sgn(entry) != 0) y[i] += cb * entry;
      }
    }
    return y;
  }

  const std::vector<std::size_t>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }

 private:
  void price(const std::vector<Rational>& cost) {
    z_ = cost;
    z0_ = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const Rational& cb = cost[basis_[r]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (sgn(a_[r][j]) != 0) z_[j] -= cb * a_[r][j];
      }
      z0_ -= cb * b_[r];
    }
  }

  std::size_t choose_entering(bool bland) const {
    std::size_t best = npos;
    for (std::size_t j = 0; j < structural_; ++j) {
      if (sgn(z_[j]) >= 0) continue;
      if (bland) return j;
      if (best == npos || z_[j] < z_[best]) best = j;
    }
    return best;
  }

  LPStatus run() {
    std::size_t streak = 0;
    while (true) {
      if (iterations_ >= options_.max_iterations) {
        throw CapacityError("simplex iteration limit reached");
      }
      bool bland = options_.rule == PivotRule::kBland || streak >= options_.degenerate_streak;
      std::size_t entering = choose_entering(bland);
      if (entering == npos) return LPStatus::kOptimal;

      std::size_t leaving = npos;
      Rational best_ratio;
      Rational ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (redundant_[r] || sgn(a_[r][entering]) <= 0) continue;
        ratio = b_[r] / a_[r][entering];
        if (leaving == npos || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (leaving == npos) return LPStatus::kUnbounded;
      streak = sgn(best_ratio) == 0 ? streak + 1 : 0;
      pivot(leaving, entering);
      ++iterations_;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    std::vector<Rational>& prow = a_[r];
    const Rational inv = 1 / prow[c];
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    b_[r] *= inv;
    Rational f;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || sgn(a_[i][c]) == 0) continue;
      f = a_[i][c];
      std::vector<Rational>& row = a_[i];
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      if (sgn(b_[r]) != 0) b_[i] -= f * b_[r];
    }
    if (sgn(z_[c]) != 0) {
      f = z_[c];
      for (std::size_t j : nz_) z_[j] -= f * prow[j];
      z0_ -= f * b_[r];
    }
    basis_[r] = c;
  }

  SolveOptions options_;
  std::size_t rows_;
  std::size_t structural_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<std::size_t> basis_;
  std::vector<bool> redundant_;
  std::vector<Rational> z_;
  Rational z0_;
  std::vector<Rational> cost_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
};

}  // namespace

LPSolution solve(const LinearProgram& lp, const SolveOptions& options) {
  StandardForm sf = to_standard_form(lp);
  Tableau tableau(sf, options);
  LPSolution solution;

  if (tableau.phase_one() == LPStatus::kInfeasible) {
    solution.status = LPStatus::kInfeasible;
    solution.iterations = tableau.iterations();
    return solution;
  }
  solution.status = tableau.phase_two(sf.cost);
  solution.iterations = tableau.iterations();
  solution.basis = tableau.basis();
  if (solution.status != LPStatus::kOptimal) return solution;

  const bool maximize = lp.sense() == Sense::kMaximize;
  Rational min_value = tableau.value() + sf.cost_offset;
  solution.value = maximize ? Rational(-min_value) : min_value;

  std::vector<Rational> xs = tableau.primal();
  solution.point.resize(lp.num_vars());
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const VariableMap& vm = sf.vars[j];
    Rational x = vm.offset + (vm.sign > 0 ? xs[vm.col] : Rational(-xs[vm.col]));
    if (vm.neg_col) x -= xs[*vm.neg_col];
    solution.point[j] = x;
  }

  std::vector<Rational> y = tableau.duals();
  solution.duals.assign(lp.constraints().size(), Rational(0));
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (sf.row_origin[r] == npos) continue;
    Rational u = sf.row_sign[r] > 0 ? y[r] : Rational(-y[r]);
    solution.duals[sf.row_origin[r]] = maximize ? Rational(-u) : u;
  }
  return solution;
}

CertificateCheck verify_solution(const LinearProgram& lp, const LPSolution& solution) {
  CertificateCheck check;
  if (solution.status != LPStatus::kOptimal || solution.point.size() != lp.num_vars() ||
      solution.duals.size() != lp.constraints().size()) {
    return check;
  }
  const std::size_t n = lp.num_vars();
  const std::vector<Rational>& x = solution.point;

  check.primal_feasible = true;
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower(j) && x[j] < *lp.lower(j)) check.primal_feasible = false;
    if (lp.upper(j) && x[j] > *lp.upper(j)) check.primal_feasible = false;
  }
  for (const Constraint& con : lp.constraints()) {
    Rational lhs = 0;
    for (const LinearTerm& t : con.terms) lhs += t.coef * x[t.var];
    int cmp_result = cmp(lhs, con.rhs);
    bool ok = con.relation == Relation::kEqual       ? cmp_result == 0
              : con.relation == Relation::kLessEqual ? cmp_result <= 0
                                                     : cmp_result >= 0;
    if (!ok) check.primal_feasible = false;
  }
  Rational objective = 0;
  for (std::size_t j = 0; j < n; ++j) objective += lp.objective()[j] * x[j];
  check.objective_matches = objective == solution.value;

  // Work in minimization form.
  const bool maximize = lp.sense() == Sense::kMaximize;
  std::vector<Rational> reduced(n);
  for (std::size_t j = 0; j < n; ++j) reduced[j] = maximize ? Rational(-lp.objective()[j]) : lp.objective()[j];
  check.dual_feasible = true;
  Rational dual_value = 0;
  for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
    const Constraint& con = lp.constraints()[i];
    Rational y = maximize ? Rational(-solution.duals[i]) : solution.duals[i];
    if (con.relation == Relation::kGreaterEqual && sgn(y) < 0) check.dual_feasible = false;
    if (con.relation == Relation::kLessEqual && sgn(y) > 0) check.dual_feasible = false;
    dual_value += y * con.rhs;
    for (const LinearTerm& t : con.terms) reduced[t.var] -= y * t.coef;
  }
  for (std::size_t j = 0; j < n; ++j) {
    int s = sgn(reduced[j]);
    if (s > 0) {
      if (!lp.lower(j)) {
        check.dual_feasible = false;
      } else {
        dual_value += reduced[j] * *lp.lower(j);
      }
    } else if (s < 0) {
      if (!lp.upper(j)) {
        check.dual_feasible = false;
      } else {
        dual_value += reduced[j] * *lp.upper(j);
      }
    }
  }
  Rational min_value = maximize ? Rational(-solution.value) : solution.value;
  check.duality_gap_zero = dual_value == min_value;
  return check;
}

NsConstraintSet ns_constraints(const Scenario& scenario) {
  NsConstraintSet set;
  const int n = scenario.parties();
  const int m = scenario.settings();
  const int d = scenario.outcomes();

  for (std::size_t x = 0; x < scenario.setting_tuples(); ++x) {
    Constraint c;
    c.relation = Relation::kEqual;
    c.rhs = 1;
    c.label = "norm x=" + std::to_string(x);
    for (std::size_t a = 0; a < scenario.outcome_tuples(); ++a) {
      c.terms.push_back({x * scenario.outcome_tuples() + a, Rational(1)});
    }
    set.constraints.push_back(std::move(c));
    ++set.normalization_count;
  }

  std::size_t others_settings = 1, others_outcomes = 1;
  for (int i = 0; i + 1 < n; ++i) {
    others_settings *= static_cast<std::size_t>(m);
    others_outcomes *= static_cast<std::size_t>(d);
  }
  std::vector<int> xo(static_cast<std::size_t>(n - 1));
  std::vector<int> ao(static_cast<std::size_t>(n - 1));
  std::vector<int> x(static_cast<std::size_t>(n));
  std::vector<int> a(static_cast<std::size_t>(n));
  auto splice = [n](std::vector<int>& full, const std::vector<int>& rest, int k, int value) {
    for (int i = 0, r = 0; i < n; ++i) {
      full[static_cast<std::size_t>(i)] = i == k ? value : rest[static_cast<std::size_t>(r++)];
    }
  };
  for (int k = 0; k < n; ++k) {
    for (std::size_t xi = 0; xi < others_settings; ++xi) {
      decode_digits(xi, m, xo);
      for (std::size_t ai = 0; ai < others_outcomes; ++ai) {
        decode_digits(ai, d, ao);
        for (int xk = 1; xk < m; ++xk) {
          Constraint c;
          c.relation = Relation::kEqual;
          c.rhs = 0;
          c.label = "ns party=" + std::to_string(k);
          for (int ak = 0; ak < d; ++ak) {
            splice(a, ao, k, ak);
            splice(x, xo, k, 0);
            c.terms.push_back({scenario.index(a, x), Rational(1)});
            splice(x, xo, k, xk);
            c.terms.push_back({scenario.index(a, x), Rational(-1)});
          }
          set.constraints.push_back(std::move(c));
          ++set.no_signalling_count;
        }
      }
    }
  }
  return set;
}

NsOptimum optimize_over_ns(const Scenario& scenario, std::span<const Rational> objective, Sense sense,
                           std::span<const Constraint> extra, const SolveOptions& options) {
  if (objective.size() != scenario.size()) {
    throw StructuralError("objective dimension does not match scenario");
  }
  LinearProgram lp(scenario.size());
  lp.set_objective(std::vector<Rational>(objective.begin(), objective.end()), sense);
  NsConstraintSet ns = ns_constraints(scenario);
  lp.add_constraints(ns.constraints);
  lp.add_constraints(extra);

  NsOptimum result;
  result.solution = solve(lp, options);
  if (result.solution.status == LPStatus::kOptimal) {
    result.behavior.emplace(scenario, result.solution.point);
  }
  return result;
}

Behavior project_to_ns_l1(const Behavior& point, const SolveOptions& options) {
  const Scenario& scenario = point.scenario();
  const std::size_t n = scenario.size();
  // Variables: p (0..n), u (n..2n), v (2n..3n) with p - u + v = q.
  LinearProgram lp(3 * n);
  std::vector<Rational> objective(3 * n, Rational(0));
  for (std::size_t j = n; j < 3 * n; ++j) objective[j] = 1;
  lp.set_objective(std::move(objective), Sense::kMinimize);
  for (std::size_t j = 0; j < n; ++j) {
    Constraint c;
    c.relation = Relation::kEqual;
    c.rhs = point.values()[j];
    c.terms = {{j, Rational(1)}, {n + j, Rational(-1)}, {2 * n + j, Rational(1)}};
    lp.add_constraint(std::move(c));
  }
  lp.add_constraints(ns_constraints(scenario).constraints);
  LPSolution solution = solve(lp, options);
  if (solution.status != LPStatus::kOptimal) {
    throw StructuralError("L1 projection onto the no-signalling polytope failed");
  }
  solution.point.resize(n);
  return Behavior(scenario, std::move(solution.point));
}

Behavior random_ns_behavior(const Scenario& scenario, std::mt19937_64& rng, const SolveOptions& options) {
  std::uniform_int_distribution<int> weight(0, 8);
  std::vector<Rational> values(scenario.size());
  for (std::size_t x = 0; x < scenario.setting_tuples(); ++x) {
    std::vector<int> w(scenario.outcome_tuples());
    int total = 0;
    while (total == 0) {
      total = 0;
      for (int& v : w) {
        v = weight(rng);
        total += v;
      }
    }
    for (std::size_t a = 0; a < w.size(); ++a) {
      values[x * scenario.outcome_tuples() + a] = make_rational(w[a], total);
    }
  }
  return project_to_ns_l1(Behavior(scenario, std::move(values)), options);
}

}  // namespace monolab
