#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtsp::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarType type = VarType::Continuous;
};

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear model, always minimised.
class Model {
 public:
  int add_variable(std::string name, double lower, double upper,
                   VarType type = VarType::Continuous) {
    if (type == VarType::Binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    vars_.push_back({std::move(name), lower, upper, type});
    objective_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name) {
    return add_variable(std::move(name), 0.0, 1.0, VarType::Binary);
  }

  int add_continuous(std::string name, double lower = 0.0,
                     double upper = kInfinity) {
    return add_variable(std::move(name), lower, upper, VarType::Continuous);
  }

  void set_objective(int var, double coef) { objective_.at(var) = coef; }
  void add_objective(int var, double coef) { objective_.at(var) += coef; }
  void set_objective_offset(double offset) { offset_ = offset; }

  int add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                     std::string name = {}) {
    cons_.push_back({std::move(name), std::move(terms), rel, rhs});
    return static_cast<int>(cons_.size()) - 1;
  }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_offset() const { return offset_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return cons_.size(); }

  double evaluate(const std::vector<double>& x) const {
    double v = offset_;
    for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
    return v;
  }

  // Largest violation of any bound, constraint, or integrality mark.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      worst = std::max(worst, vars_[j].lower - x[j]);
      worst = std::max(worst, x[j] - vars_[j].upper);
      if (vars_[j].type == VarType::Binary)
        worst = std::max(worst, std::min(std::abs(x[j]), std::abs(1.0 - x[j])));
    }
    for (const auto& c : cons_) {
      double lhs = 0.0;
      for (const auto& t : c.terms) lhs += t.coef * x[t.var];
      switch (c.relation) {
        case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
        case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
        case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
      }
    }
    return worst;
  }

  // Throws ModelError on references to undeclared variables, crossed bounds,
  // non-finite coefficients, or binaries whose bounds leave [0,1].
  void validate() const {
    const int n = static_cast<int>(vars_.size());
    for (const auto& v : vars_) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
        throw ModelError("variable '" + v.name + "' has invalid bounds");
      if (v.type == VarType::Binary && (v.lower < 0.0 || v.upper > 1.0))
        throw ModelError("binary variable '" + v.name + "' outside [0,1]");
    }
    for (double c : objective_)
      if (!std::isfinite(c)) throw ModelError("non-finite objective coefficient");
    for (const auto& c : cons_) {
      if (!std::isfinite(c.rhs))
        throw ModelError("constraint '" + c.name + "' has non-finite rhs");
      for (const auto& t : c.terms) {
        if (t.var < 0 || t.var >= n)
          throw ModelError("constraint '" + c.name + "' references undeclared variable");
        if (!std::isfinite(t.coef))
          throw ModelError("constraint '" + c.name + "' has non-finite coefficient");
      }
    }
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<double> objective_;
  double offset_ = 0.0;
};

}  // namespace mtsp::milp
