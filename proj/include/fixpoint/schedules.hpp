#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fixpoint {

// Deterministic parameter sequence with values in [0,1].
//   Power:    s_n = a / (n+1)^b, a in (0,1], b > 0
//   Constant: s_n = c, c in [0,1]
//   Table:    explicit prefix, tail repeats the last value
struct ScheduleSpec {
  enum class Form { Power, Constant, Table };

  Form form = Form::Constant;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::vector<double> values;

  static ScheduleSpec power(double a, double b);
  static ScheduleSpec constant(double c);
  static ScheduleSpec table(std::vector<double> values);

  double eval(std::size_t n) const;

  // tail value when the sequence is eventually constant (Constant/Table)
  bool eventually_constant(double& value, std::size_t& settle) const;
};

double eval_schedule(const ScheduleSpec& s, std::size_t n);

// Time-independent convex weights (phi_0, phi_1..phi_M) over a family of M
// maps plus the base point. phi_0 = phi0; the remaining mass 1-phi0 is spread
// uniformly or geometrically. M = 0 is the degenerate single-map case with
// phi0 = 1.
struct FamilyWeights {
  enum class Rule { Uniform, Geometric };

  Rule rule = Rule::Uniform;
  std::size_t M = 0;
  double phi0 = 1.0;
  double q = 0.5;

  static FamilyWeights uniform(std::size_t M, double phi0);
  static FamilyWeights geometric(std::size_t M, double phi0, double q);

  double phi(std::size_t i) const;   // i = 0..M
  std::vector<double> row() const;   // (phi_0, ..., phi_M)
};

// Resolvent scale r_n = r + decay/(n+1), with limit r > 0.
struct ResolventScaleSchedule {
  enum class Form { Constant, Convergent };

  Form form = Form::Constant;
  double r = 1.0;
  double decay = 0.0;

  static ResolventScaleSchedule constant(double r);
  static ResolventScaleSchedule convergent(double r, double decay);

  double eval(std::size_t n) const;
  double limit() const { return r; }
};

enum class Verdict { Holds, Fails, Inconclusive };

const char* verdict_name(Verdict v);

struct ConditionEntry {
  std::string name;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;

  bool all_hold() const;
  const ConditionEntry* find(std::string_view name) const;
  std::string summary() const;
};

// Anchor-sequence conditions for the classical one-map scheme:
//   C1: lim s_n = 0
//   C2: sum s_n = infinity
//   C3: (s_{n+1}-s_n)/s_{n+1}^2 -> 0
//   C4: sum |s_{n+1}-s_n| < infinity
//   C5: (s_{n+1}-s_n)/s_{n+1} -> 0
//   C6: |s_{n+1}-s_n| <= o(s_{n+1}) + sigma_n with summable sigma_n
// Closed forms get symbolic verdicts; table tails are never promoted to
// "holds" for asymptotic conditions, only to definitive failures.
ConditionReport validate_halpern(const ScheduleSpec& phi);

// Conditions for the anchored family scheme:
//   (1) lim xi_n = 0, (2) sum xi_n = infinity, (3) weight normalization,
//   (4) liminf zeta_n*phi_0*phi_i > 0 per family index, and the coefficient
//   requirement "coeff": zeta_n >= xi_n (with zeta_n <= 1) so the update is a
//   convex combination.
ConditionReport validate_theorem_conditions(const ScheduleSpec& xi, const ScheduleSpec& zeta,
                                            const FamilyWeights& weights);

// Single-map corollary conditions: (1), (2) on xi; (3) liminf
// zeta_n*(1-phi_n)*phi_n > 0; coeff: zeta_n >= xi_n.
ConditionReport validate_corollary(const ScheduleSpec& xi, const ScheduleSpec& zeta,
                                   const ScheduleSpec& phi);

// Three-schedule scheme conditions: C1: wp_n >= xi_n; C2: all values in
// [0,1]; C3: sum wp_n = infinity.
ConditionReport validate_dk(const ScheduleSpec& wp, const ScheduleSpec& xi,
                            const ScheduleSpec& zeta);

}  // namespace fixpoint
