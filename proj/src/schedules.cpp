#include "fixpoint/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixpoint/errors.hpp"

namespace fixpoint {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

ScheduleSpec ScheduleSpec::power(double a, double b) {
  if (!(a > 0.0) || !(a <= 1.0)) throw argument_error("power schedule: a must lie in (0,1]");
  if (!(b > 0.0)) throw argument_error("power schedule: b must be positive");
  ScheduleSpec s;
  s.form = Form::Power;
  s.a = a;
  s.b = b;
  return s;
}

ScheduleSpec ScheduleSpec::constant(double c) {
  if (!(c >= 0.0) || !(c <= 1.0)) throw argument_error("constant schedule: c must lie in [0,1]");
  ScheduleSpec s;
  s.form = Form::Constant;
  s.c = c;
  return s;
}

ScheduleSpec ScheduleSpec::table(std::vector<double> values) {
  if (values.empty()) throw argument_error("table schedule: need at least one value");
  for (double v : values)
    if (!(v >= 0.0) || !(v <= 1.0))
      throw argument_error("table schedule: values must lie in [0,1]");
  ScheduleSpec s;
  s.form = Form::Table;
  s.values = std::move(values);
  return s;
}

double ScheduleSpec::eval(std::size_t n) const {
  switch (form) {
    case Form::Power:
      return a / std::pow(static_cast<double>(n) + 1.0, b);
    case Form::Constant:
      return c;
    case Form::Table:
      return n < values.size() ? values[n] : values.back();
  }
  return 0.0;
}

bool ScheduleSpec::eventually_constant(double& value, std::size_t& settle) const {
  switch (form) {
    case Form::Constant:
      value = c;
      settle = 0;
      return true;
    case Form::Table:
      value = values.back();
      settle = values.size() - 1;
      return true;
    case Form::Power:
      return false;
  }
  return false;
}

double eval_schedule(const ScheduleSpec& s, std::size_t n) { return s.eval(n); }

FamilyWeights FamilyWeights::uniform(std::size_t M, double phi0) {
  if (M > 64) throw argument_error("family weights: M must be at most 64");
  if (M == 0) {
    if (phi0 != 1.0)
      throw argument_error("family weights: M = 0 requires phi0 = 1 (degenerate single-map case)");
  } else if (!(phi0 > 0.0) || !(phi0 < 1.0)) {
    throw argument_error("family weights: phi0 must lie in (0,1)");
  }
  FamilyWeights w;
  w.rule = Rule::Uniform;
  w.M = M;
  w.phi0 = phi0;
  return w;
}

FamilyWeights FamilyWeights::geometric(std::size_t M, double phi0, double q) {
  if (M == 0 || M > 64) throw argument_error("family weights: geometric rule needs 1 <= M <= 64");
  if (!(phi0 > 0.0) || !(phi0 < 1.0))
    throw argument_error("family weights: phi0 must lie in (0,1)");
  if (!(q > 0.0) || !(q < 1.0)) throw argument_error("family weights: q must lie in (0,1)");
  FamilyWeights w;
  w.rule = Rule::Geometric;
  w.M = M;
  w.phi0 = phi0;
  w.q = q;
  return w;
}

double FamilyWeights::phi(std::size_t i) const {
  if (i > M) throw argument_error("family weights: index out of range");
  if (i == 0) return phi0;
  if (rule == Rule::Uniform) return (1.0 - phi0) / static_cast<double>(M);
  // geometric mass proportional to q^i over i = 1..M, normalized to 1-phi0
  double denom = 0.0;
  double qi = 1.0;
  for (std::size_t j = 1; j <= M; ++j) {
    qi *= q;
    denom += qi;
  }
  return (1.0 - phi0) * std::pow(q, static_cast<double>(i)) / denom;
}

std::vector<double> FamilyWeights::row() const {
  std::vector<double> r(M + 1);
  for (std::size_t i = 0; i <= M; ++i) r[i] = phi(i);
  return r;
}

ResolventScaleSchedule ResolventScaleSchedule::constant(double r) {
  if (!(r > 0.0)) throw argument_error("resolvent scale: r must be positive");
  ResolventScaleSchedule s;
  s.form = Form::Constant;
  s.r = r;
  return s;
}

ResolventScaleSchedule ResolventScaleSchedule::convergent(double r, double decay) {
  if (!(r > 0.0)) throw argument_error("resolvent scale: limit r must be positive");
  if (!(decay >= 0.0)) throw argument_error("resolvent scale: decay must be nonnegative");
  ResolventScaleSchedule s;
  s.form = Form::Convergent;
  s.r = r;
  s.decay = decay;
  return s;
}

double ResolventScaleSchedule::eval(std::size_t n) const {
  if (form == Form::Constant) return r;
  return r + decay / (static_cast<double>(n) + 1.0);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

bool ConditionReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ConditionEntry& e) { return e.verdict == Verdict::Holds; });
}

const ConditionEntry* ConditionReport::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::string ConditionReport::summary() const {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += "; ";
    out += e.name;
    out += ' ';
    out += verdict_name(e.verdict);
    if (!e.note.empty()) {
      out += " (";
      out += e.note;
      out += ')';
    }
  }
  return out;
}

namespace {

ConditionEntry entry(std::string name, Verdict v, std::string note = {}) {
  return ConditionEntry{std::move(name), v, std::move(note)};
}

// lim s_n = 0?
ConditionEntry limit_zero(std::string name, const ScheduleSpec& s) {
  switch (s.form) {
    case ScheduleSpec::Form::Power:
      return entry(std::move(name), Verdict::Holds, "power decay to 0");
    case ScheduleSpec::Form::Constant:
      if (s.c == 0.0) return entry(std::move(name), Verdict::Holds, "constant 0");
      return entry(std::move(name), Verdict::Fails, "limit is " + fmt(s.c));
    case ScheduleSpec::Form::Table:
      if (s.values.back() != 0.0)
        return entry(std::move(name), Verdict::Fails,
                     "table tail repeats " + fmt(s.values.back()));
      return entry(std::move(name), Verdict::Inconclusive,
                   "table form: asymptotic verdict not granted");
  }
  return entry(std::move(name), Verdict::Inconclusive);
}

// sum s_n = infinity?
ConditionEntry series_diverges(std::string name, const ScheduleSpec& s) {
  switch (s.form) {
    case ScheduleSpec::Form::Power:
      if (s.b <= 1.0) return entry(std::move(name), Verdict::Holds, "exponent b <= 1");
      return entry(std::move(name), Verdict::Fails,
                   "exponent b = " + fmt(s.b) + " > 1 gives a convergent series");
    case ScheduleSpec::Form::Constant:
      if (s.c > 0.0) return entry(std::move(name), Verdict::Holds, "positive constant");
      return entry(std::move(name), Verdict::Fails, "identically 0");
    case ScheduleSpec::Form::Table:
      if (s.values.back() == 0.0)
        return entry(std::move(name), Verdict::Fails, "tail repeats 0: finite sum");
      return entry(std::move(name), Verdict::Inconclusive,
                   "table form: asymptotic verdict not granted");
  }
  return entry(std::move(name), Verdict::Inconclusive);
}

// liminf s_n > 0?
ConditionEntry liminf_positive(std::string name, const ScheduleSpec& s, const std::string& who) {
  switch (s.form) {
    case ScheduleSpec::Form::Power:
      return entry(std::move(name), Verdict::Fails, who + " decays to 0");
    case ScheduleSpec::Form::Constant:
      if (s.c > 0.0) return entry(std::move(name), Verdict::Holds, who + " constant " + fmt(s.c));
      return entry(std::move(name), Verdict::Fails, who + " identically 0");
    case ScheduleSpec::Form::Table:
      if (s.values.back() == 0.0)
        return entry(std::move(name), Verdict::Fails, who + " tail repeats 0");
      return entry(std::move(name), Verdict::Inconclusive,
                   "table form: asymptotic verdict not granted");
  }
  return entry(std::move(name), Verdict::Inconclusive);
}

// hi_n >= lo_n for all n?
ConditionEntry pointwise_ge(std::string name, const ScheduleSpec& hi, const ScheduleSpec& lo,
                            const std::string& hi_who, const std::string& lo_who) {
  constexpr std::size_t scan_cap = 1000000;

  const auto fail_at = [&](std::size_t n) {
    return entry(name, Verdict::Fails,
                 "fails at n=" + std::to_string(n) + ": " + hi_who + "=" + fmt(hi.eval(n)) +
                     " < " + lo_who + "=" + fmt(lo.eval(n)));
  };
  // first scanned index with hi < lo, if any
  const auto first_violation = [&](std::size_t max_n) -> std::size_t {
    for (std::size_t n = 0; n <= max_n; ++n)
      if (hi.eval(n) < lo.eval(n)) return n;
    return scan_cap + 1;
  };
  const auto fails_eventually = [&](const std::string& why) {
    const std::size_t n = first_violation(scan_cap);
    if (n <= scan_cap) return fail_at(n);
    return entry(name, Verdict::Fails, why + " (crossing lies beyond the scan range)");
  };

  double hi_tail = 0.0, lo_tail = 0.0;
  std::size_t hi_settle = 0, lo_settle = 0;
  const bool hi_const = hi.eventually_constant(hi_tail, hi_settle);
  const bool lo_const = lo.eventually_constant(lo_tail, lo_settle);

  if (!hi_const && !lo_const) {
    // both power laws: hi >= lo for all n iff hi.a*(n+1)^{lo.b-hi.b} >= lo.a
    if (hi.b <= lo.b) {
      if (hi.a >= lo.a)
        return entry(std::move(name), Verdict::Holds, "power-law comparison, minimum at n=0");
      return fail_at(0);
    }
    return fails_eventually(hi_who + " decays strictly faster than " + lo_who);
  }

  if (hi_const && !lo_const) {
    if (hi_tail == 0.0) {
      // lo stays positive while hi settles at 0: violation within the prefix
      return fail_at(first_violation(hi_settle + 1));
    }
    // lo is a decreasing power law; certify once it drops below the tail
    const double cross = std::pow(lo.a / hi_tail, 1.0 / lo.b);
    if (!(cross <= static_cast<double>(scan_cap))) {
      const std::size_t n = first_violation(scan_cap);
      if (n <= scan_cap) return fail_at(n);
      return entry(std::move(name), Verdict::Inconclusive,
                   "no violation below n=10^6; tail comparison not certified");
    }
    const std::size_t scan_to = std::max(hi_settle, static_cast<std::size_t>(cross) + 1);
    const std::size_t n = first_violation(scan_to);
    if (n <= scan_to) return fail_at(n);
    return entry(std::move(name), Verdict::Holds, "verified through the crossing index");
  }

  if (!hi_const && lo_const) {
    if (lo_tail > 0.0)
      return fails_eventually(hi_who + " decays to 0 below the " + lo_who + " tail");
    const std::size_t n = first_violation(lo_settle);
    if (n <= lo_settle) return fail_at(n);
    return entry(std::move(name), Verdict::Holds, "power law dominates a zero tail");
  }

  const std::size_t scan_to = std::max(hi_settle, lo_settle);
  const std::size_t n = first_violation(scan_to);
  if (n <= scan_to) return fail_at(n);
  return entry(std::move(name), Verdict::Holds, "verified through the settling index");
}

Verdict combine(Verdict x, Verdict y) {
  if (x == Verdict::Fails || y == Verdict::Fails) return Verdict::Fails;
  if (x == Verdict::Inconclusive || y == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Holds;
}

}  // namespace

ConditionReport validate_halpern(const ScheduleSpec& phi) {
  ConditionReport rep;
  rep.entries.push_back(limit_zero("C1", phi));
  rep.entries.push_back(series_diverges("C2", phi));

  switch (phi.form) {
    case ScheduleSpec::Form::Power:
      if (phi.b < 1.0)
        rep.entries.push_back(entry("C3", Verdict::Holds, "increments decay like n^(b-1)"));
      else
        rep.entries.push_back(entry(
            "C3", Verdict::Fails,
            phi.b == 1.0 ? "ratio tends to " + fmt(-1.0 / phi.a) : "ratio diverges for b > 1"));
      break;
    case ScheduleSpec::Form::Constant:
      rep.entries.push_back(phi.c > 0.0
                                ? entry("C3", Verdict::Holds, "zero increments")
                                : entry("C3", Verdict::Inconclusive, "0/0 ratio undefined"));
      break;
    case ScheduleSpec::Form::Table:
      rep.entries.push_back(
          entry("C3", Verdict::Inconclusive, "table form: asymptotic verdict not granted"));
      break;
  }

  // total variation is finite for monotone power laws, constants, and
  // repeat-last tables alike
  rep.entries.push_back(entry("C4", Verdict::Holds, "finite total variation"));

  switch (phi.form) {
    case ScheduleSpec::Form::Power:
      rep.entries.push_back(entry("C5", Verdict::Holds, "relative increments decay like 1/n"));
      break;
    case ScheduleSpec::Form::Constant:
      rep.entries.push_back(phi.c > 0.0
                                ? entry("C5", Verdict::Holds, "zero increments")
                                : entry("C5", Verdict::Inconclusive, "0/0 ratio undefined"));
      break;
    case ScheduleSpec::Form::Table:
      rep.entries.push_back(
          entry("C5", Verdict::Inconclusive, "table form: asymptotic verdict not granted"));
      break;
  }

  rep.entries.push_back(entry("C6", Verdict::Holds, "implied by C4 with summable sigma"));
  return rep;
}

ConditionReport validate_theorem_conditions(const ScheduleSpec& xi, const ScheduleSpec& zeta,
                                            const FamilyWeights& weights) {
  ConditionReport rep;
  rep.entries.push_back(limit_zero("(1)", xi));
  rep.entries.push_back(series_diverges("(2)", xi));

  const std::vector<double> row = weights.row();
  double sum = 0.0;
  for (double w : row) sum += w;
  if (std::fabs(sum - 1.0) <= 1e-12)
    rep.entries.push_back(entry("(3)", Verdict::Holds, "weights normalized"));
  else
    rep.entries.push_back(entry("(3)", Verdict::Fails, "weight sum is " + fmt(sum)));

  if (weights.M == 0) {
    rep.entries.push_back(entry("(4)", Verdict::Holds, "no family indices (M = 0)"));
  } else {
    // weights are time-independent and positive, so the product condition
    // reduces to liminf zeta_n > 0
    rep.entries.push_back(liminf_positive("(4)", zeta, "zeta"));
  }

  rep.entries.push_back(pointwise_ge("coeff", zeta, xi, "zeta", "xi"));
  return rep;
}

ConditionReport validate_corollary(const ScheduleSpec& xi, const ScheduleSpec& zeta,
                                   const ScheduleSpec& phi) {
  ConditionReport rep;
  rep.entries.push_back(limit_zero("(1)", xi));
  rep.entries.push_back(series_diverges("(2)", xi));

  ConditionEntry z = liminf_positive("(3)", zeta, "zeta");
  ConditionEntry p = [&] {
    switch (phi.form) {
      case ScheduleSpec::Form::Power:
        return entry("(3)", Verdict::Fails, "phi decays to 0, so (1-phi)phi does too");
      case ScheduleSpec::Form::Constant:
        if (phi.c > 0.0 && phi.c < 1.0)
          return entry("(3)", Verdict::Holds, "phi constant in (0,1)");
        return entry("(3)", Verdict::Fails, "(1-phi)phi is identically 0");
      case ScheduleSpec::Form::Table:
        if (phi.values.back() == 0.0 || phi.values.back() == 1.0)
          return entry("(3)", Verdict::Fails, "(1-phi)phi tail repeats 0");
        return entry("(3)", Verdict::Inconclusive,
                     "table form: asymptotic verdict not granted");
    }
    return entry("(3)", Verdict::Inconclusive);
  }();

  const Verdict v = combine(z.verdict, p.verdict);
  std::string note = v == Verdict::Holds ? "liminf zeta(1-phi)phi > 0"
                                         : (z.verdict == Verdict::Fails ? z.note : p.note);
  rep.entries.push_back(entry("(3)", v, std::move(note)));

  rep.entries.push_back(pointwise_ge("coeff", zeta, xi, "zeta", "xi"));
  return rep;
}

ConditionReport validate_dk(const ScheduleSpec& wp, const ScheduleSpec& xi,
                            const ScheduleSpec& zeta) {
  (void)zeta;
  ConditionReport rep;
  rep.entries.push_back(pointwise_ge("C1", wp, xi, "wp", "xi"));
  // schedule construction already confines every form to [0,1]
  rep.entries.push_back(entry("C2", Verdict::Holds, "all schedule forms map into [0,1]"));
  rep.entries.push_back(series_diverges("C3", wp));
  return rep;
}

}  // namespace fixpoint
