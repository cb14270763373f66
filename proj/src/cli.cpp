#include "lindstedt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lindstedt/cohomology.hpp"
#include "lindstedt/diagnostics.hpp"
#include "lindstedt/errors.hpp"
#include "lindstedt/lower.hpp"
#include "lindstedt/maximal.hpp"
#include "lindstedt/scalar.hpp"

namespace lindstedt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config parsing ---------------------------------------------------------

namespace {

const std::set<std::string> kKnownKeys{
    "schema_version", "problem",       "dimension",      "potential",
    "frequency",      "gamma",         "order",          "topology",
    "beta0_index",    "norm",          "precision_bits", "eps_grid",
    "residual_orders", "gevrey_window", "profile_order", "output_dir"};

class Collector {
 public:
  void add(std::string field, std::string msg) {
    items_.push_back(std::move(field) + ": " + std::move(msg));
  }
  bool empty() const { return items_.empty(); }
  std::vector<std::string>& items() { return items_; }

 private:
  std::vector<std::string> items_;
};

// Accepts a decimal string (preferred) or a JSON number.
std::optional<std::string> read_decimal(const json& j, const std::string& field,
                                        Collector& errs) {
  std::string text;
  if (j.is_string()) {
    text = j.get<std::string>();
  } else if (j.is_number()) {
    text = j.dump();
  } else {
    errs.add(field, "expected a decimal string");
    return std::nullopt;
  }
  double v = 0;
  try {
    v = ScalarTraits<double>::from_string(text);
  } catch (const std::invalid_argument&) {
    errs.add(field, "not a decimal number: '" + text + "'");
    return std::nullopt;
  }
  if (!std::isfinite(v)) {
    errs.add(field, "must be finite");
    return std::nullopt;
  }
  return text;
}

double as_double(const std::string& s) {
  return ScalarTraits<double>::from_string(s);
}

std::optional<int> read_int(const json& j, const std::string& field,
                            Collector& errs) {
  if (!j.is_number_integer()) {
    errs.add(field, "expected an integer");
    return std::nullopt;
  }
  return j.get<int>();
}

std::optional<Mode> read_mode(const json& j, const std::string& field,
                              int expected_len, Collector& errs) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected_len) {
    errs.add(field, "expected an integer array of length " +
                        std::to_string(expected_len));
    return std::nullopt;
  }
  Mode m;
  for (int i = 0; i < expected_len; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number_integer()) {
      errs.add(field, "entries must be integers");
      return std::nullopt;
    }
    m[i] = e.get<int>();
  }
  return m;
}

std::optional<std::vector<int>> read_int_list(const json& j,
                                              const std::string& field,
                                              Collector& errs) {
  if (!j.is_array()) {
    errs.add(field, "expected an integer array");
    return std::nullopt;
  }
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) {
      errs.add(field, "entries must be integers");
      return std::nullopt;
    }
    out.push_back(e.get<int>());
  }
  return out;
}

// "p/q" as a rational multiple of a full turn.
bool looks_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == s.size()) {
    return false;
  }
  const auto digits = [](std::string_view t) {
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) t.remove_prefix(1);
    return !t.empty() &&
           std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  return digits(std::string_view(s).substr(0, slash)) &&
         digits(std::string_view(s).substr(slash + 1));
}

}  // namespace

RunConfig parse_config_text(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"config: top level must be an object"});

  RunConfig cfg;
  Collector errs;
  bool rational_frequency = false;
  std::string rational_text;

  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (!kKnownKeys.contains(key)) errs.add(key, "unknown key");
  }

  if (!root.contains("schema_version")) {
    errs.add("schema_version", "missing");
  } else if (auto v = read_int(root["schema_version"], "schema_version", errs)) {
    if (*v != kSchemaVersion) {
      errs.add("schema_version", "unsupported version " + std::to_string(*v));
    }
    cfg.schema_version = *v;
  }

  if (!root.contains("problem") || !root["problem"].is_string()) {
    errs.add("problem", "missing or not a string");
  } else {
    const auto p = root["problem"].get<std::string>();
    if (p == "maximal") {
      cfg.problem = ProblemKind::kMaximal;
    } else if (p == "lower-conservative") {
      cfg.problem = ProblemKind::kLowerConservative;
    } else if (p == "lower-dissipative") {
      cfg.problem = ProblemKind::kLowerDissipative;
    } else {
      errs.add("problem", "expected maximal, lower-conservative or lower-dissipative");
    }
  }
  const bool lower = cfg.problem != ProblemKind::kMaximal;

  if (root.contains("dimension")) {
    if (auto v = read_int(root["dimension"], "dimension", errs)) cfg.dimension = *v;
  } else {
    cfg.dimension = lower ? 2 : 1;
  }
  if (cfg.dimension < 1 || cfg.dimension > kMaxDim) {
    errs.add("dimension", "must be in 1.." + std::to_string(kMaxDim));
    cfg.dimension = std::clamp(cfg.dimension, 1, kMaxDim);
  }
  if (lower && cfg.dimension != 2) errs.add("dimension", "lower problems need 2");

  if (!root.contains("potential") || !root["potential"].is_array() ||
      root["potential"].empty()) {
    errs.add("potential", "expected a nonempty list of modes");
  } else {
    std::set<Mode> seen;
    for (std::size_t i = 0; i < root["potential"].size(); ++i) {
      const auto& t = root["potential"][i];
      const std::string f = "potential[" + std::to_string(i) + "]";
      if (!t.is_object()) {
        errs.add(f, "expected an object with mode, cos, sin");
        continue;
      }
      for (const auto& [key, value] : t.items()) {
        (void)value;
        if (key != "mode" && key != "cos" && key != "sin") errs.add(f + "." + key, "unknown key");
      }
      PotentialTermSpec term;
      if (!t.contains("mode")) {
        errs.add(f + ".mode", "missing");
        continue;
      }
      auto m = read_mode(t["mode"], f + ".mode", cfg.dimension, errs);
      if (!m) continue;
      term.mode = *m;
      if (term.mode.is_zero()) errs.add(f + ".mode", "the zero mode does not enter V'");
      if (seen.contains(term.mode) || seen.contains(-term.mode)) {
        errs.add(f + ".mode", "duplicate of an earlier mode or its negative");
      }
      seen.insert(term.mode);
      if (t.contains("cos")) {
        if (auto v = read_decimal(t["cos"], f + ".cos", errs)) term.cos_amp = *v;
      }
      if (t.contains("sin")) {
        if (auto v = read_decimal(t["sin"], f + ".sin", errs)) term.sin_amp = *v;
      }
      cfg.potential.push_back(term);
    }
  }

  if (!root.contains("frequency")) {
    errs.add("frequency", "missing");
  } else {
    const auto& fj = root["frequency"];
    auto& spec = cfg.frequency;
    if (fj.is_string()) {
      const auto s = fj.get<std::string>();
      if (s == "golden") {
        spec.kind = FrequencySpec::Kind::kGolden;
        if (!lower && cfg.dimension != 1) {
          errs.add("frequency", "golden is one-dimensional; give an explicit list");
        }
      } else if (looks_rational(s)) {
        rational_frequency = true;
        rational_text = s;
      } else {
        errs.add("frequency", "expected golden, a radian list, p/q or a continued fraction");
      }
    } else if (fj.is_array()) {
      spec.kind = FrequencySpec::Kind::kExplicit;
      for (std::size_t i = 0; i < fj.size(); ++i) {
        if (fj[i].is_string() && looks_rational(fj[i].get<std::string>())) {
          rational_frequency = true;
          rational_text = fj[i].get<std::string>();
          continue;
        }
        if (auto v = read_decimal(fj[i], "frequency[" + std::to_string(i) + "]", errs)) {
          spec.radians.push_back(*v);
        }
      }
      const int want = lower ? 1 : cfg.dimension;
      if (static_cast<int>(fj.size()) != want) {
        errs.add("frequency", "expected " + std::to_string(want) + " entries");
      }
    } else if (fj.is_object()) {
      spec.kind = FrequencySpec::Kind::kContinuedFraction;
      for (const auto& [key, value] : fj.items()) {
        (void)value;
        if (key != "preperiod" && key != "period") errs.add("frequency." + key, "unknown key");
      }
      if (fj.contains("preperiod")) {
        if (auto v = read_int_list(fj["preperiod"], "frequency.preperiod", errs)) spec.preperiod = *v;
      }
      if (!fj.contains("period")) {
        errs.add("frequency.period", "missing");
      } else if (auto v = read_int_list(fj["period"], "frequency.period", errs)) {
        spec.period = *v;
        if (spec.period.empty()) errs.add("frequency.period", "must be nonempty");
      }
      for (int a : spec.period) {
        if (a < 1) errs.add("frequency.period", "partial quotients must be >= 1");
      }
      for (int a : spec.preperiod) {
        if (a < 1) errs.add("frequency.preperiod", "partial quotients must be >= 1");
      }
      if (!lower && cfg.dimension != 1) {
        errs.add("frequency", "continued fractions are one-dimensional");
      }
    } else {
      errs.add("frequency", "unrecognised form");
    }
  }

  if (root.contains("gamma")) {
    if (auto v = read_decimal(root["gamma"], "gamma", errs)) cfg.gamma = *v;
  }
  {
    const double g = as_double(cfg.gamma);
    if (g < 0) errs.add("gamma", "must be >= 0");
    if (cfg.problem == ProblemKind::kLowerConservative && g != 0) {
      errs.add("gamma", "lower-conservative needs gamma = 0");
    }
    if (cfg.problem == ProblemKind::kLowerDissipative && g == 0) {
      errs.add("gamma", "lower-dissipative needs gamma != 0");
    }
  }

  if (!root.contains("order")) {
    errs.add("order", "missing");
  } else if (auto v = read_int(root["order"], "order", errs)) {
    cfg.order = *v;
    if (cfg.order < 1) errs.add("order", "must be >= 1");
  }

  if (root.contains("topology")) {
    const auto& t = root["topology"];
    if (!lower) {
      errs.add("topology", "only used by lower problems");
    } else if (!t.is_object() || !t.contains("k")) {
      errs.add("topology", "expected an object with k and optional k_perp");
    } else {
      for (const auto& [key, value] : t.items()) {
        (void)value;
        if (key != "k" && key != "k_perp") errs.add("topology." + key, "unknown key");
      }
      cfg.k = read_mode(t["k"], "topology.k", 2, errs);
      if (t.contains("k_perp")) cfg.k_perp = read_mode(t["k_perp"], "topology.k_perp", 2, errs);
      if (cfg.k) {
        try {
          if (cfg.k_perp) {
            LowerTopology(*cfg.k, *cfg.k_perp);
          } else {
            LowerTopology{*cfg.k};
          }
        } catch (const std::exception& e) {
          errs.add("topology", e.what());
        }
      }
    }
  } else if (lower) {
    errs.add("topology", "required for lower problems");
  }

  if (root.contains("beta0_index")) {
    if (auto v = read_int(root["beta0_index"], "beta0_index", errs)) {
      cfg.beta0_index = *v;
      if (*v < 0) errs.add("beta0_index", "must be >= 0");
    }
  }

  if (root.contains("norm")) {
    const auto& n = root["norm"];
    if (!n.is_object()) {
      errs.add("norm", "expected an object with rho and r");
    } else {
      for (const auto& [key, value] : n.items()) {
        (void)value;
        if (key != "rho" && key != "r") errs.add("norm." + key, "unknown key");
      }
      if (n.contains("rho")) {
        if (auto v = read_decimal(n["rho"], "norm.rho", errs)) cfg.rho = *v;
      }
      if (n.contains("r")) {
        if (auto v = read_decimal(n["r"], "norm.r", errs)) cfg.r = *v;
      }
      if (as_double(cfg.rho) < 0) errs.add("norm.rho", "must be >= 0");
      if (as_double(cfg.r) < 0) errs.add("norm.r", "must be >= 0");
    }
  }

  if (root.contains("precision_bits")) {
    if (auto v = read_int(root["precision_bits"], "precision_bits", errs)) {
      cfg.precision_bits = *v;
      if (*v < 53) errs.add("precision_bits", "must be >= 53");
    }
  }

  if (root.contains("eps_grid")) {
    const auto& g = root["eps_grid"];
    cfg.eps_grid.clear();
    if (!g.is_array() || g.empty()) {
      errs.add("eps_grid", "expected a nonempty list");
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (auto v = read_decimal(g[i], "eps_grid[" + std::to_string(i) + "]", errs)) {
          cfg.eps_grid.push_back(*v);
        }
      }
      for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i) {
        const double e = as_double(cfg.eps_grid[i]);
        if (!(e > 0)) errs.add("eps_grid", "entries must be positive");
        if (i > 0 && !(e < as_double(cfg.eps_grid[i - 1]))) {
          errs.add("eps_grid", "entries must be strictly decreasing");
        }
      }
    }
  }

  if (root.contains("residual_orders")) {
    if (auto v = read_int_list(root["residual_orders"], "residual_orders", errs)) {
      cfg.residual_orders = *v;
      for (int n : *v) {
        if (n < 1 || n > cfg.order) {
          errs.add("residual_orders", "entries must lie in 1..order");
          break;
        }
      }
    }
  }

  if (root.contains("gevrey_window")) {
    auto v = read_int_list(root["gevrey_window"], "gevrey_window", errs);
    if (v && v->size() == 2) {
      cfg.gevrey_window = std::pair{(*v)[0], (*v)[1]};
      if ((*v)[0] < 3 || (*v)[1] > cfg.order || (*v)[1] - (*v)[0] < 3) {
        errs.add("gevrey_window", "need 3 <= lo, hi <= order and at least 4 orders");
      }
    } else if (v) {
      errs.add("gevrey_window", "expected [lo, hi]");
    }
  }

  if (root.contains("profile_order")) {
    if (auto v = read_int(root["profile_order"], "profile_order", errs)) {
      cfg.profile_order = *v;
      if (*v < 2) errs.add("profile_order", "must be >= 2");
    }
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) {
      errs.add("output_dir", "expected a string");
    } else {
      cfg.output_dir = root["output_dir"].get<std::string>();
    }
  }

  if (!errs.empty()) {
    if (rational_frequency) {
      errs.add("frequency", "rational frequency " + rational_text + " is resonant");
    }
    throw ConfigError(std::move(errs.items()));
  }
  if (rational_frequency) {
    throw ExactResonance("frequency " + rational_text +
                         " is a rational multiple of 2 pi");
  }
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---- verbs ------------------------------------------------------------------

namespace {

constexpr std::pair<Verb, std::string_view> kVerbNames[] = {
    {Verb::kRun, "run"},
    {Verb::kExpandMax, "expand-max"},
    {Verb::kExpandLower, "expand-lower"},
    {Verb::kResidual, "residual"},
    {Verb::kGevreyFit, "gevrey-fit"},
    {Verb::kCheckBounds, "check-bounds"},
    {Verb::kProfileFrequency, "profile-frequency"},
};

}  // namespace

std::optional<Verb> verb_from_name(std::string_view name) {
  for (const auto& [v, n] : kVerbNames) {
    if (n == name) return v;
  }
  return std::nullopt;
}

std::string_view verb_name(Verb verb) {
  for (const auto& [v, n] : kVerbNames) {
    if (v == verb) return n;
  }
  return "?";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ExactResonance*>(&e)) return 3;
  if (dynamic_cast<const NondegeneracyFailure*>(&e)) return 4;
  if (dynamic_cast<const DegenerateAverage*>(&e)) return 4;
  if (dynamic_cast<const NormOverflow*>(&e)) return 5;
  return 1;
}

// ---- coefficient dumps --------------------------------------------------------

template <class Real>
void write_dump(std::ostream& os, const SeriesDump<Real>& dump) {
  using T = ScalarTraits<Real>;
  os << "# coefficients domain_dim=" << dump.domain_dim
     << " range_dim=" << dump.range_dim << "\n";
  os << "# order n degree real | coef n l... (re im)... | mu n v... | beta n v\n";
  for (std::size_t n = 0; n < dump.coeffs.size(); ++n) {
    const auto& p = dump.coeffs[n];
    os << "order\t" << n << '\t' << p.degree() << '\t' << (p.is_real() ? 1 : 0)
       << '\n';
    for (const auto& [mode, c] : p.terms()) {
      if (std::all_of(c.begin(), c.end(),
                      [](const auto& z) { return z == Complex<Real>(0); })) {
        continue;
      }
      os << "coef\t" << n;
      for (int i = 0; i < dump.domain_dim; ++i) os << '\t' << mode[i];
      for (const auto& z : c) {
        os << '\t' << T::to_string(z.real()) << '\t' << T::to_string(z.imag());
      }
      os << '\n';
    }
    if (n < dump.mu.size()) {
      os << "mu\t" << n;
      for (const auto& x : dump.mu[n]) os << '\t' << T::to_string(x);
      os << '\n';
    }
    if (n < dump.beta.size()) {
      os << "beta\t" << n << '\t' << T::to_string(dump.beta[n]) << '\n';
    }
  }
}

template <class Real>
SeriesDump<Real> read_dump(std::istream& is) {
  using T = ScalarTraits<Real>;
  SeriesDump<Real> dump;
  std::string line;
  if (!std::getline(is, line) ||
      std::sscanf(line.c_str(), "# coefficients domain_dim=%d range_dim=%d",
                  &dump.domain_dim, &dump.range_dim) != 2) {
    throw std::invalid_argument("coefficient dump: bad header");
  }
  struct Pending {
    int degree = 0;
    bool real = true;
    typename TrigPoly<Real>::Terms terms;
  };
  std::vector<Pending> orders;
  const auto fail = [&](const std::string& what) {
    throw std::invalid_argument("coefficient dump: " + what + " in '" + line + "'");
  };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, '\t');) f.push_back(cell);
    const std::size_t n = std::stoul(f.at(1));
    if (f[0] == "order") {
      if (n != orders.size() || f.size() != 4) fail("out-of-order record");
      orders.push_back({std::stoi(f[2]), f[3] == "1", {}});
    } else if (f[0] == "coef") {
      const auto L = static_cast<std::size_t>(dump.domain_dim);
      const auto D = static_cast<std::size_t>(dump.range_dim);
      if (n + 1 != orders.size() || f.size() != 2 + L + 2 * D) fail("malformed coef");
      Mode m;
      for (std::size_t i = 0; i < L; ++i) m[static_cast<int>(i)] = std::stoi(f[2 + i]);
      typename TrigPoly<Real>::Coeff c(D);
      for (std::size_t d = 0; d < D; ++d) {
        c[d] = Complex<Real>(T::from_string(f[2 + L + 2 * d]),
                             T::from_string(f[3 + L + 2 * d]));
      }
      orders.back().terms[m] = std::move(c);
    } else if (f[0] == "mu") {
      if (n != dump.mu.size()) fail("out-of-order mu");
      std::vector<Real> v;
      for (std::size_t i = 2; i < f.size(); ++i) v.push_back(T::from_string(f[i]));
      dump.mu.push_back(std::move(v));
    } else if (f[0] == "beta") {
      if (n != dump.beta.size() || f.size() != 3) fail("out-of-order beta");
      dump.beta.push_back(T::from_string(f[2]));
    } else {
      fail("unknown record");
    }
  }
  for (auto& p : orders) {
    dump.coeffs.emplace_back(dump.domain_dim, dump.range_dim, p.degree, p.terms,
                             p.real);
  }
  return dump;
}

template void write_dump(std::ostream&, const SeriesDump<double>&);
template void write_dump(std::ostream&, const SeriesDump<MpReal>&);
template SeriesDump<double> read_dump(std::istream&);
template SeriesDump<MpReal> read_dump(std::istream&);

// ---- pipeline ----------------------------------------------------------------

namespace {

template <class Real>
std::string str(const Real& x) {
  return ScalarTraits<Real>::to_string(x);
}

std::string dstr(double x) { return ScalarTraits<double>::to_string(x); }

// Short human-readable number for the summary.
std::string brief(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

class TableFile {
 public:
  TableFile(const fs::path& dir, const std::string& name,
            std::vector<std::string>& written)
      : os_(dir / name) {
    if (!os_) throw std::runtime_error("cannot write " + (dir / name).string());
    written.push_back(name);
  }
  std::ofstream& operator*() { return os_; }

 private:
  std::ofstream os_;
};

template <class Real>
class Pipeline {
 public:
  Pipeline(const RunConfig& cfg, fs::path out, std::ostream& summary)
      : cfg_(cfg),
        out_(std::move(out)),
        summary_(summary),
        potential_(make_potential()),
        freq_(make_frequency()),
        gamma_(num(cfg.gamma)),
        np_(num(cfg.rho), num(cfg.r)) {}

  void execute(Verb verb) {
    fs::create_directories(out_);
    summary_ << "verb: " << verb_name(verb) << "\n";
    summary_ << "problem: " << problem_name() << ", D = " << cfg_.dimension
             << ", N = " << cfg_.order << ", gamma = " << cfg_.gamma
             << ", precision = "
             << ScalarTraits<Real>::bits()
             << " bits\n";
    summary_ << "omega: ";
    for (const auto& w : freq_.omega()) summary_ << brief(to_double(w)) << ' ';
    summary_ << "\n";
    const bool lower = cfg_.problem != ProblemKind::kMaximal;
    switch (verb) {
      case Verb::kExpandMax:
        if (lower) throw ConfigError({"problem: expand-max needs a maximal problem"});
        expand_and_write();
        break;
      case Verb::kExpandLower:
        if (!lower) throw ConfigError({"problem: expand-lower needs a lower problem"});
        expand_and_write();
        break;
      case Verb::kResidual:
        expand_and_write();
        residuals();
        break;
      case Verb::kGevreyFit:
        expand_and_write();
        gevrey();
        break;
      case Verb::kCheckBounds:
        profile();
        expand_and_write();
        bounds();
        break;
      case Verb::kProfileFrequency:
        profile();
        break;
      case Verb::kRun:
        profile();
        expand_and_write();
        residuals();
        gevrey();
        bounds();
        break;
    }
    summary_ << "files:";
    for (const auto& f : written_) summary_ << ' ' << f;
    summary_ << "\n";
  }

 private:
  Real num(const std::string& s) const { return ScalarTraits<Real>::from_string(s); }

  std::string problem_name() const {
    switch (cfg_.problem) {
      case ProblemKind::kMaximal: return "maximal";
      case ProblemKind::kLowerConservative: return "lower-conservative";
      case ProblemKind::kLowerDissipative: return "lower-dissipative";
    }
    return "?";
  }

  Potential<Real> make_potential() const {
    std::vector<typename Potential<Real>::Term> terms;
    for (const auto& t : cfg_.potential) {
      terms.push_back({t.mode, num(t.cos_amp), num(t.sin_amp)});
    }
    return Potential<Real>::from_amplitudes(cfg_.dimension, terms);
  }

  Frequency<Real> make_frequency() const {
    const auto& f = cfg_.frequency;
    switch (f.kind) {
      case FrequencySpec::Kind::kGolden:
        return Frequency<Real>::golden_mean();
      case FrequencySpec::Kind::kContinuedFraction:
        return Frequency<Real>::continued_fraction(f.preperiod, f.period);
      case FrequencySpec::Kind::kExplicit: {
        std::vector<Real> w;
        for (const auto& s : f.radians) w.push_back(num(s));
        return Frequency<Real>(std::move(w));
      }
    }
    throw std::logic_error("unknown frequency kind");
  }

  LowerTopology topology() const {
    return cfg_.k_perp ? LowerTopology(*cfg_.k, *cfg_.k_perp)
                       : LowerTopology(*cfg_.k);
  }

  // Degree budget per order of the computed series.
  int degree_budget() const {
    const int J = potential_.degree();
    return cfg_.problem == ProblemKind::kMaximal ? J : J * cfg_.k->linf();
  }

  const std::vector<TrigPoly<Real>>& series() const {
    return maximal_ ? maximal_->u : lower_->g;
  }
  const std::vector<NormLogEntry<Real>>& norm_log() const {
    return maximal_ ? maximal_->norm_log : lower_->norm_log;
  }
  const std::vector<SolveLogEntry<Real>>& solve_log() const {
    return maximal_ ? maximal_->solve_log : lower_->solve_log;
  }

  void profile() {
    const auto prof = diophantine_profile(freq_, cfg_.profile_order);
    TableFile t(out_, "profile.tsv", written_);
    *t << "order\tmin_distance\targmin\n";
    for (std::size_t i = 0; i < prof.orders.size(); ++i) {
      *t << prof.orders[i] << '\t' << str(prof.min_distance[i]) << '\t';
      for (int d = 0; d < freq_.dim(); ++d) {
        *t << (d ? "," : "") << prof.argmin[i][d];
      }
      *t << '\n';
    }
    *t << "# nu\t" << str(prof.nu) << "\n# tau\t" << str(prof.tau) << '\n';
    summary_ << "diophantine profile up to |l| = " << cfg_.profile_order
             << ": nu = " << brief(to_double(prof.nu))
             << ", tau = " << brief(to_double(prof.tau)) << "\n";
    if (prof.nu > 0 && prof.tau > 0) {
      freq_ = freq_.with_certificate({prof.nu, prof.tau});
    }
  }

  void expand_and_write() {
    if (maximal_ || lower_) return;
    if (cfg_.problem == ProblemKind::kMaximal) {
      MaximalModel<Real> model(potential_, freq_, gamma_, cfg_.order);
      maximal_ = expand(model, np_);
    } else {
      const auto topo = topology();
      std::vector<Real> roots;
      try {
        roots = find_beta0(potential_, topo);
      } catch (const DegenerateAverage&) {
        summary_ << "warning: beta0 average vanishes identically; trying beta0 = 0\n";
        roots = {Real(0)};
      }
      {
        TableFile t(out_, "beta0.tsv", written_);
        *t << "index\tbeta0\tnondegeneracy\n";
        for (std::size_t i = 0; i < roots.size(); ++i) {
          Real c(0);
          try {
            c = nondegeneracy_constant(potential_, topo, roots[i],
                                       std::optional<Real>(Real(0)));
          } catch (const NondegeneracyFailure&) {
          }
          *t << i << '\t' << str(roots[i]) << '\t' << str(c) << '\n';
        }
      }
      if (cfg_.beta0_index >= static_cast<int>(roots.size())) {
        throw ConfigError({"beta0_index: only " + std::to_string(roots.size()) +
                           " roots available"});
      }
      const Real beta0 = roots[static_cast<std::size_t>(cfg_.beta0_index)];
      lower_ = expand_lower(potential_, freq_, topo, gamma_, beta0, cfg_.order, np_);
      summary_ << "beta0 = " << brief(to_double(beta0)) << " (root "
               << cfg_.beta0_index << " of " << roots.size()
               << "), nondegeneracy constant = "
               << brief(to_double(lower_->nondeg_constant)) << "\n";
      if (!lower_->k_average_log.empty()) {
        TableFile t(out_, "k_average.tsv", written_);
        *t << "n\tk_average\tscale\n";
        for (const auto& e : lower_->k_average_log) {
          *t << e.n << '\t' << str(e.value) << '\t' << str(e.scale) << '\n';
        }
      }
    }
    {
      SeriesDump<Real> dump;
      dump.domain_dim = freq_.dim();
      dump.range_dim = cfg_.dimension;
      dump.coeffs = series();
      dump.mu = maximal_ ? maximal_->mu : lower_->mu;
      if (lower_) dump.beta = lower_->beta;
      TableFile t(out_, "coefficients.tsv", written_);
      write_dump(*t, dump);
    }
    {
      TableFile t(out_, "norms.tsv", written_);
      *t << "n\tnorm\tmu_abs\tdegree\n";
      for (const auto& e : norm_log()) {
        *t << e.n << '\t' << str(e.norm) << '\t' << str(e.mu_abs) << '\t'
           << e.attained_degree << '\n';
      }
    }
    {
      TableFile t(out_, "solves.tsv", written_);
      *t << "n\tnorm_A\tnorm_B\tdegree_B\tmax_inverse_multiplier\tlemma_bound\t"
            "near_resonance\n";
      for (const auto& s : solve_log()) {
        *t << s.n << '\t' << str(s.norm_A) << '\t' << str(s.norm_B) << '\t'
           << s.degree_B << '\t' << str(s.max_inverse_multiplier) << '\t'
           << (s.lemma_bound ? str(*s.lemma_bound) : std::string("-")) << '\t'
           << (s.near_resonance ? 1 : 0) << '\n';
      }
    }
    const auto audit = degree_audit(series(), degree_budget());
    const auto& last = norm_log().back();
    summary_ << "expanded to order " << cfg_.order
             << ": ||last|| = " << brief(to_double(last.norm))
             << ", degree audit " << (audit.ok() ? "ok" : "FAILED") << "\n";
    const auto& warnings = maximal_ ? maximal_->warnings : lower_->warnings;
    for (const auto& w : warnings) summary_ << "warning: " << w << "\n";
  }

  void residuals() {
    std::vector<Real> eps;
    for (const auto& s : cfg_.eps_grid) eps.push_back(num(s));
    std::vector<int> orders = cfg_.residual_orders;
    if (orders.empty()) orders.push_back(std::min(2, cfg_.order));
    TableFile t(out_, "residuals.tsv", written_);
    *t << "n_trunc\teps\tresidual\n";
    for (int nt : orders) {
      const auto pts =
          maximal_ ? residual(MaximalModel<Real>(potential_, freq_, gamma_, cfg_.order),
                              *maximal_, nt, std::span<const Real>(eps), np_)
                   : residual_lower(potential_, freq_, topology(), gamma_, *lower_,
                                    nt, std::span<const Real>(eps), np_);
      for (const auto& p : pts) {
        *t << nt << '\t' << str(p.eps) << '\t' << str(p.value) << '\n';
      }
      summary_ << "residual N_trunc = " << nt << ": slope ";
      try {
        summary_ << brief(residual_order_fit<Real>(pts)) << " (expected "
                 << nt + 1 << ")\n";
      } catch (const InsufficientData& e) {
        summary_ << "n/a (" << e.what() << ")\n";
      }
    }
  }

  void gevrey() {
    const int N = cfg_.order;
    const auto window = cfg_.gevrey_window.value_or(
        std::pair{std::max(3, N / 3), N});
    TableFile t(out_, "fit.tsv", written_);
    *t << "A\tR\tsigma\tn_lo\tn_hi\trms\tstirling_sigma\tskipped\n";
    try {
      const auto pts = log_norms(norm_log());
      const auto fit = gevrey_fit(pts, window.first, window.second);
      *t << dstr(fit.A) << '\t' << dstr(fit.R) << '\t' << dstr(fit.sigma) << '\t'
         << fit.n_lo << '\t' << fit.n_hi << '\t' << dstr(fit.residual_rms) << '\t'
         << dstr(fit.stirling_sigma) << '\t';
      for (std::size_t i = 0; i < fit.skipped.size(); ++i) {
        *t << (i ? "," : "") << fit.skipped[i];
      }
      *t << '\n';
      summary_ << "gevrey fit on " << fit.n_lo << ".." << fit.n_hi
               << ": sigma = " << brief(fit.sigma) << ", R = " << brief(fit.R)
               << ", A = " << brief(fit.A) << ", rms = " << brief(fit.residual_rms)
               << "\n";
    } catch (const InsufficientData& e) {
      summary_ << "gevrey fit skipped: " << e.what() << "\n";
    }
  }

  void bounds() {
    const auto& cert = freq_.certificate();
    TableFile t(out_, "bounds.tsv", written_);
    *t << "check\tvalue\n";
    int violations = 0;
    for (const auto& s : solve_log()) {
      if (s.lemma_bound && s.norm_A > *s.lemma_bound * s.norm_B * Real(1 + 1e-12)) {
        ++violations;
      }
    }
    *t << "lemma_bound_violations\t" << violations << '\n';
    const auto audit = degree_audit(series(), degree_budget());
    *t << "degree_violations\t" << audit.violations.size() << '\n';
    summary_ << "solve bound violations: " << violations
             << ", degree violations: " << audit.violations.size() << "\n";
    if (!cert) {
      summary_ << "no diophantine certificate; inductive check skipped\n";
      return;
    }
    const auto kind = cfg_.problem == ProblemKind::kMaximal
                          ? ConditionKind::kMaximal
                          : (cfg_.problem == ProblemKind::kLowerConservative
                                 ? ConditionKind::kLowerConservative
                                 : ConditionKind::kLowerDissipative);
    const auto scale = find_inductive_scale(
        kind, to_double(cert->tau), to_double(cert->nu), degree_budget(),
        to_double(potential_.upsilon()), to_double(gamma_), to_double(np_.rho),
        to_double(np_.r));
    *t << "eta\t" << dstr(scale.eta) << '\n'
       << "sigma\t" << dstr(scale.inputs.sigma) << '\n'
       << "A\t" << dstr(scale.inputs.A) << '\n'
       << "B\t" << dstr(scale.inputs.B) << '\n'
       << "conditions_pass\t" << (scale.found ? 1 : 0) << '\n';
    int bound_fail = 0;
    if (scale.found) {
      const double log_eta = std::log(scale.eta);
      for (const auto& e : norm_log()) {
        if (e.n < 4 || e.norm == 0) continue;
        const double lhs = log_abs(e.norm) + e.n * log_eta;
        const double rhs = std::log(scale.inputs.B) +
                           scale.inputs.sigma * std::lgamma(e.n + 1.0);
        if (lhs > rhs) ++bound_fail;
      }
    }
    *t << "scaled_norm_violations\t" << bound_fail << '\n';
    summary_ << "inductive conditions: "
             << (scale.found ? "pass at eta = " + brief(scale.eta) : std::string("not met"))
             << ", scaled norm violations (n >= 4): " << bound_fail << "\n";
  }

  const RunConfig& cfg_;
  fs::path out_;
  std::ostream& summary_;
  Potential<Real> potential_;
  Frequency<Real> freq_;
  Real gamma_;
  NormParams<Real> np_;
  std::optional<MaximalExpansion<Real>> maximal_;
  std::optional<LowerExpansion<Real>> lower_;
  std::vector<std::string> written_;
};

}  // namespace

int run(Verb verb, const RunConfig& config, const RunOptions& options,
        std::ostream& summary, std::ostream& errors) {
  try {
    const int bits = options.precision_bits.value_or(config.precision_bits);
    if (bits < 53) throw ConfigError({"precision_bits: must be >= 53"});
    if (options.threads < 1) throw ConfigError({"threads: must be >= 1"});
    const fs::path out = options.out_dir.value_or(fs::path(config.output_dir));
    if (bits == 53) {
      Pipeline<double>(config, out, summary).execute(verb);
    } else {
      PrecisionScope scope(bits);
      Pipeline<MpReal>(config, out, summary).execute(verb);
    }
    return 0;
  } catch (const ConfigError& e) {
    errors << "config error:\n";
    for (const auto& v : e.violations()) errors << "  " << v << "\n";
    return 2;
  } catch (const std::exception& e) {
    errors << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace lindstedt::cli
