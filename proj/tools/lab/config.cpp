#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/spectral_stats.hpp"

namespace lab {

namespace {

// Boxes whose full eigenvector set is kept in memory.
constexpr std::size_t kMaxBox = 4096;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string show(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Typed, path-aware view of one JSON object. Every accessor records the key
// as consumed and copies the effective value into `out`; finish() rejects
// whatever was not consumed.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    out = json::object();
  }

  const std::string& path() const noexcept { return path_; }
  std::string at(std::string_view key) const { return join(path_, key); }
  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json& raw(std::string_view key) {
    const std::string k(key);
    if (!j_.contains(k)) throw ConfigError(at(key), "required key is missing");
    used_.insert(k);
    return j_.at(k);
  }

  double number(std::string_view key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "expected a finite number");
    out[std::string(key)] = x;
    return x;
  }
  double number(std::string_view key, double fallback) {
    if (!has(key)) {
      out[std::string(key)] = fallback;
      return fallback;
    }
    return number(key);
  }

  std::uint64_t integer(std::string_view key, std::uint64_t min_value = 0) {
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
      throw ConfigError(at(key), "expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < min_value)
      throw ConfigError(at(key), "must be >= " + std::to_string(min_value) + " (got " +
                                     std::to_string(x) + ")");
    out[std::string(key)] = x;
    return x;
  }
  std::uint64_t integer(std::string_view key, std::uint64_t fallback, std::uint64_t min_value) {
    if (!has(key)) {
      out[std::string(key)] = fallback;
      return fallback;
    }
    return integer(key, min_value);
  }

  bool boolean(std::string_view key, bool fallback) {
    if (!has(key)) {
      out[std::string(key)] = fallback;
      return fallback;
    }
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    out[std::string(key)] = v.get<bool>();
    return v.get<bool>();
  }

  std::string string(std::string_view key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    out[std::string(key)] = v;
    return v.get<std::string>();
  }
  std::string string(std::string_view key, const std::string& fallback) {
    if (!has(key)) {
      out[std::string(key)] = fallback;
      return fallback;
    }
    return string(key);
  }

  std::vector<double> numbers(std::string_view key, std::size_t min_size) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
    if (v.size() < min_size)
      throw ConfigError(at(key), "needs at least " + std::to_string(min_size) + " entries");
    std::vector<double> xs;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      xs.push_back(v[i].get<double>());
    }
    out[std::string(key)] = xs;
    return xs;
  }

  std::vector<std::size_t> sizes(std::string_view key, std::size_t min_value) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty())
      throw ConfigError(at(key), "expected a non-empty array of integers");
    std::vector<std::size_t> xs;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_number_unsigned()) throw ConfigError(p, "expected a non-negative integer");
      const auto x = v[i].get<std::size_t>();
      if (x < min_value) throw ConfigError(p, "must be >= " + std::to_string(min_value));
      xs.push_back(x);
    }
    out[std::string(key)] = xs;
    return xs;
  }

  // Pairs [a, b] as used by density and gauge nodes.
  std::vector<std::pair<double, double>> pairs(std::string_view key) {
    const json& v = raw(key);
    if (!v.is_array() || v.size() < 2)
      throw ConfigError(at(key), "expected an array of at least two [x, y] pairs");
    std::vector<std::pair<double, double>> xs;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& e = v[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected [x, y]");
      xs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    out[std::string(key)] = v;
    return xs;
  }

  Reader object(std::string_view key) { return Reader(raw(key), at(key)); }

  void put(std::string_view key, json value) { out[std::string(key)] = std::move(value); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(join(path_, k), "unknown key");
  }

  json out;

private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

anderson::Interval read_interval(Reader& r, std::string_view key) {
  const auto xs = r.numbers(key, 2);
  if (xs.size() != 2) throw ConfigError(r.at(key), "expected [lo, hi]");
  if (!(xs[0] < xs[1])) throw ConfigError(r.at(key), "needs lo < hi");
  return {xs[0], xs[1]};
}

anderson::PotentialDistribution read_distribution(Reader& parent) {
  Reader r = parent.object("distribution");
  const std::string kind = r.string("kind");
  try {
    if (kind == "uniform") {
      const double lo = r.number("j_lo");
      const double hi = r.number("j_hi");
      r.finish();
      parent.put("distribution", r.out);
      return anderson::PotentialDistribution::uniform(lo, hi);
    }
    if (kind == "piecewise_linear") {
      std::vector<anderson::DensityNode> nodes;
      for (const auto& [x, d] : r.pairs("nodes")) nodes.push_back({x, d});
      r.finish();
      parent.put("distribution", r.out);
      return anderson::PotentialDistribution::piecewise_linear(std::move(nodes));
    }
  } catch (const anderson::Error& e) {
    throw ConfigError(r.path(), e.what());
  }
  throw ConfigError(r.at("kind"), "expected \"uniform\" or \"piecewise_linear\"");
}

anderson::ApproxSequence read_alpha(Reader& parent) {
  Reader r = parent.object("alpha");
  const std::string kind = r.string("kind");
  auto positive = [&](std::string_view key) {
    const double x = r.number(key);
    if (!(x > 0)) throw ConfigError(r.at(key), "must be > 0 (got " + show(x) + ")");
    return x;
  };
  std::optional<anderson::ApproxSequence> a;
  try {
    if (kind == "exponential") {
      a = anderson::ApproxSequence::exponential(positive("gamma_bar"));
    } else if (kind == "power") {
      const double c = positive("c");
      a = anderson::ApproxSequence::power(c, positive("p"));
    } else if (kind == "harmonic") {
      a = anderson::ApproxSequence::harmonic(positive("c"));
    } else if (kind == "table") {
      a = anderson::ApproxSequence::table(r.numbers("values", 1));
    } else {
      throw ConfigError(r.at("kind"),
                        "expected \"exponential\", \"power\", \"harmonic\" or \"table\"");
    }
  } catch (const anderson::Error& e) {
    throw ConfigError(r.path(), e.what());
  }
  if (r.boolean("clamp", false)) a = anderson::clamp_sequence(*a);
  r.finish();
  parent.put("alpha", r.out);
  return *a;
}

anderson::GaugeFunction read_gauge(Reader& parent) {
  Reader r = parent.object("gauge");
  const std::string kind = r.string("kind");
  std::optional<anderson::GaugeFunction> g;
  try {
    if (kind == "lebesgue") {
      g = anderson::GaugeFunction::lebesgue();
    } else if (kind == "power") {
      const double s = r.number("s");
      if (!(s > 0 && s <= 1)) throw ConfigError(r.at("s"), "must satisfy 0 < s <= 1");
      g = anderson::GaugeFunction::power(s);
    } else if (kind == "reciprocal_log") {
      g = anderson::GaugeFunction::reciprocal_log();
    } else if (kind == "table") {
      std::vector<anderson::GaugeNode> nodes;
      for (const auto& [t, rho] : r.pairs("nodes")) nodes.push_back({t, rho});
      const bool claim = r.boolean("claim_rho_over_t_nonincreasing", false);
      g = anderson::GaugeFunction::table(std::move(nodes), claim);
    } else {
      throw ConfigError(r.at("kind"),
                        "expected \"lebesgue\", \"power\", \"reciprocal_log\" or \"table\"");
    }
  } catch (const anderson::Error& e) {
    throw ConfigError(r.path(), e.what());
  }
  r.finish();
  parent.put("gauge", r.out);
  return *g;
}

GridSpec read_grid(Reader& parent, double max_step = 0.0) {
  Reader r = parent.object("energies");
  GridSpec g;
  g.lo = r.number("lo");
  g.hi = r.number("hi");
  if (!(g.lo < g.hi)) throw ConfigError(r.at("hi"), "needs lo < hi");
  if (r.has("step") == r.has("points"))
    throw ConfigError(r.path(), "give exactly one of \"step\" and \"points\"");
  if (r.has("step")) {
    const double h = r.number("step");
    if (!(h > 0)) throw ConfigError(r.at("step"), "must be > 0");
    g.points = anderson::uniform_grid(g.lo, g.hi, h).size();
  } else {
    g.points = r.integer("points", 2);
  }
  if (g.points > 1000000) throw ConfigError(r.path(), "more than 10^6 grid points");
  const double step = (g.hi - g.lo) / static_cast<double>(g.points - 1);
  if (max_step > 0 && step > max_step * (1 + 1e-9))
    throw ConfigError(r.path(), "grid spacing " + show(step) + " exceeds " + show(max_step));
  r.finish();
  parent.put("energies", r.out);
  return g;
}

double read_tau(Reader& r, double fallback, bool strictly_positive) {
  const double tau = r.number("tau", fallback);
  if (!(tau >= 0 && tau < 1))
    throw ConfigError(r.at("tau"), "must satisfy 0 ≤ τ < 1 (got " + show(tau) + ")");
  if (strictly_positive && tau == 0)
    throw ConfigError(r.at("tau"), "must satisfy 0 < τ < 1 for this experiment");
  return tau;
}

void read_gamma_table(Reader& r, Config& c, bool interpolated) {
  c.gamma_n = r.integer("gamma_n", 20000, 1000);
  c.gamma_trials = r.integer("gamma_trials", 4, 2);
  if (interpolated) c.gamma_points = r.integer("gamma_points", 41, 2);
}

void require_inside_spectrum(const Config& c, Reader& r) {
  const auto S = anderson::essential_spectrum(*c.distribution);
  if (!S.strictly_contains(*c.interval))
    throw ConfigError(r.at("interval"), "must lie strictly inside the essential spectrum [" +
                                            show(S.lo) + ", " + show(S.hi) + "]");
}

}  // namespace

const std::vector<std::pair<Experiment, std::string_view>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string_view>> names{
      {Experiment::lyapunov, "lyapunov"},         {Experiment::ids, "ids"},
      {Experiment::wegner, "wegner"},             {Experiment::minami, "minami"},
      {Experiment::localization, "localization"}, {Experiment::blockmatch, "blockmatch"},
      {Experiment::khinchin, "khinchin"},         {Experiment::jarnik, "jarnik"},
      {Experiment::nonlyap, "nonlyap"},           {Experiment::propa, "propa"}};
  return names;
}

std::string_view to_string(Experiment e) {
  for (const auto& [k, name] : experiment_names())
    if (k == e) return name;
  return "?";
}

std::string_view describe(Experiment e) {
  switch (e) {
    case Experiment::lyapunov: return "Lyapunov exponent estimates over an energy grid";
    case Experiment::ids: return "Monte Carlo integrated density of states";
    case Experiment::wegner: return "IDS density against the potential density bound";
    case Experiment::minami: return "tail of the eigenvalue count in a short interval";
    case Experiment::localization: return "centers, counting band and decay of box eigenvectors";
    case Experiment::blockmatch: return "box eigenvalues against a dyadic block spectrum";
    case Experiment::khinchin: return "covered measure of truncated limsup sets";
    case Experiment::jarnik: return "series and integrability tests for a gauge";
    case Experiment::nonlyap: return "finite-horizon scan for slow transfer-matrix growth";
    case Experiment::propa: return "transfer-matrix dip at localized eigenvalues";
  }
  return "";
}

std::vector<double> GridSpec::values() const {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i)
    xs[i] = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                             static_cast<double>(points - 1);
  return xs;
}

Config parse_config(const json& doc) {
  Reader r(doc, "");
  Config c;
  const std::string name = r.string("experiment");
  bool known = false;
  for (const auto& [e, n] : experiment_names())
    if (n == name) {
      c.experiment = e;
      known = true;
    }
  if (!known) throw ConfigError("experiment", "unknown experiment \"" + name + "\"");

  c.master_seed = r.integer("master_seed");
  c.workers = static_cast<unsigned>(r.integer("workers", 0, 0));
  c.output_dir = r.string("output_dir", "out");
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");

  const bool needs_distribution = c.experiment != Experiment::jarnik;
  if (needs_distribution) c.distribution = read_distribution(r);

  switch (c.experiment) {
    case Experiment::lyapunov:
      c.energies = read_grid(r);
      c.n = r.integer("n", 1000);
      c.trials = r.integer("trials", 2);
      break;

    case Experiment::ids:
    case Experiment::wegner: {
      c.energies = read_grid(r, c.experiment == Experiment::wegner ? 0.01 : 0.0);
      const auto S = anderson::essential_spectrum(*c.distribution);
      if (c.energies->lo < S.lo - 1 || c.energies->hi > S.hi + 1)
        throw ConfigError("energies", "grid must stay within 1 of the essential spectrum");
      c.L = r.integer("L", 16);
      c.trials = r.integer("trials", 2);
      if (c.experiment == Experiment::wegner) {
        c.tol = r.number("tol", 0.15);
        if (!(c.tol >= 0)) throw ConfigError("tol", "must be >= 0");
        if (r.has("interval")) {
          c.interval = read_interval(r, "interval");
          require_inside_spectrum(c, r);
        }
      }
      break;
    }

    case Experiment::minami:
      c.L = r.integer("L", 1);
      c.interval = read_interval(r, "interval");
      c.r = static_cast<unsigned>(r.integer("r", 2, 0));
      c.trials = r.integer("trials", 1000);
      break;

    case Experiment::localization:
      c.n = r.integer("n", 16);
      if (c.n > kMaxBox) throw ConfigError("n", "must be <= " + std::to_string(kMaxBox));
      c.trials = r.integer("trials", 1);
      c.tau = read_tau(r, 0.5, false);
      c.decay_K = r.number("decay_K", 0.0);
      if (c.decay_K < 0) throw ConfigError("decay_K", "must be >= 0 (0 selects ceil(8 / min gamma_hat))");
      c.counting_L = r.has("counting_L") ? r.sizes("counting_L", 1)
                                         : std::vector<std::size_t>{64, 128, 256};
      if (!r.has("counting_L")) r.put("counting_L", c.counting_L);
      for (std::size_t i = 0; i < c.counting_L.size(); ++i)
        if (c.counting_L[i] > c.n)
          throw ConfigError("counting_L[" + std::to_string(i) + "]", "exceeds n");
      c.tol = r.number("tol", 1e-12);
      if (!(c.tol > 0)) throw ConfigError("tol", "must be > 0");
      read_gamma_table(r, c, true);
      break;

    case Experiment::blockmatch:
      c.m = static_cast<unsigned>(r.integer("m", 1));
      if (c.m > 5) throw ConfigError("m", "must be <= 5 (eigenvectors of the whole box are kept)");
      c.padding = r.integer("padding", std::size_t{1} << (c.m + 1), 1);
      c.trials = r.integer("trials", 1);
      c.tol = r.number("tol", 1e-13);
      if (!(c.tol > 0)) throw ConfigError("tol", "must be > 0");
      break;

    case Experiment::khinchin: {
      c.interval = read_interval(r, "interval");
      require_inside_spectrum(c, r);
      c.alpha = read_alpha(r);
      c.K = r.integer("K", 2);
      if (c.K > 200000) throw ConfigError("K", "must be <= 200000");
      if (r.has("checkpoints")) {
        c.checkpoints = r.sizes("checkpoints", 1);
        for (std::size_t i = 0; i < c.checkpoints.size(); ++i)
          if (c.checkpoints[i] > c.K)
            throw ConfigError("checkpoints[" + std::to_string(i) + "]", "exceeds K");
      } else {
        for (std::size_t k = 16; k < c.K; k *= 2) c.checkpoints.push_back(k);
        c.checkpoints.push_back(c.K);
        r.put("checkpoints", c.checkpoints);
      }
      c.padding = r.integer("padding", 512, 0);
      c.trials = r.integer("trials", 1);
      c.tol = r.number("tol", 1e-12);
      if (!(c.tol > 0)) throw ConfigError("tol", "must be > 0");
      break;
    }

    case Experiment::jarnik:
      c.gauge = read_gauge(r);
      c.alpha = read_alpha(r);
      c.K = r.integer("K", 10);
      if (c.K > 100000000) throw ConfigError("K", "must be <= 10^8");
      break;

    case Experiment::nonlyap:
      c.energies = read_grid(r);
      c.n = r.integer("n", 1000);
      c.tau = read_tau(r, 0.5, false);
      c.trials = r.integer("trials", 1);
      read_gamma_table(r, c, false);
      break;

    case Experiment::propa:
      c.n = r.integer("n", 16);
      if (c.n > kMaxBox) throw ConfigError("n", "must be <= " + std::to_string(kMaxBox));
      c.k_lo = r.integer("k_lo", 1);
      c.k_hi = r.integer("k_hi", 1);
      if (c.k_hi < c.k_lo) throw ConfigError("k_hi", "must be >= k_lo");
      if (2 * c.k_hi > c.n) throw ConfigError("k_hi", "needs 2 k_hi <= n");
      c.tau = read_tau(r, 0.5, true);
      c.trials = r.integer("trials", 1);
      c.tol = r.number("tol", 1e-12);
      if (!(c.tol > 0)) throw ConfigError("tol", "must be > 0");
      read_gamma_table(r, c, true);
      break;
  }

  if (c.experiment == Experiment::minami) {
    if (c.interval->length() <= 0) throw ConfigError("interval", "must have positive length");
  }
  r.finish();
  c.normalized = r.out;
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace lab
