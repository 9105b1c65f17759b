#include "rgfdgd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace rgfdgd {
namespace {

using Entries = std::map<std::string, std::string>;  // "section.key" -> value

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

Entries parse_entries(const std::string& text) {
  Entries out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", fmt::format("line {}: unterminated section header", lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", fmt::format("line {}: expected key = value", lineno));
    }
    if (section.empty()) {
      throw ConfigError("", fmt::format("line {}: key outside of any section", lineno));
    }
    std::string key = section + "." + trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!out.emplace(key, value).second) {
      throw ConfigError(key, "duplicate key");
    }
  }
  return out;
}

class Reader {
 public:
  explicit Reader(Entries e) : entries_(std::move(e)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_.push_back(key);
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    std::string v = str(key, "");
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ConfigError(key, fmt::format("'{}' is not a number", v));
    }
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    std::string v = str(key, "");
    try {
      std::size_t pos = 0;
      long long d = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ConfigError(key, fmt::format("'{}' is not an integer", v));
    }
  }

  nlohmann::json json(const std::string& key) {
    std::string v = str(key, "");
    try {
      return nlohmann::json::parse(v);
    } catch (const std::exception&) {
      throw ConfigError(key, fmt::format("'{}' is not a valid list", v));
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : entries_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw ConfigError(key, "unknown key");
      }
    }
  }

 private:
  Entries entries_;
  std::vector<std::string> used_;
};

std::vector<std::vector<double>> parse_points(const std::string& key,
                                              const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return j.get<std::vector<std::vector<double>>>();
  } catch (const std::exception&) {
    throw ConfigError(key, fmt::format("'{}' is not a list of points", text));
  }
}

std::string points_json(const std::vector<std::vector<double>>& pts) {
  std::string s = "[";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ", ";
    s += "[";
    for (std::size_t j = 0; j < pts[i].size(); ++j) {
      if (j) s += ", ";
      s += fmt::format("{}", pts[i][j]);
    }
    s += "]";
  }
  return s + "]";
}

std::uint64_t nonnegative_seed(Reader& r, const std::string& key, std::uint64_t fallback) {
  std::int64_t v = r.integer(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError(key, "seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

void read_run_config(Reader& r, RunConfig& c) {
  // [graph]
  std::string kind = r.str("graph.kind", "edges");
  if (kind == "edges") {
    c.graph.kind = GraphSpec::Kind::kEdges;
  } else if (kind == "ring") {
    c.graph.kind = GraphSpec::Kind::kRing;
  } else {
    throw ConfigError("graph.kind", fmt::format("'{}' is not one of edges, ring", kind));
  }
  c.graph.n = static_cast<int>(r.integer("graph.n", c.graph.n));
  if (c.graph.n < 1) throw ConfigError("graph.n", "need at least one agent");
  c.graph.edges.clear();
  if (r.has("graph.edges")) {
    auto j = r.json("graph.edges");
    try {
      for (const auto& pair : j) {
        auto v = pair.get<std::vector<int>>();
        if (v.size() != 2) throw std::invalid_argument("pair");
        c.graph.edges.push_back({v[0], v[1]});
      }
    } catch (const std::exception&) {
      throw ConfigError("graph.edges", "expected a list of [i, j] pairs");
    }
  }

  // [weights]
  c.weight_scheme = r.str("weights.scheme", c.weight_scheme);
  if (c.weight_scheme != "equal_neighbor") {
    throw ConfigError("weights.scheme", fmt::format("'{}' is not supported (equal_neighbor)",
                                                    c.weight_scheme));
  }
  c.epsilon = r.number("weights.epsilon", c.epsilon);
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) {
    throw ConfigError("weights.epsilon", fmt::format("{} is outside (0, 1)", c.epsilon));
  }

  // [problem]
  std::string pkind = r.str("problem.kind", "polynomial");
  if (pkind == "polynomial") {
    c.problem.kind = ProblemSpec::Kind::kPolynomial;
  } else if (pkind == "logistic") {
    c.problem.kind = ProblemSpec::Kind::kLogistic;
  } else if (pkind == "quadratic") {
    c.problem.kind = ProblemSpec::Kind::kQuadratic;
  } else {
    throw ConfigError("problem.kind",
                      fmt::format("'{}' is not one of polynomial, logistic, quadratic", pkind));
  }
  c.problem.dim = static_cast<int>(r.integer("problem.dim", c.problem.dim));
  if (c.problem.dim < 1) throw ConfigError("problem.dim", "dimension must be >= 1");
  c.problem.samples_per_agent =
      static_cast<int>(r.integer("problem.samples_per_agent", c.problem.samples_per_agent));
  if (c.problem.samples_per_agent < 1) {
    throw ConfigError("problem.samples_per_agent", "need at least one sample");
  }
  if (r.has("problem.regularization")) {
    auto j = r.json("problem.regularization");
    try {
      c.problem.regularization =
          j.is_array() ? j.get<std::vector<double>>() : std::vector<double>{j.get<double>()};
    } catch (const std::exception&) {
      throw ConfigError("problem.regularization", "expected a number or a list of numbers");
    }
    if (c.problem.regularization.empty() ||
        std::any_of(c.problem.regularization.begin(), c.problem.regularization.end(),
                    [](double v) { return !(v > 0.0); })) {
      throw ConfigError("problem.regularization", "values must be positive");
    }
  }
  c.problem.separation = r.number("problem.separation", c.problem.separation);
  c.problem.data_seed = nonnegative_seed(r, "problem.data_seed", c.problem.data_seed);
  c.problem.data_dir = r.str("problem.data_dir", c.problem.data_dir);
  std::string mask = r.str("problem.mask", "none");
  if (mask == "none") {
    c.problem.mask = false;
  } else if (mask == "fractional") {
    c.problem.mask = true;
  } else {
    throw ConfigError("problem.mask", fmt::format("'{}' is not one of none, fractional", mask));
  }
  if (r.has("problem.mask_range")) {
    auto j = r.json("problem.mask_range");
    std::vector<double> range;
    try {
      range = j.get<std::vector<double>>();
    } catch (const std::exception&) {
    }
    if (range.size() != 2 || !(range[0] <= range[1])) {
      throw ConfigError("problem.mask_range", "expected [lo, hi] with lo <= hi");
    }
    c.problem.mask_lo = range[0];
    c.problem.mask_hi = range[1];
  }
  c.problem.mask_seed = nonnegative_seed(r, "problem.mask_seed", c.problem.mask_seed);

  // [algorithm]
  c.mu = r.number("algorithm.mu", c.mu);
  if (!(c.mu > 0.0) || !std::isfinite(c.mu)) {
    throw ConfigError("algorithm.mu",
                      fmt::format("{} must be positive (the oracle divides by mu)", c.mu));
  }
  const double a = r.number("algorithm.step_a", c.schedule.a());
  const double p = r.number("algorithm.step_p", c.schedule.p());
  const double k0 = r.number("algorithm.step_k0", c.schedule.k0());
  try {
    c.schedule = StepSchedule(a, p, k0);
  } catch (const InvalidArgument& e) {
    std::string field = !(p > 0.5 && p <= 1.0) ? "algorithm.step_p"
                        : !(a >= 0.0)           ? "algorithm.step_a"
                                                : "algorithm.step_k0";
    throw ConfigError(field, e.what());
  }
  c.iterations = r.integer("algorithm.iterations", c.iterations);
  if (c.iterations < 1) throw ConfigError("algorithm.iterations", "must be >= 1");
  c.seed = nonnegative_seed(r, "algorithm.seed", c.seed);

  std::string cadence = r.str("algorithm.cadence", "auto");
  if (cadence == "auto") {
    c.cadence = {Cadence::Kind::kAuto, 1};
  } else if (cadence == "log") {
    c.cadence = {Cadence::Kind::kLog, 1};
  } else if (cadence.rfind("every:", 0) == 0) {
    std::int64_t every = 0;
    try {
      every = std::stoll(cadence.substr(6));
    } catch (const std::exception&) {
    }
    if (every < 1) throw ConfigError("algorithm.cadence", "every:N needs N >= 1");
    c.cadence = {Cadence::Kind::kEvery, every};
  } else {
    throw ConfigError("algorithm.cadence",
                      fmt::format("'{}' is not one of auto, log, every:N", cadence));
  }

  std::string init = r.str("algorithm.init", "zeros");
  c.init = InitialStateSpec{};
  if (init == "zeros") {
    c.init.kind = InitialStateSpec::Kind::kZeros;
  } else if (init.rfind("box:", 0) == 0) {
    c.init.kind = InitialStateSpec::Kind::kBox;
    auto rest = init.substr(4);
    auto colon = rest.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("box");
      c.init.box_lo = std::stod(rest.substr(0, colon));
      c.init.box_hi = std::stod(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("algorithm.init", "box spec must look like box:lo:hi");
    }
    if (!(c.init.box_lo <= c.init.box_hi)) {
      throw ConfigError("algorithm.init", "box needs lo <= hi");
    }
  } else if (init.rfind("points:", 0) == 0) {
    c.init.kind = InitialStateSpec::Kind::kPoints;
    c.init.points = parse_points("algorithm.init", init.substr(7));
  } else {
    throw ConfigError("algorithm.init",
                      fmt::format("'{}' is not one of zeros, box:lo:hi, points:[...]", init));
  }
  std::string init_y = r.str("algorithm.init_y", "zeros");
  if (init_y.rfind("points:", 0) == 0) {
    c.init.y_points = parse_points("algorithm.init_y", init_y.substr(7));
  } else if (init_y != "zeros") {
    throw ConfigError("algorithm.init_y", "expected zeros or points:[...]");
  }

  // [output]
  c.out_dir = r.str("output.dir", c.out_dir);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Reader r(parse_entries(text));
  RunConfig c;
  read_run_config(r, c);
  r.reject_unknown();
  return c;
}

std::string serialize_run_config(const RunConfig& c) {
  std::string s;
  auto line = [&s](const std::string& key, const std::string& value) {
    s += key + " = " + value + "\n";
  };
  s += "[graph]\n";
  line("kind", c.graph.kind == GraphSpec::Kind::kRing ? "ring" : "edges");
  line("n", std::to_string(c.graph.n));
  if (!c.graph.edges.empty()) {
    std::string e = "[";
    for (std::size_t i = 0; i < c.graph.edges.size(); ++i) {
      if (i) e += ", ";
      e += fmt::format("[{}, {}]", c.graph.edges[i].from, c.graph.edges[i].to);
    }
    line("edges", e + "]");
  }

  s += "\n[weights]\n";
  line("scheme", c.weight_scheme);
  line("epsilon", fmt::format("{}", c.epsilon));

  s += "\n[problem]\n";
  switch (c.problem.kind) {
    case ProblemSpec::Kind::kPolynomial: line("kind", "polynomial"); break;
    case ProblemSpec::Kind::kLogistic: line("kind", "logistic"); break;
    case ProblemSpec::Kind::kQuadratic: line("kind", "quadratic"); break;
  }
  line("dim", std::to_string(c.problem.dim));
  line("samples_per_agent", std::to_string(c.problem.samples_per_agent));
  {
    std::string reg = "[";
    for (std::size_t i = 0; i < c.problem.regularization.size(); ++i) {
      if (i) reg += ", ";
      reg += fmt::format("{}", c.problem.regularization[i]);
    }
    line("regularization", reg + "]");
  }
  line("separation", fmt::format("{}", c.problem.separation));
  line("data_seed", std::to_string(c.problem.data_seed));
  if (!c.problem.data_dir.empty()) line("data_dir", c.problem.data_dir);
  line("mask", c.problem.mask ? "fractional" : "none");
  line("mask_range", fmt::format("[{}, {}]", c.problem.mask_lo, c.problem.mask_hi));
  line("mask_seed", std::to_string(c.problem.mask_seed));

  s += "\n[algorithm]\n";
  line("mu", fmt::format("{}", c.mu));
  line("step_a", fmt::format("{}", c.schedule.a()));
  line("step_p", fmt::format("{}", c.schedule.p()));
  line("step_k0", fmt::format("{}", c.schedule.k0()));
  line("iterations", std::to_string(c.iterations));
  line("seed", std::to_string(c.seed));
  switch (c.cadence.kind) {
    case Cadence::Kind::kAuto: line("cadence", "auto"); break;
    case Cadence::Kind::kLog: line("cadence", "log"); break;
    case Cadence::Kind::kEvery: line("cadence", fmt::format("every:{}", c.cadence.every)); break;
  }
  switch (c.init.kind) {
    case InitialStateSpec::Kind::kZeros: line("init", "zeros"); break;
    case InitialStateSpec::Kind::kBox:
      line("init", fmt::format("box:{}:{}", c.init.box_lo, c.init.box_hi));
      break;
    case InitialStateSpec::Kind::kPoints:
      line("init", "points:" + points_json(c.init.points));
      break;
  }
  if (!c.init.y_points.empty()) line("init_y", "points:" + points_json(c.init.y_points));

  if (!c.out_dir.empty()) {
    s += "\n[output]\n";
    line("dir", c.out_dir);
  }
  return s;
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kMu: return "mu";
    case SweepAxis::kAgents: return "n_agents";
    case SweepAxis::kDim: return "dim";
    case SweepAxis::kEpsilon: return "epsilon";
    case SweepAxis::kSeed: return "seed";
  }
  return "?";
}

SweepSpec parse_sweep_spec(const std::string& text) {
  Reader r(parse_entries(text));
  SweepSpec sweep;
  read_run_config(r, sweep.base);
  std::string axis = r.str("sweep.axis", "");
  if (axis == "mu") sweep.axis = SweepAxis::kMu;
  else if (axis == "n_agents") sweep.axis = SweepAxis::kAgents;
  else if (axis == "dim") sweep.axis = SweepAxis::kDim;
  else if (axis == "epsilon") sweep.axis = SweepAxis::kEpsilon;
  else if (axis == "seed") sweep.axis = SweepAxis::kSeed;
  else {
    throw ConfigError("sweep.axis",
                      fmt::format("'{}' is not one of mu, n_agents, dim, epsilon, seed", axis));
  }
  if (!r.has("sweep.values")) throw ConfigError("sweep.values", "missing");
  try {
    sweep.values = r.json("sweep.values").get<std::vector<double>>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("sweep.values", "expected a list of numbers");
  }
  if (sweep.values.empty()) throw ConfigError("sweep.values", "list is empty");
  sweep.seeds_per_point = static_cast<int>(r.integer("sweep.seeds_per_point", 1));
  if (sweep.seeds_per_point < 1) throw ConfigError("sweep.seeds_per_point", "must be >= 1");
  r.reject_unknown();
  // Validate every value up front so a typo fails before any run starts.
  for (double v : sweep.values) (void)sweep_cell(sweep, v, 0);
  return sweep;
}

RunConfig sweep_cell(const SweepSpec& sweep, double value, int seed_offset) {
  RunConfig c = sweep.base;
  auto as_int = [&](const char* what, int minimum) {
    if (value != std::floor(value) || value < minimum) {
      throw ConfigError("sweep.values",
                        fmt::format("{} must be an integer >= {}, got {}", what, minimum, value));
    }
    return static_cast<int>(value);
  };
  switch (sweep.axis) {
    case SweepAxis::kMu:
      if (!(value > 0.0)) throw ConfigError("sweep.values", "mu values must be positive");
      c.mu = value;
      break;
    case SweepAxis::kAgents:
      c.graph = GraphSpec{GraphSpec::Kind::kRing, as_int("n_agents", 2), {}};
      c.init.points.clear();
      c.init.y_points.clear();
      if (c.init.kind == InitialStateSpec::Kind::kPoints) c.init.kind = InitialStateSpec::Kind::kZeros;
      break;
    case SweepAxis::kDim:
      c.problem.dim = as_int("dim", 1);
      break;
    case SweepAxis::kEpsilon:
      if (!(value > 0.0 && value < 1.0)) {
        throw ConfigError("sweep.values", "epsilon values must lie in (0, 1)");
      }
      c.epsilon = value;
      break;
    case SweepAxis::kSeed:
      c.seed = static_cast<std::uint64_t>(as_int("seed", 0));
      break;
  }
  c.seed += static_cast<std::uint64_t>(seed_offset);
  return c;
}

DirectedGraph build_graph(const GraphSpec& spec) {
  try {
    if (spec.kind == GraphSpec::Kind::kRing) return DirectedGraph::ring(spec.n);
    return DirectedGraph::from_edges(spec.n, spec.edges);
  } catch (const InvalidArgument& e) {
    throw ConfigError(spec.kind == GraphSpec::Kind::kRing ? "graph.n" : "graph.edges", e.what());
  }
}

ProblemInstance build_problem(const ProblemSpec& spec, const DirectedGraph& g) {
  const int n = g.size();
  ProblemInstance p;
  switch (spec.kind) {
    case ProblemSpec::Kind::kPolynomial:
      if (n != 4) {
        throw ConfigError("problem.kind", fmt::format(
            "the polynomial problem has exactly 4 agents, graph has {}", n));
      }
      p = polynomial_example();
      break;
    case ProblemSpec::Kind::kLogistic: {
      LogisticDataset data;
      if (spec.data_dir.empty()) {
        data = synthetic_logistic_dataset(n, spec.dim, spec.samples_per_agent, 1.0,
                                          spec.data_seed, spec.separation);
      } else {
        for (int i = 1; i <= n; ++i) {
          auto path = std::filesystem::path(spec.data_dir) / fmt::format("agent_{}.csv", i);
          try {
            data.agents.push_back(load_agent_csv(path));
          } catch (const InvalidArgument& e) {
            throw ConfigError("problem.data_dir", e.what());
          }
        }
      }
      if (spec.regularization.size() == 1) {
        data.regularization.assign(n, spec.regularization.front());
      } else if (static_cast<int>(spec.regularization.size()) == n) {
        data.regularization = spec.regularization;
      } else {
        throw ConfigError("problem.regularization",
                          fmt::format("{} values for {} agents", spec.regularization.size(), n));
      }
      try {
        p = logistic_problem(data);
      } catch (const InvalidArgument& e) {
        throw ConfigError("problem", e.what());
      }
      break;
    }
    case ProblemSpec::Kind::kQuadratic:
      p = synthetic_quadratic_problem(n, spec.dim, spec.data_seed).problem;
      break;
  }
  if (spec.mask) {
    RngStream stream(spec.mask_seed, StreamPurpose::kMask, 0);
    p = privacy_split(p, g, spec.mask_lo, spec.mask_hi, stream).problem;
  }
  return p;
}

RunSetup materialize(const RunConfig& config) {
  DirectedGraph g = build_graph(config.graph);
  RunSetup setup;
  try {
    setup.weights = make_weight_set(g, config.epsilon);
  } catch (const InvalidArgument& e) {
    throw ConfigError("graph", e.what());
  }
  setup.problem = build_problem(config.problem, g);
  setup.mu = config.mu;
  setup.schedule = config.schedule;
  setup.iterations = config.iterations;
  setup.seed = config.seed;
  setup.cadence = config.cadence;
  setup.init = config.init;
  // Surface shape errors in the initial state as config errors.
  try {
    (void)initial_state(setup.init, g.size(), setup.problem.m, setup.seed);
  } catch (const InvalidArgument& e) {
    throw ConfigError("algorithm.init", e.what());
  }
  return setup;
}

}  // namespace rgfdgd
