#include <string>

#include "doctest.h"
#include "rgfdgd/config.hpp"

using namespace rgfdgd;

namespace {

const char* kBase = R"(# comment line
[graph]
kind = edges
n = 4
edges = [[1, 2], [2, 3], [3, 4], [4, 1], [1, 3], [4, 2]]

[weights]
scheme = equal_neighbor
epsilon = 0.1   # trailing comment

[problem]
kind = polynomial

[algorithm]
mu = 0.01
step_a = 1
step_p = 0.6
iterations = 10000
seed = 3
init = box:-5:5

[output]
dir = out/simple
)";

std::string with_line(const std::string& section, const std::string& line) {
  std::string text = kBase;
  const auto pos = text.find("[" + section + "]");
  const auto eol = text.find('\n', pos);
  text.insert(eol + 1, line + "\n");
  return text;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

std::string field_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("parse the bundled polynomial config") {
  auto c = parse_run_config(kBase);
  CHECK(c.graph.kind == GraphSpec::Kind::kEdges);
  CHECK(c.graph.edges.size() == 6);
  CHECK(c.epsilon == 0.1);
  CHECK(c.problem.kind == ProblemSpec::Kind::kPolynomial);
  CHECK(c.mu == 0.01);
  CHECK(c.schedule == StepSchedule(1.0, 0.6, 0.0));
  CHECK(c.iterations == 10000);
  CHECK(c.seed == 3);
  CHECK(c.init.kind == InitialStateSpec::Kind::kBox);
  CHECK(c.init.box_lo == -5.0);
  CHECK(c.out_dir == "out/simple");
  auto setup = materialize(c);
  CHECK(setup.weights.agents() == 4);
  CHECK(setup.problem.f_star);
}

TEST_CASE("field-level errors") {
  CHECK(field_of(replace(kBase, "step_p = 0.6", "step_p = 0.4")) == "algorithm.step_p");
  CHECK(field_of(replace(kBase, "mu = 0.01", "mu = 0")) == "algorithm.mu");
  CHECK(field_of(replace(kBase, "mu = 0.01", "mu = abc")) == "algorithm.mu");
  CHECK(field_of(replace(kBase, "epsilon = 0.1", "epsilon = 1.5")) == "weights.epsilon");
  CHECK(field_of(with_line("graph", "colour = red")) == "graph.colour");
  CHECK(field_of(with_line("algorithm", "mu = 0.1")) == "algorithm.mu");
  CHECK(field_of(replace(kBase, "kind = polynomial", "kind = cubic")) == "problem.kind");
  CHECK(field_of(replace(kBase, "init = box:-5:5", "init = box:5")) == "algorithm.init");
  CHECK(field_of(replace(kBase, "[[1, 2], [2, 3]", "[[1, 2, 3], [2, 3]")) == "graph.edges");
  CHECK(field_of(with_line("algorithm", "cadence = every:0")) == "algorithm.cadence");
  CHECK(field_of(replace(kBase, "iterations = 10000", "iterations = 1e4")) ==
        "algorithm.iterations");
  CHECK(field_of(replace(kBase, "seed = 3", "seed = -1")) == "algorithm.seed");
  CHECK_THROWS_AS(parse_run_config("orphan = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[graph\nn = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[graph]\njust words\n"), ConfigError);
}

TEST_CASE("materialize reports inconsistent pieces") {
  auto c = parse_run_config(replace(kBase, "[[1, 2], [2, 3], [3, 4], [4, 1], [1, 3], [4, 2]]",
                                    "[[1, 2], [2, 3], [3, 4]]"));
  CHECK_THROWS_AS(materialize(c), ConfigError);
  c = parse_run_config(replace(kBase, "[[1, 2], [2, 3]", "[[1, 7], [2, 3]"));
  try {
    materialize(c);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "graph.edges");
  }
  c = parse_run_config(replace(kBase, "kind = edges\nn = 4", "kind = ring\nn = 5"));
  CHECK_THROWS_AS(materialize(c), ConfigError);  // polynomial needs 4 agents
  c = parse_run_config(replace(kBase, "init = box:-5:5", "init = points:[[1], [2]]"));
  CHECK_THROWS_AS(materialize(c), ConfigError);
}

TEST_CASE("property: serialize then parse is the identity") {
  std::vector<std::string> variants = {
      kBase,
      replace(kBase, "kind = polynomial",
              "kind = logistic\ndim = 3\nsamples_per_agent = 12\nregularization = [0.1, 0.2, "
              "0.3, 0.4]\ndata_seed = 5\nmask = fractional\nmask_range = [5, 10]\nmask_seed = "
              "9\nseparation = 1.5"),
      replace(replace(kBase, "kind = edges\nn = 4", "kind = ring\nn = 7"), "init = box:-5:5",
              "init = points:[[0.1], [0.2], [0.3], [0.4], [0.5], [0.6], [0.7]]\ninit_y = "
              "points:[[1], [0], [0], [0], [0], [0], [-1]]\ncadence = every:7"),
      replace(kBase, "step_a = 1", "step_a = 0.123456789012345\nstep_k0 = 3\ncadence = log"),
      replace(kBase, "kind = polynomial", "kind = quadratic\ndim = 2"),
  };
  for (const auto& text : variants) {
    auto a = parse_run_config(text);
    auto b = parse_run_config(serialize_run_config(a));
    CHECK(a == b);
    CHECK(serialize_run_config(a) == serialize_run_config(b));
  }
}

TEST_CASE("sweep specs") {
  auto s = parse_sweep_spec(std::string(kBase) +
                            "\n[sweep]\naxis = mu\nvalues = [1e-4, 1e-2, 1, 50, 100]\n"
                            "seeds_per_point = 5\n");
  CHECK(s.axis == SweepAxis::kMu);
  CHECK(s.values.size() == 5);
  CHECK(s.seeds_per_point == 5);
  auto cell = sweep_cell(s, 50, 2);
  CHECK(cell.mu == 50);
  CHECK(cell.seed == 5);

  auto n = parse_sweep_spec(std::string(kBase) +
                            "\n[sweep]\naxis = n_agents\nvalues = [5, 10]\n");
  auto ring = sweep_cell(n, 10, 0);
  CHECK(ring.graph.kind == GraphSpec::Kind::kRing);
  CHECK(ring.graph.n == 10);

  auto bad = [](const std::string& tail) {
    try {
      parse_sweep_spec(std::string(kBase) + "\n[sweep]\n" + tail);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(bad("axis = mu\nvalues = []\n") == "sweep.values");
  CHECK(bad("axis = mu\nvalues = [0.1, -1]\n") == "sweep.values");
  CHECK(bad("axis = n_agents\nvalues = [1, 5]\n") == "sweep.values");
  CHECK(bad("axis = n_agents\nvalues = [2.5]\n") == "sweep.values");
  CHECK(bad("axis = dim\nvalues = [0]\n") == "sweep.values");
  CHECK(bad("axis = colour\nvalues = [1]\n") == "sweep.axis");
  CHECK(bad("axis = mu\n") == "sweep.values");
  CHECK(bad("axis = mu\nvalues = [1]\nseeds_per_point = 0\n") == "sweep.seeds_per_point");
  CHECK_THROWS_AS(parse_run_config(std::string(kBase) + "\n[sweep]\naxis = mu\n"), ConfigError);
}
