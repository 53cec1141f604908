#include <doctest.h>

#include "bwlab/config.hpp"
#include "bwlab/errors.hpp"

#include <random>
#include <string>

using namespace bwlab;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("empty text yields the defaults") {
  CHECK(parse_config_text("") == RunConfig{});
  CHECK(parse_config_text("# only a comment\n\n") == RunConfig{});
}

TEST_CASE("full document") {
  const RunConfig c = parse_config_text(R"([spectrum]
positive_energies = [1.0, 1.5]   # two states
negative_energies = [-1.0,
                     -1.5]
[interaction]
seed = 99
[interaction.coulomb]
scale = 0.2
preset = random-symmetric
[interaction.delta]
scale = 0.0
[integration]
eta_sequence = [8e-3, 4e-3, 2e-3]
quadrature_points = 12
j_order = 3
[bw]
order = 2
max_iter = 50
tol = 1e-11
[solve]
state_index = 1
)");
  CHECK(c.model.positive_energies == std::vector<double>{1.0, 1.5});
  CHECK(c.model.negative_energies == std::vector<double>{-1.0, -1.5});
  CHECK(c.model.seed == 99);
  CHECK(c.model.coulomb.scale == 0.2);
  CHECK(c.model.coulomb.matrix.source.index() == 0);
  CHECK(std::get<MatrixSpec::Preset>(c.model.coulomb.matrix.source) ==
        MatrixSpec::Preset::random_symmetric);
  CHECK(c.model.delta.scale == 0.0);
  CHECK(c.integration.eta_sequence.size() == 3);
  CHECK(c.integration.quadrature_points == 12);
  CHECK(c.integration.j_order == 3);
  CHECK(c.bw.order == 2);
  CHECK(c.bw.max_iter == 50);
  CHECK(c.bw.tol == 1e-11);
  CHECK(c.state_index == 1);
  CHECK(parse_config_text(emit_config(c)) == c);
}

TEST_CASE("syntax errors carry line numbers") {
  CHECK(contains(error_of("[spectrum]\npositive_energies = [1.0]\npositive_energies = [2.0]\n"),
                 "line 3: duplicate key 'spectrum.positive_energies'"));
  CHECK(contains(error_of("[bw]\norder = 2\nspeed = 4\n"), "line 3: unknown key 'bw.speed'"));
  CHECK(contains(error_of("[nonsense]\n"), "line 1: unknown section"));
  CHECK(contains(error_of("[bw]\norder\n"), "line 2: expected key = value"));
  CHECK(contains(error_of("order = 2\n"), "line 1: key outside of any section"));
  CHECK(contains(error_of("[spectrum]\n\npositive_energies = [1.0,\n"), "line 3: unbalanced"));
  CHECK(contains(error_of("[bw]\norder = \"two\"\n"), "line 2: 'bw.order' must be an integer"));
  CHECK(contains(error_of("[interaction.delta]\npreset = \"spiky\"\n"), "line 2: unknown preset"));
  CHECK(contains(error_of("[interaction.delta]\npreset = ones\nmatrix = [[1]]\n"),
                 "line 3: 'interaction.delta' sets both preset and matrix"));
}

TEST_CASE("invariant errors name the key") {
  CHECK(error_of("[interaction.coulomb]\nscale = -1\n") == "coulomb_scale must be ≥ 0");
  CHECK(error_of("[interaction.delta]\nscale = -0.5\n") == "delta_scale must be ≥ 0");
  CHECK(contains(error_of("[bw]\norder = 4\n"), "bw.order"));
  CHECK(contains(error_of("[bw]\nmax_iter = 0\n"), "bw.max_iter"));
  CHECK(contains(error_of("[integration]\nj_order = 0\n"), "j_order"));
  CHECK(contains(error_of("[solve]\nstate_index = 1\n"), "solve.state_index"));
  CHECK(contains(error_of("[spectrum]\npositive_energies = []\n"), "positive_energies"));
  CHECK(contains(error_of("[spectrum]\npositive_energies = [1.0, 1.0]\n"), "duplicate energy"));
  CHECK(contains(error_of("[interaction.delta]\nmatrix = [[1, 0], [0, 1]]\n"), "4"));
  CHECK_THROWS_AS(parse_config_file("/nonexistent/bwlab.toml"), ConfigError);
}

TEST_CASE("emit/parse round trip on random configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    c.model.positive_energies.clear();
    c.model.negative_energies.clear();
    const int np = 1 + static_cast<int>(rng() % 3);
    const int nn = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < np; ++k) c.model.positive_energies.push_back(0.5 + k + u(rng));
    for (int k = 0; k < nn; ++k) c.model.negative_energies.push_back(-0.5 - k - u(rng));
    c.model.seed = rng();
    c.model.coulomb.scale = u(rng) * 0.3;
    c.model.delta.scale = u(rng) * 0.1;
    if (rng() % 2) c.model.delta.matrix.source = MatrixSpec::Preset::random_symmetric;
    if (rng() % 4 == 0) {
      const auto d = static_cast<Eigen::Index>((np + nn) * (np + nn));
      Matrix m(d, d);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng) - 0.5;
      c.model.coulomb.matrix.source = m;
    }
    c.integration.eta_sequence = {1e-2 * (1 + u(rng)), 3e-3, 1e-3 * u(rng) + 1e-4};
    c.integration.quadrature_points = 2 + static_cast<int>(rng() % 30);
    c.integration.cutoff_factor = 100.0 + 1e5 * u(rng);
    c.integration.j_order = 1 + static_cast<int>(rng() % 3);
    c.bw.order = 1 + static_cast<int>(rng() % 3);
    c.bw.max_iter = 1 + static_cast<int>(rng() % 500);
    c.bw.tol = u(rng) * 1e-9;
    c.state_index = rng() % static_cast<std::uint64_t>(np * np);
    const std::string text = emit_config(c);
    const RunConfig back = parse_config_text(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
  }
}

TEST_CASE("FNV-1a 64") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}
