#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tiltcut/error.hpp"
#include "tiltcut/generators.hpp"
#include "tiltcut/graph_io.hpp"
#include "tiltcut/network.hpp"

using namespace tiltcut;

namespace {

VertexSubset set_of(int n, std::vector<int> members) { return VertexSubset::from_members(n, members); }

Network path3(std::vector<double> h = {}) { return Network(3, {{0, 1}, {1, 2}}, std::move(h)); }

}  // namespace

TEST(VertexSubset, WordStorageBeyondSixtyFour) {
  VertexSubset s(130);
  s.insert(0);
  s.insert(64);
  s.insert(129);
  EXPECT_EQ(s.count(), 3);
  EXPECT_TRUE(s.contains(129));
  EXPECT_EQ(s.complement().count(), 127);
  EXPECT_THROW(s.mask(), std::overflow_error);
  s.erase(64);
  EXPECT_EQ(s.members(), (std::vector<int>{0, 129}));
  EXPECT_THROW(s.insert(130), std::out_of_range);
}

TEST(VertexSubset, MaskRoundTrip) {
  const auto s = VertexSubset::from_mask(10, 0b1000100101);
  EXPECT_EQ(s.mask(), Mask{0b1000100101});
  EXPECT_EQ(s.members(), (std::vector<int>{0, 2, 5, 9}));
  EXPECT_TRUE(s.is_subset_of(VertexSubset::full(10)));
  EXPECT_THROW(VertexSubset::from_mask(3, 0b1000), std::out_of_range);
}

TEST(Network, RejectsMalformedInput) {
  EXPECT_THROW(Network(3, {{0, 0}}), ValidationError);
  EXPECT_THROW(Network(3, {{0, 1}, {1, 0}}), ValidationError);
  EXPECT_THROW(Network(3, {{0, 3}}), ValidationError);
  EXPECT_THROW(Network(2, {}, {1.0, -0.5}), ValidationError);
  EXPECT_THROW(Network(2, {}, {1.0}), ValidationError);
  EXPECT_THROW(Network(2, {}, {1.0, std::nan("")}), ValidationError);
}

TEST(CutValue, Fixtures) {
  const Network k4 = complete_graph(4);
  EXPECT_EQ(cut_value(k4, VertexSubset(4)), 0);
  EXPECT_EQ(cut_value(k4, set_of(4, {1, 3})), 4);
  EXPECT_EQ(cut_value(path3(), set_of(3, {1})), 2);
}

TEST(WeightedSize, Fixtures) {
  const Network g(5, {}, {1, 1, 1, 1, 1});
  EXPECT_EQ(weighted_size(g, VertexSubset(5)), 0.0);
  EXPECT_EQ(weighted_size(g, VertexSubset::full(5)), 5.0);
  const Network two(2, {}, {0.5, 1.5});
  EXPECT_EQ(weighted_size(two, VertexSubset::full(2)), 2.0);
}

TEST(Energy, SingleVertex) {
  const Network g(1, {}, {1.0});
  EXPECT_EQ(energy(g, VertexSubset::full(1)), -1.0);
  EXPECT_EQ(energy(g, VertexSubset(1)), 1.0);
}

TEST(Energy, CutIdentityAndSubmodularity) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const Network g = oracle::random_graph(rng, n, 0.4, 2.0);
    const Mask s = rng() & oracle::full(n);
    const auto S = VertexSubset::from_mask(n, s);
    const double lhs = energy(g, S) - energy(g, VertexSubset(n));
    EXPECT_NEAR(lhs, 2.0 * cut_value(g, S) - 2.0 * weighted_size(g, S), 1e-9);
    EXPECT_NEAR(energy(g, S), oracle::energy(g, s), 1e-9);
    EXPECT_EQ(cut_value(g, S), cut_value(g, S.complement()));

    const Mask t = s | (rng() & oracle::full(n));
    for (int v = 0; v < n; ++v) {
      if (oracle::in(t, v)) continue;
      const Mask b = Mask{1} << v;
      const double gain_small = oracle::energy(g, s | b) - oracle::energy(g, s);
      const double gain_large = oracle::energy(g, t | b) - oracle::energy(g, t);
      EXPECT_GE(gain_small, gain_large - 1e-9);
    }
  }
}

TEST(Payoffs, RiskDominanceFields) {
  const Network star(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto h = fields_from_payoffs({2, 1, 0, 0}, star);
  EXPECT_DOUBLE_EQ(risk_dominance_ratio({2, 1, 0, 0}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
  EXPECT_DOUBLE_EQ(risk_dominance_ratio({3, 1, 0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(fields_from_payoffs({3, 1, 0, 0}, cycle_power(9, 2))[4], 2.0);
  EXPECT_THROW(risk_dominance_ratio({1, 1, 0, 0}), ValidationError);
  EXPECT_THROW(risk_dominance_ratio({0, 1, 0, 0}), ValidationError);
}

TEST(TiltedFields, Fixtures) {
  const Network tri = complete_graph(3);
  EXPECT_EQ(tilted_fields(tri, set_of(3, {0})), (std::vector<double>{2.0}));
  EXPECT_EQ(tilted_fields(path3({1, 1, 1}), set_of(3, {0, 1})), (std::vector<double>{1.0, 2.0}));
  const Network g = path3({0.5, 0.25, 2});
  EXPECT_EQ(tilted_fields(g, VertexSubset::full(3)), g.fields());
}

TEST(TiltedFields, DominateBaseFields) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const Network g = oracle::random_graph(rng, n, 0.5, 1.0);
    const Mask f = (rng() & oracle::full(n)) | 1;
    const auto F = VertexSubset::from_mask(n, f);
    const auto hf = tilted_fields(g, F);
    const auto members = F.members();
    bool any_boost = false;
    for (std::size_t k = 0; k < members.size(); ++k) {
      EXPECT_GE(hf[k], g.field(members[k]));
      any_boost = any_boost || hf[k] != g.field(members[k]);
    }
    EXPECT_EQ(any_boost, cut_value(g, F) > 0);
  }
}

TEST(InducedSubgraph, Fixtures) {
  const Network g = path3({1, 2, 3});
  const auto whole = induced_subgraph(g, VertexSubset::full(3));
  EXPECT_EQ(whole.graph.edges(), g.edges());
  EXPECT_EQ(whole.original_vertex, (std::vector<int>{0, 1, 2}));

  const auto edge = induced_subgraph(complete_graph(3), set_of(3, {0, 2}));
  EXPECT_EQ(edge.graph.size(), 2);
  EXPECT_EQ(edge.graph.edge_count(), 1);

  const Network star(4, {{0, 1}, {0, 2}, {0, 3}}, {0, 0.5, 1, 1.5});
  const auto leaves = induced_subgraph(star, set_of(4, {1, 2, 3}));
  EXPECT_EQ(leaves.graph.edge_count(), 0);
  EXPECT_EQ(leaves.graph.fields(), (std::vector<double>{1.5, 2.0, 2.5}));
  EXPECT_EQ(leaves.original_vertex, (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(induced_subgraph(star, VertexSubset(4)), ValidationError);
}

TEST(GraphIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Network g = oracle::random_graph(rng, 1 + static_cast<int>(rng() % 12), 0.3, 5.0);
    std::vector<double> h(g.fields());
    for (double& x : h) x = u(rng) / 3.0;
    const Network src = g.with_fields(h);
    std::stringstream buf;
    write_edge_list(buf, src);
    const Network back = read_edge_list(buf);
    EXPECT_EQ(back.edges(), src.edges());
    EXPECT_EQ(back.fields(), src.fields());
    EXPECT_EQ(network_hash(back), network_hash(src));
  }
}

TEST(GraphIo, ParsesCommentsAndReportsLines) {
  std::istringstream ok("# a path\n3\n0 1\n\n1 2\nh: 0.1 0.2 0.3\n");
  const Network g = read_edge_list(ok);
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_EQ(g.field(2), 0.3);

  std::istringstream bad("3\n0 1\n1 x\n");
  try {
    read_edge_list(bad);
    FAIL() << "expected a parse error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream short_fields("2\n0 1\nh: 1\n");
  EXPECT_THROW(read_edge_list(short_fields), ValidationError);
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Connectivity, Basic) {
  EXPECT_TRUE(is_connected(path3()));
  EXPECT_FALSE(is_connected(Network(3, {{0, 1}})));
  EXPECT_TRUE(is_connected(Network(1, {})));
}
