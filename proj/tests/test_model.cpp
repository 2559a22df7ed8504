#include <gtest/gtest.h>

#include "wsnsim/model.hpp"

using namespace wsnsim;

TEST(Model, DeployEmpty) {
    Network net = deploy(0, 100, {50, 50}, 3);
    EXPECT_EQ(net.size(), 0u);
    EXPECT_EQ(net.alive_count(), 0u);
    EXPECT_EQ(net.round_index(), 0u);
}

TEST(Model, DeployDeterministic) {
    Network a = deploy(100, 100, {50, 50}, 7);
    Network b = deploy(100, 100, {50, 50}, 7);
    ASSERT_EQ(a.size(), 100u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.nodes()[i].pos, b.nodes()[i].pos);
        EXPECT_EQ(a.nodes()[i].residual_energy, b.nodes()[i].residual_energy);
    }
    EXPECT_EQ(a.rng()(), b.rng()());
    Network c = deploy(100, 100, {50, 50}, 8);
    EXPECT_NE(a.nodes()[0].pos, c.nodes()[0].pos);
}

TEST(Model, DeployInitialEnergyAndBounds) {
    Network net = deploy(100, 100, {50, 50}, 1, DeploymentParams{5e8, 30});
    for (const Node& n : net.nodes()) {
        EXPECT_EQ(n.residual_energy, 5e8);
        EXPECT_EQ(n.max_energy, 5e8);
        EXPECT_TRUE(n.alive);
        EXPECT_GE(n.pos.x, 0.0);
        EXPECT_LE(n.pos.x, 100.0);
        EXPECT_GE(n.pos.y, 0.0);
        EXPECT_LE(n.pos.y, 100.0);
    }
}

TEST(Model, DeployRejectsBadParameters) {
    EXPECT_THROW(deploy(-1, 100, {0, 0}, 1), ConfigError);
    EXPECT_THROW(deploy(10, 0, {0, 0}, 1), ConfigError);
    EXPECT_THROW(deploy(10, NAN, {0, 0}, 1), ConfigError);
    EXPECT_THROW(deploy(10, 100, {INFINITY, 0}, 1), ConfigError);
    EXPECT_THROW(deploy(10, 100, {0, 0}, 1, DeploymentParams{-1, 30}), ConfigError);
}

TEST(Model, ChargeExamples) {
    const std::vector<Point> pos{{0, 0}, {1, 1}};
    Network net = Network::from_positions(pos, 10, {5, 5}, 1, DeploymentParams{5e8, 30});
    EXPECT_EQ(net.charge(0, 7000), 499993000.0);
    EXPECT_EQ(net.charge(0, 0), 499993000.0);
    net.node(1).residual_energy = 100;
    const double before = net.consumed_total();
    EXPECT_EQ(net.charge(1, 250), 0.0);
    EXPECT_FALSE(net.node(1).alive);
    EXPECT_EQ(net.consumed_total() - before, 100.0);
    EXPECT_THROW(net.charge(9, 1), std::out_of_range);
    EXPECT_THROW(net.charge(0, -1), std::invalid_argument);
}

TEST(Model, NeighborsOnALine) {
    const std::vector<Point> pos{{0, 0}, {10, 0}, {20, 0}, {40, 0}, {80, 0}};
    Network net = Network::from_positions(pos, 100, {50, 50}, 1);
    EXPECT_EQ(net.neighbors_within(0, 30), (std::vector<NodeId>{1, 2}));
}

TEST(Model, NeighborBoundaryInclusive) {
    const std::vector<Point> pos{{0, 0}, {30, 0}};
    Network net = Network::from_positions(pos, 100, {50, 50}, 1);
    EXPECT_EQ(net.neighbors_within(0, 30), (std::vector<NodeId>{1}));
    EXPECT_EQ(net.neighbors_within(1, 30), (std::vector<NodeId>{0}));
}

TEST(Model, NeighborsSingleNodeAndDeadExcluded) {
    const std::vector<Point> one{{5, 5}};
    EXPECT_TRUE(Network::from_positions(one, 10, {0, 0}, 1).neighbors_within(0, 30).empty());
    const std::vector<Point> pos{{0, 0}, {5, 0}, {6, 0}};
    Network net = Network::from_positions(pos, 10, {0, 0}, 1);
    net.charge(1, 1e99);
    EXPECT_EQ(net.neighbors_within(0, 30), (std::vector<NodeId>{2}));
}

TEST(Model, NeighborsMatchBruteForce) {
    Network net = deploy(400, 200, {100, 100}, 11);
    for (NodeId i = 0; i < 400; i += 37) {
        for (double range : {5.0, 30.0, 75.0}) {
            std::vector<NodeId> brute;
            for (const Node& n : net.nodes())
                if (n.id != i && distance(n.pos, net.node(i).pos) <= range) brute.push_back(n.id);
            EXPECT_EQ(net.neighbors_within(i, range), brute);
        }
    }
}

TEST(Model, FromPositionsRejectsOutsideField) {
    const std::vector<Point> pos{{0, 0}, {11, 0}};
    EXPECT_THROW(Network::from_positions(pos, 10, {0, 0}, 1), ConfigError);
}

TEST(Model, DefaultFieldSideKeepsDensity) {
    EXPECT_DOUBLE_EQ(default_field_side(100), 100.0);
    EXPECT_DOUBLE_EQ(default_field_side(10000), 1000.0);
}
