#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rbfkit/geometry.hpp"

using namespace rbfkit;

TEST(GenerateNodes, DiskFourBoundaryNodesSitAtQuarterAngles) {
  const auto nodes = generate_nodes(DomainSpec::unit_disk(), 4, 0, 0);
  ASSERT_EQ(nodes.boundary_count(), 4u);
  EXPECT_EQ(nodes.interior_count(), 0u);
  for (int i = 0; i < 4; ++i) {
    const double a = i * std::numbers::pi / 2.0;
    EXPECT_NEAR(nodes.boundary[i].x(), std::cos(a), 1e-15);
    EXPECT_NEAR(nodes.boundary[i].y(), std::sin(a), 1e-15);
  }
}

TEST(GenerateNodes, CountsAreConserved) {
  const auto nodes = generate_nodes(DomainSpec::rectangle(1, 1), 8, 5, 1);
  EXPECT_EQ(nodes.interior_count(), 5u);
  EXPECT_EQ(nodes.boundary_count(), 8u);
  EXPECT_EQ(nodes.normals.size(), 8u);
}

TEST(GenerateNodes, SameSeedIsBitIdentical) {
  const auto a = generate_nodes(DomainSpec::unit_disk(), 32, 50, 7);
  const auto b = generate_nodes(DomainSpec::unit_disk(), 32, 50, 7);
  ASSERT_EQ(a.interior.size(), b.interior.size());
  for (std::size_t i = 0; i < a.interior.size(); ++i) EXPECT_TRUE(a.interior[i] == b.interior[i]);
  for (std::size_t i = 0; i < a.boundary.size(); ++i) EXPECT_TRUE(a.boundary[i] == b.boundary[i]);
}

TEST(GenerateNodes, DifferentSeedsGiveDifferentInteriors) {
  const auto a = generate_nodes(DomainSpec::unit_disk(), 8, 10, 1);
  const auto b = generate_nodes(DomainSpec::unit_disk(), 8, 10, 2);
  EXPECT_FALSE(a.interior[0] == b.interior[0]);
}

TEST(GenerateNodes, InvariantsHoldOnBothDomains) {
  for (const auto& d : {DomainSpec::unit_disk(), DomainSpec::rectangle(2, 1), DomainSpec::rectangle(1, 1)}) {
    for (std::size_t nb : {4u, 7u, 8u, 33u}) {
      const auto nodes = generate_nodes(d, nb, 40, 3);
      for (const auto& p : nodes.interior) {
        EXPECT_TRUE(contains(d, p, 1e-9));
        EXPECT_GT(distance_to_boundary(d, p), 1e-9);
      }
      for (std::size_t i = 0; i < nb; ++i) {
        EXPECT_NEAR(nodes.normals[i].norm(), 1.0, 1e-12);
        EXPECT_NEAR(distance_to_boundary(d, nodes.boundary[i]), 0.0, 1e-12);
      }
      EXPECT_EQ(nodes.dirichlet_idx.size() + nodes.neumann_idx.size(), nb);
    }
  }
}

TEST(GenerateNodes, DiskNormalsEqualPositions) {
  const auto nodes = generate_nodes(DomainSpec::unit_disk(), 37, 0, 0);
  for (std::size_t i = 0; i < nodes.boundary_count(); ++i) {
    EXPECT_LE((nodes.normals[i] - nodes.boundary[i]).norm(), 1e-12);
  }
}

TEST(GenerateNodes, RectangleSkipsCorners) {
  for (std::size_t nb : {4u, 8u, 12u, 16u, 32u}) {
    const auto nodes = generate_nodes(DomainSpec::rectangle(1, 1), nb, 0, 0);
    for (const auto& p : nodes.boundary) {
      const bool corner = (std::abs(p.x()) < 1e-9 || std::abs(p.x() - 1) < 1e-9) &&
                          (std::abs(p.y()) < 1e-9 || std::abs(p.y() - 1) < 1e-9);
      EXPECT_FALSE(corner);
    }
  }
}

TEST(GenerateNodes, RejectsBadInput) {
  EXPECT_THROW(generate_nodes(DomainSpec::unit_disk(), 3, 0, 0), ParameterError);
  EXPECT_THROW(generate_nodes(DomainSpec::rectangle(0, 1), 8, 0, 0), InvalidDomainError);
  EXPECT_THROW(generate_nodes(DomainSpec::rectangle(1, -2), 8, 0, 0), InvalidDomainError);
}

TEST(OutwardNormal, Examples) {
  const auto disk = DomainSpec::unit_disk();
  EXPECT_TRUE(outward_normal(disk, Point(1, 0)).isApprox(Vector(1, 0)));
  EXPECT_TRUE(outward_normal(disk, Point(0, -1)).isApprox(Vector(0, -1)));
  EXPECT_TRUE(outward_normal(DomainSpec::rectangle(2, 1), Point(2, 0.5)).isApprox(Vector(1, 0)));
  EXPECT_TRUE(outward_normal(DomainSpec::rectangle(2, 1), Point(1, 0)).isApprox(Vector(0, -1)));
}

TEST(OutwardNormal, OffBoundaryThrows) {
  EXPECT_THROW(outward_normal(DomainSpec::unit_disk(), Point(0.5, 0)), GeometryError);
  EXPECT_THROW(outward_normal(DomainSpec::rectangle(1, 1), Point(0.5, 0.5)), GeometryError);
  EXPECT_THROW(outward_normal(DomainSpec::rectangle(1, 1), Point(1, 1)), GeometryError);
}

TEST(PartitionBoundary, FullRangeIsAllDirichlet) {
  const auto nodes = partition_boundary(generate_nodes(DomainSpec::unit_disk(), 10, 0, 0), {{0.0, 1.0}});
  EXPECT_EQ(nodes.dirichlet_idx.size(), 10u);
  EXPECT_TRUE(nodes.neumann_idx.empty());
}

TEST(PartitionBoundary, HalfRangeSplitsEvenly) {
  const auto nodes = partition_boundary(generate_nodes(DomainSpec::unit_disk(), 8, 0, 0), {{0.0, 0.5}});
  EXPECT_EQ(nodes.dirichlet_idx.size(), 4u);
  EXPECT_EQ(nodes.neumann_idx.size(), 4u);
  std::vector<bool> seen(8, false);
  for (auto i : nodes.dirichlet_idx) seen[i] = true;
  for (auto i : nodes.neumann_idx) {
    EXPECT_FALSE(seen[i]);
    seen[i] = true;
  }
  for (bool s : seen) EXPECT_TRUE(s);
}

TEST(PartitionBoundary, EmptyRuleThrows) {
  const auto nodes = generate_nodes(DomainSpec::unit_disk(), 8, 0, 0);
  EXPECT_THROW(partition_boundary(nodes, std::span<const ParamInterval>()), PartitionError);
  EXPECT_THROW(partition_boundary(nodes, {{1.5, 2.0}}), PartitionError);
  EXPECT_THROW(partition_boundary(nodes, {{0.3, 0.31}}), PartitionError);
}

TEST(BoundaryBand, TenPercentOfDiameter) {
  const auto disk = DomainSpec::unit_disk();
  EXPECT_TRUE(in_boundary_band(disk, Point(0.85, 0)));
  EXPECT_FALSE(in_boundary_band(disk, Point(0.75, 0)));
  const auto sq = DomainSpec::rectangle(1, 1);
  EXPECT_TRUE(in_boundary_band(sq, Point(0.05, 0.5)));
  EXPECT_FALSE(in_boundary_band(sq, Point(0.5, 0.5)));
}

TEST(ProbeGrid, StaysInsideDomain) {
  const auto disk = DomainSpec::unit_disk();
  const auto pts = probe_grid(disk);
  EXPECT_FALSE(pts.empty());
  for (const auto& p : pts) EXPECT_LT(p.norm(), 1.0);
  EXPECT_EQ(probe_grid(DomainSpec::rectangle(1, 1)).size(), 19u * 19u);
}
