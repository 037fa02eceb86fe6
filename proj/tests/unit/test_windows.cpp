#include <gtest/gtest.h>

#include <set>

#include "smre/error.hpp"
#include "smre/windows.hpp"

using namespace smre;

namespace {

// All cubes by direct nested enumeration of side and anchor.
std::vector<std::vector<std::size_t>> brute_windows(const Grid& g, int smin, int smax) {
  std::vector<std::vector<std::size_t>> out;
  for (int s = smin; s <= smax; ++s) {
    for (std::size_t start = 0; start < g.size(); ++start) {
      const auto c = g.coords(start);
      bool fits = true;
      for (int a = 0; a < g.dim(); ++a) fits = fits && c[a] + s <= g.side();
      if (!fits) continue;
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ci = g.coords(i);
        bool in = true;
        for (int a = 0; a < g.dim(); ++a) in = in && ci[a] >= c[a] && ci[a] < c[a] + s;
        if (in) members.push_back(i);
      }
      out.push_back(members);
    }
  }
  return out;
}

}  // namespace

TEST(Enumerate, PublishedCounts) {
  EXPECT_EQ(enumerate(Grid(1, 1024), 1, 100).size(), 97450u);
  EXPECT_EQ(enumerate(Grid(2, 512), 1, 25).size(), 6251300u);
  EXPECT_EQ(window_count(Grid(2, 512), 1, 25), 6251300u);
}

TEST(Enumerate, SmallHandExample) {
  const WindowSystem ws = enumerate(Grid(1, 3), 1, 2);
  ASSERT_EQ(ws.size(), 5u);
  const std::vector<std::vector<std::size_t>> expected = {{0}, {1}, {2}, {0, 1}, {1, 2}};
  for (std::size_t i = 0; i < ws.size(); ++i) EXPECT_EQ(ws.support(ws[i]), expected[i]);
}

TEST(Enumerate, InvalidRanges) {
  EXPECT_THROW(enumerate(Grid(1, 5), 0, 2), InvalidArgument);
  EXPECT_THROW(enumerate(Grid(1, 5), 3, 2), InvalidArgument);
  EXPECT_THROW(enumerate(Grid(1, 5), 1, 6), InvalidArgument);
}

TEST(Enumerate, MatchesBruteForceOnSmallGrids) {
  for (int d = 1; d <= 3; ++d) {
    for (int m = 1; m <= (d == 3 ? 5 : 10); ++m) {
      for (int smin = 1; smin <= m; smin += 2) {
        const Grid g(d, m);
        const WindowSystem ws = enumerate(g, smin, m);
        const auto brute = brute_windows(g, smin, m);
        ASSERT_EQ(ws.size(), brute.size());
        EXPECT_EQ(ws.size(), window_count(g, smin, m));
        std::set<std::vector<std::size_t>> seen;
        for (std::size_t i = 0; i < ws.size(); ++i) {
          EXPECT_EQ(ws.support(ws[i]), brute[i]);
          EXPECT_EQ(ws.index_of(ws[i]), i);
          seen.insert(ws.support(ws[i]));
        }
        EXPECT_EQ(seen.size(), ws.size());  // no duplicates
      }
    }
  }
}

TEST(PartitionDisjoint, PublishedGroupCounts) {
  EXPECT_EQ(partition_disjoint(enumerate(Grid(1, 1024), 1, 100)).size(), 5050u);
  EXPECT_EQ(partition_disjoint(enumerate(Grid(2, 512), 1, 25)).size(), 5525u);
}

TEST(PartitionDisjoint, SmallHandExample) {
  const Partition p = partition_disjoint(enumerate(Grid(1, 3), 1, 2));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p.group(0), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(p.group(1), (std::vector<std::size_t>{3}));
  EXPECT_EQ(p.group(2), (std::vector<std::size_t>{4}));
}

TEST(PartitionDisjoint, CoversOnceAndGroupsAreDisjoint) {
  for (int d = 1; d <= 3; ++d) {
    for (int m : {1, 2, 5, 8}) {
      if (d == 3 && m == 8) continue;
      const WindowSystem ws = enumerate(Grid(d, m), 1, m);
      const Partition p = partition_disjoint(ws);
      std::vector<int> hits(ws.size(), 0);
      for (std::size_t j = 0; j < p.size(); ++j) {
        const auto group = p.group(j);
        EXPECT_FALSE(group.empty());
        for (std::size_t a = 0; a < group.size(); ++a) {
          ++hits[group[a]];
          for (std::size_t b = a + 1; b < group.size(); ++b) {
            EXPECT_FALSE(intersects(ws[group[a]], ws[group[b]], d));
          }
        }
      }
      for (int h : hits) EXPECT_EQ(h, 1);
    }
  }
}

TEST(PartitionDisjoint, LargeSystemSpotCheck) {
  const WindowSystem ws = enumerate(Grid(2, 64), 1, 10);
  const Partition p = partition_disjoint(ws);
  for (std::size_t j = 0; j < p.size(); j += 7) {
    std::vector<Window> windows;
    p.for_each_window(j, [&](std::size_t idx, const Window& w) {
      EXPECT_EQ(ws[idx], w);
      windows.push_back(w);
    });
    for (std::size_t a = 1; a < windows.size(); a += 5) {
      EXPECT_FALSE(intersects(windows[a - 1], windows[a], 2));
    }
  }
}

TEST(PartitionDisjoint, Deterministic) {
  const WindowSystem ws = enumerate(Grid(2, 9), 2, 6);
  const Partition a = partition_disjoint(ws), b = partition_disjoint(ws);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(a.group(j), b.group(j));
}
