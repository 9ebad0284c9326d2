#include "reformer/ted.hpp"

#include <algorithm>
#include <vector>

namespace reformer {

namespace {

// Postorder-indexed view of a tree with leftmost-leaf descendants and
// LR keyroots, as Zhang-Shasha requires.
struct Indexed {
  std::vector<std::string> labels;  // postorder
  std::vector<int> lml;             // leftmost leaf of subtree rooted at i
  std::vector<int> keyroots;

  explicit Indexed(const AlgebraNode& root) {
    build(root);
    std::vector<bool> is_keyroot(labels.size(), false);
    std::vector<bool> seen_lml(labels.size(), false);
    for (int i = static_cast<int>(labels.size()) - 1; i >= 0; --i) {
      if (!seen_lml[lml[i]]) {
        is_keyroot[i] = true;
        seen_lml[lml[i]] = true;
      }
    }
    for (size_t i = 0; i < labels.size(); ++i) {
      if (is_keyroot[i]) keyroots.push_back(static_cast<int>(i));
    }
  }

 private:
  int build(const AlgebraNode& n) {
    int first_leaf = -1;
    for (const auto& c : n.children) {
      int l = build(c);
      if (first_leaf < 0) first_leaf = l;
    }
    int idx = static_cast<int>(labels.size());
    labels.push_back(n.label());
    lml.push_back(first_leaf < 0 ? idx : first_leaf);
    return lml.back();
  }
};

}  // namespace

int tree_edit_distance(const AlgebraTree& t1, const AlgebraTree& t2) {
  Indexed a(t1.root), b(t2.root);
  const int n = static_cast<int>(a.labels.size());
  const int m = static_cast<int>(b.labels.size());
  std::vector<std::vector<int>> treedist(n, std::vector<int>(m, 0));
  // forest distance buffer, 1-based with 0 row/col for empty forests
  std::vector<std::vector<int>> fd(n + 1, std::vector<int>(m + 1, 0));

  for (int ki : a.keyroots) {
    for (int kj : b.keyroots) {
      int li = a.lml[ki], lj = b.lml[kj];
      // fd is indexed with a shifted origin so row/col 0 mean empty forests
      auto F = [&](int i, int j) -> int& { return fd[i - li + 1][j - lj + 1]; };
      fd[0][0] = 0;
      for (int i = li; i <= ki; ++i) F(i, lj - 1) = F(i - 1, lj - 1) + 1;
      for (int j = lj; j <= kj; ++j) F(li - 1, j) = F(li - 1, j - 1) + 1;
      for (int i = li; i <= ki; ++i) {
        for (int j = lj; j <= kj; ++j) {
          if (a.lml[i] == li && b.lml[j] == lj) {
            int cost = a.labels[i] == b.labels[j] ? 0 : 1;
            F(i, j) = std::min({F(i - 1, j) + 1, F(i, j - 1) + 1,
                                F(i - 1, j - 1) + cost});
            treedist[i][j] = F(i, j);
          } else {
            F(i, j) = std::min({F(i - 1, j) + 1, F(i, j - 1) + 1,
                                F(a.lml[i] - 1, b.lml[j] - 1) + treedist[i][j]});
          }
        }
      }
    }
  }
  return treedist[n - 1][m - 1];
}

double normalized_distance(const AlgebraTree& t1, const AlgebraTree& t2) {
  int total = t1.node_count() + t2.node_count();
  if (total == 0) return 0.0;
  return static_cast<double>(tree_edit_distance(t1, t2)) / total;
}

}  // namespace reformer
