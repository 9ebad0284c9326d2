#pragma once

#include "reformer/algebra.hpp"

namespace reformer {

// Exact ordered-tree edit distance (unit-cost insert/delete/relabel),
// Zhang-Shasha. Inputs are compared by node label.
int tree_edit_distance(const AlgebraTree& t1, const AlgebraTree& t2);

// TED / (|t1| + |t2|), in [0,1].
double normalized_distance(const AlgebraTree& t1, const AlgebraTree& t2);

}  // namespace reformer
