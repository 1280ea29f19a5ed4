#pragma once

#include <cstdint>
#include <vector>

#include "core/instance.hpp"
#include "core/rng.hpp"

namespace spinglass {

struct TreeNode {
    int test_var = -1;   // -1 marks a leaf
    int child_plus = -1; // taken when the tested variable is +1
    int child_minus = -1;
    double p_plus = 0.5; // leaf probability of the variable being +1
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // node 0 is the root
};

/// One decision tree per binary variable. The dependency digraph has an edge
/// u -> v whenever the tree of v tests u; construction keeps it acyclic and
/// every leaf probability strictly inside (0,1) (Laplace smoothing).
struct BayesianNetworkModel {
    int num_vars = 0;
    std::vector<DecisionTree> trees;
    std::vector<std::vector<int>> parents; // parents[v]: variables tested by tree v

    /// Order in which variables can be sampled (parents first), smallest
    /// index first among the available ones. Throws if the digraph is cyclic.
    std::vector<int> topological_order() const;
};

/// Greedy structure learning. Trees start as single leaves holding marginal
/// frequencies; the split with the highest gain is applied until no split
/// gains, where gain is the increase in the data's log-likelihood (base 2,
/// with Laplace-smoothed leaves) minus a penalty of log2(M)/2 per added
/// leaf, M being the number of selected solutions. Splits that would close a
/// cycle between trees are never applied.
BayesianNetworkModel build_model(const std::vector<SpinConfiguration>& selected);

/// Draws `count` configurations by walking each tree in topological order.
std::vector<SpinConfiguration> sample_model(const BayesianNetworkModel& model, int count,
                                            Rng& rng);

} // namespace spinglass
