#include "core/bayes_model.hpp"

#include <bit>
#include <cmath>
#include <queue>

#include "core/error.hpp"

namespace spinglass {

std::vector<int> BayesianNetworkModel::topological_order() const {
    std::vector<int> indeg(num_vars, 0);
    std::vector<std::vector<int>> children(num_vars);
    for (int v = 0; v < num_vars; ++v) {
        indeg[v] = static_cast<int>(parents[v].size());
        for (int u : parents[v])
            children[u].push_back(v);
    }
    std::vector<int> order;
    order.reserve(num_vars);
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < num_vars; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int w : children[v])
            if (--indeg[w] == 0)
                ready.push(w);
    }
    if (static_cast<int>(order.size()) != num_vars)
        fail(Errc::invalid_argument, "model dependency digraph contains a cycle");
    return order;
}

namespace {

using Words = std::vector<uint64_t>;

uint64_t count_and(const Words& a, const Words& b) {
    uint64_t total = 0;
    for (size_t i = 0; i < a.size(); ++i)
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

uint64_t count_and3(const Words& a, const Words& b, const Words& c) {
    uint64_t total = 0;
    for (size_t i = 0; i < a.size(); ++i)
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i] & c[i]));
    return total;
}

struct LeafInfo {
    int var = 0;
    int node = 0;
    Words mask;
    int64_t total = 0;
    int64_t plus = 0;
    uint32_t stamp = 0;
    bool alive = true;
};

struct Candidate {
    double gain;
    int var;
    int leaf;
    int split_var;
    uint32_t stamp;
};

struct CandidateLess {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.gain != b.gain)
            return a.gain < b.gain;
        if (a.var != b.var)
            return a.var > b.var;
        if (a.leaf != b.leaf)
            return a.leaf > b.leaf;
        return a.split_var > b.split_var;
    }
};

class ModelBuilder {
public:
    explicit ModelBuilder(const std::vector<SpinConfiguration>& selected)
        : rows_(static_cast<int>(selected.size())),
          vars_(static_cast<int>(selected[0].size())),
          words_((rows_ + 63) / 64) {
        columns_.assign(vars_, Words(words_, 0));
        for (int r = 0; r < rows_; ++r) {
            const SpinConfiguration& row = selected[r];
            if (static_cast<int>(row.size()) != vars_)
                fail(Errc::invalid_argument, "selected solutions have mismatched lengths");
            for (int v = 0; v < vars_; ++v)
                if (row[v] > 0)
                    columns_[v][r / 64] |= 1ull << (r % 64);
        }
        log2_.resize(rows_ + 3);
        log2_[0] = 0.0;
        for (int i = 1; i < static_cast<int>(log2_.size()); ++i)
            log2_[i] = std::log2(static_cast<double>(i));
        penalty_ = 0.5 * std::log2(static_cast<double>(rows_));

        int reach_words = (vars_ + 63) / 64;
        reach_.assign(vars_, Words(reach_words, 0));
        for (int v = 0; v < vars_; ++v)
            reach_[v][v / 64] |= 1ull << (v % 64);
    }

    BayesianNetworkModel build() {
        model_.num_vars = vars_;
        model_.trees.assign(vars_, DecisionTree{});
        model_.parents.assign(vars_, {});
        parent_bits_.assign(vars_, Words((vars_ + 63) / 64, 0));

        Words full(words_, ~0ull);
        if (rows_ % 64)
            full[words_ - 1] = (1ull << (rows_ % 64)) - 1;
        for (int v = 0; v < vars_; ++v) {
            int64_t plus = static_cast<int64_t>(count_and(full, columns_[v]));
            model_.trees[v].nodes.push_back(
                TreeNode{-1, -1, -1, laplace(plus, rows_)});
            int leaf = new_leaf(v, 0, Words(full), rows_, plus);
            refresh_candidate(leaf);
        }

        while (!heap_.empty()) {
            Candidate top = heap_.top();
            heap_.pop();
            LeafInfo& leaf = leaves_[top.leaf];
            if (!leaf.alive || top.stamp != leaf.stamp)
                continue;
            if (creates_cycle(top.split_var, leaf.var)) {
                refresh_candidate(top.leaf);
                continue;
            }
            apply_split(top.leaf, top.split_var);
        }

        for (int v = 0; v < vars_; ++v) {
            const Words& bits = parent_bits_[v];
            for (int u = 0; u < vars_; ++u)
                if (bits[u / 64] & (1ull << (u % 64)))
                    model_.parents[v].push_back(u);
        }
        return std::move(model_);
    }

private:
    double laplace(int64_t plus, int64_t total) const {
        return static_cast<double>(plus + 1) / static_cast<double>(total + 2);
    }

    // log-likelihood (bits) of a leaf's rows under its stored probability,
    // the Laplace-smoothed (plus+1)/(total+2)
    double leaf_ll(int64_t plus, int64_t total) const {
        int64_t minus = total - plus;
        double lt = log2_[total + 2];
        return static_cast<double>(plus) * (log2_[plus + 1] - lt) +
               static_cast<double>(minus) * (log2_[minus + 1] - lt);
    }

    int new_leaf(int var, int node, Words mask, int64_t total, int64_t plus) {
        leaves_.push_back(LeafInfo{var, node, std::move(mask), total, plus, 0, true});
        return static_cast<int>(leaves_.size()) - 1;
    }

    bool creates_cycle(int u, int v) const {
        // adding u -> v closes a cycle iff v already reaches u
        return (reach_[v][u / 64] >> (u % 64)) & 1ull;
    }

    void add_edge(int u, int v) {
        Words& bits = parent_bits_[v];
        if ((bits[u / 64] >> (u % 64)) & 1ull)
            return;
        bits[u / 64] |= 1ull << (u % 64);
        for (int a = 0; a < vars_; ++a) {
            if ((reach_[a][u / 64] >> (u % 64)) & 1ull) {
                Words& ra = reach_[a];
                const Words& rv = reach_[v];
                for (size_t w = 0; w < ra.size(); ++w)
                    ra[w] |= rv[w];
            }
        }
    }

    // best positive-gain split for a leaf among currently acyclic candidates
    void refresh_candidate(int leaf_id) {
        LeafInfo& leaf = leaves_[leaf_id];
        ++leaf.stamp;
        if (leaf.total < 2)
            return;
        double parent_ll = leaf_ll(leaf.plus, leaf.total);
        double best_gain = 0.0;
        int best_u = -1;
        const Words& vcol = columns_[leaf.var];
        for (int u = 0; u < vars_; ++u) {
            if (u == leaf.var || creates_cycle(u, leaf.var))
                continue;
            int64_t child_total = static_cast<int64_t>(count_and(leaf.mask, columns_[u]));
            if (child_total == 0 || child_total == leaf.total)
                continue; // empty split cannot gain
            int64_t child_plus =
                static_cast<int64_t>(count_and3(leaf.mask, columns_[u], vcol));
            double gain = leaf_ll(child_plus, child_total) +
                          leaf_ll(leaf.plus - child_plus, leaf.total - child_total) -
                          parent_ll - penalty_;
            if (gain > best_gain) {
                best_gain = gain;
                best_u = u;
            }
        }
        if (best_u >= 0)
            heap_.push(Candidate{best_gain, leaf.var, leaf_id, best_u, leaf.stamp});
    }

    void apply_split(int leaf_id, int u) {
        const int var = leaves_[leaf_id].var;
        DecisionTree& tree = model_.trees[var];

        Words mask_plus(words_), mask_minus(words_);
        {
            LeafInfo& leaf = leaves_[leaf_id];
            const Words& ucol = columns_[u];
            for (int w = 0; w < words_; ++w) {
                mask_plus[w] = leaf.mask[w] & ucol[w];
                mask_minus[w] = leaf.mask[w] & ~ucol[w];
            }
        }
        int64_t total_plus = 0, plus_plus, total_minus, plus_minus;
        {
            LeafInfo& leaf = leaves_[leaf_id];
            for (int w = 0; w < words_; ++w)
                total_plus += std::popcount(mask_plus[w]);
            plus_plus = static_cast<int64_t>(count_and(mask_plus, columns_[var]));
            total_minus = leaf.total - total_plus;
            plus_minus = leaf.plus - plus_plus;
        }

        int node_plus = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, -1, -1, laplace(plus_plus, total_plus)});
        int node_minus = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, -1, -1, laplace(plus_minus, total_minus)});

        {
            LeafInfo& leaf = leaves_[leaf_id];
            TreeNode& parent = tree.nodes[leaf.node];
            parent.test_var = u;
            parent.child_plus = node_plus;
            parent.child_minus = node_minus;
            leaf.alive = false;
            Words().swap(leaf.mask);
        }
        add_edge(u, var);

        int leaf_plus = new_leaf(var, node_plus, std::move(mask_plus), total_plus, plus_plus);
        int leaf_minus =
            new_leaf(var, node_minus, std::move(mask_minus), total_minus, plus_minus);
        refresh_candidate(leaf_plus);
        refresh_candidate(leaf_minus);
    }

    int rows_;
    int vars_;
    int words_;
    std::vector<Words> columns_;
    std::vector<double> log2_;
    double penalty_;
    std::vector<Words> reach_;
    std::vector<Words> parent_bits_;
    std::vector<LeafInfo> leaves_;
    std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> heap_;
    BayesianNetworkModel model_;
};

} // namespace

BayesianNetworkModel build_model(const std::vector<SpinConfiguration>& selected) {
    if (selected.empty())
        fail(Errc::invalid_argument, "cannot build a model from an empty selection");
    return ModelBuilder(selected).build();
}

std::vector<SpinConfiguration> sample_model(const BayesianNetworkModel& model, int count,
                                            Rng& rng) {
    if (count < 0)
        fail(Errc::invalid_argument, "sample count must be >= 0");
    std::vector<int> order = model.topological_order(); // rejects cyclic models

    std::vector<SpinConfiguration> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        SpinConfiguration values(model.num_vars, 0);
        for (int v : order) {
            const DecisionTree& tree = model.trees[v];
            int node = 0;
            while (tree.nodes[node].test_var >= 0) {
                const TreeNode& t = tree.nodes[node];
                node = values[t.test_var] > 0 ? t.child_plus : t.child_minus;
            }
            values[v] = rng.next_unit() < tree.nodes[node].p_plus ? int8_t{1} : int8_t{-1};
        }
        out.push_back(std::move(values));
    }
    return out;
}

} // namespace spinglass
