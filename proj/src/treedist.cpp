// SPDX-License-Identifier: Apache-2.0
//
// Ordered-tree edit distance with unit insert/delete/relabel costs
// (Zhang & Shasha's keyroot dynamic program).
#include <algorithm>
#include <map>
#include <vector>

#include "scriv/metrics.hpp"

namespace scriv::metrics {

namespace {

struct PostorderTree {
    std::vector<int> label;  // by postorder index
    std::vector<int> lml;    // leftmost leaf descendant, postorder index
    std::vector<int> keyroots;
    int size = 0;
};

void postorder_walk(const LayoutTree& t, int node, std::map<std::string, int>& interner,
                    PostorderTree& out, std::vector<int>& lml_of_node) {
    int leftmost = -1;
    for (int child : t.nodes[static_cast<size_t>(node)].children) {
        postorder_walk(t, child, interner, out, lml_of_node);
        if (leftmost < 0) leftmost = lml_of_node[static_cast<size_t>(child)];
    }
    const auto& name = t.nodes[static_cast<size_t>(node)].label;
    auto [it, inserted] = interner.emplace(name, static_cast<int>(interner.size()));
    const int self = out.size;
    out.label.push_back(it->second);
    out.lml.push_back(leftmost < 0 ? self : leftmost);
    lml_of_node[static_cast<size_t>(node)] = out.lml.back();
    out.size += 1;
}

PostorderTree index_tree(const LayoutTree& t, std::map<std::string, int>& interner) {
    PostorderTree out;
    std::vector<int> lml_of_node(t.nodes.size(), -1);
    postorder_walk(t, 0, interner, out, lml_of_node);
    // keyroots: highest node of each distinct leftmost-leaf chain
    std::map<int, int> last_with_lml;
    for (int i = 0; i < out.size; ++i) last_with_lml[out.lml[static_cast<size_t>(i)]] = i;
    for (auto& [lml, node] : last_with_lml) out.keyroots.push_back(node);
    std::sort(out.keyroots.begin(), out.keyroots.end());
    return out;
}

}  // namespace

int64_t tree_edit_distance(const LayoutTree& a, const LayoutTree& b) {
    std::map<std::string, int> interner;
    const PostorderTree t1 = index_tree(a, interner);
    const PostorderTree t2 = index_tree(b, interner);
    const int n = t1.size, m = t2.size;
    std::vector<std::vector<int64_t>> treedist(static_cast<size_t>(n),
                                               std::vector<int64_t>(static_cast<size_t>(m), 0));
    // forest distance scratch, indexed 0..n x 0..m (0 = empty forest)
    std::vector<std::vector<int64_t>> fd(static_cast<size_t>(n + 1),
                                         std::vector<int64_t>(static_cast<size_t>(m + 1), 0));
    for (int ik : t1.keyroots)
        for (int jk : t2.keyroots) {
            const int li = t1.lml[static_cast<size_t>(ik)];
            const int lj = t2.lml[static_cast<size_t>(jk)];
            fd[0][0] = 0;
            for (int i = li; i <= ik; ++i) fd[static_cast<size_t>(i - li + 1)][0] = static_cast<int64_t>(i - li + 1);
            for (int j = lj; j <= jk; ++j) fd[0][static_cast<size_t>(j - lj + 1)] = static_cast<int64_t>(j - lj + 1);
            for (int i = li; i <= ik; ++i)
                for (int j = lj; j <= jk; ++j) {
                    const size_t fi = static_cast<size_t>(i - li + 1);
                    const size_t fj = static_cast<size_t>(j - lj + 1);
                    if (t1.lml[static_cast<size_t>(i)] == li && t2.lml[static_cast<size_t>(j)] == lj) {
                        const int64_t relabel =
                            t1.label[static_cast<size_t>(i)] == t2.label[static_cast<size_t>(j)] ? 0 : 1;
                        fd[fi][fj] = std::min({fd[fi - 1][fj] + 1, fd[fi][fj - 1] + 1,
                                               fd[fi - 1][fj - 1] + relabel});
                        treedist[static_cast<size_t>(i)][static_cast<size_t>(j)] = fd[fi][fj];
                    } else {
                        const size_t pi = static_cast<size_t>(t1.lml[static_cast<size_t>(i)] - li);
                        const size_t pj = static_cast<size_t>(t2.lml[static_cast<size_t>(j)] - lj);
                        fd[fi][fj] = std::min(
                            {fd[fi - 1][fj] + 1, fd[fi][fj - 1] + 1,
                             fd[pi][pj] + treedist[static_cast<size_t>(i)][static_cast<size_t>(j)]});
                    }
                }
        }
    return treedist[static_cast<size_t>(n - 1)][static_cast<size_t>(m - 1)];
}

double loer(const LayoutTree& pred, const LayoutTree& gt) {
    // n_nodes excludes the synthetic root; every node including the root's
    // children contributes one edge
    const int64_t nodes = gt.size_without_root();
    const int64_t edges = gt.size_without_root();
    const int64_t denom = nodes + edges;
    if (denom == 0) return tree_edit_distance(pred, gt) == 0 ? 0.0 : 1.0;
    return static_cast<double>(tree_edit_distance(pred, gt)) / static_cast<double>(denom);
}

double loer(const Document& pred, const Document& gt) {
    return loer(layout_tree(pred), layout_tree(gt));
}

}  // namespace scriv::metrics
