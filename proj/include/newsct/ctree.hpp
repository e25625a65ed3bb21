#pragma once

#include <memory>
#include <span>
#include <vector>

#include "newsct/experts.hpp"

namespace newsct {

struct CtConfig {
    ExpertConfig experts;
    int max_depth = 8;
};

// Shared BVMM inference chain over an active root-to-leaf path.
// q_0 = P_0(x|s); q_k = w_k P_k(x|s) + (1 - w_k) q_{k-1}; the deepest q is the
// model prediction. learn additionally rescales each weight by p/q, applies the
// Bayesian mixture update when configured, and advances the expert counts.
double predict_along_path(std::span<const ExpertState* const> path, const GlobalStats& g,
                          Symbol x, const ExpertConfig& cfg);
void learn_along_path(std::span<ExpertState* const> path, const GlobalStats& g, Symbol x,
                      const ExpertConfig& cfg);

// Batch scorer: same mixture as predict_along_path, expanded into per-expert
// flat weights so one recommend call costs O(path counts + candidates) instead
// of O(candidates * path). scratch must be zero-filled and at least universe
// long; it is restored to zero before returning.
void score_along_path(std::span<const ExpertState* const> path, const GlobalStats& g,
                      const ExpertConfig& cfg, std::span<const Symbol> candidates,
                      std::vector<double>& scratch, std::span<double> out);

// Suffix tree over sequences of symbols. A node at depth k matches the key's
// k-long suffix; its initial weight is 2^-k, the root's weight is pinned at 1.
class SuffixContextTree {
public:
    explicit SuffixContextTree(CtConfig cfg);

    std::vector<const ExpertState*> active_path(std::span<const Symbol> key) const;
    std::vector<ExpertState*> active_path(std::span<const Symbol> key);

    double predict(std::span<const Symbol> key, Symbol x, const GlobalStats& g) const;

    // Walks the active path, updates it and grows the tree by at most one node
    // (the deepest match is extended by one symbol while below max_depth).
    // GlobalStats is read-only here; the caller advances it afterwards.
    void learn(std::span<const Symbol> key, Symbol x, const GlobalStats& g);

    void score_candidates(std::span<const Symbol> key, const GlobalStats& g,
                          std::span<const Symbol> candidates, std::span<double> out) const;

    std::size_t node_count() const { return node_count_; }
    const CtConfig& config() const { return cfg_; }
    const ExpertState& root_expert() const { return root_->expert; }

private:
    struct Node {
        Symbol symbol = -1;
        int depth = 0;
        ExpertState expert;
        std::unordered_map<Symbol, std::unique_ptr<Node>> children;
    };

    std::vector<Node*> match_path(std::span<const Symbol> key) const;

    CtConfig cfg_;
    std::unique_ptr<Node> root_;
    std::size_t node_count_ = 1;
    mutable std::vector<double> scratch_;
};

}  // namespace newsct
