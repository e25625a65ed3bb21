#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "newsct/ctree.hpp"

namespace newsct {

// Context tree over [0,1]^Z: a k-d tree with one expert per node. Internal
// node at depth d splits on axis = d mod Z at the incumbent point's coordinate
// (< goes left, >= goes right); leaves hold one distinct point, identical
// points share a leaf.
class KdContextTree {
public:
    KdContextTree(int dim, CtConfig cfg);

    std::vector<const ExpertState*> active_path(const Eigen::VectorXd& key) const;
    std::vector<ExpertState*> active_path(const Eigen::VectorXd& key);

    double predict(const Eigen::VectorXd& key, Symbol x, const GlobalStats& g) const;
    void learn(const Eigen::VectorXd& key, Symbol x, const GlobalStats& g);
    void insert(const Eigen::VectorXd& theta);

    void score_candidates(const Eigen::VectorXd& key, const GlobalStats& g,
                          std::span<const Symbol> candidates, std::span<double> out) const;

    std::size_t node_count() const { return node_count_; }
    // multiplicity of the stored point at the leaf the query descends to
    int leaf_multiplicity(const Eigen::VectorXd& key) const;
    std::size_t descent_depth(const Eigen::VectorXd& key) const;

private:
    struct Node {
        int depth = 0;
        ExpertState expert;
        // internal when left != nullptr
        int axis = -1;
        double split = 0.0;
        std::unique_ptr<Node> left, right;
        // leaf payload
        Eigen::VectorXd point;
        int multiplicity = 0;
    };

    Node* descend(const Eigen::VectorXd& key) const;  // containing leaf
    void insert_at(Node* leaf, const Eigen::VectorXd& theta);

    int dim_;
    CtConfig cfg_;
    std::unique_ptr<Node> root_;
    std::size_t node_count_ = 1;
    mutable std::vector<double> scratch_;
};

}  // namespace newsct
