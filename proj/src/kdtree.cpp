#include "newsct/kdtree.hpp"

#include <cassert>
#include <cmath>

namespace newsct {

KdContextTree::KdContextTree(int dim, CtConfig cfg) : dim_(dim), cfg_(std::move(cfg)) {
    root_ = std::make_unique<Node>();
    root_->expert = ExpertState::make(cfg_.experts, 1.0);
}

KdContextTree::Node* KdContextTree::descend(const Eigen::VectorXd& key) const {
    Node* cur = root_.get();
    while (cur->left) cur = key(cur->axis) < cur->split ? cur->left.get() : cur->right.get();
    return cur;
}

std::vector<const ExpertState*> KdContextTree::active_path(const Eigen::VectorXd& key) const {
    std::vector<const ExpertState*> path;
    Node* cur = root_.get();
    path.push_back(&cur->expert);
    while (cur->left) {
        cur = key(cur->axis) < cur->split ? cur->left.get() : cur->right.get();
        path.push_back(&cur->expert);
    }
    return path;
}

std::vector<ExpertState*> KdContextTree::active_path(const Eigen::VectorXd& key) {
    std::vector<ExpertState*> path;
    Node* cur = root_.get();
    path.push_back(&cur->expert);
    while (cur->left) {
        cur = key(cur->axis) < cur->split ? cur->left.get() : cur->right.get();
        path.push_back(&cur->expert);
    }
    return path;
}

double KdContextTree::predict(const Eigen::VectorXd& key, Symbol x, const GlobalStats& g) const {
    auto path = active_path(key);
    return predict_along_path(path, g, x, cfg_.experts);
}

void KdContextTree::learn(const Eigen::VectorXd& key, Symbol x, const GlobalStats& g) {
    auto path = active_path(key);
    learn_along_path(path, g, x, cfg_.experts);
}

void KdContextTree::insert_at(Node* leaf, const Eigen::VectorXd& theta) {
    if (leaf->multiplicity == 0) {
        leaf->point = theta;
        leaf->multiplicity = 1;
        return;
    }
    if (leaf->point == theta) {
        ++leaf->multiplicity;
        return;
    }
    // split on axis = depth mod dim at the incumbent's coordinate; when the new
    // point is >= the incumbent on every axis that rule can never separate the
    // pair (both keep landing right), so split at the new coordinate instead
    Eigen::VectorXd incumbent = std::move(leaf->point);
    int incumbent_mult = leaf->multiplicity;
    leaf->point.resize(0);
    leaf->multiplicity = 0;
    leaf->axis = leaf->depth % dim_;
    bool dominates = true;
    for (int a = 0; a < dim_; ++a)
        if (theta(a) < incumbent(a)) { dominates = false; break; }
    leaf->split = dominates && theta(leaf->axis) > incumbent(leaf->axis) ? theta(leaf->axis)
                                                                        : incumbent(leaf->axis);
    double child_w = std::ldexp(1.0, -(leaf->depth + 1));
    leaf->left = std::make_unique<Node>();
    leaf->right = std::make_unique<Node>();
    for (Node* c : {leaf->left.get(), leaf->right.get()}) {
        c->depth = leaf->depth + 1;
        c->expert = ExpertState::make(cfg_.experts, child_w);
    }
    node_count_ += 2;

    Node* inc_leaf = incumbent(leaf->axis) < leaf->split ? leaf->left.get() : leaf->right.get();
    inc_leaf->point = std::move(incumbent);
    inc_leaf->multiplicity = incumbent_mult;
    Node* dst = theta(leaf->axis) < leaf->split ? leaf->left.get() : leaf->right.get();
    insert_at(dst, theta);
}

void KdContextTree::insert(const Eigen::VectorXd& theta) {
    assert(theta.size() == dim_);
    insert_at(descend(theta), theta);
}

void KdContextTree::score_candidates(const Eigen::VectorXd& key, const GlobalStats& g,
                                     std::span<const Symbol> candidates,
                                     std::span<double> out) const {
    auto path = active_path(key);
    if (scratch_.size() < static_cast<std::size_t>(g.universe()))
        scratch_.resize(static_cast<std::size_t>(g.universe()), 0.0);
    score_along_path(path, g, cfg_.experts, candidates, scratch_, out);
}

int KdContextTree::leaf_multiplicity(const Eigen::VectorXd& key) const {
    return descend(key)->multiplicity;
}

std::size_t KdContextTree::descent_depth(const Eigen::VectorXd& key) const {
    return active_path(key).size() - 1;
}

}  // namespace newsct
