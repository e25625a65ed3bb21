#include "newsct/ctree.hpp"

#include <cassert>
#include <cmath>

namespace newsct {

double predict_along_path(std::span<const ExpertState* const> path, const GlobalStats& g,
                          Symbol x, const ExpertConfig& cfg) {
    assert(!path.empty());
    double q = mix_predict(*path[0], g, x, cfg);
    for (std::size_t k = 1; k < path.size(); ++k) {
        double p = mix_predict(*path[k], g, x, cfg);
        double w = path[k]->w;
        q = w * p + (1.0 - w) * q;
    }
    return q;
}

void learn_along_path(std::span<ExpertState* const> path, const GlobalStats& g, Symbol x,
                      const ExpertConfig& cfg) {
    double q = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        ExpertState& e = *path[k];
        ComponentPreds preds = component_predict(e, g, x, cfg);
        q = e.w * preds.mix + (1.0 - e.w) * q;
        if (q > 0.0) e.w = e.w * preds.mix / q;
        if (cfg.update == MixtureUpdate::Bayesian) bayesian_mixture_update(e, preds, cfg);
        observe(e, g, x);
    }
}

void score_along_path(std::span<const ExpertState* const> path, const GlobalStats& g,
                      const ExpertConfig& cfg, std::span<const Symbol> candidates,
                      std::vector<double>& scratch, std::span<double> out) {
    assert(!path.empty());
    const std::size_t t = path.size();

    // flat weight of expert k: w_k * prod_{j>k} (1 - w_j), with w_0 treated as 1
    std::vector<double> flat(t);
    double tail = 1.0;
    for (std::size_t k = t; k-- > 0;) {
        double w = k == 0 ? 1.0 : path[k]->w;
        flat[k] = w * tail;
        tail *= 1.0 - w;
    }

    const int universe = g.universe();
    double base = 0.0;       // alpha0 part of the std components
    double pop_coef = 0.0;   // total mass on the popularity component
    double fresh_coef = 0.0;
    std::vector<double> count_coef(t);
    for (std::size_t k = 0; k < t; ++k) {
        MixtureProbs p = mixture_probs(*path[k], cfg);
        double denom = static_cast<double>(path[k]->n_active) + universe * cfg.alpha0;
        count_coef[k] = flat[k] * p.std_ / denom;
        base += count_coef[k] * cfg.alpha0;
        pop_coef += flat[k] * p.pop_;
        fresh_coef += flat[k] * p.fresh_;
    }

    for (std::size_t k = 0; k < t; ++k) {
        if (count_coef[k] == 0.0) continue;
        for (const auto& [sym, c] : path[k]->counts)
            scratch[static_cast<std::size_t>(sym)] += count_coef[k] * c;
    }

    const double pop_denom = static_cast<double>(g.total_clicks()) + universe * cfg.alpha0;
    const double f = static_cast<double>(g.fresh_count());
    const double fresh_hit = 1.0 / (f + 1.0);
    const double fresh_miss = universe > static_cast<int>(f)
                                  ? 1.0 / ((f + 1.0) * (universe - f))
                                  : 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Symbol x = candidates[i];
        double q = base + scratch[static_cast<std::size_t>(x)];
        if (pop_coef > 0.0) q += pop_coef * (g.clicks(x) + cfg.alpha0) / pop_denom;
        if (fresh_coef > 0.0) q += fresh_coef * (g.is_fresh(x) ? fresh_hit : fresh_miss);
        out[i] = q;
    }

    for (std::size_t k = 0; k < t; ++k) {
        if (count_coef[k] == 0.0) continue;
        for (const auto& [sym, c] : path[k]->counts)
            scratch[static_cast<std::size_t>(sym)] = 0.0;
    }
}

SuffixContextTree::SuffixContextTree(CtConfig cfg) : cfg_(std::move(cfg)) {
    root_ = std::make_unique<Node>();
    root_->expert = ExpertState::make(cfg_.experts, 1.0);
}

std::vector<SuffixContextTree::Node*> SuffixContextTree::match_path(
    std::span<const Symbol> key) const {
    std::vector<Node*> path{root_.get()};
    Node* cur = root_.get();
    const int limit = std::min<int>(static_cast<int>(key.size()), cfg_.max_depth);
    for (int d = 1; d <= limit; ++d) {
        Symbol sym = key[key.size() - static_cast<std::size_t>(d)];
        auto it = cur->children.find(sym);
        if (it == cur->children.end()) break;
        cur = it->second.get();
        path.push_back(cur);
    }
    return path;
}

std::vector<const ExpertState*> SuffixContextTree::active_path(std::span<const Symbol> key) const {
    auto nodes = match_path(key);
    std::vector<const ExpertState*> out;
    out.reserve(nodes.size());
    for (Node* n : nodes) out.push_back(&n->expert);
    return out;
}

std::vector<ExpertState*> SuffixContextTree::active_path(std::span<const Symbol> key) {
    auto nodes = match_path(key);
    std::vector<ExpertState*> out;
    out.reserve(nodes.size());
    for (Node* n : nodes) out.push_back(&n->expert);
    return out;
}

double SuffixContextTree::predict(std::span<const Symbol> key, Symbol x,
                                  const GlobalStats& g) const {
    auto path = active_path(key);
    return predict_along_path(path, g, x, cfg_.experts);
}

void SuffixContextTree::learn(std::span<const Symbol> key, Symbol x, const GlobalStats& g) {
    auto nodes = match_path(key);
    std::vector<ExpertState*> path;
    path.reserve(nodes.size());
    for (Node* n : nodes) path.push_back(&n->expert);
    learn_along_path(path, g, x, cfg_.experts);

    // grow by one: extend the deepest match with the next suffix symbol
    int d = static_cast<int>(nodes.size()) - 1;
    if (d < std::min<int>(static_cast<int>(key.size()), cfg_.max_depth)) {
        Symbol sym = key[key.size() - static_cast<std::size_t>(d + 1)];
        auto child = std::make_unique<Node>();
        child->symbol = sym;
        child->depth = d + 1;
        child->expert = ExpertState::make(cfg_.experts, std::ldexp(1.0, -(d + 1)));
        nodes.back()->children.emplace(sym, std::move(child));
        ++node_count_;
    }
}

void SuffixContextTree::score_candidates(std::span<const Symbol> key, const GlobalStats& g,
                                         std::span<const Symbol> candidates,
                                         std::span<double> out) const {
    auto path = active_path(key);
    if (scratch_.size() < static_cast<std::size_t>(g.universe()))
        scratch_.resize(static_cast<std::size_t>(g.universe()), 0.0);
    score_along_path(path, g, cfg_.experts, candidates, scratch_, out);
}

}  // namespace newsct
