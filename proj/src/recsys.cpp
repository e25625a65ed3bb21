#include "newsct/recsys.hpp"

#include <algorithm>
#include <stdexcept>

namespace newsct {

Variant parse_variant(const std::string& name) {
    if (name == "vmm" || name == "VMM") return Variant::VMM;
    if (name == "cvmm" || name == "CVMM") return Variant::CVMM;
    if (name == "hvmm" || name == "HVMM") return Variant::HVMM;
    if (name == "kct" || name == "KCT" || name == "k-ct") return Variant::KCT;
    throw std::invalid_argument("unknown variant: " + name);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::VMM: return "VMM";
        case Variant::CVMM: return "CVMM";
        case Variant::HVMM: return "HVMM";
        case Variant::KCT: return "KCT";
    }
    return "?";
}

double cvmm_score(std::span<const double> topic_probs, const TopicModel& model, ItemIndex n) {
    double best = 0.0;
    for (int j = 0; j < model.Z; ++j)
        best = std::max(best, topic_probs[static_cast<std::size_t>(j)] * model.theta(n, j));
    return best;
}

CtRecommender::CtRecommender(RecommenderConfig cfg, const TopicModel* topics)
    : cfg_(std::move(cfg)), topics_(topics), item_stats_(cfg_.popular_size, cfg_.fresh_size) {
    if (cfg_.variant != Variant::VMM && (topics_ == nullptr || topics_->Z < 1))
        throw std::invalid_argument("variant requires a topic model");
    CtConfig tree_cfg{cfg_.experts, cfg_.max_depth};
    switch (cfg_.variant) {
        case Variant::VMM:
        case Variant::HVMM:
            tree_ = std::make_unique<SuffixContextTree>(tree_cfg);
            break;
        case Variant::CVMM: {
            tree_ = std::make_unique<SuffixContextTree>(tree_cfg);
            topic_stats_.emplace(cfg_.popular_size, cfg_.fresh_size);
            for (int z = 0; z < topics_->Z; ++z) topic_stats_->publish(z);
            refresh_topic_fresh_override();
            break;
        }
        case Variant::KCT:
            kdtree_ = std::make_unique<KdContextTree>(topics_->Z, tree_cfg);
            break;
    }
    if (topics_) items_by_topic_.resize(static_cast<std::size_t>(topics_->Z));
}

void CtRecommender::on_publish(ItemIndex item) {
    item_stats_.publish(item);
    if (topics_) {
        if (topic_of_.size() <= static_cast<std::size_t>(item)) topic_of_.resize(static_cast<std::size_t>(item) + 1, 0);
        int z = top_topic(topics_->theta.row(item).transpose());
        topic_of_[static_cast<std::size_t>(item)] = z;
        items_by_topic_[static_cast<std::size_t>(z)].push_back(item);
    }
    if (topic_stats_) refresh_topic_fresh_override();
}

std::vector<Symbol> CtRecommender::context_key(std::span<const ItemIndex> prefix) const {
    std::vector<Symbol> key;
    key.reserve(prefix.size());
    if (cfg_.variant == Variant::VMM) {
        key.assign(prefix.begin(), prefix.end());
    } else {
        for (ItemIndex n : prefix) key.push_back(topic_of_[static_cast<std::size_t>(n)]);
    }
    return key;
}

void CtRecommender::refresh_topic_fresh_override() {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(topics_->Z), 0);
    std::size_t count = 0;
    for (ItemIndex n : item_stats_.fresh_items()) {
        auto z = static_cast<std::size_t>(topic_of_[static_cast<std::size_t>(n)]);
        if (!mask[z]) { mask[z] = 1; ++count; }
    }
    // a fully fresh topic alphabet would make Eq.8's non-fresh branch undefined
    if (count >= static_cast<std::size_t>(topics_->Z) && count > 0) {
        mask[static_cast<std::size_t>(topics_->Z - 1)] = 0;
        --count;
    }
    topic_stats_->set_fresh_override(std::move(mask), count);
}

std::vector<double> CtRecommender::topic_distribution(std::span<const ItemIndex> prefix) {
    refresh_topic_fresh_override();
    auto key = context_key(prefix);
    std::vector<Symbol> all(static_cast<std::size_t>(topics_->Z));
    for (int z = 0; z < topics_->Z; ++z) all[static_cast<std::size_t>(z)] = z;
    std::vector<double> probs(all.size());
    tree_->score_candidates(key, *topic_stats_, all, probs);
    return probs;
}

std::vector<ItemIndex> CtRecommender::candidates(std::span<const ItemIndex> prefix) const {
    std::vector<ItemIndex> out;
    if (cfg_.exhaustive_candidates) {
        out = item_stats_.published_order();
        return out;
    }
    auto& mark = const_cast<CtRecommender*>(this)->mark_;
    mark.assign(static_cast<std::size_t>(item_stats_.universe()), 0);
    auto push = [&](ItemIndex n) {
        if (!mark[static_cast<std::size_t>(n)]) {
            mark[static_cast<std::size_t>(n)] = 1;
            out.push_back(n);
        }
    };
    if (cfg_.variant == Variant::CVMM) {
        // items whose top topic has support in the active topic experts; the
        // root expert's counts cover every active expert's support
        const ExpertState& root = tree_->root_expert();
        for (const auto& [z, c] : root.counts) {
            if (c == 0) continue;
            for (ItemIndex n : items_by_topic_[static_cast<std::size_t>(z)]) push(n);
        }
    } else {
        for (ItemIndex n : clicked_items_) push(n);
    }
    for (ItemIndex n : item_stats_.popular_items()) push(n);
    for (ItemIndex n : item_stats_.fresh_items()) push(n);
    (void)prefix;
    return out;
}

Recommendation CtRecommender::recommend(std::span<const ItemIndex> prefix, int k) {
    Recommendation rec;
    if (prefix.empty() || item_stats_.universe() == 0 || k <= 0) return rec;

    std::vector<ItemIndex> cands = candidates(prefix);
    // exclude the session prefix
    std::vector<std::uint8_t> excluded(static_cast<std::size_t>(item_stats_.universe()), 0);
    for (ItemIndex n : prefix)
        if (static_cast<std::size_t>(n) < excluded.size()) excluded[static_cast<std::size_t>(n)] = 1;
    std::erase_if(cands, [&](ItemIndex n) { return excluded[static_cast<std::size_t>(n)]; });
    if (cands.empty()) return rec;

    std::vector<double> scores(cands.size());
    switch (cfg_.variant) {
        case Variant::VMM:
        case Variant::HVMM: {
            auto key = context_key(prefix);
            tree_->score_candidates(key, item_stats_, cands, scores);
            break;
        }
        case Variant::CVMM: {
            auto probs = topic_distribution(prefix);
            for (std::size_t i = 0; i < cands.size(); ++i)
                scores[i] = cvmm_score(probs, *topics_, cands[i]);
            break;
        }
        case Variant::KCT: {
            Eigen::VectorXd key = topics_->theta.row(prefix.back()).transpose();
            kdtree_->score_candidates(key, item_stats_, cands, scores);
            break;
        }
    }

    std::vector<std::size_t> order(cands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        std::int32_t pa = item_stats_.pub_position(cands[a]);
        std::int32_t pb = item_stats_.pub_position(cands[b]);
        if (pa != pb) return pa > pb;  // more recent publication first
        return cands[a] < cands[b];
    };
    std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(), better);
    rec.reserve(top);
    for (std::size_t i = 0; i < top; ++i) rec.push_back({cands[order[i]], scores[order[i]]});
    return rec;
}

double CtRecommender::predict_item(std::span<const ItemIndex> prefix, ItemIndex x) {
    switch (cfg_.variant) {
        case Variant::VMM:
        case Variant::HVMM: {
            auto key = context_key(prefix);
            return tree_->predict(key, x, item_stats_);
        }
        case Variant::CVMM: {
            auto probs = topic_distribution(prefix);
            return cvmm_score(probs, *topics_, x);
        }
        case Variant::KCT: {
            if (prefix.empty()) return 0.0;
            Eigen::VectorXd key = topics_->theta.row(prefix.back()).transpose();
            return kdtree_->predict(key, x, item_stats_);
        }
    }
    return 0.0;
}

void CtRecommender::step(std::span<const ItemIndex> prefix, ItemIndex x) {
    switch (cfg_.variant) {
        case Variant::VMM: {
            auto key = context_key(prefix);
            tree_->learn(key, x, item_stats_);
            break;
        }
        case Variant::CVMM: {
            refresh_topic_fresh_override();
            auto key = context_key(prefix);
            tree_->learn(key, topic_of_[static_cast<std::size_t>(x)], *topic_stats_);
            break;
        }
        case Variant::HVMM: {
            auto key = context_key(prefix);
            tree_->learn(key, x, item_stats_);
            break;
        }
        case Variant::KCT: {
            if (!prefix.empty()) {
                Eigen::VectorXd key = topics_->theta.row(prefix.back()).transpose();
                kdtree_->learn(key, x, item_stats_);
            }
            kdtree_->insert(topics_->theta.row(x).transpose());
            break;
        }
    }
    if (!item_stats_.ever_clicked(x)) clicked_items_.push_back(x);
    item_stats_.click(x);
    if (topic_stats_) {
        topic_stats_->click(topic_of_[static_cast<std::size_t>(x)]);
        refresh_topic_fresh_override();
    }
}

std::size_t CtRecommender::tree_node_count() const {
    return tree_ ? tree_->node_count() : kdtree_->node_count();
}

}  // namespace newsct
