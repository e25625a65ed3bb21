#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsct/corpus.hpp"
#include "newsct/ctree.hpp"
#include "newsct/kdtree.hpp"
#include "newsct/topics.hpp"

namespace newsct {

enum class Variant { VMM, CVMM, HVMM, KCT };

Variant parse_variant(const std::string& name);  // throws std::invalid_argument
std::string variant_name(Variant v);

struct RecommenderConfig {
    Variant variant = Variant::VMM;
    ExpertConfig experts;
    int max_depth = 8;
    int k_rec = 5;
    std::size_t popular_size = 60;
    std::size_t fresh_size = 10;
    bool exhaustive_candidates = false;
};

struct ScoredItem {
    ItemIndex item = -1;
    double score = 0.0;
};
using Recommendation = std::vector<ScoredItem>;

// One logical online model: publications and clicks arrive in timestamp order,
// recommend() reads the current state, step() advances it.
class OnlineRecommender {
public:
    virtual ~OnlineRecommender() = default;
    virtual void on_publish(ItemIndex item) = 0;
    virtual Recommendation recommend(std::span<const ItemIndex> prefix, int k) = 0;
    virtual void step(std::span<const ItemIndex> prefix, ItemIndex x) = 0;
    virtual const GlobalStats& stats() const = 0;
};

// Eq.5 score for the content-based variant
double cvmm_score(std::span<const double> topic_probs, const TopicModel& model, ItemIndex n);

// The four context-tree recommenders. A topic model is required for every
// variant except VMM.
class CtRecommender : public OnlineRecommender {
public:
    CtRecommender(RecommenderConfig cfg, const TopicModel* topics);

    void on_publish(ItemIndex item) override;
    Recommendation recommend(std::span<const ItemIndex> prefix, int k) override;
    void step(std::span<const ItemIndex> prefix, ItemIndex x) override;
    const GlobalStats& stats() const override { return item_stats_; }

    // exact probability of a single candidate, used by the oracle tests
    double predict_item(std::span<const ItemIndex> prefix, ItemIndex x);
    // CVMM's underlying distribution over topics, also for oracle access
    std::vector<double> topic_distribution(std::span<const ItemIndex> prefix);
    // candidate set C before prefix exclusion is applied by recommend()
    std::vector<ItemIndex> candidates(std::span<const ItemIndex> prefix) const;

    const RecommenderConfig& config() const { return cfg_; }
    std::size_t tree_node_count() const;
    const SuffixContextTree* suffix_tree() const { return tree_.get(); }

private:
    std::vector<Symbol> context_key(std::span<const ItemIndex> prefix) const;
    void refresh_topic_fresh_override();

    RecommenderConfig cfg_;
    const TopicModel* topics_ = nullptr;
    GlobalStats item_stats_;
    std::optional<GlobalStats> topic_stats_;  // CVMM only
    std::unique_ptr<SuffixContextTree> tree_;
    std::unique_ptr<KdContextTree> kdtree_;
    std::vector<int> topic_of_;                      // cached top topic per item
    std::vector<std::vector<ItemIndex>> items_by_topic_;
    std::vector<ItemIndex> clicked_items_;           // items with c_x > 0
    std::vector<std::uint8_t> mark_;                 // scratch for dedup
};

}  // namespace newsct
