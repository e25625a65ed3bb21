#pragma once

#include <map>
#include <vector>

#include "newsct/recsys.hpp"

namespace newsct {

// top-k items of the popularity window ranked by total clicks, ties by recency
// of publication; `exclude` is the session prefix
Recommendation most_popular(const GlobalStats& g, int k, std::span<const ItemIndex> exclude = {});

class MostPopularRecommender : public OnlineRecommender {
public:
    MostPopularRecommender(std::size_t popular_size, std::size_t fresh_size)
        : stats_(popular_size, fresh_size) {}

    void on_publish(ItemIndex item) override { stats_.publish(item); }
    Recommendation recommend(std::span<const ItemIndex> prefix, int k) override {
        return most_popular(stats_, k, prefix);
    }
    void step(std::span<const ItemIndex>, ItemIndex x) override { stats_.click(x); }
    const GlobalStats& stats() const override { return stats_; }

private:
    GlobalStats stats_;
};

// Fixed k-order Markov chain with a Dirichlet prior: only depth-k contexts
// predict; an unseen context backs off to the marginal item distribution.
class KOrderMarkovRecommender : public OnlineRecommender {
public:
    KOrderMarkovRecommender(int order, double alpha0, std::size_t popular_size,
                            std::size_t fresh_size)
        : order_(order), alpha0_(alpha0), stats_(popular_size, fresh_size) {}

    void on_publish(ItemIndex item) override { stats_.publish(item); }
    Recommendation recommend(std::span<const ItemIndex> prefix, int k) override;
    void step(std::span<const ItemIndex> prefix, ItemIndex x) override;
    const GlobalStats& stats() const override { return stats_; }

    double predict(std::span<const ItemIndex> prefix, ItemIndex x) const;

private:
    struct Row {
        std::unordered_map<Symbol, std::uint32_t> counts;
        std::uint64_t total = 0;
    };
    const Row* row_for(std::span<const ItemIndex> prefix) const;

    int order_;
    double alpha0_;
    GlobalStats stats_;
    std::map<std::vector<Symbol>, Row> table_;
    Row marginal_;
    std::vector<ItemIndex> clicked_;
};

}  // namespace newsct
