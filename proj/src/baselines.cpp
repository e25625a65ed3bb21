#include "newsct/baselines.hpp"

#include <algorithm>

namespace newsct {

Recommendation most_popular(const GlobalStats& g, int k, std::span<const ItemIndex> exclude) {
    std::vector<ItemIndex> items = g.popular_items();
    for (ItemIndex n : exclude) std::erase(items, n);
    auto better = [&](ItemIndex a, ItemIndex b) {
        if (g.clicks(a) != g.clicks(b)) return g.clicks(a) > g.clicks(b);
        if (g.pub_position(a) != g.pub_position(b)) return g.pub_position(a) > g.pub_position(b);
        return a < b;
    };
    std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, k)), items.size());
    std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(top), items.end(), better);
    Recommendation rec;
    rec.reserve(top);
    for (std::size_t i = 0; i < top; ++i)
        rec.push_back({items[i], static_cast<double>(g.clicks(items[i]))});
    return rec;
}

const KOrderMarkovRecommender::Row* KOrderMarkovRecommender::row_for(
    std::span<const ItemIndex> prefix) const {
    if (order_ == 0) return &marginal_;
    if (static_cast<int>(prefix.size()) < order_) return nullptr;
    std::vector<Symbol> ctx(prefix.end() - order_, prefix.end());
    auto it = table_.find(ctx);
    return it == table_.end() ? nullptr : &it->second;
}

double KOrderMarkovRecommender::predict(std::span<const ItemIndex> prefix, ItemIndex x) const {
    const Row* row = row_for(prefix);
    if (row == nullptr || row->total == 0) row = &marginal_;  // back-off
    int n = stats_.universe();
    if (n == 0) return 0.0;
    auto it = row->counts.find(x);
    double cnt = it == row->counts.end() ? 0.0 : it->second;
    return (cnt + alpha0_) / (static_cast<double>(row->total) + n * alpha0_);
}

Recommendation KOrderMarkovRecommender::recommend(std::span<const ItemIndex> prefix, int k) {
    Recommendation rec;
    if (prefix.empty() || stats_.universe() == 0 || k <= 0) return rec;
    std::vector<ItemIndex> cands = clicked_;
    for (ItemIndex n : stats_.fresh_items()) cands.push_back(n);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(stats_.universe()), 0);
    for (ItemIndex n : prefix)
        if (static_cast<std::size_t>(n) < seen.size()) seen[static_cast<std::size_t>(n)] = 1;
    std::vector<ItemIndex> uniq;
    for (ItemIndex n : cands) {
        if (!seen[static_cast<std::size_t>(n)]) {
            seen[static_cast<std::size_t>(n)] = 1;
            uniq.push_back(n);
        }
    }
    auto better = [&](ItemIndex a, ItemIndex b) {
        double sa = predict(prefix, a), sb = predict(prefix, b);
        if (sa != sb) return sa > sb;
        if (stats_.pub_position(a) != stats_.pub_position(b))
            return stats_.pub_position(a) > stats_.pub_position(b);
        return a < b;
    };
    std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), uniq.size());
    std::partial_sort(uniq.begin(), uniq.begin() + static_cast<std::ptrdiff_t>(top), uniq.end(), better);
    for (std::size_t i = 0; i < top; ++i) rec.push_back({uniq[i], predict(prefix, uniq[i])});
    return rec;
}

void KOrderMarkovRecommender::step(std::span<const ItemIndex> prefix, ItemIndex x) {
    if (order_ > 0 && static_cast<int>(prefix.size()) >= order_) {
        std::vector<Symbol> ctx(prefix.end() - order_, prefix.end());
        Row& row = table_[ctx];
        ++row.counts[x];
        ++row.total;
    }
    ++marginal_.counts[x];
    ++marginal_.total;
    if (!stats_.ever_clicked(x)) clicked_.push_back(x);
    stats_.click(x);
}

}  // namespace newsct
