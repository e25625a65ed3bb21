#include "newsct/experts.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace newsct {

std::string ExpertConfig::mixture_name() const {
    std::string name = "std";
    if (use_pop) name += "+pop";
    if (use_fresh) name += "+fresh";
    return name;
}

void set_mixture(ExpertConfig& cfg, const std::string& name) {
    if (name == "std") { cfg.use_pop = false; cfg.use_fresh = false; }
    else if (name == "std+pop") { cfg.use_pop = true; cfg.use_fresh = false; }
    else if (name == "std+fresh") { cfg.use_pop = false; cfg.use_fresh = true; }
    else if (name == "std+pop+fresh") { cfg.use_pop = true; cfg.use_fresh = true; }
    else throw std::invalid_argument("unknown mixture: " + name);
}

GlobalStats::GlobalStats(std::size_t popular_size, std::size_t fresh_size)
    : r_(popular_size), s_(fresh_size) {}

void GlobalStats::publish(Symbol x) {
    std::size_t need = static_cast<std::size_t>(x) + 1;
    if (clicks_.size() < need) {
        clicks_.resize(need, 0);
        window_count_.resize(need, 0);
        pub_position_.resize(need, -1);
        read_.resize(need, 0);
    }
    if (pub_position_[static_cast<std::size_t>(x)] >= 0) return;  // already published
    pub_position_[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(published_.size());
    published_.push_back(x);
    unread_pubpos_.insert(pub_position_[static_cast<std::size_t>(x)]);
    refresh_threshold();
}

void GlobalStats::click(Symbol x) {
    assert(pub_position_[static_cast<std::size_t>(x)] >= 0);
    ++clicks_[static_cast<std::size_t>(x)];
    ++total_clicks_;
    if (!read_[static_cast<std::size_t>(x)]) {
        read_[static_cast<std::size_t>(x)] = 1;
        unread_pubpos_.erase(pub_position_[static_cast<std::size_t>(x)]);
        refresh_threshold();
    }
    if (r_ == 0) return;
    window_.push_back(x);
    if (window_count_[static_cast<std::size_t>(x)]++ == 0) ++popular_distinct_;
    if (window_.size() > r_) {
        Symbol old = window_.front();
        window_.pop_front();
        if (--window_count_[static_cast<std::size_t>(old)] == 0) --popular_distinct_;
    }
}

std::uint32_t GlobalStats::clicks(Symbol x) const {
    return static_cast<std::size_t>(x) < clicks_.size() ? clicks_[static_cast<std::size_t>(x)] : 0;
}

bool GlobalStats::ever_clicked(Symbol x) const {
    return static_cast<std::size_t>(x) < read_.size() && read_[static_cast<std::size_t>(x)];
}

bool GlobalStats::is_popular(Symbol x) const {
    return static_cast<std::size_t>(x) < window_count_.size() &&
           window_count_[static_cast<std::size_t>(x)] > 0;
}

std::vector<Symbol> GlobalStats::popular_items() const {
    std::vector<Symbol> out;
    out.reserve(popular_distinct_);
    std::vector<std::uint8_t> seen(window_count_.size(), 0);
    for (auto it = window_.rbegin(); it != window_.rend(); ++it) {
        if (!seen[static_cast<std::size_t>(*it)]) {
            seen[static_cast<std::size_t>(*it)] = 1;
            out.push_back(*it);
        }
    }
    return out;
}

void GlobalStats::refresh_threshold() {
    // effective capacity keeps |F| < |N|
    std::size_t cap = std::min(s_, published_.empty() ? 0 : published_.size() - 1);
    if (cap == 0 || unread_pubpos_.empty()) {
        fresh_threshold_ = static_cast<std::int32_t>(published_.size());  // nothing fresh
        return;
    }
    if (unread_pubpos_.size() <= cap) {
        fresh_threshold_ = *unread_pubpos_.begin();
        return;
    }
    auto it = unread_pubpos_.end();
    for (std::size_t i = 0; i < cap; ++i) --it;
    fresh_threshold_ = *it;
}

bool GlobalStats::is_fresh(Symbol x) const {
    if (has_override_)
        return static_cast<std::size_t>(x) < override_mask_.size() &&
               override_mask_[static_cast<std::size_t>(x)];
    if (static_cast<std::size_t>(x) >= read_.size()) return false;
    if (read_[static_cast<std::size_t>(x)]) return false;
    std::int32_t pos = pub_position_[static_cast<std::size_t>(x)];
    return pos >= fresh_threshold_;
}

std::size_t GlobalStats::fresh_count() const {
    if (has_override_) return override_count_;
    std::size_t cap = std::min(s_, published_.empty() ? 0 : published_.size() - 1);
    return std::min(cap, unread_pubpos_.size());
}

std::vector<Symbol> GlobalStats::fresh_items() const {
    std::vector<Symbol> out;
    if (has_override_) {
        for (std::size_t i = 0; i < override_mask_.size(); ++i)
            if (override_mask_[i]) out.push_back(static_cast<Symbol>(i));
        return out;
    }
    std::size_t n = fresh_count();
    out.reserve(n);
    for (auto it = unread_pubpos_.rbegin(); it != unread_pubpos_.rend() && out.size() < n; ++it)
        out.push_back(published_[static_cast<std::size_t>(*it)]);
    return out;
}

void GlobalStats::set_fresh_override(std::vector<std::uint8_t> mask, std::size_t count) {
    has_override_ = true;
    override_mask_ = std::move(mask);
    override_count_ = count;
}

void GlobalStats::clear_fresh_override() {
    has_override_ = false;
    override_mask_.clear();
    override_count_ = 0;
}

std::int32_t GlobalStats::pub_position(Symbol x) const {
    return static_cast<std::size_t>(x) < pub_position_.size()
               ? pub_position_[static_cast<std::size_t>(x)]
               : -1;
}

ExpertState ExpertState::make(const ExpertConfig& cfg, double weight) {
    ExpertState e;
    e.w = weight;
    int active = 1 + (cfg.use_pop ? 1 : 0) + (cfg.use_fresh ? 1 : 0);
    double u = 1.0 / active;
    e.p_std = u;
    e.p_pop = cfg.use_pop ? u : 0.0;
    e.p_fresh = cfg.use_fresh ? u : 0.0;
    return e;
}

double std_predict(const ExpertState& e, const GlobalStats& g, Symbol x, double alpha0) {
    int n = g.universe();
    if (n == 0) throw std::invalid_argument("std_predict: empty universe");
    double denom = static_cast<double>(e.n_active) + n * alpha0;
    return (e.count(x) + alpha0) / denom;
}

double pop_predict(const GlobalStats& g, Symbol x, double alpha0) {
    int n = g.universe();
    if (n == 0) throw std::invalid_argument("pop_predict: empty universe");
    double denom = static_cast<double>(g.total_clicks()) + n * alpha0;
    return (g.clicks(x) + alpha0) / denom;
}

double fresh_predict(const GlobalStats& g, Symbol x) {
    int n = g.universe();
    if (n == 0) throw std::invalid_argument("fresh_predict: empty universe");
    double f = static_cast<double>(g.fresh_count());
    if (g.is_fresh(x)) return 1.0 / (f + 1.0);
    return 1.0 / ((f + 1.0) * (n - f));
}

MixtureProbs dirichlet_mixture_probs(const ExpertState& e, double alpha0) {
    double denom = 2.0 * alpha0 + static_cast<double>(e.n_active);
    MixtureProbs p;
    p.pop_ = (static_cast<double>(e.n_pop) + alpha0) / denom;
    p.fresh_ = (static_cast<double>(e.n_fresh) + alpha0) / denom;
    p.std_ = 1.0 - p.pop_ - p.fresh_;
    if (p.std_ < 0.0 && p.std_ >= -1e-12) p.std_ = 0.0;  // rounding clamp
    return p;
}

MixtureProbs mixture_probs(const ExpertState& e, const ExpertConfig& cfg) {
    MixtureProbs p;
    if (cfg.update == MixtureUpdate::Bayesian) {
        p.std_ = e.p_std;
        p.pop_ = e.p_pop;
        p.fresh_ = e.p_fresh;
    } else {
        p = dirichlet_mixture_probs(e, cfg.alpha0);
    }
    if (!cfg.use_pop) p.pop_ = 0.0;
    if (!cfg.use_fresh) p.fresh_ = 0.0;
    double total = p.std_ + p.pop_ + p.fresh_;
    if (total <= 0.0) return {1.0, 0.0, 0.0};
    p.std_ /= total;
    p.pop_ /= total;
    p.fresh_ /= total;
    return p;
}

ComponentPreds component_predict(const ExpertState& e, const GlobalStats& g, Symbol x,
                                 const ExpertConfig& cfg) {
    MixtureProbs p = mixture_probs(e, cfg);
    ComponentPreds out;
    out.std_ = std_predict(e, g, x, cfg.alpha0);
    out.pop_ = cfg.use_pop ? pop_predict(g, x, cfg.alpha0) : 0.0;
    out.fresh_ = cfg.use_fresh ? fresh_predict(g, x) : 0.0;
    out.mix = p.std_ * out.std_ + p.pop_ * out.pop_ + p.fresh_ * out.fresh_;
    return out;
}

double mix_predict(const ExpertState& e, const GlobalStats& g, Symbol x, const ExpertConfig& cfg) {
    return component_predict(e, g, x, cfg).mix;
}

void bayesian_mixture_update(ExpertState& e, const ComponentPreds& preds, const ExpertConfig& cfg) {
    if (preds.mix <= 0.0) return;  // cannot occur with alpha0 > 0
    MixtureProbs p = mixture_probs(e, cfg);
    e.p_std = p.std_ * preds.std_ / preds.mix;
    e.p_pop = p.pop_ * preds.pop_ / preds.mix;
    e.p_fresh = p.fresh_ * preds.fresh_ / preds.mix;
    double total = e.p_std + e.p_pop + e.p_fresh;
    if (total > 0.0) {
        e.p_std /= total;
        e.p_pop /= total;
        e.p_fresh /= total;
    }
}

void observe(ExpertState& e, const GlobalStats& g, Symbol x) {
    ++e.counts[x];
    ++e.n_active;
    if (g.is_popular(x)) ++e.n_pop;
    if (g.is_fresh(x)) ++e.n_fresh;
}

}  // namespace newsct
