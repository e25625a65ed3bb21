#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace newsct {

// Dense symbol: an item index or a topic index depending on the tree alphabet.
using Symbol = std::int32_t;

enum class MixtureUpdate { Dirichlet, Bayesian };

struct ExpertConfig {
    bool use_pop = true;
    bool use_fresh = true;
    MixtureUpdate update = MixtureUpdate::Bayesian;
    double alpha0 = 0.01;

    std::string mixture_name() const;
};

// parses "std", "std+pop", "std+fresh", "std+pop+fresh"; throws std::invalid_argument
void set_mixture(ExpertConfig& cfg, const std::string& name);

// Global click counts, popularity window and fresh set shared by all experts
// of one model instance. Single writer; reads are cheap.
//
// The fresh set holds the most recently published never-clicked symbols. Its
// effective capacity is min(fresh_size, universe - 1) so the freshness
// distribution stays proper even when everything published is still unread.
class GlobalStats {
public:
    GlobalStats(std::size_t popular_size, std::size_t fresh_size);

    void publish(Symbol x);
    void click(Symbol x);

    int universe() const { return static_cast<int>(published_.size()); }
    std::uint64_t total_clicks() const { return total_clicks_; }
    std::uint32_t clicks(Symbol x) const;
    bool ever_clicked(Symbol x) const;

    bool is_popular(Symbol x) const;
    std::size_t popular_count() const { return popular_distinct_; }
    // distinct items of the window, most recently clicked first
    std::vector<Symbol> popular_items() const;

    bool is_fresh(Symbol x) const;
    std::size_t fresh_count() const;
    std::vector<Symbol> fresh_items() const;  // most recently published first

    // CVMM runs its tree over topics whose freshness is derived from the
    // item-level fresh set; the override replaces the internal rule.
    void set_fresh_override(std::vector<std::uint8_t> mask, std::size_t count);
    void clear_fresh_override();

    std::int32_t pub_position(Symbol x) const;  // -1 if unpublished
    const std::vector<Symbol>& published_order() const { return published_; }

    std::size_t popular_size() const { return r_; }
    std::size_t fresh_size() const { return s_; }

private:
    void refresh_threshold();

    std::size_t r_, s_;
    std::vector<std::uint32_t> clicks_;
    std::uint64_t total_clicks_ = 0;
    std::deque<Symbol> window_;
    std::vector<std::uint32_t> window_count_;
    std::size_t popular_distinct_ = 0;
    std::vector<Symbol> published_;
    std::vector<std::int32_t> pub_position_;
    std::vector<std::uint8_t> read_;
    std::set<std::int32_t> unread_pubpos_;
    std::int32_t fresh_threshold_ = 0;  // pub position; >= means fresh

    bool has_override_ = false;
    std::vector<std::uint8_t> override_mask_;
    std::size_t override_count_ = 0;
};

// Per-context expert: Dirichlet counts, mixture probabilities, BVMM weight.
struct ExpertState {
    std::unordered_map<Symbol, std::uint32_t> counts;  // alpha_x
    std::uint64_t n_active = 0;                        // sum of counts
    std::uint64_t n_pop = 0, n_fresh = 0;
    double w = 1.0;
    // Bayesian-mode mixture state; initialised uniform over enabled components
    double p_std = 1.0, p_pop = 0.0, p_fresh = 0.0;

    static ExpertState make(const ExpertConfig& cfg, double weight);
    std::uint32_t count(Symbol x) const {
        auto it = counts.find(x);
        return it == counts.end() ? 0u : it->second;
    }
};

struct MixtureProbs {
    double std_ = 1.0, pop_ = 0.0, fresh_ = 0.0;
};

struct ComponentPreds {
    double std_ = 0.0, pop_ = 0.0, fresh_ = 0.0, mix = 0.0;
};

// Eq-level building blocks. All of them require a non-empty universe.
double std_predict(const ExpertState& e, const GlobalStats& g, Symbol x, double alpha0);
double pop_predict(const GlobalStats& g, Symbol x, double alpha0);
double fresh_predict(const GlobalStats& g, Symbol x);

// Dirichlet-prior mixture probabilities (recomputed from counts on every call)
MixtureProbs dirichlet_mixture_probs(const ExpertState& e, double alpha0);

// mixture probabilities actually used for prediction: Dirichlet-derived or the
// stored Bayesian-updated ones, with excluded components renormalised away
MixtureProbs mixture_probs(const ExpertState& e, const ExpertConfig& cfg);

ComponentPreds component_predict(const ExpertState& e, const GlobalStats& g, Symbol x,
                                 const ExpertConfig& cfg);
double mix_predict(const ExpertState& e, const GlobalStats& g, Symbol x, const ExpertConfig& cfg);

// posterior reweighting of the stored mixture probabilities
void bayesian_mixture_update(ExpertState& e, const ComponentPreds& preds, const ExpertConfig& cfg);

// advances alpha_x / alpha_pop / alpha_fresh; membership in P and F is
// evaluated against `g` as passed, i.e. before GlobalStats itself advances
void observe(ExpertState& e, const GlobalStats& g, Symbol x);

}  // namespace newsct
