#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "newsct/corpus.hpp"

namespace newsct {

// Ground-truth generator for benchmark click logs. Items carry LDA-generated
// text from known topics; sessions follow a known k-order Markov process so
// that recommender accuracy has a computable ceiling.
struct SynthConfig {
    int items = 50;
    int sessions = 1000;
    int vocab = 100;
    int topics = 5;
    int markov_order = 2;

    // popularity draw: weight of an item is 1/(recency_rank+1)^popularity_skew
    double popularity_skew = 1.0;
    // probability a click goes to one of the most recently published items
    double breaking_fraction = 0.0;
    // off-successor mass of each transition row: row = (1-noise)*delta + noise*uniform
    double noise = 0.05;
    // zipf exponent for drawing the dominant successor of a context (0 = uniform)
    double successor_skew = 0.0;
    // fraction of the click horizon over which publications are spread
    // (0 = everything published before the first click)
    double publish_spread = 0.0;

    double mean_session_length = 4.0;
    int doc_length = 80;
    double doc_topic_concentration = 0.1;
    double topic_word_concentration = 0.05;

    bool valid() const {
        return items > 0 && sessions >= 0 && vocab > 0 && topics > 0 && markov_order >= 0 &&
               noise >= 0.0 && noise <= 1.0 && breaking_fraction >= 0.0 && breaking_fraction <= 1.0 &&
               publish_spread >= 0.0 && publish_spread <= 1.0 && mean_session_length >= 1.0;
    }
};

struct SynthTruth {
    Eigen::MatrixXd phi;    // topics x vocab, true topic-word rows
    Eigen::MatrixXd theta;  // items x topics, true item-topic rows
    // dominant successor of each context actually visited during generation
    std::map<std::vector<ItemIndex>, ItemIndex> successor;
    int order = 0;
    double noise = 0.0;

    // full transition row implied by (successor, noise) over `n` items
    std::vector<double> transition_row(ItemIndex succ, int n) const;
};

struct SynthResult {
    EventStream stream;
    SynthTruth truth;
};

// Pure function of (config, seed). Throws std::invalid_argument on a bad config.
SynthResult synth_generate(const SynthConfig& config, std::uint64_t seed);

}  // namespace newsct
