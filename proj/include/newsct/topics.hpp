#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "newsct/corpus.hpp"
#include "newsct/rng.hpp"

namespace newsct {

struct TokenizedDoc {
    ItemIndex item = -1;
    std::vector<int> tokens;  // vocabulary indices
};

struct Vocabulary {
    std::vector<std::string> words;  // sorted, index = position
    std::unordered_map<std::string, int> index;

    int find(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(words.size()); }
};

// Lowercases, splits on non-alphanumerics, drops stopwords. Tokens are returned
// as raw strings; vocabulary indexing happens at the corpus level.
std::vector<std::string> tokenize_text(const std::string& text,
                                       const std::unordered_set<std::string>& stopwords);

// Concatenates title, summary and body of every item, builds a sorted
// vocabulary over the whole corpus and indexes each document against it.
std::pair<std::vector<TokenizedDoc>, Vocabulary> tokenize_corpus(
    const Corpus& corpus, const std::unordered_set<std::string>& stopwords);

std::unordered_set<std::string> default_stopwords();
std::unordered_set<std::string> load_stopwords(std::istream& in);  // one word per line

struct TopicModel {
    int Z = 0;
    double alpha = 0.0, beta = 0.0;
    Eigen::MatrixXd phi;    // Z x V, each row a word distribution
    Eigen::MatrixXd theta;  // items x Z, each row a topic distribution
    Vocabulary vocab;
};

// Collapsed Gibbs sampler, kept as a class so tests can step it and audit the
// count tables against a recount of the assignments.
class LdaSampler {
public:
    LdaSampler(std::span<const TokenizedDoc> docs, int n_items, int vocab_size, int Z,
               double alpha, double beta, std::uint64_t seed);

    void sweep();
    bool counts_consistent() const;
    TopicModel estimate() const;

private:
    int Z_, V_, n_items_;
    double alpha_, beta_;
    std::vector<std::vector<int>> doc_tokens_;       // per item
    std::vector<std::vector<int>> assignments_;      // topic of each token
    Eigen::MatrixXi topic_word_;                     // Z x V
    Eigen::MatrixXi item_topic_;                     // items x Z
    Eigen::VectorXi topic_total_;                    // tokens per topic
    Rng rng_;
};

// alpha <= 0 or beta <= 0 pick the defaults alpha = 50/Z, beta = 0.01.
// Throws std::invalid_argument on Z < 1, iterations < 1 or an empty vocabulary.
TopicModel lda_fit(std::span<const TokenizedDoc> docs, int n_items, int vocab_size, int Z,
                   double alpha, double beta, int iterations, std::uint64_t seed);

// P(word | item) = sum_j phi[j][word] * theta[item][j]
double word_prob(const TopicModel& model, ItemIndex item, int word);

// argmax with ties broken by lowest index
int top_topic(const Eigen::Ref<const Eigen::VectorXd>& theta);

void save_topic_model(std::ostream& out, const TopicModel& model, const Corpus& corpus);
TopicModel load_topic_model(std::istream& in, const Corpus& corpus);

}  // namespace newsct
