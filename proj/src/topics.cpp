#include "newsct/topics.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace newsct {

std::vector<std::string> tokenize_text(const std::string& text,
                                       const std::unordered_set<std::string>& stopwords) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords.count(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

std::pair<std::vector<TokenizedDoc>, Vocabulary> tokenize_corpus(
    const Corpus& corpus, const std::unordered_set<std::string>& stopwords) {
    std::vector<std::vector<std::string>> raw(corpus.items.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < corpus.items.size(); ++i) {
        const NewsItem& item = corpus.items[i];
        std::string text = item.title;
        text += ' ';
        text += item.summary;
        text += ' ';
        text += item.body;
        raw[i] = tokenize_text(text, stopwords);
        seen.insert(raw[i].begin(), raw[i].end());
    }
    Vocabulary vocab;
    vocab.words.assign(seen.begin(), seen.end());
    for (int v = 0; v < vocab.size(); ++v) vocab.index.emplace(vocab.words[static_cast<std::size_t>(v)], v);

    std::vector<TokenizedDoc> docs(corpus.items.size());
    for (std::size_t i = 0; i < corpus.items.size(); ++i) {
        docs[i].item = static_cast<ItemIndex>(i);
        docs[i].tokens.reserve(raw[i].size());
        for (const auto& w : raw[i]) docs[i].tokens.push_back(vocab.find(w));
    }
    return {std::move(docs), std::move(vocab)};
}

std::unordered_set<std::string> default_stopwords() {
    return {"a",    "an",  "and",  "are", "as",   "at",   "be",   "by",   "for", "from",
            "has",  "he",  "in",   "is",  "it",   "its",  "of",   "on",   "she", "that",
            "the",  "to",  "was",  "were", "will", "with", "this", "but",  "not", "or",
            "they", "we",  "you",  "his",  "her",  "have", "had",  "been", "their"};
}

std::unordered_set<std::string> load_stopwords(std::istream& in) {
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

LdaSampler::LdaSampler(std::span<const TokenizedDoc> docs, int n_items, int vocab_size, int Z,
                       double alpha, double beta, std::uint64_t seed)
    : Z_(Z),
      V_(vocab_size),
      n_items_(n_items),
      alpha_(alpha),
      beta_(beta),
      doc_tokens_(static_cast<std::size_t>(n_items)),
      assignments_(static_cast<std::size_t>(n_items)),
      rng_(seed) {
    topic_word_ = Eigen::MatrixXi::Zero(Z_, V_);
    item_topic_ = Eigen::MatrixXi::Zero(n_items_, Z_);
    topic_total_ = Eigen::VectorXi::Zero(Z_);
    for (const TokenizedDoc& d : docs) {
        if (d.item < 0 || d.item >= n_items) continue;
        doc_tokens_[static_cast<std::size_t>(d.item)] = d.tokens;
    }
    for (int d = 0; d < n_items_; ++d) {
        auto& zs = assignments_[static_cast<std::size_t>(d)];
        zs.resize(doc_tokens_[static_cast<std::size_t>(d)].size());
        for (std::size_t i = 0; i < zs.size(); ++i) {
            int z = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(Z_)));
            int w = doc_tokens_[static_cast<std::size_t>(d)][i];
            zs[i] = z;
            ++topic_word_(z, w);
            ++item_topic_(d, z);
            ++topic_total_(z);
        }
    }
}

void LdaSampler::sweep() {
    std::vector<double> p(static_cast<std::size_t>(Z_));
    const double vbeta = V_ * beta_;
    for (int d = 0; d < n_items_; ++d) {
        const auto& words = doc_tokens_[static_cast<std::size_t>(d)];
        auto& zs = assignments_[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < words.size(); ++i) {
            int w = words[i];
            int z = zs[i];
            --topic_word_(z, w);
            --item_topic_(d, z);
            --topic_total_(z);
            for (int j = 0; j < Z_; ++j) {
                p[static_cast<std::size_t>(j)] = (topic_word_(j, w) + beta_) / (topic_total_(j) + vbeta) *
                                                 (item_topic_(d, j) + alpha_);
            }
            z = static_cast<int>(rng_.next_categorical(p));
            zs[i] = z;
            ++topic_word_(z, w);
            ++item_topic_(d, z);
            ++topic_total_(z);
        }
    }
}

bool LdaSampler::counts_consistent() const {
    Eigen::MatrixXi tw = Eigen::MatrixXi::Zero(Z_, V_);
    Eigen::MatrixXi it = Eigen::MatrixXi::Zero(n_items_, Z_);
    Eigen::VectorXi tt = Eigen::VectorXi::Zero(Z_);
    for (int d = 0; d < n_items_; ++d) {
        const auto& words = doc_tokens_[static_cast<std::size_t>(d)];
        const auto& zs = assignments_[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < words.size(); ++i) {
            ++tw(zs[i], words[i]);
            ++it(d, zs[i]);
            ++tt(zs[i]);
        }
    }
    return tw == topic_word_ && it == item_topic_ && tt == topic_total_;
}

TopicModel LdaSampler::estimate() const {
    TopicModel model;
    model.Z = Z_;
    model.alpha = alpha_;
    model.beta = beta_;
    model.phi.resize(Z_, V_);
    model.theta.resize(n_items_, Z_);
    for (int j = 0; j < Z_; ++j)
        for (int w = 0; w < V_; ++w)
            model.phi(j, w) = (topic_word_(j, w) + beta_) / (topic_total_(j) + V_ * beta_);
    for (int d = 0; d < n_items_; ++d) {
        int nd = static_cast<int>(doc_tokens_[static_cast<std::size_t>(d)].size());
        if (nd == 0) {
            model.theta.row(d).setConstant(1.0 / Z_);  // empty document
            continue;
        }
        for (int j = 0; j < Z_; ++j)
            model.theta(d, j) = (item_topic_(d, j) + alpha_) / (nd + Z_ * alpha_);
    }
    return model;
}

TopicModel lda_fit(std::span<const TokenizedDoc> docs, int n_items, int vocab_size, int Z,
                   double alpha, double beta, int iterations, std::uint64_t seed) {
    if (Z < 1 || iterations < 1 || vocab_size < 1 || n_items < 1)
        throw std::invalid_argument("lda_fit: bad configuration");
    if (alpha <= 0.0) alpha = 50.0 / Z;
    if (beta <= 0.0) beta = 0.01;
    LdaSampler sampler(docs, n_items, vocab_size, Z, alpha, beta, seed);
    for (int i = 0; i < iterations; ++i) sampler.sweep();
    return sampler.estimate();
}

double word_prob(const TopicModel& model, ItemIndex item, int word) {
    return model.theta.row(item).dot(model.phi.col(word));
}

int top_topic(const Eigen::Ref<const Eigen::VectorXd>& theta) {
    int best = 0;
    for (int j = 1; j < theta.size(); ++j)
        if (theta(j) > theta(best)) best = j;
    return best;
}

void save_topic_model(std::ostream& out, const TopicModel& model, const Corpus& corpus) {
    nlohmann::json j;
    j["Z"] = model.Z;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["vocab"] = model.vocab.words;
    auto& phi = j["phi"] = nlohmann::json::array();
    for (int z = 0; z < model.Z; ++z) {
        std::vector<double> row(static_cast<std::size_t>(model.phi.cols()));
        for (int v = 0; v < model.phi.cols(); ++v) row[static_cast<std::size_t>(v)] = model.phi(z, v);
        phi.push_back(row);
    }
    auto& theta = j["theta"] = nlohmann::json::object();
    for (std::size_t i = 0; i < corpus.items.size(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(model.Z));
        for (int z = 0; z < model.Z; ++z) row[static_cast<std::size_t>(z)] = model.theta(static_cast<int>(i), z);
        theta[corpus.items[i].id] = row;
    }
    out << j.dump();
}

TopicModel load_topic_model(std::istream& in, const Corpus& corpus) {
    nlohmann::json j = nlohmann::json::parse(in);
    TopicModel model;
    model.Z = j.at("Z").get<int>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.vocab.words = j.at("vocab").get<std::vector<std::string>>();
    for (int v = 0; v < model.vocab.size(); ++v)
        model.vocab.index.emplace(model.vocab.words[static_cast<std::size_t>(v)], v);
    const auto& phi = j.at("phi");
    model.phi.resize(model.Z, model.vocab.size());
    for (int z = 0; z < model.Z; ++z) {
        auto row = phi.at(static_cast<std::size_t>(z)).get<std::vector<double>>();
        for (int v = 0; v < model.vocab.size(); ++v) model.phi(z, v) = row[static_cast<std::size_t>(v)];
    }
    model.theta = Eigen::MatrixXd::Constant(static_cast<int>(corpus.items.size()), model.Z, 1.0 / model.Z);
    for (const auto& [id, row] : j.at("theta").items()) {
        ItemIndex idx = corpus.find(id);
        if (idx < 0) continue;
        auto vals = row.get<std::vector<double>>();
        for (int z = 0; z < model.Z; ++z) model.theta(idx, z) = vals[static_cast<std::size_t>(z)];
    }
    return model;
}

}  // namespace newsct
