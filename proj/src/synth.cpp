#include "newsct/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "newsct/rng.hpp"

namespace newsct {

std::vector<double> SynthTruth::transition_row(ItemIndex succ, int n) const {
    std::vector<double> row(static_cast<std::size_t>(n), noise / n);
    row[static_cast<std::size_t>(succ)] += 1.0 - noise;
    return row;
}

namespace {

std::uint64_t hash_context(const std::vector<ItemIndex>& ctx) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (ItemIndex x : ctx) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string padded(const char* prefix, int value, int width) {
    std::string digits = std::to_string(value);
    std::string out(prefix);
    out.append(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0');
    out += digits;
    return out;
}

}  // namespace

SynthResult synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
    if (!cfg.valid()) throw std::invalid_argument("synth_generate: invalid config");

    SynthResult result;
    SynthTruth& truth = result.truth;
    truth.order = cfg.markov_order;
    truth.noise = cfg.noise;

    const int n_items = cfg.items;
    const int width = static_cast<int>(std::to_string(std::max(cfg.items, cfg.sessions)).size());

    // true topic model
    Rng topic_rng(mix_seed(seed, 1));
    truth.phi.resize(cfg.topics, cfg.vocab);
    for (int z = 0; z < cfg.topics; ++z) {
        auto row = topic_rng.next_dirichlet(static_cast<std::size_t>(cfg.vocab), cfg.topic_word_concentration);
        for (int v = 0; v < cfg.vocab; ++v) truth.phi(z, v) = row[static_cast<std::size_t>(v)];
    }
    std::vector<std::vector<double>> phi_cdf(static_cast<std::size_t>(cfg.topics));
    for (int z = 0; z < cfg.topics; ++z) {
        auto& cdf = phi_cdf[static_cast<std::size_t>(z)];
        cdf.resize(static_cast<std::size_t>(cfg.vocab));
        double acc = 0.0;
        for (int v = 0; v < cfg.vocab; ++v) { acc += truth.phi(z, v); cdf[static_cast<std::size_t>(v)] = acc; }
    }

    // publication schedule
    const int upfront = cfg.publish_spread <= 0.0
                            ? n_items
                            : std::max(1, static_cast<int>(std::lround(n_items * (1.0 - cfg.publish_spread))));
    const std::int64_t click_gap = 3;
    const std::int64_t t0 = upfront + 10;
    const std::int64_t horizon =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(cfg.sessions * cfg.mean_session_length * click_gap));
    std::vector<std::int64_t> pub_time(static_cast<std::size_t>(n_items));
    for (int i = 0; i < upfront; ++i) pub_time[static_cast<std::size_t>(i)] = i;
    for (int i = upfront; i < n_items; ++i) {
        int j = i - upfront;
        int rem = n_items - upfront;
        pub_time[static_cast<std::size_t>(i)] = t0 + (j + 1) * horizon / (rem + 1);
    }

    // items with LDA-generated text
    truth.theta.resize(n_items, cfg.topics);
    for (int i = 0; i < n_items; ++i) {
        Rng rng(mix_seed(seed, 0x100000ull + static_cast<std::uint64_t>(i)));
        auto theta = rng.next_dirichlet(static_cast<std::size_t>(cfg.topics), cfg.doc_topic_concentration);
        for (int z = 0; z < cfg.topics; ++z) truth.theta(i, z) = theta[static_cast<std::size_t>(z)];
        std::vector<std::string> tokens;
        tokens.reserve(static_cast<std::size_t>(cfg.doc_length));
        for (int t = 0; t < cfg.doc_length; ++t) {
            auto z = rng.next_categorical(theta);
            auto w = rng.next_from_cdf(phi_cdf[z]);
            tokens.push_back(padded("w", static_cast<int>(w), width));
        }
        NewsItem item;
        item.id = padded("n", i, width);
        item.published_at = pub_time[static_cast<std::size_t>(i)];
        std::string* parts[3] = {&item.title, &item.summary, &item.body};
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            std::string& dst = *parts[t < 4 ? 0 : (t < 8 ? 1 : 2)];
            if (!dst.empty()) dst += ' ';
            dst += tokens[t];
        }
        ItemIndex idx = result.stream.corpus.add(std::move(item));
        result.stream.events.push_back(
            {Event::Kind::Publish, pub_time[static_cast<std::size_t>(idx)], idx, {}});
    }

    // static popularity over item index, used for successor draws
    std::vector<double> succ_cdf(static_cast<std::size_t>(n_items));
    {
        double acc = 0.0;
        for (int i = 0; i < n_items; ++i) {
            acc += 1.0 / std::pow(static_cast<double>(i + 1), cfg.successor_skew);
            succ_cdf[static_cast<std::size_t>(i)] = acc;
        }
    }

    // recency-weighted popularity over the first `a` published items, cached per a
    std::vector<double> pop_cdf;
    int pop_cdf_size = 0;
    auto popularity_cdf = [&](int a) -> const std::vector<double>& {
        if (a != pop_cdf_size) {
            pop_cdf.resize(static_cast<std::size_t>(a));
            double acc = 0.0;
            for (int pos = 0; pos < a; ++pos) {
                acc += 1.0 / std::pow(static_cast<double>(a - pos), cfg.popularity_skew);
                pop_cdf[static_cast<std::size_t>(pos)] = acc;
            }
            pop_cdf_size = a;
        }
        return pop_cdf;
    };

    // publication position -> item index (items are published in index order)
    auto published_count = [&](std::int64_t t) {
        return static_cast<int>(std::upper_bound(pub_time.begin(), pub_time.end(), t) - pub_time.begin());
    };

    auto successor_of = [&](const std::vector<ItemIndex>& ctx) {
        auto it = truth.successor.find(ctx);
        if (it != truth.successor.end()) return it->second;
        Rng rng(mix_seed(seed, hash_context(ctx) | 0x8000000000000000ull));
        ItemIndex s;
        do {
            s = static_cast<ItemIndex>(rng.next_from_cdf(succ_cdf));
        } while (n_items > 1 && s == ctx.back());
        truth.successor.emplace(ctx, s);
        return s;
    };

    for (int k = 0; k < cfg.sessions; ++k) {
        Rng rng(mix_seed(seed, 0x200000ull + static_cast<std::uint64_t>(k)));
        std::int64_t start = t0 + static_cast<std::int64_t>(k) * horizon / std::max(1, cfg.sessions);
        double p_stop = 1.0 / cfg.mean_session_length;
        int length = 1;
        while (length < 50 && rng.next_double() >= p_stop) ++length;

        std::string session_id = padded("s", k, width + 1);
        std::vector<ItemIndex> history;
        for (int j = 0; j < length; ++j) {
            std::int64_t t = start + j * click_gap;
            int a = published_count(t);
            if (a == 0) continue;
            ItemIndex item = -1;
            if (cfg.breaking_fraction > 0.0 && rng.next_double() < cfg.breaking_fraction) {
                int recent = std::min(10, a);
                item = static_cast<ItemIndex>(a - 1 - static_cast<int>(rng.next_below(static_cast<std::uint64_t>(recent))));
            } else if (cfg.markov_order > 0 && static_cast<int>(history.size()) >= cfg.markov_order) {
                std::vector<ItemIndex> ctx(history.end() - cfg.markov_order, history.end());
                ItemIndex dominant = successor_of(ctx);
                if (rng.next_double() < 1.0 - cfg.noise) {
                    if (dominant < a) item = dominant;
                } else {
                    ItemIndex s = static_cast<ItemIndex>(rng.next_below(static_cast<std::uint64_t>(n_items)));
                    if (s < a) item = s;
                }
            }
            if (item < 0) item = static_cast<ItemIndex>(rng.next_from_cdf(popularity_cdf(a)));
            history.push_back(item);
            result.stream.events.push_back({Event::Kind::Click, t, item, session_id});
        }
    }

    std::stable_sort(result.stream.events.begin(), result.stream.events.end(),
                     [](const Event& a, const Event& b) {
                         if (a.at != b.at) return a.at < b.at;
                         return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     });
    return result;
}

}  // namespace newsct
